//! Distinguished classes and the Yoneda product on
//! `∧^*(V ⊗ ρ) ⊗ Hom(U, W)`.
//!
//! Composition `x ∘ y` of `x ∈ W(n; k, a, b)` and `y ∈ W(n; l, a', b')` needs
//! `a = b'`: the `t`-th leg `e_i` of `y` is paired with the `t`-th dual leg
//! `e'_j` of `x`. The result lies in `W(n; k + l, a', b)`, keeps the dual legs
//! of `y` and the legs of `x`, and its wedge part is `(wedge of y) ∧ (wedge of
//! x)` multiplied by `-1` for every contracted pair. This is the standard
//! product after the sign change `e'_j ↦ -e'_j` on dual legs; ranks do not
//! depend on the choice.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, rat, rat_frac, IndexVector, Rational, SparseMatrix};
use crate::repspace::{
    act, sort_wedge, InvariantBasis, InvariantCache, Letter, Monomial, RawTerm, SpaceDescriptor, SparseVector,
};
use crate::symgroup::generators;

/// An element `α u + β v` of `V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VVector {
    pub u: Rational,
    pub v: Rational,
}

impl VVector {
    pub fn u() -> Self {
        Self {
            u: Rational::one(),
            v: Rational::zero(),
        }
    }

    pub fn v() -> Self {
        Self {
            u: Rational::zero(),
            v: Rational::one(),
        }
    }

    pub fn zero() -> Self {
        Self {
            u: Rational::zero(),
            v: Rational::zero(),
        }
    }

    pub fn of(letter: Letter) -> Self {
        match letter {
            Letter::U => Self::u(),
            Letter::V => Self::v(),
        }
    }

    fn components(&self) -> [(Letter, &Rational); 2] {
        [(Letter::U, &self.u), (Letter::V, &self.v)]
    }
}

impl fmt::Display for VVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.u.is_zero(), self.v.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) if self.u.is_one() => write!(f, "u"),
            (true, false) if self.v.is_one() => write!(f, "v"),
            _ => write!(f, "{}u+{}v", self.u, self.v),
        }
    }
}

/// The four families of classes the verification uses:
/// - `theta(w) = Σ_{i=1}^{n+1} w e_i ⊗ e_i` in `W(n; 1, 0, 1)`,
/// - `omega = Σ_{i=1}^{n+1} u e_i ∧ v e_i` in `W(n; 2, 0, 0)`,
/// - `phi(w) = Σ_{i=1}^{n+1} w e_i ⊗ e'_i` in `W(n; 1, 1, 0)`,
/// - `xi = Σ_{i=1}^{n+1} u e_i ⊗ e'_i ⊗ e_i` in `W(n; 1, 1, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassName {
    Theta(VVector),
    Omega,
    Phi(VVector),
    Xi,
}

impl fmt::Display for ClassName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassName::Theta(w) => write!(f, "theta({w})"),
            ClassName::Omega => write!(f, "omega"),
            ClassName::Phi(w) => write!(f, "phi({w})"),
            ClassName::Xi => write!(f, "xi"),
        }
    }
}

impl FromStr for ClassName {
    type Err = Error;

    /// Accepts `theta(u)`, `theta(v)`, `theta(0)`, `omega`, `phi(u)`,
    /// `phi(v)`, `phi(0)`, `xi`; `theta_v` style is also accepted.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let arg = |prefix: &str| -> Option<VVector> {
            let rest = t.strip_prefix(prefix)?;
            let inner = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .or_else(|| rest.strip_prefix('_'))?;
            match inner {
                "u" => Some(VVector::u()),
                "v" => Some(VVector::v()),
                "0" => Some(VVector::zero()),
                _ => None,
            }
        };
        if t == "omega" {
            Ok(ClassName::Omega)
        } else if t == "xi" {
            Ok(ClassName::Xi)
        } else if let Some(w) = arg("theta") {
            Ok(ClassName::Theta(w))
        } else if let Some(w) = arg("phi") {
            Ok(ClassName::Phi(w))
        } else {
            Err(Error::UnknownClass(s.to_string()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistinguishedClass {
    pub name: ClassName,
    pub value: SparseVector,
}

impl DistinguishedClass {
    pub fn space(&self) -> SpaceDescriptor {
        self.value.space()
    }

    /// The same class transported along `u ↔ v`.
    pub fn swap_letters(&self) -> Self {
        Self {
            name: self.name.clone(),
            value: self.value.swap_letters(),
        }
    }
}

fn assert_invariant(label: &str, x: &SparseVector) -> Result<()> {
    for sigma in generators(x.space().n)? {
        if &act(&sigma, x)? != x {
            return Err(Error::NotInvariant(label.to_string()));
        }
    }
    Ok(())
}

pub fn build_class(name: ClassName, n: usize) -> Result<DistinguishedClass> {
    if n < 2 {
        return Err(Error::ClassNeedsN(name.to_string()));
    }
    let idx = 1..=n + 1;
    let (space, terms): (SpaceDescriptor, Vec<(Rational, RawTerm)>) = match &name {
        ClassName::Theta(w) => (
            SpaceDescriptor::new(n, 1, 0, 1),
            w.components()
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .flat_map(|(l, c)| {
                    idx.clone().map(move |i| {
                        (
                            c.clone(),
                            RawTerm {
                                wedge: vec![(l, i)],
                                dual_legs: vec![],
                                legs: vec![i],
                            },
                        )
                    })
                })
                .collect(),
        ),
        ClassName::Omega => (
            SpaceDescriptor::new(n, 2, 0, 0),
            idx.map(|i| {
                (
                    Rational::one(),
                    RawTerm {
                        wedge: vec![(Letter::U, i), (Letter::V, i)],
                        dual_legs: vec![],
                        legs: vec![],
                    },
                )
            })
            .collect(),
        ),
        ClassName::Phi(w) => (
            SpaceDescriptor::new(n, 1, 1, 0),
            w.components()
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .flat_map(|(l, c)| {
                    idx.clone().map(move |i| {
                        (
                            c.clone(),
                            RawTerm {
                                wedge: vec![(l, i)],
                                dual_legs: vec![i],
                                legs: vec![],
                            },
                        )
                    })
                })
                .collect(),
        ),
        ClassName::Xi => (
            SpaceDescriptor::new(n, 1, 1, 1),
            idx.map(|i| {
                (
                    Rational::one(),
                    RawTerm {
                        wedge: vec![(Letter::U, i)],
                        dual_legs: vec![i],
                        legs: vec![i],
                    },
                )
            })
            .collect(),
        ),
    };
    let value = SparseVector::from_raw_terms(space, terms.iter().map(|(c, t)| (c.clone(), t)));
    assert_invariant(&name.to_string(), &value)?;
    Ok(DistinguishedClass { name, value })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairingKind {
    /// `e'_j(e_i) = δ_ij` on the stored bases, extended linearly.
    Literal,
    /// `e'_j(e_i) = δ_ij - 1/(n+1)` for all `i, j` in `1..=n+1`.
    Invariant,
}

impl fmt::Display for PairingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairingKind::Literal => "literal",
            PairingKind::Invariant => "invariant",
        })
    }
}

impl FromStr for PairingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(PairingKind::Literal),
            "invariant" => Ok(PairingKind::Invariant),
            other => Err(Error::Config(format!("unknown pairing `{other}`"))),
        }
    }
}

/// Values `e'_j(e_i)` for `i, j` in `1..=n+1`.
///
/// The literal table is the one obtained by taking `e'_1, ..., e'_n` dual to
/// `e_1, ..., e_n`: `δ_ij` for `i, j <= n`, `-1` when exactly one index is
/// `n+1` and `n` at `(n+1, n+1)`. It is not preserved by
/// `σ·e'_j = e'_{σ(j)}`, so maps built from it need not send invariants to
/// invariants. The invariant table is the unique (up to scale) pairing that
/// is preserved, normalised as the restriction of the standard inner product
/// of `C^{n+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingTable {
    pub n: usize,
    pub kind: PairingKind,
    values: Vec<Vec<Rational>>,
}

impl PairingTable {
    pub fn new(kind: PairingKind, n: usize) -> Self {
        match kind {
            PairingKind::Literal => Self::literal(n),
            PairingKind::Invariant => Self::invariant(n),
        }
    }

    pub fn literal(n: usize) -> Self {
        let m = n + 1;
        let values = (1..=m)
            .map(|j| {
                (1..=m)
                    .map(|i| match (j == m, i == m) {
                        (false, false) => rat(i64::from(i == j)),
                        (true, true) => rat(n as i64),
                        _ => rat(-1),
                    })
                    .collect()
            })
            .collect();
        Self {
            n,
            kind: PairingKind::Literal,
            values,
        }
    }

    pub fn invariant(n: usize) -> Self {
        let m = n + 1;
        let values = (1..=m)
            .map(|j| {
                (1..=m)
                    .map(|i| rat(i64::from(i == j)) - rat_frac(1, m as i64))
                    .collect()
            })
            .collect();
        Self {
            n,
            kind: PairingKind::Invariant,
            values,
        }
    }

    /// `e'_dual(e_leg)`, both 1-based in `1..=n+1`.
    pub fn value(&self, dual: usize, leg: usize) -> &Rational {
        &self.values[dual - 1][leg - 1]
    }

    /// Whether `e'_{σ(j)}(e_{σ(i)}) = e'_j(e_i)` for the group generators.
    pub fn is_equivariant(&self) -> bool {
        let m = self.n + 1;
        generators(self.n)
            .unwrap()
            .iter()
            .all(|s| (1..=m).all(|j| (1..=m).all(|i| self.value(s.apply(j), s.apply(i)) == self.value(j, i))))
    }
}

/// The Yoneda product `x ∘ y` (see the module documentation for conventions).
pub fn compose(x: &SparseVector, y: &SparseVector, pairing: &PairingTable) -> Result<SparseVector> {
    let (sx, sy) = (x.space(), y.space());
    if sx.n != sy.n || pairing.n != sx.n {
        return Err(Error::SpaceMismatch {
            left: sx.to_string(),
            right: sy.to_string(),
        });
    }
    if sx.a != sy.b {
        return Err(Error::IncompatibleLegs {
            left_dual: sx.a,
            right_legs: sy.b,
        });
    }
    let target = SpaceDescriptor::new(sx.n, sx.k + sy.k, sy.a, sx.b);
    if target.k > 2 * sx.n {
        return Ok(SparseVector::zero(target));
    }
    let contraction_sign = if sx.a % 2 == 0 { 1 } else { -1 };
    let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
    for (my, cy) in y.terms() {
        for (mx, cx) in x.terms() {
            let mut factor = cx * cy;
            for (&d, &e) in mx.dual_legs().iter().zip(my.legs()) {
                factor *= pairing.value(d as usize, e as usize);
            }
            if factor.is_zero() {
                continue;
            }
            let wedge = my.wedge().iter().chain(mx.wedge()).copied().collect();
            let Some((sign, wedge)) = sort_wedge(wedge) else {
                continue;
            };
            if sign * contraction_sign < 0 {
                factor = -factor;
            }
            let m = Monomial::new(sx.n, wedge, my.dual_legs().to_vec(), mx.legs().to_vec())
                .expect("normal form is preserved");
            *acc.entry(m).or_insert_with(Rational::zero) += factor;
        }
    }
    Ok(SparseVector::from_terms(target, acc))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `x ↦ c ∘ x`
    Push,
    /// `x ↦ x ∘ c`
    Pull,
}

/// Space receiving `c ∘ x` (push) or `x ∘ c` (pull) for `x` in `source`.
pub fn target_space(c: SpaceDescriptor, side: Side, source: SpaceDescriptor) -> Result<SpaceDescriptor> {
    let (left, right) = match side {
        Side::Push => (c, source),
        Side::Pull => (source, c),
    };
    if left.a != right.b {
        return Err(Error::IncompatibleLegs {
            left_dual: left.a,
            right_legs: right.b,
        });
    }
    Ok(SpaceDescriptor::new(c.n, c.k + source.k, right.a, left.b))
}

/// Matrix of a Yoneda map restricted to invariant bases: column `j` holds the
/// coordinates of the image of `source.vectors[j]` in `target`.
#[derive(Clone, Debug)]
pub struct MapOnInvariants {
    pub source: Arc<InvariantBasis>,
    pub target: Arc<InvariantBasis>,
    pub matrix: SparseMatrix,
    pub rank: usize,
}

pub fn map_on_invariants(
    c: &DistinguishedClass,
    side: Side,
    source: SpaceDescriptor,
    pairing: &PairingTable,
    cache: &InvariantCache,
) -> Result<MapOnInvariants> {
    let target_desc = target_space(c.space(), side, source)?;
    let src = cache.get(source);
    let tgt = cache.get(target_desc);
    let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); tgt.len()];
    for (j, x) in src.vectors.iter().enumerate() {
        let image = match side {
            Side::Push => compose(&c.value, x, pairing)?,
            Side::Pull => compose(x, &c.value, pairing)?,
        };
        let coords = tgt.coordinates(&image).map_err(|e| match e {
            Error::ResidualNonzero { target, .. } => Error::ResidualNonzero { index: j, target },
            other => other,
        })?;
        for (i, v) in coords.into_iter().enumerate() {
            if !v.is_zero() {
                rows[i].push((j, v));
            }
        }
    }
    let matrix = SparseMatrix::from_rows(src.len(), rows.into_iter().map(IndexVector::from_pairs).collect());
    let rank = linalg::rank(&matrix);
    Ok(MapOnInvariants {
        source: src,
        target: tgt,
        matrix,
        rank,
    })
}

/// Coefficient of the monomial written as `text` (report grammar) in `x`.
pub fn coefficient(x: &SparseVector, text: &str) -> Result<Rational> {
    let m = Monomial::parse(text, x.space().n)?;
    if m.space(x.space().n) != x.space() {
        return Err(Error::SpaceMismatch {
            left: m.space(x.space().n).to_string(),
            right: x.space().to_string(),
        });
    }
    Ok(x.coefficient(&m))
}
