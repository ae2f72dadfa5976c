//! The spaces `W(n; k, a, b) = ∧^k(V ⊗ ρ) ⊗ (ρ^∨)^{⊗a} ⊗ ρ^{⊗b}` with their
//! `S_{n+1}` action, and exact bases of their invariant subspaces.
//!
//! `V` is two-dimensional with basis `{u, v}` and carries no group action.
//! `ρ` is the standard representation with basis `e_1, ..., e_n`; the symbol
//! `e_{n+1}` stands for `-(e_1 + ... + e_n)` and is expanded as soon as it
//! appears, so no stored monomial ever mentions index `n + 1`. The dual legs
//! `e'_i` follow the same rule, `σ·e'_i = e'_{σ(i)}` with
//! `e'_{n+1} = -(e'_1 + ... + e'_n)`.
//!
//! Wedge generators are totally ordered with every `u`-generator before every
//! `v`-generator, each block by index. That order fixes all signs.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, IndexVector, Rational, SparseMatrix};
use crate::symgroup::{generators, Permutation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    U,
    V,
}

impl Letter {
    pub fn swapped(self) -> Letter {
        match self {
            Letter::U => Letter::V,
            Letter::V => Letter::U,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Letter::U => "u",
            Letter::V => "v",
        })
    }
}

/// A basis vector `u e_i` or `v e_i` of `V ⊗ ρ`, with `1 <= index <= n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub letter: Letter,
    pub index: u8,
}

impl Generator {
    pub fn new(letter: Letter, index: usize) -> Self {
        Self {
            letter,
            index: index as u8,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.letter, self.index)
    }
}

/// A basis element of `W(n; k, a, b)`: a strictly increasing wedge of `k`
/// generators, `a` dual legs `e'_j` and `b` legs `e_j`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    wedge: Vec<Generator>,
    dual_legs: Vec<u8>,
    legs: Vec<u8>,
}

impl Monomial {
    /// Builds a monomial in normal form. Fails if the wedge is not strictly
    /// increasing or an index is outside `1..=n`.
    pub fn new(n: usize, wedge: Vec<Generator>, dual_legs: Vec<u8>, legs: Vec<u8>) -> Result<Self> {
        let bad = |reason: String| Error::ParseMonomial {
            text: format!("{wedge:?}|{dual_legs:?}|{legs:?}"),
            reason,
        };
        if wedge.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("wedge factors must be strictly increasing".into()));
        }
        let in_range = |i: u8| (1..=n).contains(&(i as usize));
        if !wedge.iter().all(|g| in_range(g.index)) || !dual_legs.iter().chain(&legs).all(|&i| in_range(i)) {
            return Err(bad(format!("indices must lie in 1..={n}")));
        }
        Ok(Self { wedge, dual_legs, legs })
    }

    pub fn unit() -> Self {
        Self {
            wedge: Vec::new(),
            dual_legs: Vec::new(),
            legs: Vec::new(),
        }
    }

    pub fn wedge(&self) -> &[Generator] {
        &self.wedge
    }

    pub fn dual_legs(&self) -> &[u8] {
        &self.dual_legs
    }

    pub fn legs(&self) -> &[u8] {
        &self.legs
    }

    pub fn space(&self, n: usize) -> SpaceDescriptor {
        SpaceDescriptor::new(n, self.wedge.len(), self.dual_legs.len(), self.legs.len())
    }

    /// Parses the report grammar `u1^v1^v2|d1|e2`. The empty wedge is written
    /// `1`, e.g. `1|e1`. Dual legs (`d`) precede ordinary legs (`e`).
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let err = |reason: &str| Error::ParseMonomial {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let mut parts = text.trim().split('|');
        let wedge_part = parts.next().unwrap_or("");
        let mut wedge = Vec::new();
        if wedge_part != "1" {
            for tok in wedge_part.split('^') {
                let letter = match tok.chars().next() {
                    Some('u') => Letter::U,
                    Some('v') => Letter::V,
                    _ => return Err(err("wedge factors look like u3 or v1")),
                };
                let idx: usize = tok[1..].parse().map_err(|_| err("bad wedge index"))?;
                if idx == 0 || idx > 255 {
                    return Err(err("bad wedge index"));
                }
                wedge.push(Generator::new(letter, idx));
            }
        }
        let mut dual_legs = Vec::new();
        let mut legs = Vec::new();
        for tok in parts {
            let idx: usize = tok.get(1..).unwrap_or("").parse().map_err(|_| err("bad leg index"))?;
            if idx == 0 || idx > 255 {
                return Err(err("bad leg index"));
            }
            match tok.chars().next() {
                Some('d') if legs.is_empty() => dual_legs.push(idx as u8),
                Some('d') => return Err(err("dual legs must precede ordinary legs")),
                Some('e') => legs.push(idx as u8),
                _ => return Err(err("legs look like d1 or e2")),
            }
        }
        Self::new(n, wedge, dual_legs, legs).map_err(|e| match e {
            Error::ParseMonomial { reason, .. } => err(&reason),
            other => other,
        })
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.wedge.is_empty() {
            write!(f, "1")?;
        }
        for (k, g) in self.wedge.iter().enumerate() {
            if k > 0 {
                write!(f, "^")?;
            }
            write!(f, "{g}")?;
        }
        for d in &self.dual_legs {
            write!(f, "|d{d}")?;
        }
        for e in &self.legs {
            write!(f, "|e{e}")?;
        }
        Ok(())
    }
}

/// Names `W(n; k, a, b)`: `S_{n+1}` acting, wedge degree `k`, `a` copies of
/// `ρ^∨` and `b` copies of `ρ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    pub n: usize,
    pub k: usize,
    pub a: usize,
    pub b: usize,
}

impl SpaceDescriptor {
    pub const fn new(n: usize, k: usize, a: usize, b: usize) -> Self {
        Self { n, k, a, b }
    }

    /// Only `a, b <= 1` is exercised by the verification paths.
    pub fn is_validated(&self) -> bool {
        self.a <= 1 && self.b <= 1
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W(n={};k={},a={},b={})", self.n, self.k, self.a, self.b)
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `C(2n, k) · n^(a+b)`.
pub fn space_dim(s: SpaceDescriptor) -> usize {
    binomial(2 * s.n, s.k) * s.n.pow((s.a + s.b) as u32)
}

/// All basis monomials of `s` in increasing order.
pub fn basis(s: SpaceDescriptor) -> Vec<Monomial> {
    let gens: Vec<Generator> = [Letter::U, Letter::V]
        .into_iter()
        .flat_map(|l| (1..=s.n).map(move |i| Generator::new(l, i)))
        .collect();
    let mut wedges = Vec::new();
    combinations(&gens, s.k, 0, &mut Vec::new(), &mut wedges);
    let duals = tuples(s.n, s.a);
    let legs = tuples(s.n, s.b);
    let mut out = Vec::with_capacity(space_dim(s));
    for w in &wedges {
        for d in &duals {
            for l in &legs {
                out.push(Monomial {
                    wedge: w.clone(),
                    dual_legs: d.clone(),
                    legs: l.clone(),
                });
            }
        }
    }
    out.sort();
    out
}

fn combinations(items: &[Generator], k: usize, start: usize, cur: &mut Vec<Generator>, out: &mut Vec<Vec<Generator>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..items.len() {
        if items.len() - i < k - cur.len() {
            break;
        }
        cur.push(items[i]);
        combinations(items, k, i + 1, cur, out);
        cur.pop();
    }
}

fn tuples(n: usize, len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..=n as u8).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// Inserts `g` into the sorted wedge `w`. Returns the sign picked up by moving
/// `g` from the right end into place, or `None` if `g` is already present.
#[inline]
pub(crate) fn wedge_insert(w: &mut Vec<Generator>, g: Generator) -> Option<i64> {
    match w.binary_search(&g) {
        Ok(_) => None,
        Err(pos) => {
            let moves = w.len() - pos;
            w.insert(pos, g);
            Some(if moves.is_multiple_of(2) { 1 } else { -1 })
        }
    }
}

/// Sorts an arbitrary list of generators, returning the permutation sign, or
/// `None` when a generator repeats.
pub(crate) fn sort_wedge(mut w: Vec<Generator>) -> Option<(i64, Vec<Generator>)> {
    let mut sign = 1;
    // insertion sort, counting transpositions
    for i in 1..w.len() {
        let mut j = i;
        while j > 0 && w[j - 1] > w[j] {
            w.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && w[j - 1] == w[j] {
            return None;
        }
    }
    if w.windows(2).any(|p| p[0] == p[1]) {
        return None;
    }
    Some((sign, w))
}

/// A factor index in `1..=n+1` expanded into the stored basis.
fn expand_index(n: usize, i: usize) -> Vec<(u8, i64)> {
    if i <= n {
        vec![(i as u8, 1)]
    } else {
        debug_assert_eq!(i, n + 1);
        (1..=n as u8).map(|j| (j, -1)).collect()
    }
}

fn expand_legs(n: usize, raw: &[usize]) -> BTreeMap<Vec<u8>, i64> {
    let mut acc: BTreeMap<Vec<u8>, i64> = BTreeMap::from([(Vec::new(), 1)]);
    for &i in raw {
        let choices = expand_index(n, i);
        let mut next: BTreeMap<Vec<u8>, i64> = BTreeMap::new();
        for (legs, c) in &acc {
            for &(j, t) in &choices {
                let mut l = legs.clone();
                l.push(j);
                *next.entry(l).or_insert(0) += c * t;
            }
        }
        acc = next;
    }
    acc
}

fn expand_wedge(n: usize, raw: &[(Letter, usize)]) -> BTreeMap<Vec<Generator>, i64> {
    let mut acc: BTreeMap<Vec<Generator>, i64> = BTreeMap::from([(Vec::new(), 1)]);
    for &(letter, i) in raw {
        let choices = expand_index(n, i);
        let mut next: BTreeMap<Vec<Generator>, i64> = BTreeMap::new();
        for (w, c) in &acc {
            for &(j, t) in &choices {
                let mut w2 = w.clone();
                if let Some(s) = wedge_insert(&mut w2, Generator::new(letter, j as usize)) {
                    *next.entry(w2).or_insert(0) += c * t * s;
                }
            }
        }
        next.retain(|_, c| *c != 0);
        acc = next;
    }
    acc
}

/// A product of factors whose indices may still equal `n + 1`, e.g. one
/// summand `u e_i ∧ v e_j ⊗ e'_i ⊗ e_j` of a defining sum. Wedge factors are
/// taken in the listed order.
#[derive(Clone, Debug)]
pub struct RawTerm {
    pub wedge: Vec<(Letter, usize)>,
    pub dual_legs: Vec<usize>,
    pub legs: Vec<usize>,
}

impl RawTerm {
    fn expand_into(&self, n: usize, coeff: &Rational, out: &mut BTreeMap<Monomial, Rational>) {
        let w = expand_wedge(n, &self.wedge);
        if w.is_empty() {
            return;
        }
        let d = expand_legs(n, &self.dual_legs);
        let l = expand_legs(n, &self.legs);
        for (wedge, cw) in &w {
            for (dual, cd) in &d {
                for (legs, cl) in &l {
                    let m = Monomial {
                        wedge: wedge.clone(),
                        dual_legs: dual.clone(),
                        legs: legs.clone(),
                    };
                    let c = coeff * Rational::from_integer((cw * cd * cl).into());
                    *out.entry(m).or_insert_with(Rational::zero) += c;
                }
            }
        }
    }
}

/// An exact linear combination of monomials of one space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseVector {
    space: SpaceDescriptor,
    terms: BTreeMap<Monomial, Rational>,
}

impl SparseVector {
    pub fn zero(space: SpaceDescriptor) -> Self {
        Self {
            space,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(space: SpaceDescriptor, m: Monomial) -> Self {
        assert_eq!(m.space(space.n), space, "monomial {m} does not belong to {space}");
        Self {
            space,
            terms: BTreeMap::from([(m, Rational::one())]),
        }
    }

    /// The empty monomial in `W(n; 0, 0, 0)`.
    pub fn unit(n: usize) -> Self {
        Self::monomial(SpaceDescriptor::new(n, 0, 0, 0), Monomial::unit())
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(space: SpaceDescriptor, terms: I) -> Self {
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m, c) in terms {
            debug_assert_eq!(m.space(space.n), space);
            *acc.entry(m).or_insert_with(Rational::zero) += c;
        }
        acc.retain(|_, c| !c.is_zero());
        Self { space, terms: acc }
    }

    /// Sums `coeff · term` over raw terms, expanding every index `n + 1`.
    pub fn from_raw_terms<'a, I>(space: SpaceDescriptor, terms: I) -> Self
    where
        I: IntoIterator<Item = (Rational, &'a RawTerm)>,
    {
        let mut acc = BTreeMap::new();
        for (c, t) in terms {
            debug_assert_eq!(
                (t.wedge.len(), t.dual_legs.len(), t.legs.len()),
                (space.k, space.a, space.b)
            );
            t.expand_into(space.n, &c, &mut acc);
        }
        acc.retain(|_, c: &mut Rational| !c.is_zero());
        Self { space, terms: acc }
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next()
    }

    fn check_same_space(&self, other: &SparseVector) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch {
                left: self.space.to_string(),
                right: other.space.to_string(),
            });
        }
        Ok(())
    }

    /// `self + factor · other`
    pub fn add_scaled(&self, factor: &Rational, other: &SparseVector) -> Result<SparseVector> {
        self.check_same_space(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            *terms.entry(m.clone()).or_insert_with(Rational::zero) += c * factor;
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(Self {
            space: self.space,
            terms,
        })
    }

    pub fn add(&self, other: &SparseVector) -> Result<SparseVector> {
        self.add_scaled(&Rational::one(), other)
    }

    pub fn sub(&self, other: &SparseVector) -> Result<SparseVector> {
        self.add_scaled(&-Rational::one(), other)
    }

    pub fn scaled(&self, factor: &Rational) -> SparseVector {
        let terms = if factor.is_zero() {
            BTreeMap::new()
        } else {
            self.terms.iter().map(|(m, c)| (m.clone(), c * factor)).collect()
        };
        Self {
            space: self.space,
            terms,
        }
    }

    /// Applies the automorphism of `V` exchanging `u` and `v`.
    pub fn swap_letters(&self) -> SparseVector {
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let w: Vec<Generator> = m
                .wedge
                .iter()
                .map(|g| Generator {
                    letter: g.letter.swapped(),
                    index: g.index,
                })
                .collect();
            let (sign, wedge) = sort_wedge(w)?;
            let mono = Monomial {
                wedge,
                dual_legs: m.dual_legs.clone(),
                legs: m.legs.clone(),
            };
            Some((mono, if sign < 0 { -c.clone() } else { c.clone() }))
        });
        Self::from_terms(self.space, terms.collect::<Vec<_>>())
    }

    /// Coordinates over `basis(space)` as an index vector.
    pub fn to_index_vector(&self, basis: &[Monomial]) -> IndexVector {
        IndexVector::from_pairs(self.terms.iter().map(|(m, c)| {
            let i = basis.binary_search(m).expect("monomial outside basis");
            (i, c.clone())
        }))
    }

    pub fn from_index_vector(space: SpaceDescriptor, basis: &[Monomial], v: &IndexVector) -> Self {
        Self {
            space,
            terms: v
                .entries()
                .iter()
                .map(|(i, c)| (basis[*i].clone(), c.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for SparseVector {
    /// Renders as `2 v1|e1 + v2|e1 - 1/2 u1^v2|e1`; zero renders as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c < &Rational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if !mag.is_one() {
                write!(f, "{mag} ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

fn check_degree(sigma: &Permutation, n: usize) -> Result<()> {
    if sigma.degree() != n + 1 {
        return Err(Error::DegreeMismatch {
            expected: n + 1,
            got: sigma.degree(),
        });
    }
    Ok(())
}

fn act_monomial_into(
    sigma: &Permutation,
    n: usize,
    m: &Monomial,
    coeff: &Rational,
    out: &mut BTreeMap<Monomial, Rational>,
) {
    let raw = RawTerm {
        wedge: m
            .wedge
            .iter()
            .map(|g| (g.letter, sigma.apply(g.index as usize)))
            .collect(),
        dual_legs: m.dual_legs.iter().map(|&i| sigma.apply(i as usize)).collect(),
        legs: m.legs.iter().map(|&i| sigma.apply(i as usize)).collect(),
    };
    raw.expand_into(n, coeff, out);
}

/// `σ · x`, extended multilinearly from `x e_i ↦ x e_{σ(i)}`, `e_i ↦ e_{σ(i)}`
/// and `e'_i ↦ e'_{σ(i)}`.
pub fn act(sigma: &Permutation, x: &SparseVector) -> Result<SparseVector> {
    let n = x.space.n;
    check_degree(sigma, n)?;
    let mut out = BTreeMap::new();
    for (m, c) in &x.terms {
        act_monomial_into(sigma, n, m, c, &mut out);
    }
    out.retain(|_, c: &mut Rational| !c.is_zero());
    Ok(SparseVector {
        space: x.space,
        terms: out,
    })
}

/// Action of a permutation fixing `n + 1`: a signed permutation of monomials.
fn permute_monomial(sigma: &Permutation, m: &Monomial) -> Option<(i64, Monomial)> {
    let w: Vec<Generator> = m
        .wedge
        .iter()
        .map(|g| Generator::new(g.letter, sigma.apply(g.index as usize)))
        .collect();
    let (sign, wedge) = sort_wedge(w)?;
    Some((
        sign,
        Monomial {
            wedge,
            dual_legs: m.dual_legs.iter().map(|&i| sigma.apply(i as usize) as u8).collect(),
            legs: m.legs.iter().map(|&i| sigma.apply(i as usize) as u8).collect(),
        },
    ))
}

/// A basis of the invariant subspace `[W]^{S_{n+1}}`, in reduced echelon form
/// with respect to the sorted monomial basis: each vector's first monomial
/// has coefficient one and is absent from every other vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantBasis {
    pub space: SpaceDescriptor,
    pub vectors: Vec<SparseVector>,
}

impl InvariantBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Coordinates of `y` in this basis. Fails if `y` is not in the span.
    pub fn coordinates(&self, y: &SparseVector) -> Result<Vec<Rational>> {
        if y.space != self.space {
            return Err(Error::SpaceMismatch {
                left: y.space.to_string(),
                right: self.space.to_string(),
            });
        }
        let coords: Vec<Rational> = self
            .vectors
            .iter()
            .map(|b| y.coefficient(b.leading().expect("nonzero basis vector").0))
            .collect();
        let mut residual = y.clone();
        for (b, c) in self.vectors.iter().zip(&coords) {
            residual = residual.add_scaled(&-c.clone(), b)?;
        }
        if !residual.is_zero() {
            return Err(Error::ResidualNonzero {
                index: 0,
                target: self.space.to_string(),
            });
        }
        Ok(coords)
    }
}

/// Spaces at most this large use the stacked-generator nullspace directly;
/// larger ones first pass to orbit sums under `S_n`.
pub const STACKED_LIMIT: usize = 400;

/// The common fixed space of the generators `(1 2)` and `(1 2 ... n+1)`.
pub fn invariant_basis(s: SpaceDescriptor) -> InvariantBasis {
    if space_dim(s) <= STACKED_LIMIT {
        invariant_basis_stacked(s)
    } else {
        invariant_basis_by_orbits(s)
    }
}

/// Nullspace of the matrices `M_σ - I`, stacked over the generators.
pub fn invariant_basis_stacked(s: SpaceDescriptor) -> InvariantBasis {
    let basis = basis(s);
    let dim = basis.len();
    if dim == 0 {
        return InvariantBasis {
            space: s,
            vectors: Vec::new(),
        };
    }
    let gens = generators(s.n).expect("n >= 1");
    let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); gens.len() * dim];
    for (j, m) in basis.iter().enumerate() {
        for (g, sigma) in gens.iter().enumerate() {
            let mut img = BTreeMap::new();
            act_monomial_into(sigma, s.n, m, &Rational::one(), &mut img);
            for (mono, c) in img {
                let i = basis.binary_search(&mono).expect("closed under action");
                rows[g * dim + i].push((j, c));
            }
            rows[g * dim + j].push((j, -Rational::one()));
        }
    }
    let matrix = SparseMatrix::from_rows(dim, rows.into_iter().map(IndexVector::from_pairs).collect());
    let kernel = linalg::nullspace_basis(&matrix);
    InvariantBasis {
        space: s,
        vectors: kernel
            .iter()
            .map(|v| SparseVector::from_index_vector(s, &basis, v))
            .collect(),
    }
}

/// Same subspace as [`invariant_basis_stacked`], computed by first averaging
/// over the subgroup `S_n` fixing `n + 1` (which only permutes monomials up
/// to sign) and then imposing invariance under `(1 2 ... n+1)` on the orbit
/// sums. `S_n` together with the long cycle generates `S_{n+1}`.
pub fn invariant_basis_by_orbits(s: SpaceDescriptor) -> InvariantBasis {
    let basis = basis(s);
    let dim = basis.len();
    if dim == 0 {
        return InvariantBasis {
            space: s,
            vectors: Vec::new(),
        };
    }
    let m = s.n + 1;
    let stabilizer: Vec<Permutation> = Permutation::all(s.n)
        .into_iter()
        .map(|p| {
            let mut images = p.images().to_vec();
            images.push(m);
            Permutation::from_images(images).unwrap()
        })
        .collect();

    let mut visited = vec![false; dim];
    let mut orbit_sums: Vec<IndexVector> = Vec::new();
    for start in 0..dim {
        if visited[start] {
            continue;
        }
        let mut orbit: BTreeMap<usize, i64> = BTreeMap::new();
        let mut cancels = false;
        for sigma in &stabilizer {
            let Some((sign, image)) = permute_monomial(sigma, &basis[start]) else {
                continue;
            };
            let i = basis.binary_search(&image).expect("closed under action");
            visited[i] = true;
            match orbit.get(&i) {
                Some(&prev) if prev != sign => cancels = true,
                Some(_) => {}
                None => {
                    orbit.insert(i, sign);
                }
            }
        }
        if !cancels {
            orbit_sums.push(IndexVector::from_pairs(
                orbit
                    .into_iter()
                    .map(|(i, sgn)| (i, Rational::from_integer(sgn.into()))),
            ));
        }
    }
    if orbit_sums.is_empty() {
        return InvariantBasis {
            space: s,
            vectors: Vec::new(),
        };
    }

    let cycle = Permutation::cycle(m, m);
    let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); dim];
    for (j, sum) in orbit_sums.iter().enumerate() {
        let mut img = BTreeMap::new();
        for (i, c) in sum.entries() {
            act_monomial_into(&cycle, s.n, &basis[*i], c, &mut img);
        }
        for (mono, c) in img {
            let i = basis.binary_search(&mono).expect("closed under action");
            rows[i].push((j, c));
        }
        for (i, c) in sum.entries() {
            rows[*i].push((j, -c.clone()));
        }
    }
    let matrix = SparseMatrix::from_rows(
        orbit_sums.len(),
        rows.into_iter().map(IndexVector::from_pairs).collect(),
    );
    let kernel = linalg::nullspace_basis(&matrix);
    let invariants: Vec<IndexVector> = kernel
        .iter()
        .map(|z| {
            let mut v = IndexVector::new();
            for (j, c) in z.entries() {
                v.add_scaled(c, &orbit_sums[*j]);
            }
            v
        })
        .collect();
    let canonical = linalg::span_basis(dim, &invariants);
    InvariantBasis {
        space: s,
        vectors: canonical
            .iter()
            .map(|v| SparseVector::from_index_vector(s, &basis, v))
            .collect(),
    }
}

/// Memo table for invariant bases. Entries are pure functions of the
/// descriptor, so concurrent fills store identical values.
#[derive(Debug, Default)]
pub struct InvariantCache {
    map: Mutex<HashMap<SpaceDescriptor, Arc<InvariantBasis>>>,
}

impl InvariantCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, s: SpaceDescriptor) -> Arc<InvariantBasis> {
        if let Some(b) = self.map.lock().unwrap().get(&s) {
            return Arc::clone(b);
        }
        let computed = Arc::new(invariant_basis(s));
        let mut map = self.map.lock().unwrap();
        Arc::clone(map.entry(s).or_insert(computed))
    }

    pub fn dim(&self, s: SpaceDescriptor) -> usize {
        self.get(s).len()
    }
}

impl FromStr for Letter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "u" => Ok(Letter::U),
            "v" => Ok(Letter::V),
            other => Err(Error::UnknownClass(other.to_string())),
        }
    }
}
