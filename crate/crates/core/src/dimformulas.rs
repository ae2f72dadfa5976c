//! Closed-form graded dimension vectors and their raw-invariant counterparts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::repspace::{InvariantCache, SpaceDescriptor};

/// Dimensions indexed by degree `0..=top`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GradedDimVector {
    pub dims: Vec<u64>,
}

impl GradedDimVector {
    pub fn new(dims: Vec<u64>) -> Self {
        Self { dims }
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn get(&self, degree: usize) -> u64 {
        self.dims.get(degree).copied().unwrap_or(0)
    }

    pub fn reversed(&self) -> Self {
        Self::new(self.dims.iter().rev().copied().collect())
    }

    pub fn is_palindrome(&self) -> bool {
        self.dims.iter().eq(self.dims.iter().rev())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.len().max(other.len());
        Self::new((0..len).map(|i| self.get(i) + other.get(i)).collect())
    }

    /// Entrywise difference; a negative entry is an inconsistency.
    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let len = self.len().max(other.len());
        (0..len)
            .map(|i| {
                self.get(i)
                    .checked_sub(other.get(i))
                    .ok_or_else(|| Error::Inconsistent(format!("{self} - {other} is negative in degree {i}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

impl fmt::Display for GradedDimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.dims.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

/// `out[d] = Σ x[i] · y[d - i]`
pub fn graded_tensor(x: &GradedDimVector, y: &GradedDimVector) -> GradedDimVector {
    if x.is_empty() || y.is_empty() {
        return GradedDimVector::new(Vec::new());
    }
    let mut out = vec![0; x.len() + y.len() - 1];
    for (i, a) in x.dims.iter().enumerate() {
        for (j, b) in y.dims.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    GradedDimVector::new(out)
}

/// Cohomology of the structure sheaf of an abelian surface.
pub fn h_oa() -> GradedDimVector {
    GradedDimVector::new(vec![1, 2, 1])
}

pub fn h_op(n: usize) -> GradedDimVector {
    GradedDimVector::new((0..=2 * n).map(|d| u64::from(d % 2 == 0)).collect())
}

fn require_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidN { n, min: 2 });
    }
    Ok(())
}

pub fn h_g(n: usize) -> Result<GradedDimVector> {
    require_n(n)?;
    graded_tensor(&h_oa(), &h_op(n - 1)).checked_sub(&h_op(n))
}

pub fn ext_g_op(n: usize) -> Result<GradedDimVector> {
    Ok(h_g(n)?.reversed())
}

/// The vector `d = ext(G, O_P) + ext(G, G)` obtained after cancelling the
/// common summand.
pub fn d_vector(n: usize) -> Result<GradedDimVector> {
    require_n(n)?;
    Ok(graded_tensor(&graded_tensor(&h_oa(), &h_oa()), &h_op(n - 2)))
}

pub fn ext_g_g(n: usize) -> Result<GradedDimVector> {
    d_vector(n)?.checked_sub(&ext_g_op(n)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Table {
    #[serde(rename = "h_OP")]
    HOp,
    #[serde(rename = "h_G")]
    HG,
    #[serde(rename = "ext_G_OP")]
    ExtGOp,
    #[serde(rename = "ext_G_G")]
    ExtGG,
    #[serde(rename = "d")]
    D,
}

impl Table {
    pub const ALL: [Table; 5] = [Table::HOp, Table::HG, Table::ExtGOp, Table::ExtGG, Table::D];

    pub fn name(self) -> &'static str {
        match self {
            Table::HOp => "h_OP",
            Table::HG => "h_G",
            Table::ExtGOp => "ext_G_OP",
            Table::ExtGG => "ext_G_G",
            Table::D => "d",
        }
    }

    pub fn formula(self, n: usize) -> Result<GradedDimVector> {
        match self {
            Table::HOp => {
                require_n(n)?;
                Ok(h_op(n))
            }
            Table::HG => h_g(n),
            Table::ExtGOp => ext_g_op(n),
            Table::ExtGG => ext_g_g(n),
            Table::D => d_vector(n),
        }
    }

    /// Dual-leg and leg counts of the space computing this table, or `None`
    /// for `d`, which is a sum of two tables.
    pub fn legs(self) -> Option<(usize, usize)> {
        match self {
            Table::HOp => Some((0, 0)),
            Table::HG => Some((0, 1)),
            Table::ExtGOp => Some((1, 0)),
            Table::ExtGG => Some((1, 1)),
            Table::D => None,
        }
    }

    /// The spaces whose invariant dimensions make up the raw vector.
    pub fn spaces(self, n: usize) -> Vec<SpaceDescriptor> {
        match self.legs() {
            Some((a, b)) => (0..=2 * n).map(|k| SpaceDescriptor::new(n, k, a, b)).collect(),
            None => [Table::ExtGOp, Table::ExtGG]
                .into_iter()
                .flat_map(|t| t.spaces(n))
                .collect(),
        }
    }

    /// The same vector read off explicit invariant bases.
    pub fn raw(self, n: usize, cache: &InvariantCache) -> Result<GradedDimVector> {
        require_n(n)?;
        match self.legs() {
            Some((a, b)) => Ok(GradedDimVector::new(
                (0..=2 * n)
                    .map(|k| cache.dim(SpaceDescriptor::new(n, k, a, b)) as u64)
                    .collect(),
            )),
            None => Ok(Table::ExtGOp.raw(n, cache)?.add(&Table::ExtGG.raw(n, cache)?)),
        }
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Table {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Table::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::UnknownTable(s.to_string()))
    }
}

/// The published form of `d` for `n >= 3` ends in `8, 7, 2, 1`, which is not
/// a palindrome tail of the convolution.
pub const PUBLISHED_D_TAIL: [u64; 4] = [8, 7, 2, 1];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DTailNote {
    pub n: usize,
    pub published_tail: Vec<u64>,
    pub computed_tail: Vec<u64>,
}

pub fn d_tail_discrepancy(n: usize) -> Result<Option<DTailNote>> {
    let d = d_vector(n)?;
    if n < 3 {
        return Ok(None);
    }
    let tail = d.dims[d.len() - PUBLISHED_D_TAIL.len()..].to_vec();
    Ok((tail != PUBLISHED_D_TAIL).then(|| DTailNote {
        n,
        published_tail: PUBLISHED_D_TAIL.to_vec(),
        computed_tail: tail,
    }))
}
