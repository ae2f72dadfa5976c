//! Permutations of `{1, ..., n+1}` and conjugacy-class data for `S_{n+1}`.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};

/// A permutation of `{1, ..., m}` in one-line notation, 1-based:
/// `images[i - 1] = σ(i)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Self {
            images: (1..=degree).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let degree = images.len();
        let distinct: BTreeSet<usize> = images.iter().copied().collect();
        if distinct.len() != degree || images.iter().any(|&i| i == 0 || i > degree) {
            return Err(Error::NotAPermutation { degree, images });
        }
        Ok(Self { images })
    }

    /// The transposition swapping `a` and `b`.
    pub fn transposition(degree: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(degree);
        p.images.swap(a - 1, b - 1);
        p
    }

    /// The cycle `(1 2 ... len)` on `degree` points.
    pub fn cycle(degree: usize, len: usize) -> Self {
        let mut p = Self::identity(degree);
        for i in 1..=len {
            p.images[i - 1] = if i == len { 1 } else { i + 1 };
        }
        p
    }

    /// Builds a permutation from disjoint cycles (1-based points).
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (1..=degree).collect();
        for c in cycles {
            for (k, &x) in c.iter().enumerate() {
                if x == 0 || x > degree {
                    return Err(Error::NotAPermutation {
                        degree,
                        images: c.clone(),
                    });
                }
                images[x - 1] = c[(k + 1) % c.len()];
            }
        }
        Self::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `σ(i)` for 1-based `i`.
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree());
        Permutation {
            images: other.images.iter().map(|&i| self.apply(i)).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j - 1] = i + 1;
        }
        Permutation { images }
    }

    pub fn pow(&self, e: usize) -> Permutation {
        (0..e).fold(Self::identity(self.degree()), |acc, _| self.compose(&acc))
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i + 1 == j)
    }

    pub fn fixed_points(&self) -> usize {
        self.images.iter().enumerate().filter(|(i, &j)| i + 1 == j).count()
    }

    /// Cycle lengths in weakly decreasing order.
    pub fn cycle_type(&self) -> Partition {
        let mut seen = vec![false; self.degree()];
        let mut parts = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x] - 1;
                len += 1;
            }
            parts.push(len);
        }
        Partition::new(parts)
    }

    /// All permutations of `{1, ..., degree}` in lexicographic order of images.
    pub fn all(degree: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (1..=degree).collect();
        loop {
            out.push(Permutation { images: cur.clone() });
            // next lexicographic permutation
            let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

impl fmt::Display for Permutation {
    /// Disjoint cycle notation, fixed points omitted; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.degree()];
        let mut any = false;
        for start in 1..=self.degree() {
            if seen[start - 1] || self.apply(start) == start {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x - 1] {
                seen[x - 1] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
                first = false;
                x = self.apply(x);
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// The generating set of `S_{n+1}` used for invariant computations:
/// the transposition `(1 2)` and the long cycle `(1 2 ... n+1)`.
/// Duplicates (which only happen for `n = 1`) are removed.
pub fn generators(n: usize) -> Result<Vec<Permutation>> {
    if n == 0 {
        return Err(Error::InvalidN { n, min: 1 });
    }
    let m = n + 1;
    let mut gens = vec![Permutation::transposition(m, 1, 2), Permutation::cycle(m, m)];
    gens.dedup();
    Ok(gens)
}

/// An integer partition, parts stored in weakly decreasing order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self(parts)
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&p| p == 1).count()
    }

    /// Cycle type of `σ^e` when `σ` has this cycle type: a `c`-cycle splits
    /// into `gcd(c, e)` cycles of length `c / gcd(c, e)`.
    pub fn power(&self, e: usize) -> Partition {
        let mut parts = Vec::new();
        for &c in &self.0 {
            let g = c.gcd(&e);
            parts.extend(std::iter::repeat_n(c / g, g));
        }
        Partition::new(parts)
    }

    /// Number of permutations with this cycle type.
    pub fn class_size(&self) -> u64 {
        let m = self.size() as u64;
        let mut denom: u64 = self.0.iter().map(|&p| p as u64).product();
        let mut i = 0;
        while i < self.0.len() {
            let mut j = i;
            while j < self.0.len() && self.0[j] == self.0[i] {
                j += 1;
            }
            denom *= factorial(j - i);
            i = j;
        }
        factorial(m as usize) / denom
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, p) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

pub fn factorial(m: usize) -> u64 {
    (1..=m as u64).product()
}

/// Partitions of `m` in decreasing lexicographic order, e.g. `{3}, {2,1}, {1,1,1}`.
pub fn partitions(m: usize) -> Vec<Partition> {
    fn rec(remaining: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=max.min(remaining)).rev() {
            cur.push(p);
            rec(remaining - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, m, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyClass {
    pub cycle_type: Partition,
    pub class_size: u64,
    pub representative: Permutation,
}

/// One class per partition of `n + 1`, in decreasing lexicographic order of
/// cycle types. The representative uses consecutive points for its cycles.
pub fn conjugacy_classes(n: usize) -> Result<Vec<ConjugacyClass>> {
    if n == 0 {
        return Err(Error::InvalidN { n, min: 1 });
    }
    let m = n + 1;
    partitions(m)
        .into_iter()
        .map(|lambda| {
            let mut next = 1;
            let cycles: Vec<Vec<usize>> = lambda
                .parts()
                .iter()
                .map(|&len| {
                    let c: Vec<usize> = (next..next + len).collect();
                    next += len;
                    c
                })
                .collect();
            let representative = Permutation::from_cycles(m, &cycles)?;
            Ok(ConjugacyClass {
                class_size: lambda.class_size(),
                cycle_type: lambda,
                representative,
            })
        })
        .collect()
}
