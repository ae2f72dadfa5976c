//! Exact sparse linear algebra over the rationals.
//!
//! Everything here is plain Gaussian elimination with immediate reduction of
//! every entry. Pivots are the lowest available column, and within a column
//! the lowest row; because the set of pivot columns of a row space does not
//! depend on the elimination order, ranks and the reduced kernel bases below
//! are canonical and reproducible bit for bit.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact rational scalar, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// A sparse vector indexed by `usize` positions, entries sorted by index, no
/// stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IndexVector {
    entries: Vec<(usize, Rational)>,
}

impl IndexVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vector from arbitrary `(index, value)` pairs; duplicates are
    /// summed and zeros dropped.
    pub fn from_pairs<I: IntoIterator<Item = (usize, Rational)>>(pairs: I) -> Self {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (i, v) in pairs {
            *acc.entry(i).or_insert_with(Rational::zero) += v;
        }
        Self {
            entries: acc.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    pub fn unit(index: usize) -> Self {
        Self {
            entries: vec![(index, Rational::one())],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, Rational)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, Rational)> {
        self.entries
    }

    pub fn leading(&self) -> Option<(usize, &Rational)> {
        self.entries.first().map(|(i, v)| (*i, v))
    }

    pub fn get(&self, index: usize) -> Option<&Rational> {
        self.entries
            .binary_search_by_key(&index, |(i, _)| *i)
            .ok()
            .map(|pos| &self.entries[pos].1)
    }

    pub fn scale(&mut self, factor: &Rational) {
        if factor.is_zero() {
            self.entries.clear();
            return;
        }
        for (_, v) in &mut self.entries {
            *v = &*v * factor;
        }
    }

    /// `self += factor * other`
    pub fn add_scaled(&mut self, factor: &Rational, other: &IndexVector) {
        if factor.is_zero() || other.is_empty() {
            return;
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let mut a = std::mem::take(&mut self.entries).into_iter().peekable();
        let mut b = other.entries.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some((ia, _)), Some((ib, _))) if ia < ib => out.push(a.next().unwrap()),
                (Some((ia, _)), Some((ib, _))) if ia > ib => {
                    let (ib, vb) = b.next().unwrap();
                    out.push((*ib, vb * factor));
                }
                (Some(_), Some(_)) => {
                    let (ia, va) = a.next().unwrap();
                    let (_, vb) = b.next().unwrap();
                    let s = va + vb * factor;
                    if !s.is_zero() {
                        out.push((ia, s));
                    }
                }
                (Some(_), None) => out.push(a.next().unwrap()),
                (None, Some(_)) => {
                    let (ib, vb) = b.next().unwrap();
                    out.push((*ib, vb * factor));
                }
                (None, None) => break,
            }
        }
        self.entries = out;
    }
}

impl fmt::Display for IndexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, (i, v)) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}:{v}")?;
        }
        write!(f, "]")
    }
}

/// Row-major sparse matrix with exact rational entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<IndexVector>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![IndexVector::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            data: (0..n).map(IndexVector::unit).collect(),
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<IndexVector>) -> Self {
        for r in &rows {
            if let Some((last, _)) = r.entries().last() {
                assert!(*last < cols, "column index {last} out of bounds ({cols})");
            }
        }
        Self {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged dense matrix");
                IndexVector::from_pairs(r.iter().enumerate().map(|(j, &v)| (j, rat(v))))
            })
            .collect();
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &IndexVector {
        &self.data[r]
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.data[r].get(c).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rational) {
        assert!(r < self.rows && c < self.cols, "({r},{c}) out of bounds");
        let mut pairs: Vec<(usize, Rational)> = self.data[r]
            .entries()
            .iter()
            .filter(|(j, _)| *j != c)
            .cloned()
            .collect();
        pairs.push((c, value));
        self.data[r] = IndexVector::from_pairs(pairs);
    }

    /// Iterates `((row, col), value)` over the stored (nonzero) entries.
    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &Rational)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.entries().iter().map(move |(c, v)| ((r, c), v)))
            .map(|((r, c), v)| ((r, *c), v))
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(IndexVector::len).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut cols: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); self.cols];
        for ((r, c), v) in self.entries() {
            cols[c].push((r, v.clone()));
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data: cols.into_iter().map(|e| IndexVector { entries: e }).collect(),
        }
    }

    /// Returns the matrix with rows permuted: new row `i` is old row `perm[i]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rows);
        Self {
            rows: self.rows,
            cols: self.cols,
            data: perm.iter().map(|&p| self.data[p].clone()).collect(),
        }
    }

    /// Returns the matrix with columns relabelled: old column `j` becomes `perm[j]`.
    pub fn permute_cols(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.cols);
        let data = self
            .data
            .iter()
            .map(|row| IndexVector::from_pairs(row.entries().iter().map(|(j, v)| (perm[*j], v.clone()))))
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn mul_vector(&self, x: &IndexVector) -> IndexVector {
        let dense: BTreeMap<usize, &Rational> = x.entries().iter().map(|(i, v)| (*i, v)).collect();
        let pairs = self.data.iter().enumerate().filter_map(|(r, row)| {
            let mut acc = Rational::zero();
            for (c, v) in row.entries() {
                if let Some(xv) = dense.get(c) {
                    acc += v * *xv;
                }
            }
            (!acc.is_zero()).then_some((r, acc))
        });
        IndexVector::from_pairs(pairs)
    }

    fn echelon(&self) -> Echelon {
        let mut e = Echelon::new(self.cols);
        for row in &self.data {
            e.insert(row.clone());
        }
        e
    }
}

/// Incrementally built row-echelon basis. Each stored row is keyed by its
/// pivot column and has leading coefficient one.
#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    rows: BTreeMap<usize, IndexVector>,
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            rows: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// Eliminates pivot columns from the front of `row` until its leading
    /// column is free (or it vanishes).
    pub fn reduce_leading(&self, mut row: IndexVector) -> IndexVector {
        while let Some((lead, coef)) = row.leading() {
            let Some(p) = self.rows.get(&lead) else { break };
            let factor = -coef.clone();
            row.add_scaled(&factor, p);
        }
        row
    }

    /// Eliminates every pivot column from `row`.
    pub fn reduce_fully(&self, mut row: IndexVector) -> IndexVector {
        for (pivot, prow) in &self.rows {
            if let Some(c) = row.get(*pivot) {
                let factor = -c.clone();
                row.add_scaled(&factor, prow);
            }
        }
        row
    }

    pub fn contains(&self, row: &IndexVector) -> bool {
        self.reduce_leading(row.clone()).is_zero()
    }

    /// Adds `row` to the span. Returns whether it was independent.
    pub fn insert(&mut self, row: IndexVector) -> bool {
        let mut row = self.reduce_leading(row);
        let Some((lead, coef)) = row.leading() else {
            return false;
        };
        debug_assert!(lead < self.dim);
        let inv = coef.recip();
        row.scale(&inv);
        self.rows.insert(lead, row);
        true
    }

    /// The reduced row echelon basis of the span, ordered by pivot column.
    pub fn into_reduced(mut self) -> Vec<IndexVector> {
        let pivots: Vec<usize> = self.rows.keys().copied().collect();
        // Back-substitute from the last pivot so every row is cleared against
        // rows that are already fully reduced.
        for (k, &p) in pivots.iter().enumerate().rev() {
            let mut row = self.rows.remove(&p).unwrap();
            for &q in &pivots[k + 1..] {
                if let Some(c) = row.get(q) {
                    let factor = -c.clone();
                    row.add_scaled(&factor, &self.rows[&q]);
                }
            }
            self.rows.insert(p, row);
        }
        self.rows.into_values().collect()
    }
}

pub fn rank(m: &SparseMatrix) -> usize {
    m.echelon().rank()
}

/// Basis of the right kernel `{x : m x = 0}` in reduced echelon form: each
/// vector has leading coefficient one, vectors are sorted by leading index,
/// and every leading index is zero in all other vectors.
pub fn nullspace_basis(m: &SparseMatrix) -> Vec<IndexVector> {
    let reduced = m.echelon().into_reduced();
    let pivot_rows: BTreeMap<usize, &IndexVector> = reduced
        .iter()
        .map(|r| (r.leading().expect("nonzero echelon row").0, r))
        .collect();
    let mut kernel = Echelon::new(m.cols());
    for free in (0..m.cols()).filter(|c| !pivot_rows.contains_key(c)) {
        let pairs = std::iter::once((free, Rational::one())).chain(
            pivot_rows
                .iter()
                .filter_map(|(&p, row)| row.get(free).map(|v| (p, -v.clone()))),
        );
        kernel.insert(IndexVector::from_pairs(pairs));
    }
    kernel.into_reduced()
}

/// Reduced echelon basis of the span of `vectors` inside a `dim`-dimensional space.
pub fn span_basis<'a, I: IntoIterator<Item = &'a IndexVector>>(dim: usize, vectors: I) -> Vec<IndexVector> {
    let mut e = Echelon::new(dim);
    for v in vectors {
        e.insert(v.clone());
    }
    e.into_reduced()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_kernel(m: &SparseMatrix, kernel: &[IndexVector]) {
        for v in kernel {
            assert!(m.mul_vector(v).is_zero(), "{v} not in kernel");
        }
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        assert_eq!(rank(&SparseMatrix::zeros(3, 3)), 0);
    }

    #[test]
    fn identity_has_full_rank() {
        assert_eq!(rank(&SparseMatrix::identity(4)), 4);
        assert!(nullspace_basis(&SparseMatrix::identity(3)).is_empty());
    }

    #[test]
    fn zero_matrix_kernel_is_unit_vectors() {
        let k = nullspace_basis(&SparseMatrix::zeros(2, 5));
        let expected: Vec<IndexVector> = (0..5).map(IndexVector::unit).collect();
        assert_eq!(k, expected);
    }

    #[test]
    fn kernel_is_reduced_echelon() {
        let m = SparseMatrix::from_dense(&[vec![1, 2, 3, 4], vec![2, 4, 6, 8]]);
        let k = nullspace_basis(&m);
        assert_eq!(k.len(), 3);
        assert_kernel(&m, &k);
        let leads: Vec<usize> = k.iter().map(|v| v.leading().unwrap().0).collect();
        assert_eq!(leads, vec![0, 1, 2]);
        for v in &k {
            assert_eq!(v.leading().unwrap().1, &rat(1));
            for w in &k {
                if v != w {
                    assert!(w.get(v.leading().unwrap().0).is_none());
                }
            }
        }
    }

    #[test]
    fn set_and_get_drop_zeros() {
        let mut m = SparseMatrix::zeros(2, 2);
        m.set(0, 1, rat(3));
        assert_eq!(m.nnz(), 1);
        m.set(0, 1, rat(0));
        assert_eq!(m.nnz(), 0);
        assert_eq!(m.get(1, 1), rat(0));
    }

    #[test]
    fn fractions_stay_exact() {
        let m = SparseMatrix::from_dense(&[vec![3, 1], vec![1, 3]]);
        assert_eq!(rank(&m), 2);
        let m = SparseMatrix::from_dense(&[vec![3, 1, 1], vec![6, 2, 2], vec![1, 1, 0]]);
        let k = nullspace_basis(&m);
        assert_eq!(k.len(), 1);
        assert_kernel(&m, &k);
        assert_eq!(k[0].get(1), Some(&rat_frac(-1, 1)));
        assert_eq!(k[0].get(0), Some(&rat(1)));
        assert_eq!(k[0].get(2), Some(&rat(-2)));
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
            proptest::collection::vec(
                proptest::collection::vec(prop_oneof![4 => Just(0i64), 3 => -3i64..=3], c),
                r,
            )
        })
    }

    fn shuffled(len: usize, seed: u64) -> Vec<usize> {
        let mut p: Vec<usize> = (0..len).collect();
        let mut s = seed;
        for i in (1..len).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let j = (s >> 33) as usize % (i + 1);
            p.swap(i, j);
        }
        p
    }

    proptest! {
        #[test]
        fn rank_nullity(rows in small_matrix()) {
            let m = SparseMatrix::from_dense(&rows);
            let k = nullspace_basis(&m);
            prop_assert_eq!(rank(&m) + k.len(), m.cols());
            assert_kernel(&m, &k);
        }

        #[test]
        fn rank_invariant_under_permutations(rows in small_matrix(), seed in any::<u64>()) {
            let m = SparseMatrix::from_dense(&rows);
            let pr = shuffled(m.rows(), seed);
            let pc = shuffled(m.cols(), seed ^ 0x9e37);
            prop_assert_eq!(rank(&m), rank(&m.permute_rows(&pr)));
            prop_assert_eq!(rank(&m), rank(&m.permute_cols(&pc)));
            prop_assert_eq!(rank(&m), rank(&m.transpose()));
        }

        #[test]
        fn reversed_rows_give_same_kernel(rows in small_matrix()) {
            let m = SparseMatrix::from_dense(&rows);
            let rev: Vec<usize> = (0..m.rows()).rev().collect();
            let r = m.permute_rows(&rev);
            prop_assert_eq!(rank(&m), rank(&r));
            let k1 = nullspace_basis(&m);
            let k2 = nullspace_basis(&r);
            // mutual containment of spans
            let e1 = { let mut e = Echelon::new(m.cols()); for v in &k1 { e.insert(v.clone()); } e };
            let e2 = { let mut e = Echelon::new(m.cols()); for v in &k2 { e.insert(v.clone()); } e };
            prop_assert!(k2.iter().all(|v| e1.contains(v)));
            prop_assert!(k1.iter().all(|v| e2.contains(v)));
            // and the reduced form is canonical
            prop_assert_eq!(k1, k2);
        }
    }
}
