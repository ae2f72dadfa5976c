//! Invariant dimensions from characters, without building any basis.

use num_traits::{One, Signed, Zero};

use crate::dimformulas::{GradedDimVector, Table};
use crate::error::{Error, Result};
use crate::linalg::{rat, Rational};
use crate::repspace::SpaceDescriptor;
use crate::symgroup::{factorial, partitions, Partition};

/// A class function of `S_{n+1}`, one value per cycle type (decreasing
/// lexicographic order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFunction {
    pub n: usize,
    pub classes: Vec<Partition>,
    pub values: Vec<Rational>,
}

impl ClassFunction {
    pub fn from_fn(n: usize, f: impl Fn(&Partition) -> Rational) -> Self {
        let classes = partitions(n + 1);
        let values = classes.iter().map(&f).collect();
        Self { n, classes, values }
    }

    pub fn value(&self, lambda: &Partition) -> &Rational {
        let i = self.classes.iter().position(|c| c == lambda).expect("partition of n+1");
        &self.values[i]
    }

    pub fn pointwise(&self, other: &ClassFunction) -> ClassFunction {
        ClassFunction {
            n: self.n,
            classes: self.classes.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        }
    }

    /// `⟨χ, 1⟩`, the dimension of the invariants when `χ` is a character.
    pub fn average(&self) -> Rational {
        let total: Rational = self
            .classes
            .iter()
            .zip(&self.values)
            .map(|(c, v)| v * rat(c.class_size() as i64))
            .sum();
        total / rat(factorial(self.n + 1) as i64)
    }
}

fn rho_value(lambda: &Partition) -> Rational {
    rat(lambda.ones() as i64 - 1)
}

pub fn char_rho(n: usize) -> ClassFunction {
    ClassFunction::from_fn(n, rho_value)
}

/// Characters of `∧^0, ..., ∧^top` of the representation with character
/// `base`, which must be given as a function of cycle type so that `σ^i` can
/// be evaluated.
pub fn char_wedges(n: usize, top: usize, base: impl Fn(&Partition) -> Rational) -> Vec<ClassFunction> {
    let classes = partitions(n + 1);
    let per_class: Vec<Vec<Rational>> = classes
        .iter()
        .map(|lambda| {
            let p: Vec<Rational> = (0..=top)
                .map(|i| {
                    if i == 0 {
                        Rational::zero()
                    } else {
                        base(&lambda.power(i))
                    }
                })
                .collect();
            let mut e = vec![Rational::one()];
            for k in 1..=top {
                let mut s = Rational::zero();
                for i in 1..=k {
                    let term = &e[k - i] * &p[i];
                    if i % 2 == 1 {
                        s += term;
                    } else {
                        s -= term;
                    }
                }
                e.push(s / rat(k as i64));
            }
            e
        })
        .collect();
    (0..=top)
        .map(|k| ClassFunction {
            n,
            classes: classes.clone(),
            values: per_class.iter().map(|e| e[k].clone()).collect(),
        })
        .collect()
}

pub fn char_wedge(n: usize, k: usize, base: impl Fn(&Partition) -> Rational) -> ClassFunction {
    char_wedges(n, k, base).pop().expect("k + 1 entries")
}

/// Character of `V ⊗ ρ`.
pub fn char_v_rho(lambda: &Partition) -> Rational {
    rat(2) * rho_value(lambda)
}

fn as_dimension(s: impl std::fmt::Display, avg: Rational) -> Result<u64> {
    if !avg.is_integer() || avg.is_negative() {
        return Err(Error::Inconsistent(format!(
            "character average {avg} for {s} is not a dimension"
        )));
    }
    u64::try_from(avg.to_integer()).map_err(|_| Error::Inconsistent(format!("dimension overflow for {s}")))
}

/// `dim [∧^k(V ⊗ ρ) ⊗ (ρ^∨)^a ⊗ ρ^b]^S`. The dual has the same character as
/// `ρ`, since the character is rational.
pub fn invariant_dim(s: SpaceDescriptor) -> Result<u64> {
    let wedge = char_wedge(s.n, s.k, char_v_rho);
    let legs = ClassFunction::from_fn(s.n, |l| {
        let r = rho_value(l);
        (0..s.a + s.b).fold(Rational::one(), |acc, _| acc * &r)
    });
    as_dimension(s, wedge.pointwise(&legs).average())
}

/// A whole table computed from characters alone.
pub fn table(t: Table, n: usize) -> Result<GradedDimVector> {
    if n < 2 {
        return Err(Error::InvalidN { n, min: 2 });
    }
    let Some((a, b)) = t.legs() else {
        return Ok(table(Table::ExtGOp, n)?.add(&table(Table::ExtGG, n)?));
    };
    let wedges = char_wedges(n, 2 * n, char_v_rho);
    let legs = ClassFunction::from_fn(n, |l| {
        let r = rho_value(l);
        (0..a + b).fold(Rational::one(), |acc, _| acc * &r)
    });
    wedges
        .iter()
        .enumerate()
        .map(|(k, w)| as_dimension(SpaceDescriptor::new(n, k, a, b), w.pointwise(&legs).average()))
        .collect::<Result<Vec<_>>>()
        .map(GradedDimVector::new)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::repspace::{invariant_basis, space_dim};

    fn binomial(m: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (m - i) / (i + 1))
    }

    #[test]
    fn rho_values() {
        let chi = char_rho(2);
        assert_eq!(chi.value(&Partition::new(vec![1, 1, 1])), &rat(2));
        assert_eq!(chi.value(&Partition::new(vec![2, 1])), &rat(0));
        assert_eq!(chi.value(&Partition::new(vec![3])), &rat(-1));
        assert_eq!(chi.classes.len(), 3);
    }

    #[test]
    fn low_wedges() {
        let n = 4;
        let w = char_wedges(n, 1, char_v_rho);
        assert!(w[0].values.iter().all(|v| v.is_one()));
        assert_eq!(w[1], ClassFunction::from_fn(n, char_v_rho));
    }

    #[test]
    fn degree_two_average() {
        assert_eq!(char_wedge(2, 2, char_v_rho).average(), rat(1));
    }

    #[test]
    fn identity_values_are_binomials() {
        for n in 2..=8 {
            let id = Partition::new(vec![1; n + 1]);
            for (k, w) in char_wedges(n, 2 * n, char_v_rho).iter().enumerate() {
                assert_eq!(w.value(&id), &rat(binomial(2 * n as u64, k as u64) as i64));
            }
        }
    }

    #[test]
    fn known_dimensions() {
        assert_eq!(invariant_dim(SpaceDescriptor::new(3, 1, 0, 1)).unwrap(), 2);
        assert_eq!(invariant_dim(SpaceDescriptor::new(3, 2, 1, 1)).unwrap(), 6);
    }

    #[test]
    fn tables_match_closed_forms_to_eight() {
        for n in 2..=8 {
            for t in Table::ALL {
                assert_eq!(table(t, n).unwrap(), t.formula(n).unwrap(), "{t} n={n}");
            }
        }
    }

    #[test]
    fn agrees_with_nullspace_on_small_spaces() {
        for n in 2..=3 {
            for k in 0..=2 * n {
                for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (2, 1)] {
                    let s = SpaceDescriptor::new(n, k, a, b);
                    if space_dim(s) > 3000 {
                        continue;
                    }
                    assert_eq!(invariant_dim(s).unwrap(), invariant_basis(s).len() as u64, "{s}");
                }
            }
        }
    }
}
