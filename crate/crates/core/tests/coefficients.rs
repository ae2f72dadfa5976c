//! Coefficients of Yoneda products checked against a brute-force expansion
//! that never touches the library's normal-form code.

mod common;

use common::{literal_pairing, raw_coefficient, Gen};
use equivext::linalg::{rat, Rational};
use equivext::yoneda::{build_class, coefficient, compose, ClassName, PairingTable};

fn engine(n: usize, left: &str, right: &str, pairing: &PairingTable, monomial: &str) -> Rational {
    let x = build_class(left.parse::<ClassName>().unwrap(), n).unwrap();
    let y = build_class(right.parse::<ClassName>().unwrap(), n).unwrap();
    coefficient(&compose(&x.value, &y.value, pairing).unwrap(), monomial).unwrap()
}

#[test]
fn theta_after_omega() {
    for n in 2..=5 {
        // Σ_{i,j} u e_i ∧ v e_i ∧ v e_j ⊗ e_j
        let m = n + 1;
        let oracle: i64 = (1..=m)
            .flat_map(|i| (1..=m).map(move |j| (i, j)))
            .map(|(i, j)| {
                raw_coefficient(
                    n,
                    &[('u', i), ('v', i), ('v', j)],
                    &[],
                    &[j],
                    &[('u', 1), ('v', 1), ('v', 2)],
                    &[],
                    &[2],
                )
            })
            .sum();
        assert_eq!(oracle, 3, "n={n}");
        assert_eq!(
            engine(n, "theta(v)", "omega", &PairingTable::literal(n), "u1^v1^v2|e2"),
            rat(oracle)
        );
    }
}

#[test]
fn theta_after_phi() {
    for n in 2..=5 {
        let m = n + 1;
        // Σ_{i,j} w e_i ∧ v e_j ⊗ e'_i ⊗ e_j
        let oracle = |w: char, target: &[Gen], dual: usize, leg: usize| -> i64 {
            (1..=m)
                .flat_map(|i| (1..=m).map(move |j| (i, j)))
                .map(|(i, j)| raw_coefficient(n, &[(w, i), ('v', j)], &[i], &[j], target, &[dual], &[leg]))
                .sum()
        };
        let phi_v = oracle('v', &[('v', 1), ('v', 2)], 1, 2);
        let phi_u = oracle('u', &[('u', 1), ('v', 1)], 1, 1);
        assert_eq!((phi_v, phi_u), (3, 4), "n={n}");
        let p = PairingTable::literal(n);
        assert_eq!(engine(n, "theta(v)", "phi(v)", &p, "v1^v2|d1|e2"), rat(phi_v));
        assert_eq!(engine(n, "theta(v)", "phi(u)", &p, "u1^v1|d1|e1"), rat(phi_u));
    }
}

#[test]
fn xi_after_theta() {
    for n in 2..=5 {
        let m = n + 1;
        // Σ_{i,j} e'_i(e_j) · u e_i ∧ v e_j ⊗ e_i
        let oracle: i64 = (1..=m)
            .flat_map(|i| (1..=m).map(move |j| (i, j)))
            .map(|(i, j)| {
                literal_pairing(n, i, j)
                    * raw_coefficient(n, &[('u', i), ('v', j)], &[], &[i], &[('u', 1), ('v', 1)], &[], &[1])
            })
            .sum();
        assert_eq!(oracle, 1 - n as i64, "n={n}");
        assert_eq!(
            engine(n, "xi", "theta(v)", &PairingTable::literal(n), "u1^v1|e1"),
            rat(oracle)
        );
    }
}

#[test]
fn xi_after_theta_with_invariant_pairing_matches_oracle() {
    for n in 2..=4 {
        let m = n + 1;
        let p = PairingTable::invariant(n);
        for (a, b, leg) in [(1, 1, 1), (1, 2, 1), (2, 1, 1), (1, 2, 2)] {
            let oracle: Rational = (1..=m)
                .flat_map(|i| (1..=m).map(move |j| (i, j)))
                .map(|(i, j)| {
                    p.value(i, j).clone()
                        * rat(raw_coefficient(
                            n,
                            &[('u', i), ('v', j)],
                            &[],
                            &[i],
                            &[('u', a), ('v', b)],
                            &[],
                            &[leg],
                        ))
                })
                .sum();
            let text = format!("u{a}^v{b}|e{leg}");
            assert_eq!(engine(n, "xi", "theta(v)", &p, &text), oracle, "n={n} {text}");
        }
    }
}
