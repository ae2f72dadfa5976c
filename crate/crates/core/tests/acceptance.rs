//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one `[PASS]` or `[FAIL]` line.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use common::{literal_pairing, raw_coefficient, Gen};
use equivext::chase::{check_remark, verify_theorem, ChaseContext, Status};
use equivext::cli::{cmd_verify, render_text, RunConfig};
use equivext::dimformulas::{d_vector, GradedDimVector, Table};
use equivext::linalg::rat;
use equivext::oracle;
use equivext::repspace::{InvariantCache, SpaceDescriptor};
use equivext::yoneda::{build_class, coefficient, compose, map_on_invariants, ClassName, PairingTable, Side};

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn g(v: &[u64]) -> GradedDimVector {
    GradedDimVector::new(v.to_vec())
}

fn ac1_dimension_tables() -> Outcome {
    let start = Instant::now();
    let cache = InvariantCache::new();
    for n in 2..=4 {
        let raw = |t: Table| t.raw(n, &cache).map_err(|e| e.to_string());
        let h_op = raw(Table::HOp)?;
        let expected: Vec<u64> = (0..=2 * n).map(|k| u64::from(k % 2 == 0)).collect();
        ensure(h_op == g(&expected) && h_op.is_palindrome(), || {
            format!("h_OP({n}) = {h_op}")
        })?;
        let h_g = raw(Table::HG)?;
        ensure(h_g.get(1) == 2, || format!("h1(G) at n={n} is {}", h_g.get(1)))?;
        if n == 3 {
            ensure(h_g == g(&[0, 2, 1, 2, 1, 2, 0]), || format!("h_G(3) = {h_g}"))?;
        }
        let ext_gg = raw(Table::ExtGG)?;
        match n {
            2 => ensure(ext_gg == g(&[1, 2, 5, 2, 1]), || format!("ext_G_G(2) = {ext_gg}"))?,
            3 => ensure(ext_gg == g(&[1, 2, 6, 6, 6, 2, 1]), || format!("ext_G_G(3) = {ext_gg}"))?,
            _ => {}
        }
        let ext_op = raw(Table::ExtGOp)?;
        let d = d_vector(n).map_err(|e| e.to_string())?;
        ensure(ext_op.add(&ext_gg) == d, || {
            format!("cancellation identity fails at n={n}")
        })?;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(10), || format!("took {t:.2?}"))?;
    Ok(format!("n=2..4 raw tables match, {t:.2?}"))
}

fn double_sum(n: usize, f: impl Fn(usize, usize) -> i64) -> i64 {
    (1..=n + 1)
        .flat_map(|i| (1..=n + 1).map(move |j| (i, j)))
        .map(|(i, j)| f(i, j))
        .sum()
}

fn ac2_coefficients() -> Outcome {
    for n in 2..=5 {
        let lit = PairingTable::literal(n);
        let class = |s: &str| build_class(s.parse::<ClassName>().unwrap(), n).unwrap().value;
        let engine = |l: &str, r: &str, m: &str| coefficient(&compose(&class(l), &class(r), &lit).unwrap(), m).unwrap();
        let phi = |w: char, target: &[Gen], dual: usize, leg: usize| {
            double_sum(n, |i, j| {
                raw_coefficient(n, &[(w, i), ('v', j)], &[i], &[j], target, &[dual], &[leg])
            })
        };
        let cases = [
            (
                "theta(v) o omega",
                engine("theta(v)", "omega", "u1^v1^v2|e2"),
                double_sum(n, |i, j| {
                    raw_coefficient(
                        n,
                        &[('u', i), ('v', i), ('v', j)],
                        &[],
                        &[j],
                        &[('u', 1), ('v', 1), ('v', 2)],
                        &[],
                        &[2],
                    )
                }),
                3,
            ),
            (
                "theta(v) o phi(v)",
                engine("theta(v)", "phi(v)", "v1^v2|d1|e2"),
                phi('v', &[('v', 1), ('v', 2)], 1, 2),
                3,
            ),
            (
                "theta(v) o phi(u)",
                engine("theta(v)", "phi(u)", "u1^v1|d1|e1"),
                phi('u', &[('u', 1), ('v', 1)], 1, 1),
                4,
            ),
            (
                "xi o theta(v)",
                engine("xi", "theta(v)", "u1^v1|e1"),
                double_sum(n, |i, j| {
                    literal_pairing(n, i, j)
                        * raw_coefficient(n, &[('u', i), ('v', j)], &[], &[i], &[('u', 1), ('v', 1)], &[], &[1])
                }),
                1 - n as i64,
            ),
        ];
        for (name, value, brute, expected) in cases {
            ensure(value == rat(expected) && brute == expected, || {
                format!("{name} at n={n}: engine {value}, brute force {brute}, expected {expected}")
            })?;
        }
    }
    Ok("3, 3, 4, 1-n for n=2..5".into())
}

fn ac3_rank_battery() -> Outcome {
    let mut seen = Vec::new();
    for n in 2..=5 {
        let cache = InvariantCache::new();
        let theta = build_class("theta(v)".parse().unwrap(), n).unwrap();
        let p = PairingTable::invariant(n);
        let rank = |side, k, a, b| {
            map_on_invariants(&theta, side, SpaceDescriptor::new(n, k, a, b), &p, &cache)
                .map(|m| m.rank)
                .map_err(|e| e.to_string())
        };
        let r = [
            rank(Side::Push, 0, 0, 0)?,
            rank(Side::Push, 2, 0, 0)?,
            rank(Side::Push, 1, 1, 0)?,
            rank(Side::Pull, 1, 1, 1)?,
        ];
        ensure(r[0] == 1 && r[1] == 1 && r[2] == 2 && r[3] >= 1, || {
            format!("ranks at n={n}: {r:?}")
        })?;
        seen.push(r[3]);
    }
    Ok(format!("push 1,1,2 and pull ranks {seen:?} for n=2..5"))
}

fn ac4_theorem_replay() -> Outcome {
    for n in 2..=5 {
        let cache = InvariantCache::new();
        let ctx = ChaseContext::new(n, false, &cache).map_err(|e| e.to_string())?;
        let replay = verify_theorem(&ctx).map_err(|e| e.to_string())?;
        let all_pass = replay.steps.len() == 7 && replay.steps.iter().all(|s| s.status == Status::Pass);
        ensure(all_pass && replay.ext1_m_m == Some(2), || {
            format!("n={n}: ext1 = {:?}, failure {:?}", replay.ext1_m_m, replay.failure())
        })?;
    }
    Ok("ext1(M,M) = 2 with 7 passing steps for n=2..5".into())
}

fn ac5_remark() -> Outcome {
    for n in 2..=4 {
        let cache = InvariantCache::new();
        let ctx = ChaseContext::new(n, false, &cache).map_err(|e| e.to_string())?;
        let r = check_remark(&ctx).map_err(|e| e.to_string())?;
        let expected: Vec<u64> = (0..=2 * n).map(|k| u64::from(k > 0)).collect();
        ensure(r.passed && r.h_m == Some(g(&expected)), || format!("n={n}: {r:?}"))?;
    }
    Ok("h(M) = (0,1,...,1) for n=2..4".into())
}

fn ac6_oracle() -> Outcome {
    let mut checked = 0;
    for n in 2..=5 {
        let cache = InvariantCache::new();
        for k in 0..=2 * n {
            for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let s = SpaceDescriptor::new(n, k, a, b);
                let o = oracle::invariant_dim(s).map_err(|e| e.to_string())?;
                let e = cache.dim(s) as u64;
                ensure(o == e, || format!("{s}: oracle {o}, nullspace {e}"))?;
                checked += 1;
            }
        }
    }
    let start = Instant::now();
    for n in 2..=8 {
        for t in Table::ALL {
            let o = oracle::table(t, n).map_err(|e| e.to_string())?;
            let f = t.formula(n).map_err(|e| e.to_string())?;
            ensure(o == f, || format!("{t} at n={n}: oracle {o}, formula {f}"))?;
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(60), || {
        format!("oracle tables to n=8 took {t:.2?}")
    })?;
    Ok(format!("{checked} spaces agree for n=2..5; tables to n=8 in {t:.2?}"))
}

fn ac7_discrepancy() -> Outcome {
    let report = cmd_verify(&RunConfig::new(3, 3)).map_err(|e| e.to_string())?;
    let text = render_text(&report);
    let warn = text
        .lines()
        .find(|l| l.starts_with("WARN d_tail (n=3)"))
        .ok_or_else(|| "no d_tail warning at n=3".to_string())?;
    ensure(warn.contains("8,7,2,1") && warn.contains("8,7,4,1"), || {
        warn.to_string()
    })?;
    ensure(report.passed(), || "verdict is not PASS".into())?;
    Ok("d tail WARN present, verdict PASS".into())
}

fn ac8_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |name: &str, workers: &str| -> Result<Vec<u8>, String> {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_equivext"))
            .args(["verify", "--n-min", "2", "--n-max", "4", "--format", "json", "--output"])
            .arg(&path)
            .env("EQUIVEXT_WORKERS", workers)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.code() == Some(0), || format!("exit status {status}"))?;
        std::fs::read(&path).map_err(|e| e.to_string())
    };
    // the output path is part of the recorded config, so both runs use the same name
    let first = run("report.json", "1")?;
    let second = run("report.json", "4")?;
    ensure(!first.is_empty() && first == second, || "reports differ".into())?;
    Ok(format!("{} identical bytes", first.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("AC1", "dimension tables", ac1_dimension_tables),
        ("AC2", "coefficient checks", ac2_coefficients),
        ("AC3", "rank battery", ac3_rank_battery),
        ("AC4", "theorem replay", ac4_theorem_replay),
        ("AC5", "extended top-row chase", ac5_remark),
        ("AC6", "oracle equivalence", ac6_oracle),
        ("AC7", "discrepancy surfacing", ac7_discrepancy),
        ("AC8", "determinism", ac8_determinism),
    ];
    let mut failed = 0;
    for (id, name, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("[PASS] {id} {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {id} {name}: {detail}");
            }
        }
    }
    println!("{} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
