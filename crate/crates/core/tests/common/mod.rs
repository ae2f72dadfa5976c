//! Brute-force expansion of raw products, independent of the library's
//! normal-form code.

pub type Gen = (char, usize);

/// Coefficient of `target_wedge ⊗ target_duals ⊗ target_legs` (wedge read in
/// the written order) in one raw product whose indices may equal `n + 1`.
pub fn raw_coefficient(
    n: usize,
    wedge: &[Gen],
    duals: &[usize],
    legs: &[usize],
    target_wedge: &[Gen],
    target_duals: &[usize],
    target_legs: &[usize],
) -> i64 {
    let choices = |i: usize| -> Vec<(usize, i64)> {
        if i <= n {
            vec![(i, 1)]
        } else {
            (1..=n).map(|j| (j, -1)).collect()
        }
    };
    let leg_factor = |raw: &[usize], target: &[usize]| -> i64 {
        raw.iter()
            .zip(target)
            .map(|(&r, &t)| choices(r).into_iter().find(|&(j, _)| j == t).map_or(0, |(_, c)| c))
            .product()
    };
    let legs_part = leg_factor(duals, target_duals) * leg_factor(legs, target_legs);
    if legs_part == 0 {
        return 0;
    }
    // enumerate every expansion of the wedge factors
    let mut total = 0;
    let mut stack: Vec<(Vec<Gen>, i64)> = vec![(Vec::new(), 1)];
    for &(letter, i) in wedge {
        stack = stack
            .into_iter()
            .flat_map(|(w, c)| {
                choices(i).into_iter().map(move |(j, t)| {
                    let mut w = w.clone();
                    w.push((letter, j));
                    (w, c * t)
                })
            })
            .collect();
    }
    for (w, c) in stack {
        let Some(pos): Option<Vec<usize>> = w.iter().map(|g| target_wedge.iter().position(|t| t == g)).collect() else {
            continue;
        };
        let mut seen = pos.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != target_wedge.len() || pos.len() != target_wedge.len() {
            continue;
        }
        let inversions = (0..pos.len())
            .flat_map(|a| (a + 1..pos.len()).map(move |b| (a, b)))
            .filter(|&(a, b)| pos[a] > pos[b])
            .count();
        total += if inversions % 2 == 0 { c } else { -c };
    }
    total * legs_part
}

/// Literal values of `e'_j(e_i)` on the full index range.
pub fn literal_pairing(n: usize, j: usize, i: usize) -> i64 {
    match (j == n + 1, i == n + 1) {
        (false, false) => i64::from(i == j),
        (true, true) => n as i64,
        _ => -1,
    }
}
