//! Deterministic sampling grids.

use super::scalar::Scalar;

/// Number of geometric refinement points near each boundary.
pub const REFINEMENT_POINTS: usize = 9;

/// Points of (0, 1] used on one side of the framed interval [−1, 1].
///
/// The grid holds `m` uniform points `k/m` for `k = 1..=m`, plus
/// `2^{−(10+j)}` and `1 − 2^{−(10+j)}` for `j = 0..9`. The result is sorted
/// and free of duplicates.
pub fn unit_side_grid(m: usize, prec: u32) -> Vec<Scalar> {
    let m = m.max(1);
    let mut pts: Vec<Scalar> = (1..=m as i64).map(|k| Scalar::from_ratio(k, m as i64, prec)).collect();
    for j in 0..REFINEMENT_POINTS as i32 {
        let e = Scalar::pow2(-(10 + j), prec);
        pts.push(Scalar::one(prec) - &e);
        pts.push(e);
    }
    pts.sort_by(|a, b| a.cmp_total(b));
    pts.dedup();
    pts
}

/// `n` uniform interior points of `[a, b]` (excluding both endpoints).
pub fn interior_points(a: &Scalar, b: &Scalar, n: usize) -> Vec<Scalar> {
    let step = (b - a) / (n as i64 + 1);
    (1..=n as i64).map(|k| a + &(&step * k)).collect()
}

/// `n ≥ 2` uniform points of `[a, b]` including both endpoints.
pub fn closed_points(a: &Scalar, b: &Scalar, n: usize) -> Vec<Scalar> {
    let n = n.max(2);
    let step = (b - a) / (n as i64 - 1);
    (0..n as i64)
        .map(|k| if k == n as i64 - 1 { b.clone() } else { a + &(&step * k) })
        .collect()
}
