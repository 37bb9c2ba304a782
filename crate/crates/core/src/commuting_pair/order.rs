//! The order relation `ζ₀ ≤_t ζ₁` and the flattest point of a branch.

use rayon::prelude::*;
use serde::Serialize;

use super::pair::CommutingPair;
use crate::error::{LabError, Result};
use crate::numerics::{grid, Scalar};

/// Samples per branch used by [`order_leq`].
pub const ORDER_SAMPLES: usize = 129;

/// Largest `t ≥ 0` with `ζ₀(x) + t ≤ ζ₁(x)` on the sampled common domain and
/// `η₀(0) ≤ η₁(0)`, `ξ₀(0) ≤ ξ₁(0)`; `None` if the pairs are not ordered.
pub fn order_leq(p0: &CommutingPair, p1: &CommutingPair) -> Option<Scalar> {
    if p0.eta0() > p1.eta0() || p0.xi0() > p1.xi0() {
        return None;
    }
    let prec = p0.prec();
    let zero = Scalar::zero(prec);
    let right_hi = p0.xi0().clone().min_of(p1.xi0().clone());
    let left_lo = p0.eta0().clone().max_of(p1.eta0().clone());
    let mut pts = grid::closed_points(&left_lo, &zero, ORDER_SAMPLES);
    pts.pop();
    pts.extend(grid::closed_points(&zero, &right_hi, ORDER_SAMPLES));
    let gaps: Vec<Scalar> = pts.par_iter().map(|x| p1.value(x) - p0.value(x)).collect();
    let t = gaps.into_iter().fold(None::<Scalar>, |acc, g| Some(match acc {
        None => g,
        Some(a) => a.min_of(g),
    }))?;
    if t.signum_i() < 0 {
        None
    } else {
        Some(t)
    }
}

/// The point of `[0, ξ(0)]` where `x − η(x)` is smallest (case I).
#[derive(Clone, Debug, Serialize)]
pub struct FlattestPoint {
    /// The point `p` with `Dη(p) = 1`.
    pub p: Scalar,
    /// Index `N` with `x_{N+1} ≤ p ≤ x_N`.
    pub index: usize,
    /// `Dη(p) − 1`.
    pub residual: Scalar,
    /// `D²η(p)`.
    pub second_derivative: Scalar,
    /// `η(p)`.
    pub value: Scalar,
}

/// Locates the flattest point of the case-I form of `pair` by bisection on `Dη − 1`,
/// starting from the shortest fundamental domain `[x_i, x_{i−1}]`.
pub fn flattest_point(pair: &CommutingPair) -> Result<FlattestPoint> {
    let p = pair.to_case_one()?;
    let prec = p.prec();
    let a = p.period()?.finite().ok_or(LabError::NotRenormalizable)? as usize;
    let orbit = p.boundary_orbit()?;
    if a < 2 {
        return Err(LabError::Domain("flattest point needs period at least 2".into()));
    }
    let eta = p.eta();
    let g = |x: &Scalar| eta.jet(x).d1 - 1;
    let mut m = 1;
    let mut best = &orbit[0] - &orbit[1];
    for i in 2..=a {
        let len = &orbit[i - 1] - &orbit[i];
        if len < best {
            best = len;
            m = i;
        }
    }
    // Dη − 1 is negative to the right of p and positive to the left.
    let mut hi_idx = m - 1;
    let mut lo_idx = m;
    while hi_idx > 0 && g(&orbit[hi_idx]).signum_i() > 0 {
        hi_idx -= 1;
    }
    while lo_idx < a && g(&orbit[lo_idx]).signum_i() < 0 {
        lo_idx += 1;
    }
    let mut hi = orbit[hi_idx].clone();
    let mut lo = orbit[lo_idx].clone();
    if g(&hi).signum_i() > 0 || g(&lo).signum_i() < 0 {
        return Err(LabError::Invariant("no sign change of D eta - 1 along the boundary orbit".into()));
    }
    let tol = Scalar::pow2(16 - prec as i32, prec);
    for _ in 0..(prec as usize + 8) {
        if (&hi - &lo) <= tol {
            break;
        }
        let mid = (&lo + &hi) / 2;
        if g(&mid).signum_i() > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let pt = (&lo + &hi) / 2;
    let jet = eta.jet(&pt);
    let mut index = 0;
    for i in 0..a {
        if orbit[i + 1] <= pt && pt <= orbit[i] {
            index = i;
            break;
        }
    }
    Ok(FlattestPoint { residual: &jet.d1 - 1, second_derivative: jet.d2.clone(), value: jet.f.clone(), p: pt, index })
}
