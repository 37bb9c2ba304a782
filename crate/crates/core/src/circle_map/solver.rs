//! Bisection on `ω` for a prescribed continued-fraction expansion.
//!
//! The rotation number is nondecreasing in `ω` for translation families. At the
//! first index `k` where the computed digit differs from the target, a larger
//! digit means a smaller rotation number when `k` is even and a larger one when
//! `k` is odd, which decides the bisection side without computing `ρ` itself.

use std::sync::Arc;

use serde::Serialize;

use super::family::LiftFamily;
use super::lift::CircleMapLift;
use super::rotation::{closest_returns, ClosestReturns, DigitOutcome, DEFAULT_MAX_ITERATIONS};
use crate::error::{LabError, Result};
use crate::numerics::{cf_to_real, ContinuedFractionState, Scalar, TargetDigits};

/// Position of `ρ(ω)` relative to the target, with the index where they part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DigitComparison {
    /// `ρ(ω)` is below the target; digits agree on the first `usize` entries.
    Less(usize),
    /// `ρ(ω)` is above the target.
    Greater(usize),
    /// All requested digits agree.
    Match,
    /// The iteration budget ran out after this many matching digits.
    Budget(usize),
}

fn by_index(n: usize, larger_digit: bool) -> DigitComparison {
    if (n % 2 == 0) == larger_digit {
        DigitComparison::Less(n)
    } else {
        DigitComparison::Greater(n)
    }
}

/// Compares the rotation number of `map` with `target` on the first `depth` digits.
pub fn compare_with_target(
    map: &CircleMapLift,
    target: &TargetDigits,
    depth: usize,
    max_iterations: u64,
) -> DigitComparison {
    let mut cr = ClosestReturns::new(map, max_iterations);
    for n in 0..depth {
        let t = match target.digit(n) {
            Some(t) => t,
            None => return DigitComparison::Match,
        };
        match cr.next_digit(Some(t)) {
            DigitOutcome::Digit(a) if a == t => {}
            DigitOutcome::Digit(a) => return by_index(n, a > t),
            DigitOutcome::Exceeds(_) => return by_index(n, true),
            DigitOutcome::Periodic { k, .. } => {
                return if k < t {
                    by_index(n, false)
                } else if k > t {
                    by_index(n, true)
                } else {
                    by_index(n + 1, true)
                };
            }
            DigitOutcome::Budget(_) => return DigitComparison::Budget(n),
            DigitOutcome::OutOfRange(high) => {
                return if high { DigitComparison::Greater(0) } else { DigitComparison::Less(0) };
            }
        }
    }
    DigitComparison::Match
}

/// Knobs for [`solve_parameter`].
#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Number of digits that must match.
    pub depth: usize,
    /// Cap on map evaluations per orbit.
    pub max_iterations: u64,
    /// Initial bracket for `ω`.
    pub bracket: (Scalar, Scalar),
    /// After bisection, refine `ω` so that the last closest-return ratios repeat
    /// with the period of the target tail.
    pub refine: bool,
    /// Working precision.
    pub prec: u32,
}

impl SolveOptions {
    /// Options with bracket `[0, 1]` and the default iteration budget.
    pub fn new(depth: usize, prec: u32) -> Self {
        SolveOptions {
            depth,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            bracket: (Scalar::zero(prec), Scalar::one(prec)),
            refine: false,
            prec,
        }
    }

    /// Enables or disables the self-similar refinement.
    pub fn with_refine(mut self, refine: bool) -> Self {
        self.refine = refine;
        self
    }
}

/// Parameter found by the solver and its verification record.
#[derive(Clone, Debug, Serialize)]
pub struct SolveResult {
    /// The parameter.
    pub omega: Scalar,
    /// Number of target digits reproduced.
    pub achieved_depth: usize,
    /// True when `achieved_depth` reached the requested depth.
    pub verified: bool,
    /// True when the self-similar refinement ran and converged.
    pub refined: bool,
    /// Closest-returns record at the solution.
    pub cf: ContinuedFractionState,
    /// `|f^{q_N}(0)/q_N − p_N/q_N|` for the deepest verified level `N`.
    pub birkhoff_residual: Scalar,
    /// The bound `1/q_N` against which the Birkhoff residual is checked.
    pub birkhoff_bound: Scalar,
    /// Number of bisection steps.
    pub bisection_steps: usize,
}

/// Finds `ω` such that closest returns reproduce `target` for `depth` digits.
pub fn solve_parameter(
    family: Arc<dyn LiftFamily>,
    target: &TargetDigits,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    target.validate()?;
    let prec = opts.prec;
    let depth = opts.depth.min(target.take(opts.depth).len());
    let base = CircleMapLift::new(family, Scalar::zero(prec));
    let cmp = |w: &Scalar| compare_with_target(&base.with_omega(w.clone()), target, depth, opts.max_iterations);

    let (mut lo, mut hi) = opts.bracket.clone();
    let c_lo = cmp(&lo);
    let c_hi = cmp(&hi);
    let mut found = None;
    match (&c_lo, &c_hi) {
        (DigitComparison::Match, _) => found = Some(lo.clone()),
        (_, DigitComparison::Match) => found = Some(hi.clone()),
        (DigitComparison::Less(_), DigitComparison::Greater(_)) => {}
        _ => {
            return Err(LabError::Range(format!(
                "target {:?} is not bracketed by omega in [{:?}, {:?}] ({c_lo:?}, {c_hi:?})",
                target.take(depth.min(8)),
                lo,
                hi
            )))
        }
    }
    let min_width = Scalar::pow2(16 - prec as i32, prec);
    let mut steps = 0usize;
    let mut budget_hit = false;
    while found.is_none() {
        let mid = (&lo + &hi) / 2;
        steps += 1;
        match cmp(&mid) {
            DigitComparison::Less(_) => lo = mid,
            DigitComparison::Greater(_) => hi = mid,
            DigitComparison::Match => found = Some(mid),
            DigitComparison::Budget(_) => {
                budget_hit = true;
                found = Some(mid);
                break;
            }
        }
        if found.is_none() && (&hi - &lo) < min_width {
            found = Some((&lo + &hi) / 2);
            break;
        }
    }
    let mut omega = found.expect("loop exits with a candidate");
    let mut refined = false;
    if opts.refine && !target.tail.is_empty() && !budget_hit {
        if let Some(w) = refine_self_similar(&base, target, depth, opts, &omega, &(&hi - &lo)) {
            omega = w;
            refined = true;
        }
    }
    let map = base.with_omega(omega.clone());
    let cf = closest_returns(&map, depth, opts.max_iterations)?;
    let achieved = cf
        .digits
        .iter()
        .zip(target.take(depth))
        .take_while(|(a, b)| **a == *b)
        .count();
    let n = achieved.min(cf.digits.len());
    let (p, q) = cf.convergents[n];
    let fq = crate::circle_map::lift::iterate_jet(&map, &Scalar::zero(prec), q as u64).f;
    let birkhoff = (&fq / q) - Scalar::from_ratio(p, q, prec);
    let bound = Scalar::from_ratio(1, q.max(1), prec);
    Ok(SolveResult {
        omega,
        achieved_depth: achieved,
        verified: achieved >= depth,
        refined,
        cf,
        birkhoff_residual: birkhoff.abs(),
        birkhoff_bound: bound,
        bisection_steps: steps,
    })
}

/// Residual `d_N/d_{N−1} − d_{N−k}/d_{N−k−1}` (with `k` the tail period), defined
/// only where the first `N` digits match the target.
fn self_similar_residual(
    base: &CircleMapLift,
    target: &TargetDigits,
    depth: usize,
    opts: &SolveOptions,
    w: &Scalar,
) -> Option<Scalar> {
    let k = target.tail.len();
    if depth < k + 2 {
        return None;
    }
    let cf = closest_returns(&base.with_omega(w.clone()), depth, opts.max_iterations).ok()?;
    if cf.truncated || cf.digits != target.take(depth) {
        return None;
    }
    let d = &cf.closest_return_points;
    let r = |n: usize| &d[n] / &d[n - 1];
    Some(r(depth) - r(depth - k))
}

/// Secant iteration on the self-similar residual, kept inside the depth-`N` cylinder.
fn refine_self_similar(
    base: &CircleMapLift,
    target: &TargetDigits,
    depth: usize,
    opts: &SolveOptions,
    omega: &Scalar,
    width: &Scalar,
) -> Option<Scalar> {
    let prec = opts.prec;
    let f = |w: &Scalar| self_similar_residual(base, target, depth, opts, w);
    let mut w0 = omega.clone();
    let mut f0 = f(&w0)?;
    let mut h = width / 8;
    let mut second = None;
    for _ in 0..60 {
        for cand in [&w0 + &h, &w0 - &h] {
            if let Some(fc) = f(&cand) {
                second = Some((cand, fc));
                break;
            }
        }
        if second.is_some() {
            break;
        }
        h = h / 2;
    }
    let (mut w1, mut f1) = second?;
    let tol = Scalar::pow2(16 - prec as i32, prec) * (omega.abs() + 1);
    for _ in 0..80 {
        let df = &f1 - &f0;
        if df.is_zero() || f1.is_zero() {
            break;
        }
        let mut step = &f1 * &(&w1 - &w0) / &df;
        let mut accepted = None;
        for _ in 0..40 {
            let cand = &w1 - &step;
            if let Some(fc) = f(&cand) {
                accepted = Some((cand, fc));
                break;
            }
            step = step / 2;
        }
        let (w2, f2) = accepted?;
        let moved = (&w2 - &w1).abs();
        w0 = std::mem::replace(&mut w1, w2);
        f0 = std::mem::replace(&mut f1, f2);
        if moved <= tol {
            break;
        }
    }
    Some(w1)
}

/// Rotation number estimate `[a_0..a_{N−1}]` of a solve, at the given precision.
pub fn solved_rotation_number(result: &SolveResult, prec: u32) -> Result<Scalar> {
    cf_to_real(&result.cf.digits, prec)
}
