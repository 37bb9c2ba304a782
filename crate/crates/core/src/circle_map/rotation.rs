//! Rotation numbers by closest returns of the critical orbit.
//!
//! With `(q_{−1}, p_{−1}) = (0, 1)` and `(q_0, p_0) = (1, 0)`, the digit `a_n` is
//! the largest `k` such that `f^{q_{n−1}+k q_n}(0) − (p_{n−1} + k p_n)` keeps the
//! sign of `d_{n−1} = f^{q_{n−1}}(0) − p_{n−1}`. The indices visited increase
//! monotonically, so one sequential pass over the orbit of `0` suffices.

use super::lift::{CircleMapLift, Orbit};
use crate::error::{LabError, Result};
use crate::numerics::{ContinuedFractionState, Scalar};

/// Default number of digits requested from closest returns.
pub const DEFAULT_MAX_LEVEL: usize = 20;

/// Default cap on map evaluations.
pub const DEFAULT_MAX_ITERATIONS: u64 = 1 << 21;

/// Outcome of counting one digit.
#[derive(Clone, Debug, PartialEq)]
pub enum DigitOutcome {
    /// The digit was determined.
    Digit(u64),
    /// Counting stopped early because the digit exceeds the given cap.
    Exceeds(u64),
    /// The orbit hit an integer exactly after `k` steps of the current level.
    Periodic {
        /// Multiplier reached at the exact hit.
        k: u64,
        /// Orbit index of the hit.
        period: u64,
    },
    /// The iteration budget ran out; the digit is at least `k`.
    Budget(u64),
    /// The rotation number is not in (0, 1): `f(0) ≤ 0` gives `Low`, `f(0) ≥ 1` gives `High`.
    OutOfRange(bool),
}

/// Incremental closest-returns digit generator.
pub struct ClosestReturns<'a> {
    orbit: Orbit<'a>,
    level: usize,
    /// `(p_{n−1}, q_{n−1})` and `(p_n, q_n)` for the current level `n`.
    prev: (i64, i64),
    cur: (i64, i64),
    /// Sign of `d_{n−1}`.
    prev_sign: i32,
    digits: Vec<u64>,
    convergents: Vec<(i64, i64)>,
    points: Vec<Scalar>,
    max_iterations: u64,
    started: bool,
    finished: bool,
}

impl<'a> ClosestReturns<'a> {
    /// Starts the recursion for the orbit of `0` under `map`.
    pub fn new(map: &'a CircleMapLift, max_iterations: u64) -> Self {
        ClosestReturns {
            orbit: Orbit::of_zero(map),
            level: 0,
            prev: (1, 0),
            cur: (0, 1),
            prev_sign: -1,
            digits: Vec::new(),
            convergents: vec![(0, 1)],
            points: Vec::new(),
            max_iterations,
            started: false,
            finished: false,
        }
    }

    /// Digits found so far.
    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    /// Map evaluations so far.
    pub fn iterations(&self) -> u64 {
        self.orbit.index()
    }

    /// Sign of `f^j(0) − target` for the current orbit point, computed exactly.
    fn sign_against(&self, target: i64) -> i32 {
        let p = self.orbit.point();
        let diff = p.int - target;
        if diff != 0 {
            diff.signum() as i32
        } else {
            p.frac.signum_i()
        }
    }

    fn offset_value(&self, target: i64) -> Scalar {
        let p = self.orbit.point();
        &p.frac + (p.int - target)
    }

    /// Counts the next digit. With `cap = Some(c)` counting stops as soon as the
    /// digit is known to exceed `c`.
    pub fn next_digit(&mut self, cap: Option<u64>) -> DigitOutcome {
        debug_assert!(!self.finished);
        if !self.started {
            self.started = true;
            self.orbit.step();
            let s0 = self.sign_against(0);
            if s0 <= 0 {
                self.finished = true;
                return DigitOutcome::OutOfRange(false);
            }
            if self.sign_against(1) >= 0 {
                self.finished = true;
                return DigitOutcome::OutOfRange(true);
            }
            self.points.push(self.offset_value(0));
        }
        let n = self.level;
        let (p_prev, q_prev) = self.prev;
        let (p_cur, q_cur) = self.cur;
        let mut k: u64 = 1;
        let mut last_value: Option<Scalar> = None;
        loop {
            let target = p_prev + (k as i64) * p_cur;
            let s = self.sign_against(target);
            if s == 0 {
                self.finished = true;
                return DigitOutcome::Periodic { k, period: self.orbit.index() };
            }
            if s != self.prev_sign {
                break;
            }
            last_value = Some(self.offset_value(target));
            if let Some(c) = cap {
                if k > c {
                    self.finished = true;
                    return DigitOutcome::Exceeds(k);
                }
            }
            if self.orbit.index() + q_cur as u64 > self.max_iterations {
                self.finished = true;
                return DigitOutcome::Budget(k);
            }
            self.orbit.advance(q_cur as u64);
            k += 1;
        }
        let a = k - 1;
        let d_next = last_value.expect("first closest-return test keeps the sign");
        let next = (a as i64 * p_cur + p_prev, a as i64 * q_cur + q_prev);
        self.prev = self.cur;
        self.cur = next;
        self.prev_sign = -self.prev_sign;
        self.digits.push(a);
        self.convergents.push(next);
        self.points.push(d_next);
        self.level = n + 1;
        DigitOutcome::Digit(a)
    }

    /// Freezes the recursion into a state record.
    pub fn into_state(self, truncated: bool, partial_digit: Option<u64>) -> ContinuedFractionState {
        let iterations = self.orbit.index();
        ContinuedFractionState {
            digits: self.digits,
            convergents: self.convergents,
            closest_return_points: self.points,
            truncated,
            partial_digit,
            iterations,
        }
    }
}

/// Digits, convergents and closest-return points of the orbit of `0`.
///
/// Stops after `max_level` digits or when the next digit would exceed
/// `max_iterations` map evaluations (then the state is flagged truncated).
pub fn closest_returns(
    map: &CircleMapLift,
    max_level: usize,
    max_iterations: u64,
) -> Result<ContinuedFractionState> {
    let mut cr = ClosestReturns::new(map, max_iterations);
    while cr.digits().len() < max_level {
        match cr.next_digit(None) {
            DigitOutcome::Digit(_) => {}
            DigitOutcome::Budget(k) => return Ok(cr.into_state(true, Some(k))),
            DigitOutcome::Periodic { period, .. } => {
                return Err(LabError::PeriodicOrbit { level: cr.digits().len(), period })
            }
            DigitOutcome::OutOfRange(high) => {
                if !high && map.value(&Scalar::zero(map.prec())).is_zero() {
                    return Err(LabError::PeriodicOrbit { level: 0, period: 1 });
                }
                return Err(LabError::Range(format!(
                    "rotation number outside (0, 1) (f(0) {} )",
                    if high { ">= 1" } else { "<= 0" }
                )));
            }
            DigitOutcome::Exceeds(_) => unreachable!("no cap was given"),
        }
    }
    Ok(cr.into_state(false, None))
}
