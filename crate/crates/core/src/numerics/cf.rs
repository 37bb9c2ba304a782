//! Continued-fraction utilities and the rotation-number bookkeeping record.

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use super::scalar::Scalar;
use crate::error::{LabError, Result};

/// Gauss map `θ ↦ 1/θ − ⌊1/θ⌋` on (0, 1).
pub fn gauss_map(theta: &Scalar) -> Result<Scalar> {
    if *theta <= 0i64 || *theta >= 1i64 {
        return Err(LabError::Domain(format!(
            "gauss_map needs 0 < theta < 1, got {theta:?}"
        )));
    }
    let inv = theta.recip();
    let fl = inv.floor();
    Ok(inv - fl)
}

/// Gauss map in exact rational arithmetic.
pub fn gauss_map_rational(theta: &Rational) -> Result<Rational> {
    if *theta <= 0 || *theta >= 1 {
        return Err(LabError::Domain("gauss_map needs 0 < theta < 1".into()));
    }
    let inv = Rational::from(theta.recip_ref());
    let fl = Rational::from(inv.floor_ref());
    Ok(inv - fl)
}

/// Exact value of the finite continued fraction `[a_0, ..., a_{N-1}] = 1/(a_0 + 1/(a_1 + ...))`.
pub fn cf_to_rational(digits: &[u64]) -> Result<Rational> {
    if digits.is_empty() {
        return Err(LabError::Domain("cf_to_real needs a nonempty digit list".into()));
    }
    if digits.contains(&0) {
        return Err(LabError::Domain("continued-fraction digits must be positive".into()));
    }
    let (p, q) = convergents_big(digits).pop().expect("nonempty");
    Ok(Rational::from((p, q)))
}

/// Value of the finite continued fraction at the given precision.
pub fn cf_to_real(digits: &[u64], prec: u32) -> Result<Scalar> {
    Ok(Scalar::from_rational(&cf_to_rational(digits)?, prec))
}

/// Convergents `(p_n, q_n)` for `n = 0..=N` as big integers,
/// with `p_0/q_0 = 0/1`, `p_1/q_1 = 1/a_0` and `q_{n+1} = a_n q_n + q_{n−1}`.
pub fn convergents_big(digits: &[u64]) -> Vec<(Integer, Integer)> {
    let mut out = Vec::with_capacity(digits.len() + 1);
    let (mut p_prev, mut q_prev) = (Integer::from(1), Integer::from(0));
    let (mut p, mut q) = (Integer::from(0), Integer::from(1));
    out.push((p.clone(), q.clone()));
    for &a in digits {
        let p_next = Integer::from(&p * a) + &p_prev;
        let q_next = Integer::from(&q * a) + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        out.push((p.clone(), q.clone()));
    }
    out
}

/// Convergents as machine integers; fails if any denominator overflows `i64`.
pub fn convergents(digits: &[u64]) -> Result<Vec<(i64, i64)>> {
    convergents_big(digits)
        .into_iter()
        .map(|(p, q)| match (p.to_i64(), q.to_i64()) {
            (Some(p), Some(q)) => Ok((p, q)),
            _ => Err(LabError::PrecisionExhausted("convergent exceeds i64".into())),
        })
        .collect()
}

/// Digits of a rational number in (0, 1) (the finite expansion ending with a digit ≥ 2, or `[1]` for 1).
pub fn rational_digits(theta: &Rational, max_len: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut t = theta.clone();
    while out.len() < max_len && t > 0 {
        let inv = Rational::from(t.recip_ref());
        let fl = Integer::from(inv.floor_ref());
        out.push(fl.to_u64().unwrap_or(u64::MAX));
        t = inv - Rational::from(fl);
    }
    out
}

/// Prescribed continued-fraction target: a finite prefix followed by a periodic tail.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetDigits {
    /// Leading digits.
    pub prefix: Vec<u64>,
    /// Digits repeated forever after the prefix (empty for a finite target).
    pub tail: Vec<u64>,
}

impl TargetDigits {
    /// Target with a periodic tail.
    pub fn new(prefix: Vec<u64>, tail: Vec<u64>) -> Self {
        TargetDigits { prefix, tail }
    }

    /// The golden mean `[1, 1, 1, ...]`.
    pub fn golden() -> Self {
        TargetDigits::new(vec![], vec![1])
    }

    /// A finite digit list used as-is.
    pub fn finite(digits: Vec<u64>) -> Self {
        TargetDigits::new(digits, vec![])
    }

    /// Digit at index `i`, or `None` past the end of a finite target.
    pub fn digit(&self, i: usize) -> Option<u64> {
        if i < self.prefix.len() {
            Some(self.prefix[i])
        } else if self.tail.is_empty() {
            None
        } else {
            Some(self.tail[(i - self.prefix.len()) % self.tail.len()])
        }
    }

    /// First `n` digits (shorter for finite targets).
    pub fn take(&self, n: usize) -> Vec<u64> {
        (0..n).map_while(|i| self.digit(i)).collect()
    }

    /// Validates that all digits are positive.
    pub fn validate(&self) -> Result<()> {
        if self.prefix.iter().chain(self.tail.iter()).any(|&a| a == 0) {
            return Err(LabError::Config("target digits must be positive".into()));
        }
        if self.prefix.is_empty() && self.tail.is_empty() {
            return Err(LabError::Config("empty digit target".into()));
        }
        Ok(())
    }
}

/// Rotation-number record produced by closest returns.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContinuedFractionState {
    /// Digits `a_0 .. a_{N−1}`.
    pub digits: Vec<u64>,
    /// Convergents `(p_n, q_n)` for `n = 0..=N`.
    pub convergents: Vec<(i64, i64)>,
    /// Lifted closest returns `f^{q_n}(0) − p_n` for `n = 0..=N`.
    pub closest_return_points: Vec<Scalar>,
    /// True if the iteration budget ran out before `max_level` digits.
    pub truncated: bool,
    /// Lower bound for the digit that was being counted when the budget ran out.
    pub partial_digit: Option<u64>,
    /// Number of map evaluations performed.
    pub iterations: u64,
}

impl ContinuedFractionState {
    /// Return time `q_n`.
    pub fn q(&self, n: usize) -> i64 {
        self.convergents[n].1
    }

    /// Rotation count `p_n`.
    pub fn p(&self, n: usize) -> i64 {
        self.convergents[n].0
    }

    /// Number of known digits.
    pub fn depth(&self) -> usize {
        self.digits.len()
    }
}
