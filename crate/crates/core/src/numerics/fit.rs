//! Least-squares line fits with deterministic accumulation order.

use serde::{Deserialize, Serialize};

use super::scalar::Scalar;
use crate::error::{LabError, Result};

/// Summary of a least-squares line fit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitResult {
    /// Fitted slope.
    pub slope: Scalar,
    /// Fitted intercept.
    pub intercept: Scalar,
    /// Coefficient of determination, clamped to [0, 1].
    pub r_squared: Scalar,
    /// Number of points used.
    pub n_points: usize,
}

/// Ordinary least squares for `y = slope·x + intercept`, summed in index order.
pub fn fit_linear(xs: &[Scalar], ys: &[Scalar]) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(LabError::Domain("fit needs equal-length inputs".into()));
    }
    if xs.len() < 2 {
        return Err(LabError::Domain("fit needs at least two points".into()));
    }
    let prec = xs.iter().chain(ys.iter()).map(|s| s.prec()).max().unwrap();
    let n = Scalar::from_i64(xs.len() as i64, prec);
    let mut sx = Scalar::zero(prec);
    let mut sy = Scalar::zero(prec);
    for (x, y) in xs.iter().zip(ys) {
        sx = sx + x;
        sy = sy + y;
    }
    let mx = &sx / &n;
    let my = &sy / &n;
    let mut sxx = Scalar::zero(prec);
    let mut sxy = Scalar::zero(prec);
    let mut syy = Scalar::zero(prec);
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - &mx;
        let dy = y - &my;
        sxx = sxx + dx.square();
        sxy = sxy + &dx * &dy;
        syy = syy + dy.square();
    }
    if sxx.is_zero() {
        return Err(LabError::Domain("fit abscissae are all equal".into()));
    }
    let slope = &sxy / &sxx;
    let intercept = &my - &slope * &mx;
    let mut ssres = Scalar::zero(prec);
    for (x, y) in xs.iter().zip(ys) {
        let r = y - (&slope * x + &intercept);
        ssres = ssres + r.square();
    }
    let one = Scalar::one(prec);
    let r2 = if syy.is_zero() {
        one
    } else {
        let v = Scalar::one(prec) - &ssres / &syy;
        v.max_of(Scalar::zero(prec)).min_of(one)
    };
    Ok(FitResult { slope, intercept, r_squared: r2, n_points: xs.len() })
}

fn logs(v: &[Scalar], what: &str) -> Result<Vec<Scalar>> {
    v.iter()
        .map(|x| {
            if *x > 0i64 {
                Ok(x.ln())
            } else {
                Err(LabError::Domain(format!("{what} must be positive for a log fit")))
            }
        })
        .collect()
}

/// Least-squares line through `(log x_i, log y_i)`.
pub fn fit_loglinear(xs: &[Scalar], ys: &[Scalar]) -> Result<FitResult> {
    fit_linear(&logs(xs, "abscissae")?, &logs(ys, "ordinates")?)
}

/// Least-squares line through `(x_i, log y_i)`; the slope is `log λ` for `y ≈ C λ^x`.
pub fn fit_semilog(xs: &[Scalar], ys: &[Scalar]) -> Result<FitResult> {
    fit_linear(xs, &logs(ys, "ordinates")?)
}
