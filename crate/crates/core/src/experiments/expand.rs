//! Growth of the parameter derivative of the renormalized boundary point with the period.

use std::time::Instant;

use serde::Serialize;

use super::report::{cell, ExperimentReport, Table};
use super::{large_digit_target, solve_map, ExperimentConfig};
use crate::circle_map::CircleMapLift;
use crate::commuting_pair::{extract_pair, Period};
use crate::error::{LabError, Result};
use crate::numerics::{fit_loglinear, ContinuedFractionState, FitResult, Scalar};

/// Initial finite-difference step `2^(−INITIAL_STEP_EXP)`.
pub const INITIAL_STEP_EXP: i32 = 48;
/// Maximum number of step halvings.
pub const MAX_HALVINGS: usize = 24;

/// Derivatives for one period `a`.
#[derive(Clone, Debug, Serialize)]
pub struct ExpansionRow {
    /// Period.
    pub a: u64,
    /// Solved parameter.
    pub omega: Scalar,
    /// Step `δ` of the accepted estimate.
    pub step: Scalar,
    /// `∂x_a/∂ω` at step `δ/2`.
    pub derivative: Scalar,
    /// `∂x_a/∂ω` at step `δ`.
    pub derivative_coarse: Scalar,
    /// `∂η̃(x*)/∂ω` at `x* = ξ̃(0)/4`.
    pub derivative_positive: Scalar,
}

/// Output of [`run_expansion`].
#[derive(Clone, Debug)]
pub struct ExpansionResult {
    /// One row per digit.
    pub rows: Vec<ExpansionRow>,
    /// Log-log fit of `|∂x_a/∂ω|` against `a`.
    pub fit: FitResult,
    /// Log-log fit of `|∂η̃(x*)/∂ω|` against `a`.
    pub fit_positive: FitResult,
    /// Report.
    pub report: ExperimentReport,
}

struct Probe<'a> {
    map: CircleMapLift,
    cf: &'a ContinuedFractionState,
    level: usize,
    a: u64,
    x_star: Scalar,
}

impl Probe<'_> {
    /// `(x_a, η̃(x*))` of the normalized case-I pair at parameter `w`, or `None` if the period is not `a`.
    fn eval(&self, w: &Scalar) -> Result<Option<(Scalar, Scalar)>> {
        let map = self.map.with_omega(w.clone());
        let pair = match extract_pair(&map, self.cf, self.level) {
            Ok(p) => p.to_case_one()?.normalize(),
            Err(_) => return Ok(None),
        };
        if pair.period()? != Period::Finite(self.a) {
            return Ok(None);
        }
        let orbit = pair.boundary_orbit()?;
        Ok(Some((orbit[self.a as usize].clone(), pair.eta().value(&self.x_star))))
    }

    fn central(&self, w: &Scalar, d: &Scalar) -> Result<Option<(Scalar, Scalar)>> {
        let (Some(p), Some(m)) = (self.eval(&(w + d))?, self.eval(&(w - d))?) else {
            return Ok(None);
        };
        let two_d = d * 2;
        Ok(Some(((&p.0 - &m.0) / &two_d, (&p.1 - &m.1) / &two_d)))
    }
}

/// Central differences in `ω` of `x_a = η^a(ξ(0))` on the normalized pair whose period is `a`.
pub fn run_expansion(cfg: &ExperimentConfig) -> Result<ExpansionResult> {
    let start = Instant::now();
    let prec = cfg.precision_bits;
    let mut rows = Vec::new();
    for &a in &cfg.expansion_digits {
        let (target, level) = large_digit_target(&cfg.expansion_prefix, a, &cfg.target.tail)?;
        let sm = solve_map(&cfg.families[0], &target, level + 2 + cfg.solve_margin, cfg)?;
        let base = sm.pair(level)?.to_case_one()?.normalize();
        let probe = Probe { map: sm.map.clone(), cf: &sm.solve.cf, level, a, x_star: base.xi0() / 4 };
        let w = &sm.solve.omega;
        let mut d = Scalar::pow2(-INITIAL_STEP_EXP, prec);
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let half = &d / 2;
            if let (Some(full), Some(halved)) = (probe.central(w, &d)?, probe.central(w, &half)?) {
                let rel = ((&full.0 - &halved.0) / &halved.0).abs();
                if rel < 0.05 {
                    accepted = Some((d.clone(), full, halved));
                    break;
                }
            }
            d = half;
        }
        let (step, full, halved) = accepted.ok_or_else(|| {
            LabError::PrecisionExhausted(format!("no stable finite-difference step for a = {a}"))
        })?;
        rows.push(ExpansionRow {
            a,
            omega: w.clone(),
            step,
            derivative: halved.0,
            derivative_coarse: full.0,
            derivative_positive: halved.1,
        });
    }
    let xs: Vec<Scalar> = rows.iter().map(|r| Scalar::from_i64(r.a as i64, prec)).collect();
    let ys: Vec<Scalar> = rows.iter().map(|r| r.derivative.abs()).collect();
    let yp: Vec<Scalar> = rows.iter().map(|r| r.derivative_positive.abs()).collect();
    let fit = fit_loglinear(&xs, &ys)?;
    let fit_positive = fit_loglinear(&xs, &yp)?;

    let mut report = ExperimentReport::new("expand", cfg);
    let mut table = Table::new(&["a", "omega", "step", "derivative", "derivative_coarse", "derivative_positive"]);
    for r in &rows {
        table.push(vec![
            r.a.to_string(),
            cell(&r.omega),
            cell(&r.step),
            cell(&r.derivative),
            cell(&r.derivative_coarse),
            cell(&r.derivative_positive),
        ]);
    }
    report.tables.insert("rows".into(), table);
    report.fits.insert("negative_side".into(), fit.clone());
    report.fits.insert("positive_side".into(), fit_positive.clone());
    report.constant("exponent_negative_side", cell(&fit.slope));
    report.constant("exponent_positive_side", cell(&fit_positive.slope));
    report.notes.push("x_a is the a-th boundary point of the normalized case-I pair; the positive-side probe is eta at the fixed point x* = xi(0)/4 of the solved parameter".into());
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(ExpansionResult { rows, fit, fit_positive, report })
}
