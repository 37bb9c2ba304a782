//! Exponential convergence of renormalizations of two maps with the same rotation number.

use std::time::Instant;

use serde::Serialize;

use super::report::{cell, opt_cell, ExperimentReport, Table};
use super::{check_shared_digits, solve_all, ExperimentConfig, SolvedMap};
use crate::commuting_pair::{distance, MetricVariant};
use crate::error::Result;
use crate::numerics::{fit_loglinear, fit_semilog, FitResult, Scalar};

/// Distances between the level-`n` normalized pairs.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    /// Level.
    pub n: usize,
    /// `d_0`.
    pub d0: Scalar,
    /// `d_1`.
    pub d1: Scalar,
    /// `d_2`.
    pub d2: Scalar,
    /// `d_2(n)/d_2(n−1)`, absent on the first row or after a zero distance.
    pub ratio: Option<Scalar>,
    /// Seconds spent on this row.
    pub wall_time: f64,
}

/// Output of [`run_converge`].
#[derive(Clone, Debug)]
pub struct ConvergeResult {
    /// One row per level.
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares fit of `log d_2` against `log n` on the fit window.
    pub fit: Option<FitResult>,
    /// Least-squares fit of `log d_2` against `n` on the fit window.
    pub semilog: Option<FitResult>,
    /// The two solved maps.
    pub maps: Vec<SolvedMap>,
    /// Report.
    pub report: ExperimentReport,
}

/// Distances `d_0, d_1, d_2` between the normalized level-`n` pairs of two maps, `n = level_min..=depth`.
pub fn run_converge(cfg: &ExperimentConfig) -> Result<ConvergeResult> {
    cfg.require_two("converge")?;
    let start = Instant::now();
    let target = cfg.target.digits();
    let depth = cfg.depth;
    let maps = solve_all(&cfg.families[..2], &target, depth + cfg.solve_margin.max(2), cfg)?;
    check_shared_digits(&maps[0], &maps[1], depth + 2)?;

    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for n in cfg.level_min.max(1)..=depth {
        let t = Instant::now();
        let p1 = maps[0].normalized_pair(n)?;
        let p2 = maps[1].normalized_pair(n)?;
        let m = distance(&p1, &p2, MetricVariant::Moebius, cfg.grid_size)?;
        let ratio = rows
            .last()
            .filter(|r| !r.d2.is_zero())
            .map(|r| m.d(2) / &r.d2);
        rows.push(ConvergenceRow {
            n,
            d0: m.d(0).clone(),
            d1: m.d(1).clone(),
            d2: m.d(2).clone(),
            ratio,
            wall_time: t.elapsed().as_secs_f64(),
        });
    }

    let [lo, hi] = cfg.fit_window.unwrap_or([(depth / 3).max(1), depth]);
    let window: Vec<&ConvergenceRow> = rows.iter().filter(|r| r.n >= lo && r.n <= hi).collect();
    let prec = cfg.precision_bits;
    let xs: Vec<Scalar> = window.iter().map(|r| Scalar::from_i64(r.n as i64, prec)).collect();
    let ys: Vec<Scalar> = window.iter().map(|r| r.d2.clone()).collect();
    let fittable = ys.len() >= 2 && ys.iter().all(|y| y.signum_i() > 0);
    let fit = if fittable { Some(fit_loglinear(&xs, &ys)?) } else { None };
    let semilog = if fittable { Some(fit_semilog(&xs, &ys)?) } else { None };

    let mut report = ExperimentReport::new("converge", cfg);
    let mut table = Table::new(&["n", "d0", "d1", "d2", "ratio"]);
    for r in &rows {
        table.push(vec![r.n.to_string(), cell(&r.d0), cell(&r.d1), cell(&r.d2), opt_cell(&r.ratio)]);
    }
    report.tables.insert("rows".into(), table);
    if let Some(f) = &fit {
        report.fits.insert("loglog_d2".into(), f.clone());
    }
    if let Some(f) = &semilog {
        report.fits.insert("semilog_d2".into(), f.clone());
        report.constant("lambda", cell(&f.slope.exp()));
    }
    let max_ratio = rows
        .iter()
        .filter(|r| r.n > lo)
        .filter_map(|r| r.ratio.clone())
        .fold(None::<Scalar>, |acc, r| Some(acc.map_or(r.clone(), |a| a.max_of(r))));
    if let Some(m) = max_ratio {
        report.constant("max_ratio_in_window", cell(&m));
    }
    report.constant("fit_window", format!("{lo}..{hi}"));
    for (i, m) in maps.iter().enumerate() {
        report.constant(&format!("omega_{}", i + 1), cell(&m.solve.omega));
    }
    report.notes.push("pairs extracted at each level from the solved maps and normalized so that eta(0) = -1".into());
    report.row_wall_times = rows.iter().map(|r| r.wall_time).collect();
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(ConvergeResult { rows, fit, semilog, maps, report })
}
