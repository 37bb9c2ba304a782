//! Fundamental-domain geometry of a pair with a large period.

use std::time::Instant;

use serde::Serialize;

use super::report::{cell, ExperimentReport, Table};
use super::{large_digit_target, solve_map, ExperimentConfig, SolvedMap};
use crate::commuting_pair::{flattest_point, FlattestPoint};
use crate::error::{LabError, Result};
use crate::numerics::Scalar;

/// One fundamental domain `I_i = [x_i, x_{i−1}]`.
#[derive(Clone, Debug, Serialize)]
pub struct YoccozRow {
    /// Index `i`.
    pub i: u64,
    /// `|I_i|`.
    pub length: Scalar,
    /// `min{i, a − i}`.
    pub m: u64,
    /// `r_i = |I_i|·min{i, a − i}²`.
    pub r: Scalar,
}

/// Output of [`run_yoccoz`].
#[derive(Clone, Debug)]
pub struct YoccozResult {
    /// Period `a`.
    pub a: u64,
    /// Level of the pair.
    pub level: usize,
    /// Rows `i = 1..a−1`.
    pub rows: Vec<YoccozRow>,
    /// `max r_i / min r_i`.
    pub max_over_min: Scalar,
    /// Flattest point, when `Dη = 1` has a solution.
    pub flattest: Option<FlattestPoint>,
    /// `N/a` for the flattest point index `N`.
    pub n_over_a: Option<f64>,
    /// The solved map.
    pub map: SolvedMap,
    /// Report.
    pub report: ExperimentReport,
}

/// Measures `|I_i|` for the first family solved to digits `large_prefix ++ [a] ++ tail`.
pub fn run_yoccoz(cfg: &ExperimentConfig, a: u64) -> Result<YoccozResult> {
    let start = Instant::now();
    let (target, level) = large_digit_target(&cfg.large_prefix, a, &cfg.target.tail)?;
    let sm = solve_map(&cfg.families[0], &target, level + 2 + cfg.solve_margin, cfg)?;
    let pair = sm.pair(level)?.to_case_one()?.normalize();
    let period = pair.period()?.finite().ok_or(LabError::NotRenormalizable)?;
    if period != a {
        return Err(LabError::SolverDepth(format!("pair period {period} differs from the target digit {a}")));
    }
    let orbit = pair.boundary_orbit()?;
    let rows: Vec<YoccozRow> = (1..a)
        .map(|i| {
            let length = &orbit[i as usize - 1] - &orbit[i as usize];
            let m = i.min(a - i);
            let r = &length * (m * m) as i64;
            YoccozRow { i, length, m, r }
        })
        .collect();
    let mut rmax = rows[0].r.clone();
    let mut rmin = rows[0].r.clone();
    for row in &rows[1..] {
        rmax = rmax.max_of(row.r.clone());
        rmin = rmin.min_of(row.r.clone());
    }
    let max_over_min = &rmax / &rmin;
    let flattest = if pair.criticality().is_some() { Some(flattest_point(&pair)?) } else { None };
    let n_over_a = flattest.as_ref().map(|f| f.index as f64 / a as f64);

    let mut report = ExperimentReport::new("yoccoz", cfg);
    let mut table = Table::new(&["i", "length", "min_i_a_minus_i", "r"]);
    for r in &rows {
        table.push(vec![r.i.to_string(), cell(&r.length), r.m.to_string(), cell(&r.r)]);
    }
    report.tables.insert("domains".into(), table);
    report.constant("a", a);
    report.constant("level", level);
    report.constant("max_r_over_min_r", cell(&max_over_min));
    report.constant("omega", cell(&sm.solve.omega));
    if let Some(f) = &flattest {
        report.constant("flattest_point", cell(&f.p));
        report.constant("flattest_index", f.index);
        report.constant("flattest_dn_residual", cell(&f.residual));
    }
    if let Some(r) = n_over_a {
        report.constant("n_over_a", r);
    }
    report.notes.push("case-I normalized pair; x_i = eta^i(xi(0)), I_i = [x_i, x_(i-1)]".into());
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(YoccozResult { a, level, rows, max_over_min, flattest, n_over_a, map: sm, report })
}
