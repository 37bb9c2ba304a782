//! Ratios `d_2(Rζ₀, Rζ₁)/d_2(ζ₀, ζ₁)` along a renormalization orbit.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::report::{cell, opt_cell, ExperimentReport, Table};
use super::{check_shared_digits, solve_all, ExperimentConfig};
use crate::commuting_pair::{distance, MetricVariant};
use crate::error::{LabError, Result};
use crate::numerics::Scalar;

/// One level of the probe.
#[derive(Clone, Debug, Serialize)]
pub struct LipschitzRow {
    /// Level `n`.
    pub n: usize,
    /// `d_2(ζ₀, ζ₁)` at level `n`.
    pub d2: Scalar,
    /// `d_2` at level `n + 1`.
    pub d2_next: Scalar,
    /// Their ratio, absent when `d2` is zero.
    pub ratio: Option<Scalar>,
}

/// Output of [`run_lipschitz_probe`].
#[derive(Clone, Debug)]
pub struct LipschitzResult {
    /// Rows for `n = level_min..=level_max`.
    pub rows: Vec<LipschitzRow>,
    /// Largest defined ratio.
    pub max_ratio: Option<Scalar>,
    /// Report.
    pub report: ExperimentReport,
}

/// Lipschitz ratios for levels `level_min..=level_max`; `Rζ_n` is the normalized level-`n+1` pair.
pub fn run_lipschitz_probe(cfg: &ExperimentConfig) -> Result<LipschitzResult> {
    cfg.require_two("lipschitz")?;
    let start = Instant::now();
    let (lo, hi) = (cfg.level_min.max(1), cfg.level_max());
    let target = cfg.target.digits();
    let maps = solve_all(&cfg.families[..2], &target, hi + 1 + cfg.solve_margin.max(2), cfg)?;
    check_shared_digits(&maps[0], &maps[1], hi + 3)?;
    let d2s: Vec<Result<Scalar>> = (lo..=hi + 1)
        .into_par_iter()
        .map(|n| {
            let p1 = maps[0].normalized_pair(n)?;
            let p2 = maps[1].normalized_pair(n)?;
            for p in [&p1, &p2] {
                if p.period()?.finite().is_none() {
                    return Err(LabError::NotRenormalizable);
                }
            }
            Ok(distance(&p1, &p2, MetricVariant::Moebius, cfg.grid_size)?.d(2).clone())
        })
        .collect();
    let d2s: Vec<Scalar> = d2s.into_iter().collect::<Result<_>>()?;
    let rows: Vec<LipschitzRow> = (lo..=hi)
        .map(|n| {
            let d2 = d2s[n - lo].clone();
            let d2_next = d2s[n - lo + 1].clone();
            let ratio = if d2.is_zero() { None } else { Some(&d2_next / &d2) };
            LipschitzRow { n, d2, d2_next, ratio }
        })
        .collect();
    let max_ratio = rows
        .iter()
        .filter_map(|r| r.ratio.clone())
        .fold(None::<Scalar>, |acc, r| Some(acc.map_or(r.clone(), |a| a.max_of(r))));

    let mut report = ExperimentReport::new("lipschitz", cfg);
    let mut t = Table::new(&["n", "d2", "d2_next", "ratio"]);
    for r in &rows {
        t.push(vec![r.n.to_string(), cell(&r.d2), cell(&r.d2_next), opt_cell(&r.ratio)]);
    }
    report.tables.insert("rows".into(), t);
    report.constant("max_ratio", opt_cell(&max_ratio));
    report.notes.push("R of the level-n pair is the normalized level-(n+1) pair".into());
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(LipschitzResult { rows, max_ratio, report })
}
