//! Decay of ratio discrepancies between corresponding partition atoms of two maps.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::report::{cell, ExperimentReport, Table};
use super::{check_shared_digits, solve_all, ExperimentConfig};
use crate::circle_map::{build_partition, DynamicalPartition};
use crate::error::{LabError, Result};
use crate::numerics::{fit_semilog, FitResult, Scalar};

/// One level.
#[derive(Clone, Debug, Serialize)]
pub struct RigidityRow {
    /// Level `n`.
    pub n: usize,
    /// Number of atoms.
    pub atoms: usize,
    /// `max |log(|I_g|/|I_f|) − log(|J_g|/|J_f|)|` over adjacent atoms `I, J`.
    pub max_discrepancy: Scalar,
}

/// Output of [`run_rigidity`].
#[derive(Clone, Debug)]
pub struct RigidityResult {
    /// Rows for `n = level_min..=level_max`.
    pub rows: Vec<RigidityRow>,
    /// Fit of `log max_discrepancy` against `n`, when all values are positive.
    pub fit: Option<FitResult>,
    /// Sampled conjugacy `h(f^j(0)) = g^j(0)` at the last level with divided-difference slopes.
    pub conjugacy: Table,
    /// Report.
    pub report: ExperimentReport,
}

/// Max adjacent-atom discrepancy between two partitions with matching labels.
pub fn atom_discrepancy(f: &DynamicalPartition, g: &DynamicalPartition) -> Result<Scalar> {
    if f.atoms.len() != g.atoms.len() || f.atoms.iter().zip(&g.atoms).any(|(a, b)| a.label != b.label) {
        return Err(LabError::Invariant(format!("atom labels differ at level {}", f.level)));
    }
    let n = f.atoms.len();
    let logs: Vec<Scalar> = f.atoms.iter().zip(&g.atoms).map(|(a, b)| (&b.length / &a.length).ln()).collect();
    let prec = logs[0].prec();
    Ok((0..n).map(|i| (&logs[i] - &logs[(i + 1) % n]).abs()).fold(Scalar::zero(prec), Scalar::max_of))
}

fn conjugacy_table(f: &DynamicalPartition, g: &DynamicalPartition) -> Table {
    let mut t = Table::new(&["j", "f_position", "g_position", "slope"]);
    for (i, (a, b)) in f.atoms.iter().zip(&g.atoms).enumerate() {
        let j = f.order[i];
        t.push(vec![j.to_string(), cell(&a.left), cell(&b.left), cell(&(&b.length / &a.length))]);
    }
    t
}

/// Per-level max ratio discrepancy of the dynamical partitions of the two families.
pub fn run_rigidity(cfg: &ExperimentConfig) -> Result<RigidityResult> {
    cfg.require_two("rigidity")?;
    let start = Instant::now();
    let (lo, hi) = (cfg.level_min.max(1), cfg.level_max());
    let target = cfg.target.digits();
    let maps = solve_all(&cfg.families[..2], &target, hi + 2 + cfg.solve_margin, cfg)?;
    check_shared_digits(&maps[0], &maps[1], hi + 2)?;
    let parts: Vec<Result<(DynamicalPartition, DynamicalPartition)>> = (lo..=hi)
        .into_par_iter()
        .map(|n| {
            Ok((
                build_partition(&maps[0].map, &maps[0].solve.cf, n)?,
                build_partition(&maps[1].map, &maps[1].solve.cf, n)?,
            ))
        })
        .collect();
    let parts: Vec<(DynamicalPartition, DynamicalPartition)> = parts.into_iter().collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (k, (f, g)) in parts.iter().enumerate() {
        rows.push(RigidityRow { n: lo + k, atoms: f.atoms.len(), max_discrepancy: atom_discrepancy(f, g)? });
    }
    let prec = cfg.precision_bits;
    let fit = if rows.len() >= 2 && rows.iter().all(|r| r.max_discrepancy.signum_i() > 0) {
        let xs: Vec<Scalar> = rows.iter().map(|r| Scalar::from_i64(r.n as i64, prec)).collect();
        let ys: Vec<Scalar> = rows.iter().map(|r| r.max_discrepancy.clone()).collect();
        Some(fit_semilog(&xs, &ys)?)
    } else {
        None
    };
    let (f, g) = parts.last().expect("at least one level");
    let conjugacy = conjugacy_table(f, g);

    let mut report = ExperimentReport::new("rigidity", cfg);
    let mut t = Table::new(&["n", "atoms", "max_discrepancy"]);
    for r in &rows {
        t.push(vec![r.n.to_string(), r.atoms.to_string(), cell(&r.max_discrepancy)]);
    }
    report.tables.insert("rows".into(), t);
    report.tables.insert("conjugacy".into(), conjugacy.clone());
    if let Some(fr) = &fit {
        report.fits.insert("semilog_discrepancy".into(), fr.clone());
        report.constant("lambda_hat", cell(&fr.slope.exp()));
    }
    report.notes.push("atoms of the dynamical partitions P_n matched by their combinatorial labels".into());
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(RigidityResult { rows, fit, conjugacy, report })
}
