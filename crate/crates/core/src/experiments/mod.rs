//! Experiment drivers: convergence, Yoccoz geometry, expansion, synchronization,
//! Lipschitz probe and rigidity, with CSV/JSON reports.

pub mod config;
pub mod converge;
pub mod expand;
pub mod lipschitz;
pub mod report;
pub mod rigidity;
pub mod sync;
pub mod yoccoz;

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{ExperimentConfig, OutputFormat, TargetSpec};
pub use converge::{run_converge, ConvergeResult, ConvergenceRow};
pub use expand::{run_expansion, ExpansionResult, ExpansionRow};
pub use lipschitz::{run_lipschitz_probe, LipschitzResult, LipschitzRow};
pub use report::{ExperimentReport, Table};
pub use rigidity::{run_rigidity, RigidityResult, RigidityRow};
pub use sync::{run_sync, sync_profile, SyncProfile, SyncResult};
pub use yoccoz::{run_yoccoz, YoccozResult, YoccozRow};

use crate::circle_map::{solve_parameter, CircleMapLift, FamilySpec, SolveOptions, SolveResult};
use crate::commuting_pair::{extract_pair, CommutingPair};
use crate::error::{LabError, Result};
use crate::numerics::TargetDigits;

/// A family member solved for a target rotation number.
#[derive(Clone, Debug, Serialize)]
pub struct SolvedMap {
    /// Family spec.
    pub spec: FamilySpec,
    /// The solved map.
    #[serde(skip)]
    pub map: CircleMapLift,
    /// Solver record.
    pub solve: SolveResult,
}

impl SolvedMap {
    /// Pair of level `n`.
    pub fn pair(&self, n: usize) -> Result<CommutingPair> {
        extract_pair(&self.map, &self.solve.cf, n)
    }

    /// Normalized pair of level `n`.
    pub fn normalized_pair(&self, n: usize) -> Result<CommutingPair> {
        Ok(self.pair(n)?.normalize())
    }
}

/// Solves one family for `target` to `depth` digits.
pub fn solve_map(spec: &FamilySpec, target: &TargetDigits, depth: usize, cfg: &ExperimentConfig) -> Result<SolvedMap> {
    let prec = cfg.precision_bits;
    let family = spec.build(prec)?;
    let mut opts = SolveOptions::new(depth, prec).with_refine(cfg.refine);
    opts.max_iterations = cfg.max_iterations;
    let solve = solve_parameter(Arc::clone(&family), target, &opts)?;
    if !solve.verified {
        return Err(LabError::SolverDepth(format!(
            "{} reproduced {} of {depth} digits",
            spec.id, solve.achieved_depth
        )));
    }
    let map = CircleMapLift::new(family, solve.omega.clone());
    Ok(SolvedMap { spec: spec.clone(), map, solve })
}

/// Solves every family in parallel; identical specs are solved once.
pub fn solve_all(
    specs: &[FamilySpec],
    target: &TargetDigits,
    depth: usize,
    cfg: &ExperimentConfig,
) -> Result<Vec<SolvedMap>> {
    let mut unique: Vec<FamilySpec> = Vec::new();
    for s in specs {
        if !unique.contains(s) {
            unique.push(s.clone());
        }
    }
    let solved: Vec<Result<SolvedMap>> = unique.par_iter().map(|s| solve_map(s, target, depth, cfg)).collect();
    let solved: Vec<SolvedMap> = solved.into_iter().collect::<Result<_>>()?;
    Ok(specs
        .iter()
        .map(|s| solved[unique.iter().position(|u| u == s).expect("present")].clone())
        .collect())
}

/// Fails unless both maps share their first `n` digits.
pub fn check_shared_digits(a: &SolvedMap, b: &SolvedMap, n: usize) -> Result<()> {
    let da = &a.solve.cf.digits;
    let db = &b.solve.cf.digits;
    if da.len() < n || db.len() < n || da[..n] != db[..n] {
        return Err(LabError::SolverDepth(format!("solved maps disagree within the first {n} digits")));
    }
    Ok(())
}

/// Target `prefix ++ [a] ++ tail^∞` and the level whose pair has period `a`.
pub fn large_digit_target(prefix: &[u64], a: u64, tail: &[u64]) -> Result<(TargetDigits, usize)> {
    if prefix.is_empty() {
        return Err(LabError::Config("the prefix before a large digit must be nonempty".into()));
    }
    let mut digits = prefix.to_vec();
    digits.push(a);
    Ok((TargetDigits::new(digits, tail.to_vec()), prefix.len() - 1))
}

/// Names accepted by [`run_named`].
pub const EXPERIMENTS: [&str; 6] = ["converge", "yoccoz", "expand", "sync", "lipschitz", "rigidity"];

/// Runs an experiment by name and returns its report.
pub fn run_named(name: &str, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    match name {
        "converge" => Ok(run_converge(cfg)?.report),
        "yoccoz" => Ok(run_yoccoz(cfg, cfg.large_digit)?.report),
        "expand" => Ok(run_expansion(cfg)?.report),
        "sync" => Ok(run_sync(cfg)?.report),
        "lipschitz" => Ok(run_lipschitz_probe(cfg)?.report),
        "rigidity" => Ok(run_rigidity(cfg)?.report),
        other => Err(LabError::Config(format!("unknown experiment {other:?}"))),
    }
}
