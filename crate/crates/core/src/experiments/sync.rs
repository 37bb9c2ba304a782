//! Synchronization profiles of two pairs with the same period.

use std::time::Instant;

use rug::Rational;
use serde::Serialize;

use super::report::{cell, ExperimentReport, Table};
use super::{check_shared_digits, large_digit_target, solve_all, ExperimentConfig};
use crate::circle_map::{FamilySpec, ParamValue};
use crate::commuting_pair::{distance, flattest_point, CommutingPair, MetricVariant};
use crate::error::{LabError, Result};
use crate::numerics::Scalar;

/// Boundary-orbit differences of two aligned pairs and the measured constants.
#[derive(Clone, Debug, Serialize)]
pub struct SyncProfile {
    /// Level of the pairs.
    pub level: usize,
    /// Common period `a`.
    pub a: u64,
    /// `ε = d_2` of the aligned pairs.
    pub epsilon: Scalar,
    /// `h = η(p) − η̃(p)` at the flattest point `p` of the first pair.
    pub h: Scalar,
    /// `|p − p̃|`.
    pub p_residual: Scalar,
    /// `Δx_i = x̃_i − x_i`, `i = 0..a`.
    pub dx: Vec<Scalar>,
    /// `Δ_i = |Δx_i − Δx_{i−1}|`, `i = 1..a`.
    pub delta: Vec<Scalar>,
    /// `|Δx_a|/ε`.
    pub l_sync: Scalar,
    /// `max_{1≤i≤a/2} i|Δx_i|/ε`.
    pub k_dxi: Scalar,
    /// `a²|h|/ε`.
    pub k_h: Scalar,
}

/// Output of [`run_sync`].
#[derive(Clone, Debug)]
pub struct SyncResult {
    /// Profile for the configured families.
    pub base: SyncProfile,
    /// Profile with the second family's `beta` scaled, when it has one.
    pub refined: Option<SyncProfile>,
    /// Report.
    pub report: ExperimentReport,
}

/// Profile of two pairs after normalizing the first and rescaling the second so that `ξ̃(0) = ξ(0)`.
pub fn sync_profile(first: &CommutingPair, second: &CommutingPair, grid_size: usize) -> Result<SyncProfile> {
    let p1 = first.to_case_one()?.normalize();
    let q = second.to_case_one()?;
    let p2 = q.rescale(&(q.xi0() / p1.xi0()));
    let a = p1.period()?.finite().ok_or(LabError::NotRenormalizable)?;
    let a2 = p2.period()?.finite().ok_or(LabError::NotRenormalizable)?;
    if a != a2 {
        return Err(LabError::SolverDepth(format!("periods differ: {a} and {a2}")));
    }
    let prec = p1.prec();
    let epsilon = distance(&p1, &p2, MetricVariant::Moebius, grid_size)?.d(2).clone();
    let x = p1.boundary_orbit()?;
    let y = p2.boundary_orbit()?;
    let dx: Vec<Scalar> = x.iter().zip(&y).map(|(u, v)| v - u).collect();
    let delta: Vec<Scalar> = (1..dx.len()).map(|i| (&dx[i] - &dx[i - 1]).abs()).collect();
    let (h, p_residual) = if a >= 2 {
        let f1 = flattest_point(&p1)?;
        let f2 = flattest_point(&p2)?;
        (&f1.value - &p2.eta().value(&f1.p), (&f1.p - &f2.p).abs())
    } else {
        (Scalar::zero(prec), Scalar::zero(prec))
    };
    let per_eps = |v: Scalar| if epsilon.is_zero() { Scalar::zero(prec) } else { v / &epsilon };
    let l_sync = per_eps(dx[a as usize].abs());
    let k_dxi = per_eps(
        (1..=(a as usize) / 2)
            .map(|i| &dx[i].abs() * i as i64)
            .fold(Scalar::zero(prec), Scalar::max_of),
    );
    let k_h = per_eps(&h.abs() * (a * a) as i64);
    Ok(SyncProfile {
        level: p1.meta().level.unwrap_or(0),
        a,
        epsilon,
        h,
        p_residual,
        dx,
        delta,
        l_sync,
        k_dxi,
        k_h,
    })
}

fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || LabError::Config(format!("cannot read {t:?} as an exact rational"));
    if let Some((int, frac)) = t.split_once('.') {
        let digits = format!("{int}{frac}");
        let num: rug::Integer = digits.parse().map_err(|_| bad())?;
        let den = rug::Integer::from(rug::Integer::u_pow_u(10, frac.len() as u32));
        return Ok(Rational::from((num, den)));
    }
    t.parse::<Rational>().map_err(|_| bad())
}

/// The family spec with its `beta` parameter multiplied by `scale`.
pub fn scaled_beta(spec: &FamilySpec, scale: &str) -> Result<Option<FamilySpec>> {
    let Some(beta) = spec.param_text("beta") else { return Ok(None) };
    let r = parse_rational(&beta)? * parse_rational(scale)?;
    let mut out = spec.clone();
    out.params.insert("beta".into(), ParamValue::Text(r.to_string()));
    Ok(Some(out))
}

fn profile_for(cfg: &ExperimentConfig, specs: &[FamilySpec]) -> Result<SyncProfile> {
    let (target, level) = large_digit_target(&cfg.large_prefix, cfg.sync_digit, &cfg.target.tail)?;
    let depth = level + 2 + cfg.solve_margin;
    let maps = solve_all(specs, &target, depth, cfg)?;
    check_shared_digits(&maps[0], &maps[1], depth)?;
    sync_profile(&maps[0].pair(level)?, &maps[1].pair(level)?, cfg.grid_size)
}

/// Synchronization profile of the two families at the level whose period is `sync_digit`,
/// plus the same profile with the second family's `beta` scaled by `sync_beta_scale`.
pub fn run_sync(cfg: &ExperimentConfig) -> Result<SyncResult> {
    cfg.require_two("sync")?;
    let start = Instant::now();
    let base = profile_for(cfg, &cfg.families[..2])?;
    let refined = match scaled_beta(&cfg.families[1], &cfg.sync_beta_scale)? {
        Some(spec) => Some(profile_for(cfg, &[cfg.families[0].clone(), spec])?),
        None => None,
    };

    let mut report = ExperimentReport::new("sync", cfg);
    let mut runs = vec![("base", &base)];
    if let Some(r) = &refined {
        runs.push(("refined", r));
    }
    for (name, prof) in &runs {
        let mut t = Table::new(&["i", "dx", "delta"]);
        for (i, d) in prof.dx.iter().enumerate() {
            let delta = if i == 0 { String::new() } else { cell(&prof.delta[i - 1]) };
            t.push(vec![i.to_string(), cell(d), delta]);
        }
        report.tables.insert(format!("{name}_profile"), t);
        report.constant(&format!("{name}_a"), prof.a);
        report.constant(&format!("{name}_level"), prof.level);
        report.constant(&format!("{name}_epsilon"), cell(&prof.epsilon));
        report.constant(&format!("{name}_h"), cell(&prof.h));
        report.constant(&format!("{name}_p_residual"), cell(&prof.p_residual));
        report.constant(&format!("{name}_l_sync"), cell(&prof.l_sync));
        report.constant(&format!("{name}_k_dxi"), cell(&prof.k_dxi));
        report.constant(&format!("{name}_k_h"), cell(&prof.k_h));
    }
    report.notes.push(
        "pairs aligned affinely: the first is normalized, the second rescaled so that both xi(0) agree".into(),
    );
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(SyncResult { base, refined, report })
}
