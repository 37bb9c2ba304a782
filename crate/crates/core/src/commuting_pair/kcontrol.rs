//! The seven-condition `K`-control measurement and the Schwarzian scan.

use rayon::prelude::*;
use serde::Serialize;

use super::chain::CompositionChain;
use super::pair::CommutingPair;
use crate::error::{LabError, Result};
use crate::nonlinearity::schwarzian_of_jet;
use crate::numerics::{grid, Scalar};

/// Samples per branch for `C^3` norms, derivative minima and Schwarzian scans.
pub const KCONTROL_SAMPLES: usize = 65;

/// Measured quantities of the seven `K`-control conditions.
#[derive(Clone, Debug, Serialize)]
pub struct KControlReport {
    /// Period `a` of the (case I, normalized) pair.
    pub period: u64,
    /// `ξ(0)`.
    pub xi0: Scalar,
    /// `ξ(0) − η(ξ(0))`.
    pub first_gap: Scalar,
    /// `η^{a−1}(ξ(0)) − η^a(ξ(0))`.
    pub last_gap: Scalar,
    /// `η^a(ξ(0))`.
    pub last_point: Scalar,
    /// `η^{a+1}(ξ(0))`.
    pub overshoot: Scalar,
    /// `max(‖ξ‖_{C³[−1,0]}, ‖η‖_{C³[0,ξ(0)]})` on the sample grid.
    pub c3_norm: Scalar,
    /// `min Dη` on `[η^a(ξ(0)), ξ(0)]`.
    pub min_deta: Scalar,
    /// Smallest `K` making all seven conditions hold (infinite if one fails outright).
    pub minimal_k: Scalar,
    /// Names of the conditions that cannot hold for any finite `K`.
    pub violated: Vec<&'static str>,
    /// Max of `Sη`, `Sξ` over interior samples.
    pub schwarzian_max: Scalar,
}

fn c3_norm(chain: &CompositionChain, lo: &Scalar, hi: &Scalar) -> Scalar {
    let pts = grid::closed_points(lo, hi, KCONTROL_SAMPLES);
    let vals: Vec<Scalar> = pts
        .par_iter()
        .map(|x| {
            let j = chain.jet(x);
            j.f.abs().max_of(j.d1.abs()).max_of(j.d2.abs()).max_of(j.d3.abs())
        })
        .collect();
    vals.into_iter().fold(Scalar::zero(lo.prec()), Scalar::max_of)
}

fn min_derivative(chain: &CompositionChain, lo: &Scalar, hi: &Scalar) -> Scalar {
    let pts = grid::closed_points(lo, hi, KCONTROL_SAMPLES);
    let vals: Vec<Scalar> = pts.par_iter().map(|x| chain.jet(x).d1).collect();
    let mut it = vals.into_iter();
    let first = it.next().expect("nonempty grid");
    it.fold(first, Scalar::min_of)
}

/// Max of the Schwarzian of a chain over interior samples of `[lo, hi]`.
pub fn schwarzian_max(chain: &CompositionChain, lo: &Scalar, hi: &Scalar) -> Scalar {
    let pts = grid::interior_points(lo, hi, KCONTROL_SAMPLES);
    let vals: Vec<Option<Scalar>> = pts.par_iter().map(|x| schwarzian_of_jet(&chain.jet(x)).ok()).collect();
    let mut best: Option<Scalar> = None;
    for v in vals.into_iter().flatten() {
        best = Some(match best {
            None => v,
            Some(b) => b.max_of(v),
        });
    }
    best.unwrap_or_else(|| Scalar::zero(lo.prec()))
}

/// Measures the seven conditions on the normalized case-I form of `pair`.
pub fn k_control(pair: &CommutingPair) -> Result<KControlReport> {
    let p = pair.to_case_one()?.normalize();
    let prec = p.prec();
    let a = p.period()?.finite().ok_or(LabError::NotRenormalizable)?;
    let orbit = p.boundary_orbit()?;
    let a_us = a as usize;
    let xi0 = p.xi0().clone();
    let first_gap = &orbit[0] - &orbit[1];
    let last_gap = &orbit[a_us.saturating_sub(1)] - &orbit[a_us];
    let last_point = orbit[a_us].clone();
    let overshoot = orbit[a_us + 1].clone();
    let zero = Scalar::zero(prec);
    let c3 = c3_norm(p.xi(), p.eta0(), &zero).max_of(c3_norm(p.eta(), &zero, &xi0));
    let min_deta = min_derivative(p.eta(), &last_point, &xi0);
    let one = Scalar::one(prec);
    let mut violated = Vec::new();
    let mut k = one.clone();
    let mut need = |name: &'static str, v: &Scalar, k: &mut Scalar| {
        if v.signum_i() > 0 {
            *k = k.clone().max_of(v.recip());
        } else {
            violated.push(name);
        }
    };
    need("xi(0) >= 1/K", &xi0, &mut k);
    k = k.max_of(xi0.clone());
    need("xi(0) - eta(xi(0)) >= 1/K", &first_gap, &mut k);
    need("eta^(a-1)(xi(0)) - eta^a(xi(0)) >= 1/K", &last_gap, &mut k);
    need("eta^a(xi(0)) >= 1/K", &last_point, &mut k);
    need("eta^(a+1)(xi(0)) <= -1/K", &(-&overshoot), &mut k);
    need("D eta >= 1/K on [eta^a(xi(0)), xi(0)]", &min_deta, &mut k);
    k = k.max_of(c3.clone());
    let minimal_k = if violated.is_empty() { k } else { Scalar::from_float(rug::Float::with_val(prec, rug::float::Special::Infinity)) };
    let s_eta = schwarzian_max(p.eta(), &zero, &xi0);
    let s_xi = schwarzian_max(p.xi(), p.eta0(), &zero);
    Ok(KControlReport {
        period: a,
        xi0,
        first_gap,
        last_gap,
        last_point,
        overshoot,
        c3_norm: c3,
        min_deta,
        minimal_k,
        violated,
        schwarzian_max: s_eta.max_of(s_xi),
    })
}
