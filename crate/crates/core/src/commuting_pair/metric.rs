//! Möbius-framed and affine-framed `C^r` distances between pairs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pair::CommutingPair;
use crate::error::{LabError, Result};
use crate::numerics::{grid, Jet3, Scalar};

/// The Möbius map `A(x) = a x / (c x + 1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MobiusFrame {
    /// Coefficient `a`.
    pub a: Scalar,
    /// Coefficient `c`.
    pub c: Scalar,
}

impl MobiusFrame {
    /// The unique map with `A(u) = −1`, `A(0) = 0`, `A(v) = 1` for `u < 0 < v`.
    pub fn through(u: &Scalar, v: &Scalar) -> Result<Self> {
        if u.signum_i() >= 0 || v.signum_i() <= 0 {
            return Err(LabError::Domain("Möbius frame needs eta(0) < 0 < xi(0)".into()));
        }
        let iu = u.recip();
        let iv = v.recip();
        let a = (&iv - &iu) / 2;
        let c = (-(&iu) - &iv) / 2;
        Ok(MobiusFrame { a, c })
    }

    /// Jet of `A` at `x`.
    pub fn jet(&self, x: &Scalar) -> Jet3 {
        let den = &self.c * x + 1;
        let inv = den.recip();
        let inv2 = inv.square();
        let inv3 = &inv2 * &inv;
        let inv4 = inv2.square();
        let ac = &self.a * &self.c;
        Jet3::new(
            &self.a * x * &inv,
            &self.a * &inv2,
            -(&ac * &inv3) * 2,
            &ac * &self.c * &inv4 * 6,
        )
    }

    /// Jet of `A^{−1}(y) = y/(a − c y)` at `y`.
    pub fn inverse_jet(&self, y: &Scalar) -> Jet3 {
        let den = &self.a - &(&self.c * y);
        let inv = den.recip();
        let inv2 = inv.square();
        let inv3 = &inv2 * &inv;
        let inv4 = inv2.square();
        let ac = &self.a * &self.c;
        Jet3::new(y * &inv, &self.a * &inv2, &ac * &inv3 * 2, &ac * &self.c * &inv4 * 6)
    }
}

/// Framing used by [`distance`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricVariant {
    /// Möbius frame sending `η(0), 0, ξ(0)` to `−1, 0, 1`.
    Moebius,
    /// Linear frame `x ↦ x/|η(0)|`.
    Affine,
}

/// Sampled `C^0`, `C^1`, `C^2` distances and the ratio term.
#[derive(Clone, Debug, Serialize)]
pub struct MetricReport {
    /// `d_0`.
    pub d0: Scalar,
    /// `d_1`.
    pub d1: Scalar,
    /// `d_2`.
    pub d2: Scalar,
    /// `|ξ₁(0)/η₁(0) − ξ₂(0)/η₂(0)|`.
    pub ratio_term: Scalar,
    /// Uniform points per side.
    pub grid_size: usize,
    /// Framing used.
    pub variant: MetricVariant,
}

impl MetricReport {
    /// `d_r` for `r ∈ {0, 1, 2}`.
    pub fn d(&self, r: usize) -> &Scalar {
        match r {
            0 => &self.d0,
            1 => &self.d1,
            _ => &self.d2,
        }
    }
}

/// Default number of uniform grid points per side.
pub const DEFAULT_GRID: usize = 257;

enum Frame {
    Moebius(MobiusFrame),
    Affine(Scalar),
}

impl Frame {
    fn of(pair: &CommutingPair, variant: MetricVariant) -> Result<Frame> {
        Ok(match variant {
            MetricVariant::Moebius => Frame::Moebius(MobiusFrame::through(pair.eta0(), pair.xi0())?),
            MetricVariant::Affine => Frame::Affine(pair.eta0().abs()),
        })
    }

    fn framed_jet(&self, pair: &CommutingPair, x: &Scalar) -> Jet3 {
        match self {
            Frame::Moebius(m) => {
                let seed = m.inverse_jet(x);
                let inner = pair.jet_seeded(&seed, x.signum_i() >= 0);
                m.jet(&inner.f).compose(&inner)
            }
            Frame::Affine(s) => {
                let prec = s.prec();
                let seed = Jet3::affine(x * s, s.clone());
                let inner = pair.jet_seeded(&seed, x.signum_i() >= 0);
                let inv = s.recip();
                inner.scale_shift(&inv, &Scalar::zero(prec))
            }
        }
    }
}

impl CommutingPair {
    /// Jet of `η` (if `right`) or `ξ` composed with a seed jet.
    pub fn jet_seeded(&self, seed: &Jet3, right: bool) -> Jet3 {
        if right {
            self.eta().eval_jet(seed)
        } else {
            self.xi().eval_jet(seed)
        }
    }
}

/// Sample points of the framed interval for both pairs.
fn sample_points(p1: &CommutingPair, p2: &CommutingPair, variant: MetricVariant, m: usize) -> Vec<Scalar> {
    let prec = p1.prec().max(p2.prec());
    let side = grid::unit_side_grid(m, prec);
    let right_scale = match variant {
        MetricVariant::Moebius => Scalar::one(prec),
        MetricVariant::Affine => {
            let r1 = p1.xi0() / &p1.eta0().abs();
            let r2 = p2.xi0() / &p2.eta0().abs();
            r1.min_of(r2)
        }
    };
    let mut pts: Vec<Scalar> = side.iter().rev().map(|x| -x).collect();
    pts.extend(side.iter().map(|x| x * &right_scale));
    pts
}

/// Distances `d_0, d_1, d_2` between two pairs of the same criticality.
pub fn distance(
    p1: &CommutingPair,
    p2: &CommutingPair,
    variant: MetricVariant,
    grid_size: usize,
) -> Result<MetricReport> {
    if p1.criticality() != p2.criticality() {
        return Err(LabError::Domain("distance between pairs of different criticality".into()));
    }
    let prec = p1.prec().max(p2.prec());
    let ratio_term = (p1.xi0() / p1.eta0() - p2.xi0() / p2.eta0()).abs();
    let f1 = Frame::of(p1, variant)?;
    let f2 = Frame::of(p2, variant)?;
    let pts = sample_points(p1, p2, variant, grid_size);
    let per_point: Vec<[Scalar; 3]> = pts
        .par_iter()
        .map(|x| {
            let a = f1.framed_jet(p1, x);
            let b = f2.framed_jet(p2, x);
            [(&a.f - &b.f).abs(), (&a.d1 - &b.d1).abs(), (&a.d2 - &b.d2).abs()]
        })
        .collect();
    let mut sup = [Scalar::zero(prec), Scalar::zero(prec), Scalar::zero(prec)];
    for row in &per_point {
        for k in 0..3 {
            if row[k] > sup[k] {
                sup[k] = row[k].clone();
            }
        }
    }
    let d0 = ratio_term.clone().max_of(sup[0].clone());
    let d1 = d0.clone().max_of(sup[1].clone());
    let d2 = d1.clone().max_of(sup[2].clone());
    Ok(MetricReport { d0, d1, d2, ratio_term, grid_size, variant })
}
