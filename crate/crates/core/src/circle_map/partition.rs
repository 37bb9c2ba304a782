//! Dynamical partitions and real-bounds diagnostics.

use serde::Serialize;

use super::lift::{iterate_jet, CircleMapLift, Orbit};
use crate::error::{LabError, Result};
use crate::numerics::{ContinuedFractionState, Scalar};

/// Which kind of atom: an image of `I_n` or of `I_{n+1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum AtomKind {
    /// `f^j(I_n)`, `0 ≤ j < q_{n+1}`.
    Long,
    /// `f^j(I_{n+1})`, `0 ≤ j < q_n`.
    Short,
}

/// Combinatorial label of an atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AtomLabel {
    /// Atom kind.
    pub kind: AtomKind,
    /// Iterate index `j`.
    pub j: u64,
}

/// One atom: the arc `[left, right]` on the circle (with `right` possibly past 1).
#[derive(Clone, Debug, Serialize)]
pub struct Atom {
    /// Left endpoint in [0, 1).
    pub left: Scalar,
    /// Right endpoint (left + length).
    pub right: Scalar,
    /// Arc length.
    pub length: Scalar,
    /// Combinatorial label.
    pub label: AtomLabel,
}

/// The dynamical partition `P_n` of the circle.
#[derive(Clone, Debug, Serialize)]
pub struct DynamicalPartition {
    /// Level `n`.
    pub level: usize,
    /// `q_n` and `q_{n+1}`.
    pub q_n: u64,
    /// `q_{n+1}`.
    pub q_next: u64,
    /// Circle positions of `f^j(0)`, `0 ≤ j < q_n + q_{n+1}`.
    pub orbit: Vec<Scalar>,
    /// Orbit indices in circle order starting from `0`.
    pub order: Vec<u64>,
    /// Atoms in circle order; atom `i` starts at `orbit[order[i]]`.
    pub atoms: Vec<Atom>,
}

impl DynamicalPartition {
    /// Number of atoms.
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    /// True for an empty partition (never produced by [`build_partition`]).
    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// Builds `P_n` from the first `q_n + q_{n+1}` points of the orbit of `0`.
pub fn build_partition(
    map: &CircleMapLift,
    cf: &ContinuedFractionState,
    level: usize,
) -> Result<DynamicalPartition> {
    if cf.digits.len() < level + 1 {
        return Err(LabError::Domain(format!(
            "partition level {level} needs {} digits, have {}",
            level + 1,
            cf.digits.len()
        )));
    }
    let q_n = cf.q(level) as u64;
    let q_next = cf.q(level + 1) as u64;
    let total = q_n + q_next;
    let mut orbit = Vec::with_capacity(total as usize);
    let mut o = Orbit::of_zero(map);
    for _ in 0..total {
        orbit.push(o.point().circle_position());
        o.step();
    }
    let mut order: Vec<u64> = (0..total).collect();
    order.sort_by(|&a, &b| orbit[a as usize].cmp_total(&orbit[b as usize]));
    let even = level % 2 == 0;
    let mut atoms = Vec::with_capacity(total as usize);
    for i in 0..total as usize {
        let a = order[i];
        let b = order[(i + 1) % total as usize];
        let left = orbit[a as usize].clone();
        let mut right = orbit[b as usize].clone();
        if i + 1 == total as usize {
            right = right + 1;
        }
        let length = &right - &left;
        let diff = b as i64 - a as i64;
        // I_n runs from c to f^{q_n}(c) and lies to the right of c when n is even.
        let label = if diff == q_n as i64 && even {
            AtomLabel { kind: AtomKind::Long, j: a }
        } else if -diff == q_n as i64 && !even {
            AtomLabel { kind: AtomKind::Long, j: b }
        } else if diff == q_next as i64 && !even {
            AtomLabel { kind: AtomKind::Short, j: a }
        } else if -diff == q_next as i64 && even {
            AtomLabel { kind: AtomKind::Short, j: b }
        } else {
            return Err(LabError::Invariant(format!(
                "partition level {level}: adjacent orbit points {a} and {b} do not bound an atom"
            )));
        };
        let ok = match label.kind {
            AtomKind::Long => label.j < q_next,
            AtomKind::Short => label.j < q_n,
        };
        if !ok {
            return Err(LabError::Invariant(format!("partition level {level}: label {label:?} out of range")));
        }
        atoms.push(Atom { left, right, length, label });
    }
    Ok(DynamicalPartition { level, q_n, q_next, orbit, order, atoms })
}

/// Real-bounds measurements on one partition.
#[derive(Clone, Debug, Serialize)]
pub struct RealBoundsReport {
    /// Partition level.
    pub level: usize,
    /// Max over circle-adjacent atoms of the larger length ratio.
    pub k_adj: Scalar,
    /// Smallest atom length.
    pub min_atom: Scalar,
    /// Distortion of `f^{q_n − 1}` on `f(I_{n+1})`.
    pub k_dist: Scalar,
}

/// Max of `Df^m(x)/Df^m(y)` over `samples` interior points of the lifted interval `[a, b]`.
pub fn derivative_ratio(map: &CircleMapLift, a: &Scalar, b: &Scalar, m: u64, samples: usize) -> Result<Scalar> {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let pts = crate::numerics::grid::interior_points(lo, hi, samples);
    let ders: Vec<Scalar> = pts.iter().map(|x| iterate_jet(map, x, m).d1).collect();
    let mut mx = ders[0].clone();
    let mut mn = ders[0].clone();
    for d in &ders[1..] {
        if *d > mx {
            mx = d.clone();
        }
        if *d < mn {
            mn = d.clone();
        }
    }
    if mn.signum_i() <= 0 {
        return Err(LabError::PrecisionExhausted("nonpositive derivative in distortion sample".into()));
    }
    Ok(mx / mn)
}

/// Number of interior samples used by the distortion probes.
pub const DISTORTION_SAMPLES: usize = 17;

/// Lifted endpoints of `f(I_m)` where `I_m = [0, f^{q_m}(0) − p_m]`.
fn image_of_interval(map: &CircleMapLift, cf: &ContinuedFractionState, m: usize) -> (Scalar, Scalar) {
    let prec = map.prec();
    let a = map.value(&Scalar::zero(prec));
    let b = map.value(&cf.closest_return_points[m]);
    (a, b)
}

/// `K_adj`, minimal atom and `K_dist` for a partition.
pub fn real_bounds_report(
    map: &CircleMapLift,
    cf: &ContinuedFractionState,
    partition: &DynamicalPartition,
) -> Result<RealBoundsReport> {
    let prec = map.prec();
    let floor = Scalar::pow2(8 - prec as i32, prec);
    let n = partition.atoms.len();
    let mut k_adj = Scalar::one(prec);
    let mut min_atom = partition.atoms[0].length.clone();
    for i in 0..n {
        let a = &partition.atoms[i].length;
        let b = &partition.atoms[(i + 1) % n].length;
        if *a < floor {
            return Err(LabError::PrecisionExhausted(format!("atom {i} shorter than 2^(8-bits)")));
        }
        let r = if a > b { a / b } else { b / a };
        k_adj = k_adj.max_of(r);
        if *a < min_atom {
            min_atom = a.clone();
        }
    }
    let level = partition.level;
    let (a, b) = image_of_interval(map, cf, level + 1);
    let m = partition.q_n.saturating_sub(1);
    let k_dist = derivative_ratio(map, &a, &b, m, DISTORTION_SAMPLES)?;
    Ok(RealBoundsReport { level, k_adj, min_atom, k_dist })
}

/// Max derivative ratio of `f^{q_{n+1} − 1}` over samples of `f(I_n)`.
pub fn koebe_distortion_probe(
    map: &CircleMapLift,
    cf: &ContinuedFractionState,
    partition: &DynamicalPartition,
) -> Result<Scalar> {
    let (a, b) = image_of_interval(map, cf, partition.level);
    let m = partition.q_next.saturating_sub(1);
    derivative_ratio(map, &a, &b, m, DISTORTION_SAMPLES)
}
