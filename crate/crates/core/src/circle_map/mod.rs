//! Critical circle maps: lift families, closest returns, partitions and the parameter solver.

pub mod family;
pub mod lift;
pub mod partition;
pub mod rotation;
pub mod solver;

pub use family::{FamilyRegistry, FamilySpec, LiftFamily, ParamValue, SineSeries};
pub use lift::{iterate_jet, CircleMapLift, Orbit, SplitPoint};
pub use partition::{
    build_partition, koebe_distortion_probe, real_bounds_report, AtomKind, AtomLabel, DynamicalPartition,
    RealBoundsReport,
};
pub use rotation::{closest_returns, ClosestReturns, DigitOutcome, DEFAULT_MAX_ITERATIONS, DEFAULT_MAX_LEVEL};
pub use solver::{compare_with_target, solve_parameter, DigitComparison, SolveOptions, SolveResult};

use crate::error::Result;
use crate::numerics::{Jet3, Scalar};

/// Value and first three derivatives of the lift at `x`.
pub fn evaluate(map: &CircleMapLift, x: &Scalar) -> Result<Jet3> {
    Ok(map.evaluate(x))
}
