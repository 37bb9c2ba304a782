//! Critical commuting pairs: chains, extraction, renormalization, metrics, control and order.

pub mod chain;
pub mod kcontrol;
pub mod metric;
pub mod order;
pub mod pair;
pub mod serial;

pub use chain::{CompositionChain, Step};
pub use kcontrol::{k_control, KControlReport};
pub use metric::{distance, MetricReport, MetricVariant, MobiusFrame, DEFAULT_GRID};
pub use order::{flattest_point, order_leq, FlattestPoint};
pub use pair::{
    extract_pair, pair_rotation_digits, tau_pair, Case, CommutingPair, PairMeta, Period, ValidationReport,
};
pub use serial::{pair_from_json, pair_to_json, PairRecord};

pub use crate::circle_map::koebe_distortion_probe;

use crate::error::Result;

/// Möbius frame of a pair: `A(η(0)) = −1`, `A(0) = 0`, `A(ξ(0)) = 1`.
pub fn mobius_frame(pair: &CommutingPair) -> Result<MobiusFrame> {
    MobiusFrame::through(pair.eta0(), pair.xi0())
}
