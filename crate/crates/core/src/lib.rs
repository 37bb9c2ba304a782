//! Numerical laboratory for renormalization of critical circle maps and critical commuting pairs.

pub mod circle_map;
pub mod commuting_pair;
pub mod error;
pub mod experiments;
pub mod nonlinearity;
pub mod numerics;

pub use error::{LabError, Result};
