//! Arbitrary-precision scalars, 3-jets, continued fractions, fits, quadrature and grids.

pub mod cf;
pub mod fit;
pub mod grid;
pub mod jet;
pub mod quad;
pub mod scalar;

pub use cf::{
    cf_to_rational, cf_to_real, convergents, gauss_map, gauss_map_rational, ContinuedFractionState,
    TargetDigits,
};
pub use fit::{fit_linear, fit_loglinear, fit_semilog, FitResult};
pub use jet::{jet_compose, Jet3};
pub use scalar::{Scalar, DEFAULT_PRECISION};
