//! Third-order jets: a value together with its first three derivatives.

use serde::{Deserialize, Serialize};

use super::scalar::Scalar;

/// Value and first three derivatives of a function at a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Jet3 {
    /// Function value.
    pub f: Scalar,
    /// First derivative.
    pub d1: Scalar,
    /// Second derivative.
    pub d2: Scalar,
    /// Third derivative.
    pub d3: Scalar,
}

impl Jet3 {
    /// Builds a jet from its four components.
    pub fn new(f: Scalar, d1: Scalar, d2: Scalar, d3: Scalar) -> Self {
        Jet3 { f, d1, d2, d3 }
    }

    /// Jet of the identity map at `x`.
    pub fn identity(x: Scalar) -> Self {
        let p = x.prec();
        Jet3::new(x, Scalar::one(p), Scalar::zero(p), Scalar::zero(p))
    }

    /// Jet of a constant function.
    pub fn constant(c: Scalar) -> Self {
        let p = c.prec();
        Jet3::new(c, Scalar::zero(p), Scalar::zero(p), Scalar::zero(p))
    }

    /// Jet of an affine map with the given value and slope.
    pub fn affine(value: Scalar, slope: Scalar) -> Self {
        let p = value.prec().max(slope.prec());
        Jet3::new(value, slope, Scalar::zero(p), Scalar::zero(p))
    }

    /// Precision of the value component.
    pub fn prec(&self) -> u32 {
        self.f.prec()
    }

    /// Composes `self` (the outer map, evaluated at `inner.f`) with `inner`.
    ///
    /// Faa di Bruno up to third order:
    /// `(f∘g)' = f' g'`, `(f∘g)'' = f'' g'^2 + f' g''`,
    /// `(f∘g)''' = f''' g'^3 + 3 f'' g' g'' + f' g'''`.
    pub fn compose(&self, inner: &Jet3) -> Jet3 {
        let v1 = &inner.d1;
        let v1sq = v1.square();
        let d1 = &self.d1 * v1;
        let d2 = &self.d2 * &v1sq + &self.d1 * &inner.d2;
        let d3 = &self.d3 * &(&v1sq * v1)
            + (&self.d2 * v1) * &inner.d2 * 3
            + &self.d1 * &inner.d3;
        Jet3::new(self.f.clone(), d1, d2, d3)
    }

    /// Jet of `x ↦ α·g(x) + β` given the jet of `g`.
    pub fn scale_shift(&self, alpha: &Scalar, beta: &Scalar) -> Jet3 {
        Jet3::new(
            &self.f * alpha + beta,
            &self.d1 * alpha,
            &self.d2 * alpha,
            &self.d3 * alpha,
        )
    }

    /// Jet of `x ↦ -g(x)`.
    pub fn negate(&self) -> Jet3 {
        Jet3::new(-&self.f, -&self.d1, -&self.d2, -&self.d3)
    }

    /// Component-wise difference.
    pub fn sub(&self, other: &Jet3) -> Jet3 {
        Jet3::new(
            &self.f - &other.f,
            &self.d1 - &other.d1,
            &self.d2 - &other.d2,
            &self.d3 - &other.d3,
        )
    }

    /// Component `k` (0 = value, 1..3 = derivatives).
    pub fn component(&self, k: usize) -> &Scalar {
        match k {
            0 => &self.f,
            1 => &self.d1,
            2 => &self.d2,
            _ => &self.d3,
        }
    }
}

/// Free-function form of [`Jet3::compose`].
pub fn jet_compose(outer: &Jet3, inner: &Jet3) -> Jet3 {
    outer.compose(inner)
}
