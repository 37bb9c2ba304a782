//! Degree-one lifts of circle maps and their orbits.

use std::sync::Arc;

use super::family::LiftFamily;
use crate::numerics::{Jet3, Scalar};

/// A member `t ↦ t + ω + P(t)` of a lift family.
#[derive(Clone, Debug)]
pub struct CircleMapLift {
    family: Arc<dyn LiftFamily>,
    omega: Scalar,
    prec: u32,
}

impl CircleMapLift {
    /// Family member with translation parameter `omega`.
    pub fn new(family: Arc<dyn LiftFamily>, omega: Scalar) -> Self {
        let prec = omega.prec();
        CircleMapLift { family, omega, prec }
    }

    /// The same family at a different `ω`.
    pub fn with_omega(&self, omega: Scalar) -> Self {
        CircleMapLift::new(self.family.clone(), omega)
    }

    /// The underlying family.
    pub fn family(&self) -> &Arc<dyn LiftFamily> {
        &self.family
    }

    /// Translation parameter.
    pub fn omega(&self) -> &Scalar {
        &self.omega
    }

    /// Working precision.
    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Criticality index `d` (criticality `2d+1`), `None` for diffeomorphisms.
    pub fn criticality_index(&self) -> Option<u32> {
        self.family.criticality_index()
    }

    /// True when both lifts come from the same family with the same parameters and `ω`.
    pub fn same_as(&self, other: &CircleMapLift) -> bool {
        Arc::ptr_eq(&self.family, &other.family)
            || (self.family.id() == other.family.id()
                && self.family.params() == other.family.params()
                && self.omega == other.omega)
    }

    /// Value of the lift at `x`.
    pub fn value(&self, x: &Scalar) -> Scalar {
        x + &self.omega + self.family.periodic_value(x)
    }

    /// Value and first three derivatives at `x`.
    pub fn evaluate(&self, x: &Scalar) -> Jet3 {
        let [p0, p1, p2, p3] = self.family.periodic_jet(x);
        Jet3::new(x + &self.omega + p0, p1 + 1, p2, p3)
    }
}

/// A point of the lifted line stored as an integer plus a fraction in [−1/2, 1/2].
///
/// Integer translations act on the integer part only, so they are exact.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitPoint {
    /// Integer part.
    pub int: i64,
    /// Fractional part.
    pub frac: Scalar,
}

impl SplitPoint {
    /// Splits `x` into nearest integer and remainder.
    pub fn from_scalar(x: &Scalar) -> Self {
        let (int, frac) = x.split_nearest();
        SplitPoint { int, frac }
    }

    /// Rejoins the two parts (rounded at the fraction's precision).
    pub fn to_scalar(&self) -> Scalar {
        &self.frac + self.int
    }

    /// Position on the circle in [0, 1).
    pub fn circle_position(&self) -> Scalar {
        if self.frac.signum_i() < 0 {
            &self.frac + 1
        } else {
            self.frac.clone()
        }
    }

    /// Moves any integer carried by the fraction into the integer part.
    pub fn renormalize(&mut self) {
        let (k, r) = self.frac.split_nearest();
        if k != 0 {
            self.int += k;
            self.frac = r;
        }
    }
}

/// Sequential orbit of a point under a lift, tracking the iterate index.
#[derive(Clone, Debug)]
pub struct Orbit<'a> {
    map: &'a CircleMapLift,
    point: SplitPoint,
    index: u64,
}

impl<'a> Orbit<'a> {
    /// Orbit of `0`.
    pub fn of_zero(map: &'a CircleMapLift) -> Self {
        Orbit { map, point: SplitPoint { int: 0, frac: Scalar::zero(map.prec()) }, index: 0 }
    }

    /// Current point `f^index(x_0)`.
    pub fn point(&self) -> &SplitPoint {
        &self.point
    }

    /// Current iterate index.
    pub fn index(&self) -> u64 {
        self.index
    }

    /// Advances by one iterate.
    pub fn step(&mut self) {
        let v = self.map.value(&self.point.frac);
        self.point.frac = v;
        self.point.renormalize();
        self.index += 1;
    }

    /// Advances by `n` iterates.
    pub fn advance(&mut self, n: u64) {
        for _ in 0..n {
            self.step();
        }
    }
}

/// Jet of `f^n` at `x`, evaluated on the fractional part at every step.
pub fn iterate_jet(map: &CircleMapLift, x: &Scalar, n: u64) -> Jet3 {
    let mut sp = SplitPoint::from_scalar(x);
    let mut jet = Jet3::identity(sp.frac.clone());
    for _ in 0..n {
        let fj = map.evaluate(&jet.f);
        jet = fj.compose(&jet);
        let (k, r) = jet.f.split_nearest();
        if k != 0 {
            sp.int += k;
            jet.f = r;
        }
    }
    jet.f = &jet.f + sp.int;
    jet
}
