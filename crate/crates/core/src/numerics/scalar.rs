//! Arbitrary-precision real scalar built on MPFR floats.
//!
//! Every quantity in the laboratory (points, parameters, distances) is a
//! [`Scalar`]. Precision is fixed at construction; binary operations round
//! to the larger precision of their operands.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{LabError, Result};

/// Default working precision in bits (about 64 decimal digits).
pub const DEFAULT_PRECISION: u32 = 212;

/// A real number at a configurable binary precision.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Scalar(Float);

impl Scalar {
    /// Wraps an existing MPFR float, keeping its precision.
    pub fn from_float(f: Float) -> Self {
        Scalar(f)
    }

    /// Zero at the given precision.
    pub fn zero(prec: u32) -> Self {
        Scalar(Float::with_val(prec, 0))
    }

    /// One at the given precision.
    pub fn one(prec: u32) -> Self {
        Scalar(Float::with_val(prec, 1))
    }

    /// Exact conversion from an integer (rounded if it exceeds the precision).
    pub fn from_i64(v: i64, prec: u32) -> Self {
        Scalar(Float::with_val(prec, v))
    }

    /// Conversion from a double.
    pub fn from_f64(v: f64, prec: u32) -> Self {
        Scalar(Float::with_val(prec, v))
    }

    /// The correctly rounded value of `num / den`.
    pub fn from_ratio(num: i64, den: i64, prec: u32) -> Self {
        let r = rug::Rational::from((num, den));
        Scalar(Float::with_val(prec, &r))
    }

    /// Correctly rounded value of an exact rational.
    pub fn from_rational(r: &rug::Rational, prec: u32) -> Self {
        Scalar(Float::with_val(prec, r))
    }

    /// Parses a decimal or scientific literal, or an exact fraction `p/q`.
    pub fn parse(s: &str, prec: u32) -> Result<Self> {
        let t = s.trim();
        if t.contains('/') {
            let r = rug::Rational::parse(t)
                .map_err(|e| LabError::Config(format!("cannot parse fraction {s:?}: {e}")))?;
            return Ok(Scalar(Float::with_val(prec, rug::Rational::from(r))));
        }
        let parsed = Float::parse(t)
            .map_err(|e| LabError::Config(format!("cannot parse number {s:?}: {e}")))?;
        Ok(Scalar(Float::with_val(prec, parsed)))
    }

    /// The constant pi.
    pub fn pi(prec: u32) -> Self {
        Scalar(Float::with_val(prec, Constant::Pi))
    }

    /// Binary precision of this value.
    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    /// Borrow the underlying MPFR float.
    pub fn as_float(&self) -> &Float {
        &self.0
    }

    /// Consumes the scalar and returns the underlying float.
    pub fn into_float(self) -> Float {
        self.0
    }

    /// Re-rounds the value to a different precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        Scalar(Float::with_val(prec, &self.0))
    }

    /// Nearest double.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// Absolute value.
    pub fn abs(&self) -> Self {
        Scalar(self.0.clone().abs())
    }

    /// Square root.
    pub fn sqrt(&self) -> Self {
        Scalar(self.0.clone().sqrt())
    }

    /// Natural logarithm.
    pub fn ln(&self) -> Self {
        Scalar(self.0.clone().ln())
    }

    /// Exponential.
    pub fn exp(&self) -> Self {
        Scalar(self.0.clone().exp())
    }

    /// Sine and cosine computed together.
    pub fn sin_cos(&self) -> (Self, Self) {
        let (s, c) = self
            .0
            .clone()
            .sin_cos(Float::new(self.prec()));
        (Scalar(s), Scalar(c))
    }

    /// Square.
    pub fn square(&self) -> Self {
        Scalar(self.0.clone().square())
    }

    /// Integer power.
    pub fn powi(&self, n: i32) -> Self {
        Scalar(Float::with_val(self.prec(), (&self.0).pow(n)))
    }

    /// Reciprocal.
    pub fn recip(&self) -> Self {
        Scalar(self.0.clone().recip())
    }

    /// Largest integer not above the value, as a scalar.
    pub fn floor(&self) -> Self {
        Scalar(self.0.clone().floor())
    }

    /// Splits the value into the nearest integer and the (exact) remainder in [-1/2, 1/2].
    pub fn split_nearest(&self) -> (i64, Scalar) {
        let r = self.0.clone().round();
        let m = r
            .to_integer()
            .and_then(|i| i.to_i64())
            .expect("integer part exceeds i64");
        let frac = Float::with_val(self.prec(), &self.0 - &r);
        (m, Scalar(frac))
    }

    /// Integer nearest to the value.
    pub fn round_to_i64(&self) -> i64 {
        self.split_nearest().0
    }

    /// True if exactly zero.
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// True if finite (not NaN or infinite).
    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    /// Sign as -1, 0 or 1 (NaN maps to 0).
    pub fn signum_i(&self) -> i32 {
        match self.0.cmp0() {
            Some(Ordering::Less) => -1,
            Some(Ordering::Greater) => 1,
            _ => 0,
        }
    }

    /// Total comparison; NaN sorts as equal, which never happens for valid inputs.
    pub fn cmp_total(&self, other: &Scalar) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    /// The larger of two values.
    pub fn max_of(self, other: Scalar) -> Scalar {
        if other > self {
            other
        } else {
            self
        }
    }

    /// The smaller of two values.
    pub fn min_of(self, other: Scalar) -> Scalar {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Unit in the last place of this value at its precision.
    pub fn ulp(&self) -> Scalar {
        let prec = self.prec();
        match self.0.get_exp() {
            Some(e) => Scalar(Float::with_val(prec, 1) << (e - prec as i32)),
            None => Scalar(Float::with_val(prec, Float::with_val(prec, 1) >> (prec as i32 + 64))),
        }
    }

    /// `2^e` at the given precision.
    pub fn pow2(e: i32, prec: u32) -> Scalar {
        let one = Float::with_val(prec, 1);
        if e >= 0 {
            Scalar(one << e)
        } else {
            Scalar(one >> (-e))
        }
    }

    /// Full-precision decimal representation that parses back to the same value.
    pub fn to_decimal_string(&self) -> String {
        self.0.to_string_radix_round(10, None, Round::Nearest)
    }

    /// Decimal representation with a fixed number of significant digits.
    pub fn to_sci_string(&self, digits: usize) -> String {
        self.0.to_string_radix(10, Some(digits))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci_string(20))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string())
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_decimal_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Scalar::parse(&s, DEFAULT_PRECISION).map_err(serde::de::Error::custom)
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                let prec = self.prec().max(rhs.prec());
                Scalar(Float::with_val(prec, (&self.0).$method(&rhs.0)))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
        impl $trait<i64> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: i64) -> Scalar {
                Scalar(Float::with_val(self.prec(), (&self.0).$method(rhs)))
            }
        }
        impl $trait<i64> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: i64) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);
scalar_binop!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(Float::with_val(self.prec(), -&self.0))
    }
}

impl PartialEq<i64> for Scalar {
    fn eq(&self, other: &i64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<i64> for Scalar {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

impl PartialEq<f64> for Scalar {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for Scalar {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}
