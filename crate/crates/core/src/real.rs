//! Floating-point types used by the quadrature and expansion code.
//!
//! Everything numeric past the exact layer is generic over [`Real`], so the
//! same code runs in `f64` and in double-double (about 32 digits).

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::polyalg::Rational;

/// Double-double precision: an unevaluated sum `hi + lo` of two `f64`.
pub type DoubleDouble = qd::Quad;

/// Minimal real-field interface shared by `f64` and [`DoubleDouble`].
pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Relative tolerance for adaptive quadrature at this precision.
    const QUAD_TOL: f64;
    /// Short name used in reports.
    const NAME: &'static str;

    fn from_rational(q: &Rational) -> Self;
    fn lit(v: f64) -> Self;
    fn as_f64(self) -> f64;
    /// Unit roundoff.
    fn eps() -> Self;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn pi() -> Self;

    fn powi(self, k: i32) -> Self {
        let mut base = if k < 0 { Self::one() / self } else { self };
        let mut e = k.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn is_finite(self) -> bool {
        self.as_f64().is_finite()
    }
}

impl Real for f64 {
    const QUAD_TOL: f64 = 1e-12;
    const NAME: &'static str = "f64";

    fn from_rational(q: &Rational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }

    fn lit(v: f64) -> Self {
        v
    }

    fn as_f64(self) -> f64 {
        self
    }

    fn eps() -> Self {
        f64::EPSILON
    }

    fn abs(self) -> Self {
        f64::abs(self)
    }

    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }

    fn exp(self) -> Self {
        f64::exp(self)
    }

    fn ln(self) -> Self {
        f64::ln(self)
    }

    fn pi() -> Self {
        std::f64::consts::PI
    }

    fn powi(self, k: i32) -> Self {
        f64::powi(self, k)
    }
}

impl Real for DoubleDouble {
    const QUAD_TOL: f64 = 1e-28;
    const NAME: &'static str = "double-double";

    fn from_rational(q: &Rational) -> Self {
        let hi = q.to_f64().unwrap_or(f64::NAN);
        let Some(hi_exact) = BigRational::from_float(hi) else {
            return qd::Quad::from(hi);
        };
        let lo = (q - hi_exact).to_f64().unwrap_or(0.0);
        qd::Quad::from(hi) + qd::Quad::from(lo)
    }

    fn lit(v: f64) -> Self {
        qd::Quad::from(v)
    }

    fn as_f64(self) -> f64 {
        self.0 + self.1
    }

    fn eps() -> Self {
        qd::Quad::from(2f64.powi(-104))
    }

    fn abs(self) -> Self {
        qd::Quad::abs(self)
    }

    fn sqrt(self) -> Self {
        qd::Quad::sqrt(self)
    }

    fn exp(self) -> Self {
        qd::Quad::exp(self)
    }

    fn ln(self) -> Self {
        qd::Quad::ln(self)
    }

    fn pi() -> Self {
        qd::Quad::PI
    }
}

/// Integer to `R` without rounding through `f64` when `R` is wider.
pub fn from_bigint<R: Real>(v: &BigInt) -> R {
    R::from_rational(&BigRational::from_integer(v.clone()))
}
