use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Relative tolerance used by float-mode comparisons.
pub const FLOAT_REL_TOL: f64 = 1e-12;
/// Absolute floor used by float-mode comparisons.
pub const FLOAT_ABS_TOL: f64 = 1e-14;

/// Coefficient field for [`Polynomial`](super::Polynomial).
///
/// Two implementations exist: [`Rational`] (exact) and `f64` (float mode with
/// the comparison tolerance above).
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
{
    /// `true` for exact arithmetic.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;

    /// Equality in the field's sense: bitwise-exact for rationals, toleranced
    /// for floats.
    fn approx_eq(&self, other: &Self) -> bool;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(q: &Rational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn approx_eq(&self, other: &Self) -> bool {
        let diff = f64::abs(self - other);
        diff <= FLOAT_ABS_TOL || diff <= FLOAT_REL_TOL * f64::abs(*self).max(f64::abs(*other))
    }
}

/// Builds `num/den` as an exact rational. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Integer as exact rational.
pub fn int(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}

/// Formats a rational as `p/q`, or `p` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p/q`, an integer, or a plain decimal (`-0.25`, `1.5e-2`) into an
/// exact rational. Decimals are converted with power-of-ten denominators, so
/// no floating point is involved.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = match digits.split_once('.') {
        Some((w, f)) => (w, f),
        None => (digits, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{whole}{frac}");
    let mut numer: BigInt = all_digits.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}
