use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::scalar::{Rational, Scalar};
use crate::error::Error;

/// Dense univariate polynomial, coefficients stored low-to-high.
///
/// The coefficient vector never carries trailing zeros; the zero polynomial
/// is the empty vector.
#[derive(Clone, PartialEq)]
pub struct Polynomial<S> {
    coeffs: Vec<S>,
}

pub type RatPoly = Polynomial<Rational>;
pub type FloatPoly = Polynomial<f64>;

impl<S: Scalar> Polynomial<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::new(vec![S::zero(), S::one()])
    }

    /// `c * x^k`
    pub fn monomial(c: S, k: usize) -> Self {
        let mut coeffs = vec![S::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `a*x + b`
    pub fn linear(a: S, b: S) -> Self {
        Self::new(vec![b, a])
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial (degree −1 by convention).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to −1.
    pub fn signed_degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn leading(&self) -> Option<&S> {
        self.coeffs.last()
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * S::from_i64(k as i64))
                .collect(),
        )
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// `x^k` for `k >= 0`.
    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Euclidean division: `self = q*divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self), Error> {
        let d = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lead = divisor.coeffs[d].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![S::zero(); rem.len() - d];
        for k in (0..quot.len()).rev() {
            let factor = rem[k + d].clone() / lead.clone();
            for (j, dc) in divisor.coeffs.iter().enumerate().take(d) {
                rem[k + j] = rem[k + j].clone() - factor.clone() * dc.clone();
            }
            // the leading term cancels by construction
            rem[k + d] = S::zero();
            quot[k] = factor;
        }
        rem.truncate(d);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Coefficientwise comparison under [`Scalar::approx_eq`].
    pub fn approx_eq(&self, other: &Self) -> bool {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).all(|k| self.coeff(k).approx_eq(&other.coeff(k)))
    }

    /// Largest absolute coefficient difference, as `f64`.
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).abs().to_f64())
            .fold(0.0, f64::max)
    }

    pub fn to_float(&self) -> FloatPoly {
        Polynomial::new(self.coeffs.iter().map(Scalar::to_f64).collect())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Polynomial<T> {
        Polynomial::new(self.coeffs.iter().map(f).collect())
    }
}

impl FloatPoly {
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }
}

impl RatPoly {
    /// Float copy of an exact polynomial (alias of `to_float`).
    pub fn to_f64_poly(&self) -> FloatPoly {
        self.to_float()
    }
}

impl<'a, S: Scalar> Add<&'a Polynomial<S>> for &'a Polynomial<S> {
    type Output = Polynomial<S>;
    fn add(self, rhs: &'a Polynomial<S>) -> Polynomial<S> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<'a, S: Scalar> Sub<&'a Polynomial<S>> for &'a Polynomial<S> {
    type Output = Polynomial<S>;
    fn sub(self, rhs: &'a Polynomial<S>) -> Polynomial<S> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<'a, S: Scalar> Mul<&'a Polynomial<S>> for &'a Polynomial<S> {
    type Output = Polynomial<S>;
    fn mul(self, rhs: &'a Polynomial<S>) -> Polynomial<S> {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![S::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Polynomial::new(out)
    }
}

impl<S: Scalar> Neg for &Polynomial<S> {
    type Output = Polynomial<S>;
    fn neg(self) -> Polynomial<S> {
        Polynomial::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<S: Scalar> $tr<Polynomial<S>> for Polynomial<S> {
            type Output = Polynomial<S>;
            fn $m(self, rhs: Polynomial<S>) -> Polynomial<S> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<S: fmt::Debug> fmt::Debug for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial{:?}", self.coeffs)
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
            .map(|(k, c)| {
                let c = super::scalar::format_rational(c);
                match k {
                    0 => c,
                    1 => format!("({c})x"),
                    _ => format!("({c})x^{k}"),
                }
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::scalar::{int, ratio};

    fn rp(c: &[i64]) -> RatPoly {
        Polynomial::new(c.iter().map(|&v| int(v)).collect())
    }

    #[test]
    fn add_examples() {
        assert_eq!(rp(&[1, 1]) + rp(&[0, -1]), rp(&[1]));
        assert_eq!(rp(&[3, 0, 2]) + RatPoly::zero(), rp(&[3, 0, 2]));
        assert_eq!(rp(&[-1, 0, 1]) + rp(&[1]), rp(&[0, 0, 1]));
        // cancellation of the leading term normalizes the degree
        assert_eq!((rp(&[1, 2, 3]) - rp(&[0, 0, 3])).degree(), Some(1));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(rp(&[-1, 1]) * rp(&[1, 1]), rp(&[-1, 0, 1]));
        assert_eq!(rp(&[4, 5]) * RatPoly::one(), rp(&[4, 5]));
        assert!((rp(&[4, 5]) * RatPoly::zero()).is_zero());
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(rp(&[0, 0, 1]).derivative(), rp(&[0, 2]));
        assert!(rp(&[7]).derivative().is_zero());
        assert_eq!(rp(&[0, -1, 0, 1]).derivative(), rp(&[-1, 0, 3]));
    }

    #[test]
    fn divrem_examples() {
        let (q, r) = rp(&[-1, 0, 1]).div_rem(&rp(&[-1, 1])).unwrap();
        assert_eq!((q, r), (rp(&[1, 1]), RatPoly::zero()));
        let (q, r) = rp(&[0, 1]).div_rem(&rp(&[0, 0, 1])).unwrap();
        assert_eq!((q, r), (RatPoly::zero(), rp(&[0, 1])));
        let (q, r) = rp(&[1, 0, 1]).div_rem(&rp(&[-1, 1])).unwrap();
        assert_eq!((q, r), (rp(&[1, 1]), rp(&[2])));
        assert!(matches!(
            rp(&[1]).div_rem(&RatPoly::zero()),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(rp(&[-1, 0, 1]).eval(&int(1)), int(0));
        assert_eq!(RatPoly::zero().eval(&ratio(7, 3)), int(0));
        assert_eq!(rp(&[3, 2]).eval(&ratio(1, 2)), int(4));
    }

    #[test]
    fn degree_convention() {
        assert_eq!(RatPoly::zero().degree(), None);
        assert_eq!(RatPoly::zero().signed_degree(), -1);
        assert_eq!(rp(&[0, 0, 0]).signed_degree(), -1);
        assert_eq!(rp(&[1, 2, 0]).degree(), Some(1));
    }

    #[test]
    fn float_mode_division() {
        let a = FloatPoly::new(vec![-1.0, 0.0, 1.0]);
        let b = FloatPoly::new(vec![-1.0, 1.0]);
        let (q, r) = a.div_rem(&b).unwrap();
        assert!(q.approx_eq(&FloatPoly::new(vec![1.0, 1.0])));
        assert!(r.is_zero());
    }

    #[test]
    fn display() {
        assert_eq!(
            Polynomial::new(vec![ratio(5, 3), ratio(1, 3)]).to_string(),
            "5/3 + (1/3)x"
        );
    }
}
