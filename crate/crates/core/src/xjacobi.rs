//! Parameter validation, the denominator polynomial, the exceptional weight,
//! the exceptional polynomials and their eigenvalues.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::RwLock;

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, ParamViolation};
use crate::jacobi::{jacobi_eval_recurrence, jacobi_poly};
use crate::polyalg::{format_rational, int, roots, FloatPoly, Polynomial, RatPoly, Rational, Scalar};
use crate::real::Real;

/// Imaginary-part threshold below which a root counts as real.
pub const ROOT_IMAG_TOL: f64 = 1e-10;
/// Minimum pairwise root separation for the roots to count as simple.
pub const ROOT_SEPARATION_TOL: f64 = 1e-10;

/// The parameter triple `(alpha, beta, m)`.
///
/// Obtained from [`validate_params`]; [`XParams::new_unchecked`] exists for
/// probing parameter sets outside the admissible region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XParams {
    alpha: Rational,
    beta: Rational,
    m: u32,
    validated: bool,
}

impl XParams {
    pub fn new_unchecked(alpha: Rational, beta: Rational, m: u32) -> Self {
        Self {
            alpha,
            beta,
            m,
            validated: false,
        }
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    pub fn alpha_f64(&self) -> f64 {
        self.alpha.to_f64()
    }

    pub fn beta_f64(&self) -> f64 {
        self.beta.to_f64()
    }

    /// `alpha + 1 - m - beta`, the quantity constrained by the
    /// forbidden-difference clause.
    pub fn difference(&self) -> Rational {
        &self.alpha + int(1) - int(self.m as i64) - &self.beta
    }
}

impl fmt::Display for XParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(alpha={}, beta={}, m={})",
            format_rational(&self.alpha),
            format_rational(&self.beta),
            self.m
        )
    }
}

/// One clause of the admissibility check.
#[derive(Debug, Clone, Serialize)]
pub struct ClauseCheck {
    pub clause: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn sign(q: &Rational) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}

/// Evaluates every admissibility clause independently.
pub fn clause_report(alpha: &Rational, beta: &Rational, m: u32) -> Vec<ClauseCheck> {
    let minus_one = int(-1);
    let d = alpha + int(1) - int(m as i64) - beta;
    let forbidden = d.is_integer() && !d.is_negative() && d < int(m as i64);
    let s_left = sign(&(alpha + int(1) - int(m as i64)));
    let s_right = sign(beta);
    vec![
        ClauseCheck {
            clause: "codimension",
            pass: m >= 1,
            detail: format!("m = {m}"),
        },
        ClauseCheck {
            clause: "range",
            pass: alpha > &minus_one && beta > &minus_one,
            detail: format!(
                "alpha = {} > -1, beta = {} > -1",
                format_rational(alpha),
                format_rational(beta)
            ),
        },
        ClauseCheck {
            clause: "forbidden-difference",
            pass: !forbidden,
            detail: format!(
                "alpha+1-m-beta = {} must avoid {{0..{}}}",
                format_rational(&d),
                m.saturating_sub(1)
            ),
        },
        ClauseCheck {
            clause: "sign",
            pass: s_left == s_right,
            detail: format!("sgn(alpha+1-m) = {s_left}, sgn(beta) = {s_right}"),
        },
    ]
}

/// Checks the admissibility conditions in the order codimension, range,
/// forbidden difference, sign. A zero sign counts as its own value, so a
/// zero on only one side is a mismatch.
pub fn validate_params(alpha: Rational, beta: Rational, m: u32) -> Result<XParams, ParamViolation> {
    let report = clause_report(&alpha, &beta, m);
    for (check, err) in report.iter().zip([
        ParamViolation::InvalidCodimension,
        ParamViolation::RangeViolation,
        ParamViolation::ForbiddenDifference,
        ParamViolation::SignMismatch,
    ]) {
        if !check.pass {
            return Err(err);
        }
    }
    Ok(XParams {
        alpha,
        beta,
        m,
        validated: true,
    })
}

/// `lambda_n = -(n-m)(1+alpha+beta+n-m)`.
pub fn eigenvalue(params: &XParams, n: u32) -> Result<Rational, Error> {
    let m = params.m;
    if n < m {
        return Err(Error::BelowGap { n, m });
    }
    let k = int((n - m) as i64);
    Ok(-(k.clone() * (int(1) + &params.alpha + &params.beta + k)))
}

/// `P_m^{(-alpha-1, beta-1)}` in any scalar field.
pub fn denominator_in<S: Scalar>(params: &XParams) -> Polynomial<S> {
    let a = S::from_rational(&(-&params.alpha - int(1)));
    let b = S::from_rational(&(&params.beta - int(1)));
    jacobi_poly(params.m as usize, &a, &b).poly
}

/// The exceptional polynomial of degree `n` built from the two-term
/// formula with Jacobi factors; a factor of negative degree is zero.
pub fn exceptional_poly_in<S: Scalar>(params: &XParams, n: u32) -> Result<Polynomial<S>, Error> {
    let m = params.m;
    if n < m {
        return Err(Error::BelowGap { n, m });
    }
    let alpha = S::from_rational(&params.alpha);
    let beta = S::from_rational(&params.beta);
    let one = S::one();
    let k = S::from_i64((n - m) as i64);
    let mu = m as usize;

    let first = if n > m {
        let d = jacobi_poly(mu, &(-alpha.clone() - one.clone()), &(beta.clone() - one.clone())).poly;
        let p = jacobi_poly(
            (n - m - 1) as usize,
            &(alpha.clone() + S::from_i64(2)),
            &beta,
        )
        .poly;
        let c = (alpha.clone() + beta.clone() + k.clone() + one.clone()) / S::from_i64(2);
        (&(&Polynomial::linear(one.clone(), -one.clone()) * &d) * &p).scale(&c)
    } else {
        Polynomial::zero()
    };
    let q = jacobi_poly(mu, &(-alpha.clone() - S::from_i64(2)), &beta).poly;
    let r = jacobi_poly(
        (n - m) as usize,
        &(alpha.clone() + one.clone()),
        &(beta.clone() - one.clone()),
    )
    .poly;
    let c2 = alpha.clone() - S::from_i64(m as i64) + one.clone();
    let second = (&q * &r).scale(&c2);

    let sign = if m.is_multiple_of(2) { one.clone() } else { -one.clone() };
    let norm = sign / (alpha + one + k);
    Ok((&first + &second).scale(&norm))
}

/// The family for one parameter set: denominator, its roots, and a cache of
/// exact exceptional polynomials.
///
/// The cache is behind a lock, so a family can be shared across threads.
pub struct ExceptionalFamily {
    params: XParams,
    denom: RatPoly,
    denom_f: FloatPoly,
    tilde: RatPoly,
    roots: Vec<Complex64>,
    cache: RwLock<BTreeMap<u32, RatPoly>>,
}

impl fmt::Debug for ExceptionalFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExceptionalFamily")
            .field("params", &self.params)
            .field("denom", &self.denom)
            .finish()
    }
}

impl ExceptionalFamily {
    /// Builds the family and checks that the denominator has degree `m`
    /// and simple roots away from `[-1, 1]`.
    pub fn new(params: XParams) -> Result<Self, Error> {
        if !params.validated {
            validate_params(params.alpha.clone(), params.beta.clone(), params.m)?;
        }
        let fam = Self::new_unchecked(params);
        let deg = fam.denom.signed_degree();
        if deg != fam.params.m as i64 {
            return Err(Error::DegenerateDenominator {
                expected: fam.params.m as usize,
                actual: deg,
            });
        }
        for z in &fam.roots {
            if z.im.abs() < ROOT_IMAG_TOL && (-1.0..=1.0).contains(&z.re) {
                return Err(Error::RootInInterval { re: z.re, im: z.im });
            }
        }
        for (i, z) in fam.roots.iter().enumerate() {
            for w in &fam.roots[i + 1..] {
                let sep = (z - w).norm();
                if sep <= ROOT_SEPARATION_TOL {
                    return Err(Error::RepeatedRoot { separation: sep });
                }
            }
        }
        Ok(fam)
    }

    /// Convenience: validate and build in one step.
    pub fn from_params(alpha: Rational, beta: Rational, m: u32) -> Result<Self, Error> {
        Self::new(validate_params(alpha, beta, m)?)
    }

    /// Builds the family without any admissibility or root checks.
    pub fn new_unchecked(params: XParams) -> Self {
        let denom = denominator_in::<Rational>(&params);
        let denom_f = denom.to_float();
        let roots = if denom.degree().unwrap_or(0) > 0 {
            roots::roots(&denom_f)
        } else {
            Vec::new()
        };
        let tilde = jacobi_poly(
            params.m as usize,
            &(-params.alpha.clone() - int(2)),
            &params.beta,
        )
        .poly;
        Self {
            params,
            denom,
            denom_f,
            tilde,
            roots,
            cache: RwLock::new(BTreeMap::new()),
        }
    }

    pub fn params(&self) -> &XParams {
        &self.params
    }

    pub fn m(&self) -> u32 {
        self.params.m
    }

    pub fn denominator(&self) -> &RatPoly {
        &self.denom
    }

    pub fn denominator_f64(&self) -> &FloatPoly {
        &self.denom_f
    }

    pub fn denominator_roots(&self) -> &[Complex64] {
        &self.roots
    }

    /// Exact value of the denominator at `x = 1`.
    pub fn denominator_at_one(&self) -> Rational {
        self.denom.eval(&int(1))
    }

    /// `P_{m,n}`, exact, cached.
    pub fn exceptional_poly(&self, n: u32) -> Result<RatPoly, Error> {
        if let Some(p) = self.cache.read().expect("cache lock").get(&n) {
            return Ok(p.clone());
        }
        let p = exceptional_poly_in::<Rational>(&self.params, n)?;
        self.cache
            .write()
            .expect("cache lock")
            .insert(n, p.clone());
        Ok(p)
    }

    pub fn eigenvalue(&self, n: u32) -> Result<Rational, Error> {
        eigenvalue(&self.params, n)
    }

    /// Denominator evaluated in `R`.
    pub fn denominator_real<R: Real>(&self, x: R) -> R {
        horner_real(&self.denom, x)
    }

    /// `P_{m,n}(x)` in `R`, using the three-term recurrence for the two
    /// high-degree Jacobi factors (their parameters are classical enough for
    /// the recurrence denominators never to vanish).
    pub fn eval_real<R: Real>(&self, n: u32, x: R) -> Result<R, Error> {
        let m = self.params.m;
        if n < m {
            return Err(Error::BelowGap { n, m });
        }
        let alpha = R::from_rational(&self.params.alpha);
        let beta = R::from_rational(&self.params.beta);
        let one = R::one();
        let two = R::lit(2.0);
        let k = R::lit((n - m) as f64);
        let recurrence = |deg: u32, a: R, b: R| {
            jacobi_eval_recurrence(deg as usize, a, b, x).ok_or(Error::NonConvergent {
                what: "jacobi recurrence",
                detail: format!("vanishing denominator at degree {deg}"),
            })
        };
        let first = if n > m {
            let c = (alpha + beta + k + one) / two;
            c * (x - one) * self.denominator_real(x) * recurrence(n - m - 1, alpha + two, beta)?
        } else {
            R::zero()
        };
        let second = (alpha - R::lit(m as f64) + one)
            * horner_real(&self.tilde, x)
            * recurrence(n - m, alpha + one, beta - one)?;
        let sign = if m.is_multiple_of(2) { one } else { -one };
        Ok(sign * (first + second) / (alpha + one + k))
    }

    /// `W(x) = (1-x)^alpha (1+x)^beta / denom(x)^2` for `x` in `(-1, 1)`.
    pub fn weight(&self, x: f64) -> Result<f64, Error> {
        if !(x > -1.0 && x < 1.0) {
            return Err(Error::DomainViolation { x });
        }
        let d = self.denom_f.eval_f64(x);
        if d == 0.0 {
            return Err(Error::SingularPoint { x });
        }
        Ok((1.0 - x).powf(self.params.alpha_f64()) * (1.0 + x).powf(self.params.beta_f64()) / (d * d))
    }

    /// Smallest `|denom|` over an equispaced grid of `points` on `[-1, 1]`.
    pub fn min_abs_denominator(&self, points: usize) -> f64 {
        let points = points.max(2);
        (0..points)
            .map(|i| {
                let x = -1.0 + 2.0 * i as f64 / (points - 1) as f64;
                self.denom_f.eval_f64(x).abs()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn horner_real<R: Real>(p: &RatPoly, x: R) -> R {
    p.coeffs()
        .iter()
        .rev()
        .fold(R::zero(), |acc, c| acc * x + R::from_rational(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::ratio;

    fn fam(a: Rational, b: Rational, m: u32) -> ExceptionalFamily {
        ExceptionalFamily::from_params(a, b, m).unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(validate_params(int(2), int(1), 1).is_ok());
        assert_eq!(
            validate_params(ratio(-1, 2), ratio(-1, 2), 1),
            Err(ParamViolation::ForbiddenDifference)
        );
        assert!(validate_params(ratio(-1, 2), ratio(-1, 4), 1).is_ok());
        assert_eq!(validate_params(int(-1), int(1), 1), Err(ParamViolation::RangeViolation));
        assert_eq!(validate_params(int(2), ratio(-1, 2), 1), Err(ParamViolation::SignMismatch));
        assert_eq!(validate_params(int(2), int(1), 0), Err(ParamViolation::InvalidCodimension));
        // alpha+1-m = 0 with beta != 0: sign zero on one side only
        assert_eq!(validate_params(int(1), ratio(1, 3), 2), Err(ParamViolation::SignMismatch));
    }

    #[test]
    fn forbidden_difference_grid_points() {
        // both of these sit on the forbidden lattice and lose a degree
        assert_eq!(validate_params(int(3), int(1), 2), Err(ParamViolation::ForbiddenDifference));
        assert_eq!(
            validate_params(ratio(7, 2), ratio(1, 2), 3),
            Err(ParamViolation::ForbiddenDifference)
        );
        let d = denominator_in::<Rational>(&XParams::new_unchecked(int(3), int(1), 2));
        assert_eq!(d.degree(), Some(1));
    }

    #[test]
    fn denominator_examples() {
        let f = fam(int(2), int(1), 1);
        assert_eq!(
            f.denominator(),
            &Polynomial::new(vec![ratio(-3, 2), ratio(-1, 2)])
        );
        // value at 1 is prod_{j<m} (j - alpha) / m!
        let d = denominator_in::<Rational>(&XParams::new_unchecked(int(3), int(1), 2));
        assert_eq!(d.eval(&int(1)), int(3));
        let f = fam(ratio(7, 2), ratio(1, 2), 2);
        let oracle = (ratio(0, 1) - ratio(7, 2)) * (int(1) - ratio(7, 2)) / int(2);
        assert_eq!(f.denominator_at_one(), oracle);
    }

    #[test]
    fn interior_roots_are_rejected() {
        let err = ExceptionalFamily::from_params(ratio(-1, 2), ratio(-1, 4), 2).unwrap_err();
        assert!(matches!(err, Error::RootInInterval { .. }), "{err:?}");
    }

    #[test]
    fn weight_examples() {
        let f = fam(int(2), int(1), 1);
        assert!((f.weight(0.0).unwrap() - 4.0 / 9.0).abs() < 1e-15);
        assert!(matches!(f.weight(1.0), Err(Error::DomainViolation { .. })));
        for x in [-0.9, -0.2, 0.4, 0.95] {
            let d = f.denominator_f64().eval_f64(x);
            let lhs = f.weight(x).unwrap() * d * d;
            let rhs = (1.0 - x).powi(2) * (1.0 + x);
            assert!((lhs - rhs).abs() < 1e-14);
        }
    }

    #[test]
    fn first_member_by_hand() {
        let f = fam(int(2), int(1), 1);
        let p = f.exceptional_poly(1).unwrap();
        assert_eq!(p, Polynomial::new(vec![ratio(5, 3), ratio(1, 3)]));
        assert!(matches!(f.exceptional_poly(0), Err(Error::BelowGap { .. })));
    }

    #[test]
    fn second_member_from_jacobi_factors() {
        // n = 2, m = 1, (alpha, beta) = (2, 1):
        // -1/4 * [ 5/2 (x-1) P_1^{(-3,0)} P_0^{(4,1)} + 2 P_1^{(-4,1)} P_1^{(3,0)} ]
        let (a, b) = (int(2), int(1));
        let d = jacobi_poly(1, &int(-3), &int(0)).poly;
        let q = jacobi_poly(1, &int(-4), &int(1)).poly;
        let r = jacobi_poly(1, &int(3), &int(0)).poly;
        let xm1 = Polynomial::linear(int(1), int(-1));
        let oracle = (&(&xm1 * &d).scale(&ratio(5, 2)) + &(&q * &r).scale(&int(2))).scale(&ratio(-1, 4));
        let f = fam(a, b, 1);
        assert_eq!(f.exceptional_poly(2).unwrap(), oracle);
        assert_eq!(oracle.degree(), Some(2));
    }

    #[test]
    fn degree_law() {
        for (a, b, m) in [(int(2), int(1), 1), (ratio(7, 2), ratio(1, 2), 2), (ratio(11, 2), ratio(1, 2), 3)] {
            let f = fam(a, b, m);
            for n in m..m + 6 {
                assert_eq!(f.exceptional_poly(n).unwrap().degree(), Some(n as usize));
            }
        }
    }

    #[test]
    fn eigenvalues() {
        let p = validate_params(int(2), int(1), 1).unwrap();
        assert_eq!(eigenvalue(&p, 1).unwrap(), int(0));
        assert_eq!(eigenvalue(&p, 2).unwrap(), int(-5));
        assert_eq!(eigenvalue(&p, 3).unwrap(), int(-12));
        let lam: Vec<Rational> = (1..10).map(|n| eigenvalue(&p, n).unwrap()).collect();
        assert!(lam.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn real_evaluation_matches_exact() {
        let f = fam(ratio(7, 2), ratio(1, 2), 2);
        for n in 2..14 {
            let p = f.exceptional_poly(n).unwrap().to_float();
            for x in [-0.97, -0.5, 0.0, 0.33, 0.99] {
                let v: f64 = f.eval_real(n, x).unwrap();
                let e = p.eval_f64(x);
                assert!((v - e).abs() <= 1e-10 * e.abs().max(1.0), "n={n} x={x}: {v} vs {e}");
            }
        }
    }

    #[test]
    fn denominator_bounded_away_from_zero() {
        for (a, b, m) in [(int(2), int(1), 1), (ratio(5, 2), ratio(3, 2), 1), (ratio(7, 2), ratio(1, 2), 2)] {
            assert!(fam(a, b, m).min_abs_denominator(10_000) > 0.0);
        }
    }
}
