//! The exceptional differential expression, its action on polynomials, the
//! invariant polynomial subspace, the boundary form and Green's formula.

use num_traits::Zero;
use serde::Serialize;

use crate::error::Error;
use crate::expansion::quad_cap;
use crate::jacobi::gauss_jacobi_rule;
use crate::linalg::RatMatrix;
use crate::polyalg::{int, Polynomial, RatPoly, Rational, Scalar};
use crate::spectral::{boundary_case, Endpoint};
use crate::xjacobi::ExceptionalFamily;

/// Polynomial pieces of the expression
/// `A y'' + (B - 2A L) y' + (c - 2 beta (1-x) L) y` with `L = denom'/denom`.
#[derive(Debug, Clone)]
pub struct OperatorCoefficients {
    /// `1 - x^2`
    pub a: RatPoly,
    /// `beta - alpha - (alpha + beta + 2) x`
    pub b: RatPoly,
    pub denom: RatPoly,
    pub denom_d: RatPoly,
    /// `m (alpha - beta - m + 1)`
    pub c: Rational,
    pub beta: Rational,
}

impl OperatorCoefficients {
    pub fn new(fam: &ExceptionalFamily) -> Self {
        let p = fam.params();
        let (alpha, beta) = (p.alpha().clone(), p.beta().clone());
        let m = int(p.m() as i64);
        Self {
            a: Polynomial::new(vec![int(1), int(0), int(-1)]),
            b: Polynomial::linear(-(alpha.clone() + beta.clone() + int(2)), beta.clone() - alpha.clone()),
            denom: fam.denominator().clone(),
            denom_d: fam.denominator().derivative(),
            c: m.clone() * (alpha - beta.clone() - m + int(1)),
            beta,
        }
    }

    /// `(log denom)'(x)`.
    pub fn log_derivative(&self, x: f64) -> Result<f64, Error> {
        let d = self.denom.to_float().eval_f64(x);
        if d == 0.0 {
            return Err(Error::SingularPoint { x });
        }
        Ok(self.denom_d.to_float().eval_f64(x) / d)
    }

    /// The three coefficient functions `(p2, p1, p0)` at `x`.
    pub fn eval(&self, x: f64) -> Result<(f64, f64, f64), Error> {
        let l = self.log_derivative(x)?;
        let a = self.a.to_float().eval_f64(x);
        let b = self.b.to_float().eval_f64(x);
        let c = Scalar::to_f64(&self.c);
        let beta = Scalar::to_f64(&self.beta);
        Ok((a, b - 2.0 * a * l, c - 2.0 * beta * (1.0 - x) * l))
    }
}

/// A function together with its first two derivatives.
pub struct Jet<'a> {
    f: Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>,
    d1: Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>,
    d2: Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>,
}

impl<'a> Jet<'a> {
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'a,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'a,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'a,
    ) -> Self {
        Self {
            f: Box::new(f),
            d1: Box::new(d1),
            d2: Box::new(d2),
        }
    }

    pub fn polynomial(p: &RatPoly) -> Jet<'static> {
        let p0 = p.to_float();
        let p1 = p.derivative().to_float();
        let p2 = p.derivative().derivative().to_float();
        Jet::new(
            move |x| p0.eval_f64(x),
            move |x| p1.eval_f64(x),
            move |x| p2.eval_f64(x),
        )
    }

    pub fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn d1(&self, x: f64) -> f64 {
        (self.d1)(x)
    }

    pub fn d2(&self, x: f64) -> f64 {
        (self.d2)(x)
    }
}

/// `T[f](x)` assembled term by term from the coefficient functions.
pub fn apply_t_pointwise(fam: &ExceptionalFamily, f: &Jet, x: f64) -> Result<f64, Error> {
    if !(x > -1.0 && x < 1.0) {
        return Err(Error::DomainViolation { x });
    }
    let (p2, p1, p0) = OperatorCoefficients::new(fam).eval(x)?;
    Ok(p2 * f.d2(x) + p1 * f.d1(x) + p0 * f.value(x))
}

/// `(1+x) y' + beta y`, the numerator of the only non-polynomial term.
fn f_numerator<S: Scalar>(beta: &S, y: &Polynomial<S>) -> Polynomial<S> {
    let xp1 = Polynomial::linear(S::one(), S::one());
    &(&xp1 * &y.derivative()) + &y.scale(beta)
}

fn remainder_vanishes<S: Scalar>(r: &Polynomial<S>, scale: &Polynomial<S>) -> bool {
    if S::EXACT {
        return r.is_zero();
    }
    let s = scale
        .coeffs()
        .iter()
        .map(|c| c.abs().to_f64())
        .fold(0.0, f64::max)
        .max(1.0);
    r.coeffs().iter().all(|c| c.abs().to_f64() <= 1e-10 * s)
}

/// `T[y]` as a polynomial, by exact division of `(1+x) y' + beta y` by the
/// denominator. A nonzero remainder means `y` is not in the invariant
/// subspace and is reported as [`Error::NotInvariant`].
pub fn apply_t_polynomial<S: Scalar>(
    fam: &ExceptionalFamily,
    y: &Polynomial<S>,
) -> Result<Polynomial<S>, Error> {
    let coef = OperatorCoefficients::new(fam);
    let conv = |p: &RatPoly| p.map(S::from_rational);
    let (a, b, denom) = (conv(&coef.a), conv(&coef.b), conv(&coef.denom));
    let beta = S::from_rational(&coef.beta);
    let num = f_numerator(&beta, y);
    let (q, r) = num.div_rem(&denom)?;
    if !remainder_vanishes(&r, &num) {
        return Err(Error::NotInvariant {
            remainder: format!("{r:?}"),
        });
    }
    let d1 = y.derivative();
    let d2 = d1.derivative();
    let one_minus_x = Polynomial::linear(-S::one(), S::one());
    let exceptional = (&(&one_minus_x * &q) * &conv(&coef.denom_d)).scale(&S::from_i64(-2));
    Ok(&(&(&(&a * &d2) + &(&b * &d1)) + &y.scale(&S::from_rational(&coef.c))) + &exceptional)
}

/// Exact membership test: the root conditions `(1+x_i) q'(x_i) + beta q(x_i) = 0`
/// at every (simple) root are equivalent to divisibility by the denominator.
pub fn in_f_space(fam: &ExceptionalFamily, q: &RatPoly) -> bool {
    let num = f_numerator(fam.params().beta(), q);
    match num.div_rem(fam.denominator()) {
        Ok((_, r)) => r.is_zero(),
        Err(_) => false,
    }
}

/// Scaled residuals of the root conditions at the floating roots. Each entry
/// is `|(1+x_i) q'(x_i) + beta q(x_i)|` divided by the same expression with
/// every term replaced by its absolute value.
pub fn f_condition_residuals(fam: &ExceptionalFamily, q: &RatPoly) -> Vec<f64> {
    let beta = fam.params().beta_f64();
    let qf = q.to_float();
    let dq = q.derivative().to_float();
    let abs_poly = |p: &crate::polyalg::FloatPoly, r: f64| {
        p.coeffs().iter().rev().fold(0.0, |acc, c| acc * r + c.abs())
    };
    fam.denominator_roots()
        .iter()
        .map(|&z| {
            let v = (z + 1.0) * dq.eval_complex(z) + qf.eval_complex(z) * beta;
            let r = z.norm();
            let scale = (z + 1.0).norm() * abs_poly(&dq, r) + beta.abs() * abs_poly(&qf, r);
            if scale == 0.0 {
                v.norm()
            } else {
                v.norm() / scale
            }
        })
        .collect()
}

/// Matrix of the linear map `q -> rem((1+x) q' + beta q, denom)` on the
/// monomial basis of polynomials of degree `<= degree`.
fn remainder_map(fam: &ExceptionalFamily, degree: usize) -> RatMatrix {
    let m = fam.m() as usize;
    let columns: Vec<Vec<Rational>> = (0..=degree)
        .map(|k| {
            let num = f_numerator(fam.params().beta(), &RatPoly::monomial(int(1), k));
            let (_, r) = num.div_rem(fam.denominator()).expect("nonzero denominator");
            (0..m).map(|i| r.coeff(i)).collect()
        })
        .collect();
    RatMatrix::from_columns(m, &columns)
}

/// Basis of the invariant subspace inside polynomials of degree `<= degree`.
pub fn f_space_basis(fam: &ExceptionalFamily, degree: usize) -> Vec<RatPoly> {
    remainder_map(fam, degree)
        .nullspace()
        .into_iter()
        .map(Polynomial::new)
        .collect()
}

/// Dimension of the invariant subspace inside polynomials of degree `<= degree`.
pub fn f_space_dimension(fam: &ExceptionalFamily, degree: usize) -> usize {
    degree + 1 - remainder_map(fam, degree).rank()
}

/// `[f, g](x) = (1-x)^{alpha+1} (1+x)^{beta+1} / denom^2 * (f' g - f g')` for real `f`, `g`.
pub fn sesquilinear_form(
    fam: &ExceptionalFamily,
    f: f64,
    df: f64,
    g: f64,
    dg: f64,
    x: f64,
) -> Result<f64, Error> {
    if !(x > -1.0 && x < 1.0) {
        return Err(Error::DomainViolation { x });
    }
    let p = fam.params();
    let d = fam.denominator_f64().eval_f64(x);
    if d == 0.0 {
        return Err(Error::SingularPoint { x });
    }
    let w = (1.0 - x).powf(p.alpha_f64() + 1.0) * (1.0 + x).powf(p.beta_f64() + 1.0) / (d * d);
    Ok(w * (df * g - f * dg))
}

/// An endpoint limit estimate.
#[derive(Debug, Clone, Serialize)]
pub struct LimitEstimate {
    pub value: f64,
    /// Largest sample magnitude, used as the scale for "is zero".
    pub scale: f64,
    /// Spread of the last three extrapolated values.
    pub spread: f64,
}

impl LimitEstimate {
    pub fn is_zero(&self) -> bool {
        self.value.abs() <= LIMIT_TOL * self.scale.max(1.0)
    }
}

/// Relative stabilization tolerance for endpoint limits.
pub const LIMIT_TOL: f64 = 1e-8;

/// Estimates `lim h(x)` as `x` approaches `endpoint`, sampling at
/// `x = ±(1 - 2^-k)`, `k = 10..=40`, then applying Aitken's delta-squared
/// to the tail. Converged when the last three extrapolants agree.
pub fn endpoint_limit(h: impl Fn(f64) -> f64, endpoint: Endpoint) -> Result<LimitEstimate, Error> {
    let e = endpoint.value();
    let samples: Vec<f64> = (10..=40)
        .map(|k| h(e * (1.0 - 2f64.powi(-k))))
        .collect();
    if samples.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonConvergent {
            what: "endpoint limit",
            detail: "non-finite sample".into(),
        });
    }
    let scale = samples.iter().fold(0.0f64, |acc, s| acc.max(s.abs()));
    let tol = LIMIT_TOL * scale.max(f64::MIN_POSITIVE);
    let n = samples.len();
    let first_step = (samples[1] - samples[0]).abs();
    let last_step = (samples[n - 1] - samples[n - 2]).abs();
    if last_step > first_step * (1.0 + 1e-9) && last_step > tol {
        return Err(Error::NonConvergent {
            what: "endpoint limit",
            detail: format!("samples grow (first step {first_step:e}, last step {last_step:e})"),
        });
    }
    let aitken: Vec<f64> = samples
        .windows(3)
        .map(|w| {
            let d1 = w[2] - w[1];
            let d2 = w[2] - 2.0 * w[1] + w[0];
            if d2.abs() <= 1e-14 * scale || d2 == 0.0 {
                w[2]
            } else {
                w[2] - d1 * d1 / d2
            }
        })
        .collect();
    let tail = &aitken[aitken.len() - 3..];
    let value = tail[2];
    let spread = tail.iter().fold(0.0f64, |acc, t| acc.max((t - value).abs()));
    if spread > LIMIT_TOL * value.abs().max(scale) {
        return Err(Error::NonConvergent {
            what: "endpoint limit",
            detail: format!("extrapolants spread {spread:e} around {value:e}"),
        });
    }
    Ok(LimitEstimate { value, scale, spread })
}

/// Limit of the sesquilinear form at an endpoint.
pub fn sesquilinear_limit(
    fam: &ExceptionalFamily,
    f: &Jet,
    g: &Jet,
    endpoint: Endpoint,
) -> Result<LimitEstimate, Error> {
    endpoint_limit(
        |x| sesquilinear_form(fam, f.value(x), f.d1(x), g.value(x), g.d1(x), x).unwrap_or(f64::NAN),
        endpoint,
    )
}

/// Boundary functional value at one endpoint and whether the self-adjoint
/// domain for these parameters requires it to vanish.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryVerdict {
    pub endpoint: Endpoint,
    pub functional_value: f64,
    pub is_zero: bool,
    pub required_zero: bool,
}

/// `lim (1-x)^{alpha+1} f'(x)` at `+1`, `lim (1+x)^{beta+1} f'(x)` at `-1`.
pub fn boundary_functional(
    fam: &ExceptionalFamily,
    df: impl Fn(f64) -> f64,
    endpoint: Endpoint,
) -> Result<BoundaryVerdict, Error> {
    let p = fam.params();
    let exponent = match endpoint {
        Endpoint::Plus => p.alpha_f64() + 1.0,
        Endpoint::Minus => p.beta_f64() + 1.0,
    };
    let est = endpoint_limit(|x| (1.0 - endpoint.value() * x).powf(exponent) * df(x), endpoint)?;
    Ok(BoundaryVerdict {
        endpoint,
        functional_value: est.value,
        is_zero: est.is_zero(),
        required_zero: boundary_case(p).functionals.contains(&endpoint),
    })
}

/// Both sides of Green's formula for one pair.
#[derive(Debug, Clone, Serialize)]
pub struct GreensReport {
    pub lhs: f64,
    pub rhs_integral: f64,
    pub boundary: f64,
    pub residual: f64,
    pub quad_order: usize,
}

/// `|int T[f] g W - ([f,g](1) - [f,g](-1)) - int f T[g] W|`.
///
/// Integrals use the Gauss-Jacobi rule of the classical weight on the whole
/// interval (the factor `1/denom^2` is smooth on `[-1, 1]`); the order is
/// doubled from `order` until both integrals settle to `1e-12` relative.
pub fn greens_residual(
    fam: &ExceptionalFamily,
    f: &Jet,
    g: &Jet,
    order: usize,
) -> Result<GreensReport, Error> {
    let p = fam.params();
    let coef = OperatorCoefficients::new(fam);
    let denom = fam.denominator_f64();
    let integrals = |n: usize| -> Result<(f64, f64), Error> {
        let rule = gauss_jacobi_rule(p.alpha_f64(), p.beta_f64(), n)?;
        let (mut lhs, mut rhs) = (0.0, 0.0);
        for (&x, &w) in rule.nodes().iter().zip(rule.weights()) {
            let (p2, p1, p0) = coef.eval(x)?;
            let tf = p2 * f.d2(x) + p1 * f.d1(x) + p0 * f.value(x);
            let tg = p2 * g.d2(x) + p1 * g.d1(x) + p0 * g.value(x);
            let d = denom.eval_f64(x);
            lhs += w * tf * g.value(x) / (d * d);
            rhs += w * f.value(x) * tg / (d * d);
        }
        Ok((lhs, rhs))
    };
    let cap = quad_cap();
    let mut n = order.max(10);
    let mut prev = integrals(n)?;
    loop {
        let next_n = 2 * n;
        if next_n > cap {
            return Err(Error::NonConvergent {
                what: "green's formula quadrature",
                detail: format!("order cap {cap} reached"),
            });
        }
        let cur = integrals(next_n)?;
        let scale = cur.0.abs().max(cur.1.abs()).max(1e-300);
        n = next_n;
        let settled = (cur.0 - prev.0).abs() <= 1e-12 * scale && (cur.1 - prev.1).abs() <= 1e-12 * scale;
        prev = cur;
        if settled {
            break;
        }
    }
    let upper = sesquilinear_limit(fam, f, g, Endpoint::Plus)?.value;
    let lower = sesquilinear_limit(fam, f, g, Endpoint::Minus)?.value;
    let boundary = upper - lower;
    Ok(GreensReport {
        lhs: prev.0,
        rhs_integral: prev.1,
        boundary,
        residual: (prev.0 - boundary - prev.1).abs(),
        quad_order: n,
    })
}

/// `true` if `y` is nonzero and `T[y] = lambda y` holds exactly.
pub fn is_exact_eigenpair(fam: &ExceptionalFamily, y: &RatPoly, lambda: &Rational) -> bool {
    !y.is_zero()
        && apply_t_polynomial(fam, y).is_ok_and(|ty| (&ty - &y.scale(lambda)).coeffs().iter().all(Zero::is_zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::ratio;

    fn fam(a: Rational, b: Rational, m: u32) -> ExceptionalFamily {
        ExceptionalFamily::from_params(a, b, m).unwrap()
    }

    #[test]
    fn constant_function() {
        let f = fam(int(2), int(1), 1);
        let one = Jet::new(|_| 1.0, |_| 0.0, |_| 0.0);
        for x in [-0.7, 0.0, 0.6] {
            // c - 2 beta (1-x) denom'/denom with denom = -(x+3)/2
            let expected = 1.0 * (2.0 - 1.0 - 1.0 + 1.0) - 2.0 * (1.0 - x) * (1.0 / (x + 3.0));
            assert!((apply_t_pointwise(&f, &one, x).unwrap() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn eigen_equation_small_cases() {
        for (a, b, m) in [(int(2), int(1), 1), (ratio(7, 2), ratio(1, 2), 2)] {
            let f = fam(a, b, m);
            for n in m..m + 5 {
                let y = f.exceptional_poly(n).unwrap();
                let lam = f.eigenvalue(n).unwrap();
                assert_eq!(apply_t_polynomial(&f, &y).unwrap(), y.scale(&lam));
            }
        }
    }

    #[test]
    fn pointwise_matches_polynomial() {
        let f = fam(int(2), int(1), 1);
        let y = f.exceptional_poly(2).unwrap();
        // T[P_2](0) = -5 P_2(0)
        let v = apply_t_pointwise(&f, &Jet::polynomial(&y), 0.0).unwrap();
        let expected = -5.0 * y.to_float().eval_f64(0.0);
        assert!((v - expected).abs() < 1e-13);
        let q = f_space_basis(&f, 4)[2].clone();
        let tq = apply_t_polynomial(&f, &q).unwrap().to_float();
        for x in [-0.9, -0.1, 0.77] {
            let v = apply_t_pointwise(&f, &Jet::polynomial(&q), x).unwrap();
            assert!((v - tq.eval_f64(x)).abs() <= 1e-11 * v.abs().max(1.0));
        }
    }

    #[test]
    fn square_of_denominator_is_invariant() {
        let f = fam(ratio(7, 2), ratio(1, 2), 2);
        let d2 = f.denominator() * f.denominator();
        assert!(in_f_space(&f, &d2));
        assert!(apply_t_polynomial(&f, &d2).is_ok());
        assert!(f_condition_residuals(&f, &d2).iter().all(|r| *r < 1e-10));
    }

    #[test]
    fn generic_linear_is_not_invariant() {
        let f = fam(int(2), int(1), 1);
        // root of the denominator is -3; (1+x) + beta x at -3 is -2 - 3 != 0
        let y = Polynomial::linear(int(1), int(0));
        assert!(!in_f_space(&f, &y));
        assert!(matches!(apply_t_polynomial(&f, &y), Err(Error::NotInvariant { .. })));
        assert!(!in_f_space(&f, &RatPoly::one()));
    }

    #[test]
    fn float_mode_operator() {
        let f = fam(int(2), int(1), 1);
        let y = f.exceptional_poly(3).unwrap().to_float();
        let ty = apply_t_polynomial(&f, &y).unwrap();
        assert!(ty.approx_eq(&y.scale(&-12.0)));
    }

    #[test]
    fn f_space_dimension_counts() {
        let f = fam(ratio(7, 2), ratio(1, 2), 2);
        for d in 0..2 {
            assert_eq!(f_space_dimension(&f, d), 0);
        }
        assert_eq!(f_space_dimension(&f, 6), 5);
        assert_eq!(f_space_basis(&f, 6).len(), 5);
    }

    #[test]
    fn boundary_functionals() {
        let f = fam(int(2), int(1), 1);
        let poly_d = |x: f64| 3.0 * x * x - 1.0;
        for e in [Endpoint::Minus, Endpoint::Plus] {
            let v = boundary_functional(&f, poly_d, e).unwrap();
            assert!(v.is_zero && v.functional_value.abs() < 1e-8);
        }
        // f = (1-x)^{-alpha}: (1-x)^{alpha+1} f' = alpha
        let v = boundary_functional(&f, |x| 2.0 * (1.0 - x).powf(-3.0), Endpoint::Plus).unwrap();
        assert!((v.functional_value - 2.0).abs() < 1e-8 && !v.is_zero);
        // f = (1+x)^{-beta}: (1+x)^{beta+1} f' = -beta
        let v = boundary_functional(&f, |x| -(1.0 + x).powf(-2.0), Endpoint::Minus).unwrap();
        assert!((v.functional_value + 1.0).abs() < 1e-8);
    }

    #[test]
    fn slow_limits_are_extrapolated() {
        // t^0.1 -> 0 far too slowly for plain sampling
        let est = endpoint_limit(|x| 3.0 + (1.0 - x).powf(0.1), Endpoint::Plus).unwrap();
        assert!((est.value - 3.0).abs() < 1e-8, "{est:?}");
        assert!(endpoint_limit(|x| 1.0 / (1.0 - x), Endpoint::Plus).is_err());
    }

    #[test]
    fn sesquilinear_antisymmetry() {
        let f = fam(int(2), int(1), 1);
        for x in [-0.5, 0.25] {
            assert_eq!(sesquilinear_form(&f, 1.3, 0.2, 1.3, 0.2, x).unwrap(), 0.0);
        }
    }

    #[test]
    fn greens_for_polynomials() {
        let f = fam(int(2), int(1), 1);
        let p = Jet::polynomial(&Polynomial::new(vec![int(1), int(-2), int(0), int(1)]));
        let q = Jet::polynomial(&Polynomial::new(vec![int(0), int(3), int(1), int(0), ratio(1, 2)]));
        let r = greens_residual(&f, &p, &q, 10).unwrap();
        assert!(r.residual < 1e-9, "{r:?}");
    }
}
