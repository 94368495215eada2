//! Classical Jacobi polynomials `P_n^{(a,b)}` for arbitrary real parameters,
//! and Gauss–Jacobi quadrature for the classical range `a, b > -1`.

mod quadrature;

pub use quadrature::{gauss_jacobi_rule, zeroth_moment, zeroth_moment_real, QuadratureRule};

use crate::polyalg::{Polynomial, Scalar};
use crate::real::Real;

/// A Jacobi polynomial together with a flag recording whether its degree
/// fell below `n` (the leading coefficient vanishes for special negative
/// parameter combinations).
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiPoly<S> {
    pub poly: Polynomial<S>,
    pub degree_dropped: bool,
}

/// Generalized binomial `C(top, j) = prod_{i=1..j} (top - i + 1) / i`.
pub fn gen_binomial<S: Scalar>(top: &S, j: usize) -> S {
    (1..=j).fold(S::one(), |acc, i| {
        acc * (top.clone() - S::from_i64(i as i64 - 1)) / S::from_i64(i as i64)
    })
}

/// `P_n^{(a,b)}` from the finite sum
/// `2^{-n} sum_k C(n+a, n-k) C(n+b, k) (x-1)^k (x+1)^{n-k}`,
/// which is polynomial in `(a, b)` and has no poles.
pub fn jacobi_poly<S: Scalar>(n: usize, a: &S, b: &S) -> JacobiPoly<S> {
    let one = Polynomial::<S>::one();
    let xm1 = Polynomial::linear(S::one(), -S::one());
    let xp1 = Polynomial::linear(S::one(), S::one());
    let mut pow_m = vec![one.clone()];
    let mut pow_p = vec![one];
    for k in 1..=n {
        pow_m.push(&pow_m[k - 1] * &xm1);
        pow_p.push(&pow_p[k - 1] * &xp1);
    }
    let top_a = S::from_i64(n as i64) + a.clone();
    let top_b = S::from_i64(n as i64) + b.clone();
    let mut sum = Polynomial::zero();
    for k in 0..=n {
        let c = gen_binomial(&top_a, n - k) * gen_binomial(&top_b, k);
        if c.is_zero() {
            continue;
        }
        sum = &sum + &(&pow_m[k] * &pow_p[n - k]).scale(&c);
    }
    let two_n = (0..n).fold(S::one(), |acc, _| acc * S::from_i64(2));
    let poly = sum.scale(&(S::one() / two_n));
    let degree_dropped = poly.signed_degree() < n as i64;
    JacobiPoly {
        poly,
        degree_dropped,
    }
}

/// `P_n^{(a,b)}(x)` via the sum formula.
pub fn jacobi_eval<S: Scalar>(n: usize, a: &S, b: &S, x: &S) -> S {
    jacobi_poly(n, a, b).poly.eval(x)
}

/// Three-term recurrence evaluation, stable for high degree.
///
/// Returns `None` when one of the recurrence denominators vanishes (possible
/// only for parameters outside the classical range).
pub fn jacobi_eval_recurrence<R: Real>(n: usize, a: R, b: R, x: R) -> Option<R> {
    let two = R::lit(2.0);
    let mut prev = R::one();
    if n == 0 {
        return Some(prev);
    }
    let mut cur = (a + R::one()) + (a + b + two) * (x - R::one()) / two;
    for k in 2..=n {
        let k = R::lit(k as f64);
        let s = two * k + a + b;
        let denom = two * k * (k + a + b) * (s - two);
        if denom == R::zero() {
            return None;
        }
        let next = ((s - R::one()) * (s * (s - two) * x + a * a - b * b) * cur
            - two * (k + a - R::one()) * (k + b - R::one()) * s * prev)
            / denom;
        prev = cur;
        cur = next;
    }
    Some(cur)
}

/// Max coefficient discrepancy in
/// `d/dx P_n^{(a,b)} = (n+a+b+1)/2 * P_{n-1}^{(a+1,b+1)}`; zero in exact mode.
pub fn jacobi_derivative_identity_check<S: Scalar>(n: usize, a: &S, b: &S) -> S {
    assert!(n >= 1, "identity needs n >= 1");
    let lhs = jacobi_poly(n, a, b).poly.derivative();
    let factor = (S::from_i64(n as i64 + 1) + a.clone() + b.clone()) / S::from_i64(2);
    let rhs = jacobi_poly(n - 1, &(a.clone() + S::one()), &(b.clone() + S::one()))
        .poly
        .scale(&factor);
    let n_coeffs = lhs.coeffs().len().max(rhs.coeffs().len());
    (0..n_coeffs)
        .map(|k| (lhs.coeff(k) - rhs.coeff(k)).abs())
        .fold(S::zero(), |acc, d| if d.to_f64() > acc.to_f64() { d } else { acc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{int, ratio, Rational, RatPoly};

    fn rp(c: &[Rational]) -> RatPoly {
        Polynomial::new(c.to_vec())
    }

    #[test]
    fn degree_zero_is_one() {
        for (a, b) in [(int(0), int(0)), (ratio(-7, 2), ratio(5, 3))] {
            assert_eq!(jacobi_poly(0, &a, &b).poly, RatPoly::one());
        }
    }

    #[test]
    fn degree_one_hand_expansion() {
        // P_1^{(a,b)} = ((a+b+2)x + (a-b))/2; with a = -alpha-1, b = beta-1 this
        // is ((beta-alpha)x - (alpha+beta))/2.
        for (alpha, beta) in [(int(2), int(1)), (ratio(5, 2), ratio(3, 2)), (ratio(-1, 2), ratio(-1, 4))] {
            let a = -alpha.clone() - int(1);
            let b = beta.clone() - int(1);
            let expected = rp(&[
                -(alpha.clone() + beta.clone()) / int(2),
                (beta - alpha) / int(2),
            ]);
            assert_eq!(jacobi_poly(1, &a, &b).poly, expected);
        }
    }

    #[test]
    fn legendre_two_matches_recurrence() {
        // Legendre recurrence: 2 P_2 = 3x P_1 - P_0
        let p2 = jacobi_poly(2, &int(0), &int(0)).poly;
        assert_eq!(p2, rp(&[ratio(-1, 2), int(0), ratio(3, 2)]));
        let p1 = jacobi_poly(1, &int(0), &int(0)).poly;
        let rec = (&(&RatPoly::x() * &p1).scale(&int(3)) - &RatPoly::one()).scale(&ratio(1, 2));
        assert_eq!(p2, rec);
    }

    #[test]
    fn eval_examples() {
        // P_1^{(-3,0)}(0) = -3/2
        assert_eq!(jacobi_eval(1, &int(-3), &int(0), &int(0)), ratio(-3, 2));
        assert_eq!(jacobi_eval(0, &int(4), &int(-9), &ratio(1, 7)), int(1));
        // P_n^{(a,b)}(1) = C(n+a, n) as the product prod_{i=1..n}(a+i)/i
        for n in 0..7usize {
            for a in [ratio(-7, 2), ratio(1, 3), int(2)] {
                let oracle = (1..=n).fold(int(1), |acc, i| {
                    acc * (a.clone() + int(i as i64)) / int(i as i64)
                });
                assert_eq!(jacobi_eval(n, &a, &ratio(2, 5), &int(1)), oracle);
            }
        }
    }

    #[test]
    fn derivative_identity() {
        assert_eq!(jacobi_derivative_identity_check(1, &int(0), &int(0)), int(0));
        assert_eq!(jacobi_derivative_identity_check(3, &int(2), &int(1)), int(0));
        assert_eq!(
            jacobi_derivative_identity_check(4, &ratio(-5, 2), &ratio(1, 2)),
            int(0)
        );
        assert!(jacobi_derivative_identity_check(5, &0.3f64, &-0.7f64) < 1e-12);
    }

    #[test]
    fn degree_drop_flag() {
        // leading coefficient (n+a+b+1)_n / (2^n n!) vanishes when
        // n+a+b+1+j = 0 for some j < n; a = -4, b = 0, n = 2 gives j = 1.
        let p = jacobi_poly(2, &int(-4), &int(0));
        assert!(p.degree_dropped);
        assert_eq!(p.poly.degree(), Some(1));
        assert!(!jacobi_poly(2, &ratio(-1, 2), &int(0)).degree_dropped);
    }

    #[test]
    fn recurrence_agrees_with_sum_formula() {
        for (a, b) in [(0.0, 0.0), (2.0, 1.0), (3.5, -0.5), (-0.5, -0.25)] {
            let (ra, rb) = (
                Rational::from_float(a).unwrap(),
                Rational::from_float(b).unwrap(),
            );
            for n in 0..12 {
                let p = jacobi_poly(n, &ra, &rb).poly.to_float();
                for &x in &[-0.9, -0.3, 0.0, 0.45, 0.99] {
                    let r = jacobi_eval_recurrence(n, a, b, x).unwrap();
                    let s = p.eval_f64(x);
                    assert!((r - s).abs() <= 1e-11 * s.abs().max(1.0), "n={n} a={a} b={b} x={x}");
                }
            }
        }
    }
}
