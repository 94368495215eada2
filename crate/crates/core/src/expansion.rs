//! Inner products against the exceptional weight, Gram matrices,
//! eigenfunction expansions and the weighted density construction.
//!
//! Every integral `int u v W` is rewritten as `int (u/denom)(v/denom) (1-x)^a (1+x)^b`
//! and evaluated with a Gauss-Jacobi rule; the quotient by the denominator
//! is analytic on `[-1, 1]`, so the rules converge geometrically.

use serde::Serialize;

use crate::error::Error;
use crate::jacobi::{gauss_jacobi_rule, jacobi_eval_recurrence, QuadratureRule};
use crate::polyalg::{parse_rational, RatPoly, Polynomial};
use crate::real::Real;
use crate::xjacobi::{horner_real, ExceptionalFamily};

/// Default cap on the quadrature order.
pub const DEFAULT_QUAD_CAP: usize = 2048;

/// Quadrature order cap, overridable through `XJACOBI_QUAD_CAP`.
pub fn quad_cap() -> usize {
    std::env::var("XJACOBI_QUAD_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&v: &usize| v >= 1)
        .unwrap_or(DEFAULT_QUAD_CAP)
}

fn rule<R: Real>(fam: &ExceptionalFamily, n: usize) -> Result<QuadratureRule<R>, Error> {
    let p = fam.params();
    gauss_jacobi_rule(R::from_rational(p.alpha()), R::from_rational(p.beta()), n)
}

/// Runs `eval` on rules of doubling order until `settled(previous, current)`.
fn adaptive<R: Real, T>(
    fam: &ExceptionalFamily,
    start: usize,
    what: &'static str,
    mut eval: impl FnMut(&QuadratureRule<R>) -> Result<T, Error>,
    settled: impl Fn(&T, &T) -> bool,
) -> Result<(T, usize), Error> {
    let cap = quad_cap();
    let mut n = start.clamp(1, cap);
    let mut prev = eval(&rule(fam, n)?)?;
    loop {
        if 2 * n > cap {
            return Err(Error::NonConvergent {
                what,
                detail: format!("order cap {cap} reached at order {n}"),
            });
        }
        n *= 2;
        let cur = eval(&rule(fam, n)?)?;
        if settled(&prev, &cur) {
            return Ok((cur, n));
        }
        prev = cur;
    }
}

/// `<f, g>` in the exceptional weight, with the order used.
#[derive(Debug, Clone, Copy)]
pub struct InnerProduct<R> {
    pub value: R,
    pub order: usize,
}

/// Inner product with order doubling from `order` until successive values
/// agree to `R::QUAD_TOL`, measured against `int |f g| W`.
pub fn inner_product<R: Real>(
    fam: &ExceptionalFamily,
    f: &dyn Fn(R) -> R,
    g: &dyn Fn(R) -> R,
    order: usize,
) -> Result<InnerProduct<R>, Error> {
    let eval = |r: &QuadratureRule<R>| -> Result<(R, R), Error> {
        let mut value = R::zero();
        let mut scale = R::zero();
        for (&x, &w) in r.nodes().iter().zip(r.weights()) {
            let d = fam.denominator_real(x);
            let t = w * f(x) * g(x) / (d * d);
            value = value + t;
            scale = scale + t.abs();
        }
        Ok((value, scale))
    };
    let tol = R::lit(R::QUAD_TOL);
    let ((value, _), order) = adaptive(fam, order, "inner product", eval, |a, b| {
        (a.0 - b.0).abs() <= tol * b.1.max(R::lit(f64::MIN_POSITIVE))
    })?;
    Ok(InnerProduct { value, order })
}

/// `<p, q>` against the classical weight `(1-x)^alpha (1+x)^beta`; polynomial
/// integrands are integrated exactly by a rule of sufficient order.
pub fn classical_inner_product<R: Real>(fam: &ExceptionalFamily, p: &RatPoly, q: &RatPoly) -> Result<R, Error> {
    let deg = p.degree().unwrap_or(0) + q.degree().unwrap_or(0);
    let r = rule::<R>(fam, deg / 2 + 1)?;
    Ok(r.integrate(|x| horner_real(p, x) * horner_real(q, x)))
}

/// Gram matrix of the family members of degree `m..=max_degree`.
#[derive(Debug, Clone)]
pub struct GramMatrix<R> {
    pub degrees: Vec<u32>,
    pub entries: Vec<Vec<R>>,
    pub quad_order: usize,
}

impl<R: Real> GramMatrix<R> {
    /// `max |G_nk| / sqrt(G_nn G_kk)` over `n != k`.
    pub fn max_offdiag_ratio(&self) -> f64 {
        let n = self.entries.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let r = self.entries[i][j].abs() / (self.entries[i][i] * self.entries[j][j]).sqrt();
                    worst = worst.max(r.as_f64());
                }
            }
        }
        worst
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.entries.len();
        (0..n).all(|i| (0..n).all(|j| self.entries[i][j] == self.entries[j][i]))
    }

    pub fn diagonal_positive(&self) -> bool {
        (0..self.entries.len()).all(|i| self.entries[i][i] > R::zero())
    }
}

/// Values of the family members `m..=max_degree` divided by the denominator
/// at each node: `vals[n - m][i] = P_n(x_i) / denom(x_i)`.
fn scaled_values<R: Real>(
    fam: &ExceptionalFamily,
    r: &QuadratureRule<R>,
    max_degree: u32,
) -> Result<Vec<Vec<R>>, Error> {
    let m = fam.m();
    let inv: Vec<R> = r
        .nodes()
        .iter()
        .map(|&x| R::one() / fam.denominator_real(x))
        .collect();
    (m..=max_degree)
        .map(|n| {
            r.nodes()
                .iter()
                .zip(&inv)
                .map(|(&x, &s)| Ok(fam.eval_real(n, x)? * s))
                .collect()
        })
        .collect()
}

pub fn gram_matrix<R: Real>(fam: &ExceptionalFamily, max_degree: u32) -> Result<GramMatrix<R>, Error> {
    let m = fam.m();
    if max_degree < m {
        return Err(Error::BelowGap { n: max_degree, m });
    }
    let size = (max_degree - m + 1) as usize;
    let eval = |r: &QuadratureRule<R>| -> Result<Vec<Vec<R>>, Error> {
        let vals = scaled_values(fam, r, max_degree)?;
        let mut g = vec![vec![R::zero(); size]; size];
        for i in 0..size {
            for j in i..size {
                let s = r
                    .weights()
                    .iter()
                    .enumerate()
                    .fold(R::zero(), |acc, (k, &w)| acc + w * vals[i][k] * vals[j][k]);
                g[i][j] = s;
                g[j][i] = s;
            }
        }
        Ok(g)
    };
    let tol = R::lit(R::QUAD_TOL);
    let settled = |a: &Vec<Vec<R>>, b: &Vec<Vec<R>>| {
        (0..size).all(|i| {
            (0..size).all(|j| {
                let scale = (b[i][i] * b[j][j]).sqrt();
                (a[i][j] - b[i][j]).abs() <= tol * scale
            })
        })
    };
    let start = (max_degree as usize + 2).max(16);
    let (entries, quad_order) = adaptive(fam, start, "gram matrix", eval, settled)?;
    Ok(GramMatrix {
        degrees: (m..=max_degree).collect(),
        entries,
        quad_order,
    })
}

/// Coefficients and prefix residuals of an eigenfunction expansion.
#[derive(Debug, Clone, Serialize)]
pub struct ExpansionReport {
    pub precision: &'static str,
    /// Degrees `m..=max_degree`.
    pub degrees: Vec<u32>,
    pub coefficients: Vec<f64>,
    /// `||f - sum_{n <= N} c_n P_n||` for each `N` in `degrees`, by direct
    /// quadrature of the squared difference.
    pub residual_norms: Vec<f64>,
    /// `||P_n||^2`.
    pub norms_sq: Vec<f64>,
    pub f_norm: f64,
    pub quad_order: usize,
    pub converged: bool,
}

impl ExpansionReport {
    /// Non-increasing up to an absolute slack.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.residual_norms.windows(2).all(|w| w[1] <= w[0] + slack)
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.residual_norms.windows(2).all(|w| w[1] < w[0])
    }

    pub fn final_residual(&self) -> f64 {
        *self.residual_norms.last().unwrap_or(&f64::NAN)
    }

    /// `|(||f||^2 - sum c_n^2 ||P_n||^2) - residual^2|` relative to `||f||^2`,
    /// the Parseval/Bessel cross-check at the full prefix.
    pub fn bessel_gap_error(&self) -> f64 {
        let bessel: f64 = self
            .coefficients
            .iter()
            .zip(&self.norms_sq)
            .map(|(c, n)| c * c * n)
            .sum();
        let f2 = self.f_norm * self.f_norm;
        let r = self.final_residual();
        ((f2 - bessel) - r * r).abs() / f2
    }
}

struct RawExpansion<R> {
    coefficients: Vec<R>,
    norms_sq: Vec<R>,
    residuals_sq: Vec<R>,
    f_norm_sq: R,
}

/// Expands `f` in the family members of degree `m..=max_degree`.
pub fn expand<R: Real>(
    fam: &ExceptionalFamily,
    f: &dyn Fn(R) -> R,
    max_degree: u32,
) -> Result<ExpansionReport, Error> {
    let m = fam.m();
    if max_degree < m {
        return Err(Error::BelowGap { n: max_degree, m });
    }
    let size = (max_degree - m + 1) as usize;
    let eval = |r: &QuadratureRule<R>| -> Result<RawExpansion<R>, Error> {
        let vals = scaled_values(fam, r, max_degree)?;
        let fv: Vec<R> = r
            .nodes()
            .iter()
            .map(|&x| f(x) / fam.denominator_real(x))
            .collect();
        let w = r.weights();
        let dot = |a: &[R], b: &[R]| {
            (0..w.len()).fold(R::zero(), |acc, k| acc + w[k] * a[k] * b[k])
        };
        let norms_sq: Vec<R> = vals.iter().map(|v| dot(v, v)).collect();
        let coefficients: Vec<R> = vals
            .iter()
            .zip(&norms_sq)
            .map(|(v, n)| dot(&fv, v) / *n)
            .collect();
        let mut diff = fv.clone();
        let mut residuals_sq = Vec::with_capacity(size);
        for (v, c) in vals.iter().zip(&coefficients) {
            for (d, &p) in diff.iter_mut().zip(v) {
                *d = *d - *c * p;
            }
            residuals_sq.push(dot(&diff, &diff));
        }
        Ok(RawExpansion {
            coefficients,
            norms_sq,
            residuals_sq,
            f_norm_sq: dot(&fv, &fv),
        })
    };
    let tol = R::lit(R::QUAD_TOL);
    let settled = |a: &RawExpansion<R>, b: &RawExpansion<R>| {
        let fs = b.f_norm_sq;
        (a.f_norm_sq - fs).abs() <= tol * fs
            && a.coefficients.iter().zip(&b.coefficients).zip(&b.norms_sq).all(|((ca, cb), n)| {
                (*ca - *cb).abs() * n.sqrt() <= tol * fs.sqrt()
            })
            && a.residuals_sq.iter().zip(&b.residuals_sq).all(|(ra, rb)| {
                // residuals must settle relative to themselves down to the
                // working-precision floor
                (*ra - *rb).abs() <= R::lit(1e-2) * *rb + tol * tol * fs
            })
    };
    let start = (2 * max_degree as usize + 16).max(32);
    let (raw, quad_order) = adaptive(fam, start, "expansion", eval, settled)?;
    Ok(ExpansionReport {
        precision: R::NAME,
        degrees: (m..=max_degree).collect(),
        coefficients: raw.coefficients.iter().map(|c| c.as_f64()).collect(),
        residual_norms: raw.residuals_sq.iter().map(|r| r.max(R::zero()).sqrt().as_f64()).collect(),
        norms_sq: raw.norms_sq.iter().map(|n| n.as_f64()).collect(),
        f_norm: raw.f_norm_sq.sqrt().as_f64(),
        quad_order,
        converged: true,
    })
}

/// Best approximation error of `f/denom` by `denom * p`, `deg p <= degree`,
/// in the classical weighted norm (equivalently, of `f` by `denom^2 p` in the
/// exceptional norm).
///
/// The columns `denom * P_k` (classical Jacobi `P_k`) are orthonormalized on
/// the quadrature nodes by two passes of modified Gram-Schmidt, so no normal
/// equations are formed.
pub fn density_demo<R: Real>(fam: &ExceptionalFamily, f: &dyn Fn(R) -> R, degree: usize) -> Result<f64, Error> {
    let p = fam.params();
    let (a, b) = (R::from_rational(p.alpha()), R::from_rational(p.beta()));
    let eval = |r: &QuadratureRule<R>| -> Result<(R, R), Error> {
        let sw: Vec<R> = r.weights().iter().map(|w| w.sqrt()).collect();
        let mut target: Vec<R> = r
            .nodes()
            .iter()
            .zip(&sw)
            .map(|(&x, &s)| s * f(x) / fam.denominator_real(x))
            .collect();
        let f_norm = target.iter().fold(R::zero(), |acc, &t| acc + t * t).sqrt();
        let mut basis: Vec<Vec<R>> = Vec::with_capacity(degree + 1);
        for k in 0..=degree {
            let mut col: Vec<R> = r
                .nodes()
                .iter()
                .zip(&sw)
                .map(|(&x, &s)| {
                    let pk = jacobi_eval_recurrence(k, a, b, x).unwrap_or_else(R::zero);
                    s * fam.denominator_real(x) * pk
                })
                .collect();
            for _ in 0..2 {
                for q in &basis {
                    let proj = col.iter().zip(q).fold(R::zero(), |acc, (&c, &v)| acc + c * v);
                    for (c, &v) in col.iter_mut().zip(q) {
                        *c = *c - proj * v;
                    }
                }
            }
            let norm = col.iter().fold(R::zero(), |acc, &c| acc + c * c).sqrt();
            if norm > R::zero() {
                col.iter_mut().for_each(|c| *c = *c / norm);
                basis.push(col);
            }
        }
        for _ in 0..2 {
            for q in &basis {
                let proj = target.iter().zip(q).fold(R::zero(), |acc, (&c, &v)| acc + c * v);
                for (t, &v) in target.iter_mut().zip(q) {
                    *t = *t - proj * v;
                }
            }
        }
        let err = target.iter().fold(R::zero(), |acc, &t| acc + t * t).sqrt();
        Ok((err, f_norm))
    };
    let tol = R::lit(R::QUAD_TOL.sqrt());
    let start = (2 * (degree + fam.m() as usize) + 16).max(32);
    let ((err, _), _) = adaptive(fam, start, "density projection", eval, |x, y| {
        (x.0 - y.0).abs() <= R::lit(1e-2) * y.0 + tol * y.1 * R::lit(R::QUAD_TOL.sqrt())
    })?;
    Ok(err.as_f64())
}

/// Built-in expansion targets.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Exp,
    /// `1 / (1 + 25 x^2)`
    Runge,
    /// `|x - 1/4|`
    AbsShift,
    /// Explicit coefficients, low to high.
    Poly(RatPoly),
    /// A member of the family.
    Member(u32),
}

impl Target {
    /// Parses `exp`, `runge`, `abs-shift`, `poly:c0,c1,...` or `member:n`.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exp" => return Some(Target::Exp),
            "runge" => return Some(Target::Runge),
            "abs-shift" => return Some(Target::AbsShift),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("poly:") {
            let coeffs: Option<Vec<_>> = rest.split(',').map(parse_rational).collect();
            return Some(Target::Poly(Polynomial::new(coeffs?)));
        }
        if let Some(rest) = s.strip_prefix("member:") {
            return rest.trim().parse().ok().map(Target::Member);
        }
        None
    }

    pub fn name(&self) -> String {
        match self {
            Target::Exp => "exp".into(),
            Target::Runge => "runge".into(),
            Target::AbsShift => "abs-shift".into(),
            Target::Poly(p) => format!("poly:{p}"),
            Target::Member(n) => format!("member:{n}"),
        }
    }

    pub fn eval<R: Real>(&self, fam: &ExceptionalFamily, x: R) -> R {
        match self {
            Target::Exp => x.exp(),
            Target::Runge => R::one() / (R::one() + R::lit(25.0) * x * x),
            Target::AbsShift => (x - R::lit(0.25)).abs(),
            Target::Poly(p) => horner_real(p, x),
            Target::Member(n) => fam.eval_real(*n, x).unwrap_or_else(|_| R::zero()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::{int, ratio, Rational};
    use crate::real::DoubleDouble;

    fn fam(a: Rational, b: Rational, m: u32) -> ExceptionalFamily {
        ExceptionalFamily::from_params(a, b, m).unwrap()
    }

    #[test]
    fn neighbouring_members_are_orthogonal() {
        let f = fam(int(2), int(1), 1);
        let p1 = |x: f64| f.eval_real(1, x).unwrap();
        let p2 = |x: f64| f.eval_real(2, x).unwrap();
        let ip = inner_product(&f, &p1, &p2, 8).unwrap().value;
        let n1 = inner_product(&f, &p1, &p1, 8).unwrap().value;
        let n2 = inner_product(&f, &p2, &p2, 8).unwrap().value;
        assert!(ip.abs() / (n1 * n2).sqrt() < 1e-10);
        let one = inner_product(&f, &|_| 1.0, &|_| 1.0, 8).unwrap().value;
        assert!(one > 0.0 && one.is_finite());
    }

    #[test]
    fn isometry_with_classical_weight() {
        let f = fam(ratio(7, 2), ratio(1, 2), 2);
        let p = Polynomial::new(vec![int(1), ratio(-1, 3), int(2)]);
        let q = Polynomial::new(vec![int(0), int(1), int(0), ratio(1, 5)]);
        let dp = f.denominator() * &p;
        let dq = f.denominator() * &q;
        let lhs = inner_product(
            &f,
            &|x: f64| horner_real(&dp, x),
            &|x: f64| horner_real(&dq, x),
            8,
        )
        .unwrap()
        .value;
        let rhs: f64 = classical_inner_product(&f, &p, &q).unwrap();
        assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs());
    }

    #[test]
    fn gram_matrix_properties() {
        let f = fam(int(2), int(1), 1);
        let g = gram_matrix::<f64>(&f, 1).unwrap();
        assert_eq!(g.entries.len(), 1);
        assert!(g.diagonal_positive());
        let g = gram_matrix::<f64>(&f, 6).unwrap();
        assert!(g.is_symmetric());
        assert!(g.max_offdiag_ratio() < 1e-10, "{}", g.max_offdiag_ratio());
    }

    #[test]
    fn member_is_reproduced() {
        let f = fam(int(2), int(1), 1);
        let t = Target::Member(3);
        let rep = expand::<f64>(&f, &|x| t.eval(&f, x), 6).unwrap();
        for (n, c) in rep.degrees.iter().zip(&rep.coefficients) {
            let expected = if *n == 3 { 1.0 } else { 0.0 };
            assert!((c - expected).abs() < 1e-10, "n={n} c={c}");
        }
        assert!(rep.final_residual() < 1e-10);
    }

    #[test]
    fn exp_expansion_double_double() {
        let f = fam(int(2), int(1), 1);
        let rep = expand::<DoubleDouble>(&f, &|x| Real::exp(x), 30).unwrap();
        assert!(rep.is_strictly_decreasing(), "{:?}", rep.residual_norms);
        assert!(rep.final_residual() < 1e-3);
        assert!(rep.bessel_gap_error() < 1e-8);
    }

    #[test]
    fn density_decreases() {
        let f = fam(int(2), int(1), 1);
        let errs: Vec<f64> = [5, 10, 20]
            .iter()
            .map(|&n| density_demo::<f64>(&f, &|x: f64| x.exp(), n).unwrap())
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
        let d2 = f.denominator() * f.denominator();
        let target = &d2 * &Polynomial::new(vec![int(1), int(2), int(-1)]);
        let e = density_demo::<f64>(&f, &|x: f64| horner_real(&target, x), 3).unwrap();
        assert!(e < 1e-10, "{e}");
    }

    #[test]
    fn targets_parse() {
        assert_eq!(Target::parse("exp"), Some(Target::Exp));
        assert_eq!(Target::parse("member:4"), Some(Target::Member(4)));
        assert_eq!(
            Target::parse("poly:1,0,-1/2"),
            Some(Target::Poly(Polynomial::new(vec![int(1), int(0), ratio(-1, 2)])))
        );
        assert_eq!(Target::parse("sin"), None);
    }
}
