//! Gauss–Jacobi quadrature by the Golub–Welsch construction.
//!
//! Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix,
//! computed in `f64` by implicit QL and then Newton-polished in the target
//! precision on the orthonormal recurrence. Weights come from the
//! Christoffel function `1 / sum_k p_k(x)^2`.

use statrs::function::gamma::ln_gamma;

use crate::error::Error;
use crate::real::Real;

/// Nodes and weights integrating `f(x) (1-x)^a (1+x)^b` over `(-1, 1)`.
#[derive(Debug, Clone)]
pub struct QuadratureRule<R> {
    nodes: Vec<R>,
    weights: Vec<R>,
    a: R,
    b: R,
}

impl<R: Real> QuadratureRule<R> {
    pub fn nodes(&self) -> &[R] {
        &self.nodes
    }

    pub fn weights(&self) -> &[R] {
        &self.weights
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn params(&self) -> (R, R) {
        (self.a, self.b)
    }

    /// Weighted sum, accumulated in ascending node order.
    pub fn integrate(&self, mut f: impl FnMut(R) -> R) -> R {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(R::zero(), |acc, (&x, &w)| acc + w * f(x))
    }
}

/// `int_{-1}^{1} (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1)`.
pub fn zeroth_moment(a: f64, b: f64) -> f64 {
    ((a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(a + b + 2.0))
    .exp()
}

/// Zeroth moment in the working precision. Integer and half-integer
/// parameters are handled exactly through `Gamma(1/2) = sqrt(pi)`; anything
/// else falls back to the `f64` log-gamma value.
pub fn zeroth_moment_real<R: Real>(a: R, b: R) -> R {
    let (af, bf) = (a.as_f64(), b.as_f64());
    let half_integral = |v: f64| (2.0 * v).fract() == 0.0 && v.abs() < 200.0;
    if !(half_integral(af) && half_integral(bf)) || R::lit(af) != a || R::lit(bf) != b {
        return R::lit(zeroth_moment(af, bf));
    }
    let gamma = |x: f64| {
        // x > 0, 2x integral
        let (mut acc, mut t) = if x.fract() == 0.0 {
            (R::one(), 1.0)
        } else {
            (R::pi().sqrt(), 0.5)
        };
        while t < x {
            acc = acc * R::lit(t);
            t += 1.0;
        }
        acc
    };
    let e = af + bf + 1.0;
    let mut pow2 = R::lit(2.0).powi(e.floor() as i32);
    if e.fract() != 0.0 {
        pow2 = pow2 * R::lit(2.0).sqrt();
    }
    pow2 * gamma(af + 1.0) * gamma(bf + 1.0) / gamma(af + bf + 2.0)
}

/// Recurrence coefficients of the monic Jacobi polynomials: diagonal
/// entries `alpha_k` and squared off-diagonals `beta_k` (`beta_0` unused).
fn recurrence<R: Real>(a: R, b: R, n: usize) -> (Vec<R>, Vec<R>) {
    let one = R::one();
    let two = R::lit(2.0);
    let four = R::lit(4.0);
    let mut diag = Vec::with_capacity(n);
    let mut off2 = Vec::with_capacity(n);
    for k in 0..n {
        let kk = R::lit(k as f64);
        let s = two * kk + a + b;
        diag.push(if k == 0 {
            (b - a) / (a + b + two)
        } else {
            (b * b - a * a) / (s * (s + two))
        });
        off2.push(match k {
            0 => R::zero(),
            1 => four * (one + a) * (one + b) / ((two + a + b).powi(2) * (R::lit(3.0) + a + b)),
            _ => {
                four * kk * (kk + a) * (kk + b) * (kk + a + b)
                    / (s * s * (s + one) * (s - one))
            }
        });
    }
    (diag, off2)
}

/// Eigenvalues of a symmetric tridiagonal matrix (implicit QL, Wilkinson
/// shift). `off[i]` couples rows `i` and `i+1`; `off.len() == diag.len()`.
fn tridiagonal_eigenvalues(diag: &mut [f64], off: &mut [f64]) -> Result<(), Error> {
    let n = diag.len();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let scale = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * scale {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(Error::NonConvergent {
                    what: "tridiagonal QL",
                    detail: format!("eigenvalue {l} after 60 sweeps"),
                });
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let bb = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * bb;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - bb;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

/// Orthonormal recurrence at `x` (`off` holds `sqrt(beta_k)` for `k = 0..=n`): returns `(p_n(x), p_n'(x), sum_{k<n} p_k(x)^2)`.
fn orthonormal_at<R: Real>(x: R, diag: &[R], off: &[R], p0: R) -> (R, R, R) {
    let n = diag.len();
    let (mut p_prev, mut p) = (R::zero(), p0);
    let (mut d_prev, mut d) = (R::zero(), R::zero());
    let mut christoffel = R::zero();
    for k in 0..n {
        christoffel = christoffel + p * p;
        let next_off = off[k + 1];
        let back = if k == 0 { R::zero() } else { off[k] };
        let p_next = ((x - diag[k]) * p - back * p_prev) / next_off;
        let d_next = (p + (x - diag[k]) * d - back * d_prev) / next_off;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d, christoffel)
}

/// `n`-point Gauss–Jacobi rule for the weight `(1-x)^a (1+x)^b`, exact for
/// polynomials of degree `<= 2n - 1`.
pub fn gauss_jacobi_rule<R: Real>(a: R, b: R, n: usize) -> Result<QuadratureRule<R>, Error> {
    if !(a > -R::one() && b > -R::one()) {
        return Err(Error::QuadratureParams {
            a: a.as_f64(),
            b: b.as_f64(),
        });
    }
    if n == 0 {
        return Err(Error::QuadratureOrder);
    }
    let (diag, off2) = recurrence(a, b, n);
    // the last off-diagonal (coupling p_{n-1} and p_n) is needed for p_n itself
    let (_, off2_ext) = recurrence(a, b, n + 1);
    let off: Vec<R> = off2_ext.iter().map(|v| v.sqrt()).collect();

    let mut d64: Vec<f64> = diag.iter().map(|v| v.as_f64()).collect();
    let mut e64: Vec<f64> = (0..n)
        .map(|i| if i + 1 < n { off2[i + 1].as_f64().sqrt() } else { 0.0 })
        .collect();
    tridiagonal_eigenvalues(&mut d64, &mut e64)?;
    d64.sort_by(f64::total_cmp);

    let mu0 = zeroth_moment_real(a, b);
    let p0 = R::one() / mu0.sqrt();
    let off_rec: Vec<R> = off[..=n].to_vec();
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &guess in &d64 {
        let mut x = R::lit(guess);
        for _ in 0..8 {
            let (p, dp, _) = orthonormal_at(x, &diag, &off_rec, p0);
            if dp == R::zero() {
                break;
            }
            let step = p / dp;
            x = x - step;
            if step.abs() <= R::eps() * R::lit(4.0) {
                break;
            }
        }
        let (_, _, christoffel) = orthonormal_at(x, &diag, &off_rec, p0);
        nodes.push(x);
        weights.push(R::one() / christoffel);
    }
    Ok(QuadratureRule { nodes, weights, a, b })
}
