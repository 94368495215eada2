//! Polynomial roots from companion-matrix eigenvalues, polished by Newton's
//! method on the original coefficients.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::poly::FloatPoly;

const NEWTON_STEPS: usize = 50;

/// All complex roots of `p` (with multiplicity), sorted by real part then
/// imaginary part. Constant and zero polynomials have no roots.
pub fn roots(p: &FloatPoly) -> Vec<Complex64> {
    let n = match p.degree() {
        Some(n) if n >= 1 => n,
        _ => return Vec::new(),
    };
    let lead = p.coeffs()[n];
    // Frobenius companion matrix of the monic polynomial.
    let mut companion = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        companion[(i, n - 1)] = -p.coeffs()[i] / lead;
    }
    let dp = p.derivative();
    let mut out: Vec<Complex64> = companion
        .complex_eigenvalues()
        .iter()
        .map(|&z| polish(p, &dp, z))
        .collect();
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    out
}

fn polish(p: &FloatPoly, dp: &FloatPoly, mut z: Complex64) -> Complex64 {
    let mut best = (p.eval_complex(z).norm(), z);
    for _ in 0..NEWTON_STEPS {
        let fz = p.eval_complex(z);
        let dz = dp.eval_complex(z);
        if dz.norm() == 0.0 {
            break;
        }
        let step = fz / dz;
        z -= step;
        let r = p.eval_complex(z).norm();
        if r < best.0 {
            best = (r, z);
        }
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    best.1
}
