//! Indicial analysis at the singular endpoints, limit-point / limit-circle
//! classification, deficiency indices, the self-adjoint boundary-condition
//! table and degree-gap certificates.

use std::fmt;

use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::jacobi::gauss_jacobi_rule;
use crate::linalg::RatMatrix;
use crate::operator::{apply_t_polynomial, f_space_basis};
use crate::polyalg::{format_rational, int, Polynomial, RatPoly, Rational, Scalar};
use crate::xjacobi::{ExceptionalFamily, XParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    Minus,
    Plus,
}

impl Endpoint {
    pub fn value(self) -> f64 {
        match self {
            Endpoint::Minus => -1.0,
            Endpoint::Plus => 1.0,
        }
    }

    pub fn both() -> [Endpoint; 2] {
        [Endpoint::Minus, Endpoint::Plus]
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Endpoint::Minus => "-1",
            Endpoint::Plus => "+1",
        })
    }
}

impl Serialize for Endpoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn ser_rational<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

fn ser_rational_pair<S: Serializer>(q: &(Rational, Rational), s: S) -> Result<S::Ok, S::Error> {
    [format_rational(&q.0), format_rational(&q.1)].serialize(s)
}

/// Exponents of the two local solutions at a regular singular endpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicialData {
    pub endpoint: Endpoint,
    #[serde(serialize_with = "ser_rational_pair")]
    pub roots: (Rational, Rational),
    /// Exponent of the weight at this endpoint (`alpha` at `+1`, `beta` at `-1`).
    #[serde(serialize_with = "ser_rational")]
    pub weight_exponent: Rational,
}

impl IndicialData {
    pub fn is_double(&self) -> bool {
        self.roots.0 == self.roots.1
    }
}

/// Indicial roots at `endpoint`, derived from the operator coefficients.
///
/// With `A = 1 - x^2` and first-order coefficient `B~`, the indicial equation
/// at a simple zero `e` of `A` is `r(r-1) + p0 r = 0`, `p0 = B~(e)/A'(e)`; the
/// logarithmic term of `B~` carries the factor `A` and drops out at `e`.
pub fn indicial_roots(params: &XParams, endpoint: Endpoint) -> IndicialData {
    let e = match endpoint {
        Endpoint::Minus => int(-1),
        Endpoint::Plus => int(1),
    };
    let b = Polynomial::linear(
        -(params.alpha() + params.beta() + int(2)),
        params.beta() - params.alpha(),
    );
    let a_prime = int(-2) * e.clone();
    let p0 = b.eval(&e) / a_prime;
    let weight_exponent = match endpoint {
        Endpoint::Minus => params.beta().clone(),
        Endpoint::Plus => params.alpha().clone(),
    };
    IndicialData {
        endpoint,
        roots: (int(0), int(1) - p0),
        weight_exponent,
    }
}

/// `|(1-x)^r|^2 (1-x)^w` is integrable near the endpoint iff `2r + w > -1`.
pub fn sq_integrable_exponent(r: &Rational, weight_exponent: &Rational) -> bool {
    int(2) * r + weight_exponent > int(-1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EndpointClass {
    LimitPoint,
    LimitCircle,
}

impl fmt::Display for EndpointClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EndpointClass::LimitPoint => "LP",
            EndpointClass::LimitCircle => "LC",
        })
    }
}

/// Limit-circle iff both local solutions are square integrable.
pub fn classify_endpoint(params: &XParams, endpoint: Endpoint) -> EndpointClass {
    let d = indicial_roots(params, endpoint);
    let w = &d.weight_exponent;
    if sq_integrable_exponent(&d.roots.0, w) && sq_integrable_exponent(&d.roots.1, w) {
        EndpointClass::LimitCircle
    } else {
        EndpointClass::LimitPoint
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DeficiencyIndex {
    pub n_plus: u32,
    pub n_minus: u32,
}

impl fmt::Display for DeficiencyIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n_plus, self.n_minus)
    }
}

/// Counts limit-circle endpoints.
pub fn deficiency_index(params: &XParams) -> DeficiencyIndex {
    let k = Endpoint::both()
        .into_iter()
        .filter(|&e| classify_endpoint(params, e) == EndpointClass::LimitCircle)
        .count() as u32;
    DeficiencyIndex { n_plus: k, n_minus: k }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseId {
    BothLimitPoint,
    LimitCircleMinus,
    LimitCirclePlus,
    LimitCircleBoth,
}

/// Row of the boundary-condition table with the functionals that must vanish.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundaryCase {
    pub id: CaseId,
    pub functionals: Vec<Endpoint>,
}

impl BoundaryCase {
    pub fn describe(&self) -> String {
        if self.functionals.is_empty() {
            return "domain = maximal domain (no boundary conditions)".into();
        }
        self.functionals
            .iter()
            .map(|e| match e {
                Endpoint::Minus => "lim_{x->-1+} (1+x)^{beta+1} f'(x) = 0",
                Endpoint::Plus => "lim_{x->1-} (1-x)^{alpha+1} f'(x) = 0",
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// A boundary functional is imposed exactly at each limit-circle endpoint.
pub fn boundary_case(params: &XParams) -> BoundaryCase {
    let lc = |e| classify_endpoint(params, e) == EndpointClass::LimitCircle;
    let (minus, plus) = (lc(Endpoint::Minus), lc(Endpoint::Plus));
    let id = match (minus, plus) {
        (false, false) => CaseId::BothLimitPoint,
        (true, false) => CaseId::LimitCircleMinus,
        (false, true) => CaseId::LimitCirclePlus,
        (true, true) => CaseId::LimitCircleBoth,
    };
    let functionals = Endpoint::both().into_iter().filter(|&e| lc(e)).collect();
    BoundaryCase { id, functionals }
}

/// Outcome of the degree-gap search.
#[derive(Debug, Clone)]
pub struct GapCertificate {
    pub degree: usize,
    /// Dimension of the invariant subspace inside degree `<= degree`.
    pub f_dimension: usize,
    /// `true` iff no polynomial eigenfunction of degree `<= degree` exists.
    pub certified: bool,
    pub witness: Option<(Rational, RatPoly)>,
}

/// `mu_j = -(j-m)(1+alpha+beta+j-m)`, the coefficient of `x^j` in `T[x^j]`.
///
/// Since `T` does not raise degree, an eigenpair with `deg y = j` must have
/// eigenvalue `mu_j`, so sweeping `j` covers every possible eigenvalue.
pub fn leading_eigenvalue(params: &XParams, j: usize) -> Rational {
    let k = int(j as i64) - int(params.m() as i64);
    -(k.clone() * (int(1) + params.alpha() + params.beta() + k))
}

/// Exact search for `y != 0` with `deg y <= d`, `y` in the invariant
/// subspace and `T[y] = lambda y`.
pub fn gap_certificate(fam: &ExceptionalFamily, d: usize) -> GapCertificate {
    let basis = f_space_basis(fam, d);
    let f_dimension = basis.len();
    let images: Vec<RatPoly> = basis
        .iter()
        .map(|b| apply_t_polynomial(fam, b).expect("basis lies in the invariant subspace"))
        .collect();
    let mut lambdas: Vec<Rational> = (0..=d).map(|j| leading_eigenvalue(fam.params(), j)).collect();
    lambdas.sort();
    lambdas.dedup();
    for lambda in lambdas {
        if basis.is_empty() {
            break;
        }
        let columns: Vec<Vec<Rational>> = basis
            .iter()
            .zip(&images)
            .map(|(b, tb)| {
                let diff = tb - &b.scale(&lambda);
                (0..=d).map(|i| diff.coeff(i)).collect()
            })
            .collect();
        let ns = RatMatrix::from_columns(d + 1, &columns).nullspace();
        if let Some(v) = ns.first() {
            let y = basis
                .iter()
                .zip(v)
                .fold(RatPoly::zero(), |acc, (b, c)| &acc + &b.scale(c));
            return GapCertificate {
                degree: d,
                f_dimension,
                certified: false,
                witness: Some((lambda, y)),
            };
        }
    }
    GapCertificate {
        degree: d,
        f_dimension,
        certified: true,
        witness: None,
    }
}

/// Numerical integrability trend near an endpoint.
#[derive(Debug, Clone, Serialize)]
pub struct TailTrend {
    pub endpoint: Endpoint,
    #[serde(serialize_with = "ser_rational")]
    pub exponent: Rational,
    /// Integrals of `|(1 -/+ x)^r|^2 W` over dyadic shells `t in [2^-(k+1), 2^-k]`.
    pub shells: Vec<f64>,
    /// Fitted decay rate `s` in `shell_k ~ 2^{-k s}`.
    pub decay_rate: f64,
    pub numeric_integrable: bool,
    pub analytic_integrable: bool,
}

impl TailTrend {
    pub fn agrees(&self) -> bool {
        self.numeric_integrable == self.analytic_integrable
    }
}

/// Integrates `(dist)^{2r} W` over dyadic shells of the distance `t` to the
/// endpoint with `t` from `2^-4` down to `2^-20` (about `1e-1` to `1e-6`), then
/// fits the log-slope. A shell sum converges iff the shells shrink
/// geometrically, i.e. the fitted rate is positive.
pub fn tail_trend(fam: &ExceptionalFamily, endpoint: Endpoint, r: &Rational) -> TailTrend {
    let p = fam.params();
    let rf = Scalar::to_f64(r);
    let (w_exp, other_exp) = match endpoint {
        Endpoint::Plus => (p.alpha_f64(), p.beta_f64()),
        Endpoint::Minus => (p.beta_f64(), p.alpha_f64()),
    };
    let rule = gauss_jacobi_rule(0.0f64, 0.0, 24).expect("legendre rule");
    let denom = fam.denominator_f64();
    let e = endpoint.value();
    let shells: Vec<f64> = (4..20)
        .map(|k| {
            let hi = 2f64.powi(-k);
            let lo = hi / 2.0;
            let half = (hi - lo) / 2.0;
            rule.integrate(|u| {
                let t = lo + half * (u + 1.0);
                let x = e * (1.0 - t);
                let d = denom.eval_f64(x);
                half * t.powf(2.0 * rf + w_exp) * (2.0 - t).powf(other_exp) / (d * d)
            })
        })
        .collect();
    let ks: Vec<f64> = (4..20).map(|k| k as f64).collect();
    let logs: Vec<f64> = shells.iter().map(|s| s.log2()).collect();
    let n = ks.len() as f64;
    let (mk, ml) = (ks.iter().sum::<f64>() / n, logs.iter().sum::<f64>() / n);
    let cov: f64 = ks.iter().zip(&logs).map(|(k, l)| (k - mk) * (l - ml)).sum();
    let var: f64 = ks.iter().map(|k| (k - mk) * (k - mk)).sum();
    let decay_rate = -cov / var;
    let weight_exponent = match endpoint {
        Endpoint::Plus => p.alpha().clone(),
        Endpoint::Minus => p.beta().clone(),
    };
    TailTrend {
        endpoint,
        exponent: r.clone(),
        shells,
        decay_rate,
        numeric_integrable: decay_rate > 0.05,
        analytic_integrable: sq_integrable_exponent(r, &weight_exponent),
    }
}

/// Exact `lim_{x->1-} [h, 1](x)` for `h = (1-x)^{-alpha}`:
/// `alpha 2^{beta+1} / denom(1)^2`, returned as `(alpha / denom(1)^2, beta + 1)`
/// so the power of two can be applied in floating point.
pub fn h_bracket_at_one(fam: &ExceptionalFamily) -> (Rational, Rational) {
    let d1 = fam.denominator_at_one();
    assert!(!d1.is_zero(), "denominator vanishes at 1");
    (
        fam.params().alpha().clone() / (d1.clone() * d1),
        fam.params().beta().clone() + int(1),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::ratio;
    use crate::xjacobi::validate_params;

    fn params(a: Rational, b: Rational, m: u32) -> XParams {
        validate_params(a, b, m).unwrap()
    }

    #[test]
    fn indicial_examples() {
        let p = params(int(2), int(1), 1);
        assert_eq!(indicial_roots(&p, Endpoint::Plus).roots, (int(0), int(-2)));
        assert_eq!(indicial_roots(&p, Endpoint::Minus).roots, (int(0), int(-1)));
        let p = XParams::new_unchecked(int(0), ratio(1, 2), 1);
        assert!(indicial_roots(&p, Endpoint::Plus).is_double());
    }

    #[test]
    fn integrability_criterion() {
        for a in [ratio(-1, 2), ratio(1, 2), ratio(9, 10)] {
            assert!(sq_integrable_exponent(&-a.clone(), &a));
        }
        assert!(!sq_integrable_exponent(&int(-1), &int(1)));
        assert!(!sq_integrable_exponent(&int(-2), &int(2)));
        assert!(sq_integrable_exponent(&int(0), &ratio(-9, 10)));
    }

    #[test]
    fn classification_examples() {
        let lp = EndpointClass::LimitPoint;
        let lc = EndpointClass::LimitCircle;
        assert_eq!(classify_endpoint(&params(int(2), ratio(3, 2), 1), Endpoint::Minus), lp);
        assert_eq!(classify_endpoint(&params(ratio(1, 2), ratio(3, 2), 1), Endpoint::Plus), lc);
        let p = XParams::new_unchecked(int(1), int(1), 1);
        assert_eq!(classify_endpoint(&p, Endpoint::Plus), lp);
        assert_eq!(classify_endpoint(&p, Endpoint::Minus), lp);
    }

    #[test]
    fn deficiency_and_cases() {
        let p = params(int(2), ratio(3, 2), 1);
        assert_eq!(deficiency_index(&p), DeficiencyIndex { n_plus: 0, n_minus: 0 });
        assert!(boundary_case(&p).functionals.is_empty());
        let p = params(ratio(3, 2), ratio(1, 2), 1);
        assert_eq!(deficiency_index(&p).n_plus, 1);
        assert_eq!(boundary_case(&p).functionals, vec![Endpoint::Minus]);
        let p = params(ratio(-1, 2), ratio(-1, 4), 1);
        assert_eq!(deficiency_index(&p).n_plus, 2);
        assert_eq!(boundary_case(&p).id, CaseId::LimitCircleBoth);
    }

    #[test]
    fn gap_examples() {
        let f = ExceptionalFamily::from_params(int(2), int(1), 1).unwrap();
        assert!(gap_certificate(&f, 0).certified);
        let cert = gap_certificate(&f, 1);
        assert!(!cert.certified);
        let (lam, y) = cert.witness.unwrap();
        assert_eq!(lam, int(0));
        let member = f.exceptional_poly(1).unwrap();
        // witness is a multiple of the first family member
        let factor = member.coeff(1) / y.coeff(1);
        assert_eq!(y.scale(&factor), member);

        let f = ExceptionalFamily::from_params(ratio(7, 2), ratio(1, 2), 2).unwrap();
        assert!(gap_certificate(&f, 0).certified);
        assert!(gap_certificate(&f, 1).certified);
        assert!(!gap_certificate(&f, 2).certified);
    }

    #[test]
    fn tail_trends() {
        let f = ExceptionalFamily::from_params(ratio(1, 2), ratio(3, 2), 1).unwrap();
        let t = tail_trend(&f, Endpoint::Plus, &ratio(-1, 2));
        assert!(t.numeric_integrable && t.agrees());
        assert!((t.decay_rate - 0.5).abs() < 0.02, "{}", t.decay_rate);
        let t = tail_trend(&f, Endpoint::Minus, &ratio(-3, 2));
        assert!(!t.numeric_integrable && t.agrees());
    }
}
