//! Exact and floating dense polynomial arithmetic.

mod poly;
pub mod roots;
mod scalar;

pub use poly::{FloatPoly, Polynomial, RatPoly};
pub use scalar::{
    format_rational, int, parse_rational, ratio, Rational, Scalar, FLOAT_ABS_TOL, FLOAT_REL_TOL,
};

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn small_poly() -> impl Strategy<Value = RatPoly> {
        prop::collection::vec((-9i64..=9, 1i64..=4), 0..6)
            .prop_map(|cs| Polynomial::new(cs.into_iter().map(|(n, d)| ratio(n, d)).collect()))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn divrem_round_trip(a in small_poly(), b in small_poly()) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.div_rem(&b).unwrap();
            prop_assert!(r.signed_degree() < b.signed_degree());
            prop_assert_eq!(&(&q * &b) + &r, a);
        }

        #[test]
        fn eval_is_homomorphism(a in small_poly(), b in small_poly(), n in -7i64..7, d in 1i64..5) {
            let x = ratio(n, d);
            prop_assert_eq!((&a * &b).eval(&x), a.eval(&x) * b.eval(&x));
            prop_assert_eq!((&a + &b).eval(&x), a.eval(&x) + b.eval(&x));
        }

        #[test]
        fn derivative_drops_degree(a in small_poly()) {
            if let Some(d) = a.degree() {
                if d >= 1 {
                    prop_assert_eq!(a.derivative().degree(), Some(d - 1));
                }
            }
        }
    }
}
