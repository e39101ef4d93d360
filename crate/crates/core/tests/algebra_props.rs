use kenmotsu_core::expr::{Monomial, Rational, Term};
use kenmotsu_core::CoeffExpr;
use num_bigint::BigInt;
use proptest::prelude::*;

const SYMBOLS: [&str; 3] = ["x", "y", "v"];

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)))
}

fn monomial() -> impl Strategy<Value = Monomial> {
    (
        proptest::collection::vec(0u32..=2, 3),
        proptest::collection::vec(-2i64..=2, 3),
        1i64..=2,
    )
        .prop_map(|(powers, weights, den)| {
            let powers: Vec<(String, u32)> = SYMBOLS
                .iter()
                .zip(powers)
                .map(|(s, p)| (s.to_string(), p))
                .collect();
            let weights: Vec<(String, Rational)> = SYMBOLS
                .iter()
                .zip(weights)
                .map(|(s, w)| (s.to_string(), Rational::new(BigInt::from(w), BigInt::from(den))))
                .collect();
            Monomial::new(powers, weights)
        })
}

fn terms() -> impl Strategy<Value = Vec<Term>> {
    proptest::collection::vec((rational(), monomial()), 0..5)
        .prop_map(|v| v.into_iter().map(|(c, m)| Term::new(c, m)).collect())
}

fn expr() -> impl Strategy<Value = CoeffExpr> {
    terms().prop_map(CoeffExpr::from_terms)
}

fn unit() -> impl Strategy<Value = CoeffExpr> {
    (rational(), proptest::collection::vec(-3i64..=3, 3)).prop_filter_map(
        "nonzero coefficient",
        |(c, w)| {
            if c == Rational::from_integer(BigInt::from(0)) {
                return None;
            }
            let weights: Vec<(String, Rational)> = SYMBOLS
                .iter()
                .zip(w)
                .map(|(s, q)| (s.to_string(), Rational::from_integer(BigInt::from(q))))
                .collect();
            Some(CoeffExpr::monomial(c, Monomial::new(Vec::<(String, u32)>::new(), weights)))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_axioms(a in expr(), b in expr(), c in expr()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a + &(-&a)).is_zero());
        prop_assert_eq!(&a + &CoeffExpr::zero(), a.clone());
        prop_assert_eq!(&a * &CoeffExpr::one(), a.clone());
        prop_assert!((&a * &CoeffExpr::zero()).is_zero());
    }

    #[test]
    fn leibniz(a in expr(), b in expr(), s in 0usize..3) {
        let s = SYMBOLS[s];
        let lhs = (&a * &b).partial(s);
        let rhs = &(&a.partial(s) * &b) + &(&a * &b.partial(s));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn partials_commute(a in expr(), s in 0usize..3, t in 0usize..3) {
        prop_assert_eq!(
            a.partial(SYMBOLS[s]).partial(SYMBOLS[t]),
            a.partial(SYMBOLS[t]).partial(SYMBOLS[s])
        );
    }

    #[test]
    fn canonical_form_is_order_independent(mut ts in terms()) {
        let a = CoeffExpr::from_terms(ts.clone());
        ts.reverse();
        let b = CoeffExpr::from_terms(ts);
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(CoeffExpr::from_terms(a.terms()), a.clone());
        prop_assert!((&a - &b).is_empty());
    }

    #[test]
    fn display_parse_round_trip(a in expr()) {
        let text = a.to_string();
        prop_assert_eq!(CoeffExpr::parse(&text).unwrap(), a);
    }

    #[test]
    fn unit_inverse(u in unit()) {
        prop_assert!((&u.invert_unit().unwrap() * &u).is_one());
    }

    #[test]
    fn exact_division_inverts_multiplication(a in expr(), b in expr()) {
        prop_assume!(!b.is_zero() && b.len() == 1);
        prop_assert_eq!((&a * &b).div_exact(&b).unwrap(), a);
    }
}
