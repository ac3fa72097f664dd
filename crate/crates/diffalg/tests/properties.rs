//! Randomized algebraic invariants: ring laws, division round trips,
//! derivation rules, series/operator compatibility, and parse ∘ print
//! identity.

use num::traits::Zero;
use proptest::prelude::*;

use diffalg::exact::{rat, ratio, BigRat, UniPoly};
use diffalg::linode::DiffOperator;
use diffalg::mpoly::{MultiPoly, Var};
use diffalg::parse::{parse_operator, parse_polynomial};
use diffalg::series::TruncSeries;
use diffalg::vfield::{builtin, make_derivation};

fn unipoly() -> impl Strategy<Value = UniPoly> {
    prop::collection::vec((-20i64..=20, 1i64..=6), 0..6)
        .prop_map(|cs| UniPoly::from_coeffs(cs.into_iter().map(|(n, d)| ratio(n, d)).collect()))
}

fn mpoly(nvars: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec(
        (
            -9i64..=9,
            prop::collection::vec(0u32..=3, nvars + 1),
        ),
        1..6,
    )
    .prop_map(move |terms| {
        let mut p = MultiPoly::zero(nvars);
        for (c, exps) in terms {
            let mut m = MultiPoly::constant(nvars, rat(c));
            m = &m * &MultiPoly::var(nvars, Var::Z).unwrap().pow(exps[0]);
            for (j, &e) in exps[1..].iter().enumerate() {
                m = &m * &MultiPoly::var(nvars, Var::Y(j + 1)).unwrap().pow(e);
            }
            p = &p + &m;
        }
        p
    })
}

fn series(order: usize) -> impl Strategy<Value = TruncSeries> {
    prop::collection::vec((-20i64..=20, 1i64..=6), order + 1..=order + 1)
        .prop_map(|cs| TruncSeries::from_coeffs(cs.into_iter().map(|(n, d)| ratio(n, d)).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unipoly_divmod_round_trip(a in unipoly(), b in unipoly()) {
        prop_assume!(!b.is_zero());
        let (q, r) = a.divmod(&b).unwrap();
        prop_assert_eq!(&(&q * &b) + &r, a);
        prop_assert!(r.degree_i64() < b.degree_i64() || r.is_zero());
    }

    #[test]
    fn unipoly_gcd_divides_both(a in unipoly(), b in unipoly()) {
        prop_assume!(!a.is_zero() || !b.is_zero());
        let g = a.gcd(&b).unwrap();
        prop_assert!(a.exact_div(&g).unwrap().is_some());
        prop_assert!(b.exact_div(&g).unwrap().is_some());
    }

    #[test]
    fn unipoly_derivative_is_leibniz(a in unipoly(), b in unipoly()) {
        let lhs = (&a * &b).derivative();
        let rhs = &(&a.derivative() * &b) + &(&a * &b.derivative());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn mpoly_ring_laws(a in mpoly(2), b in mpoly(2), c in mpoly(2)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a - &a, MultiPoly::zero(2));
    }

    #[test]
    fn mpoly_exact_divide_inverts_product(a in mpoly(2), b in mpoly(2)) {
        prop_assume!(!b.is_zero());
        let ab = &a * &b;
        let q = ab.exact_divide(&b).unwrap();
        prop_assert_eq!(q, Some(a));
    }

    #[test]
    fn derivation_is_linear_and_leibniz(a in mpoly(2), b in mpoly(2)) {
        let d = make_derivation(builtin::airy2());
        let sum = d.apply(&(&a + &b)).unwrap();
        prop_assert_eq!(&sum, &(&d.apply(&a).unwrap() + &d.apply(&b).unwrap()));
        let prod = d.apply(&(&a * &b)).unwrap();
        let leibniz = &(&d.apply(&a).unwrap() * &b) + &(&a * &d.apply(&b).unwrap());
        prop_assert_eq!(prod, leibniz);
    }

    #[test]
    fn series_arithmetic_is_commutative_ring(a in series(10), b in series(10)) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert!(a.sub(&a).is_zero_through(10));
    }

    #[test]
    fn series_derivative_antiderivative_round_trip(a in series(10)) {
        let back = a.derivative().antiderivative(a.coeff(0));
        prop_assert!(back.sub(&a.truncate(back.order())).is_zero_through(back.order()));
    }

    #[test]
    fn series_mul_leibniz(a in series(10), b in series(10)) {
        let lhs = a.mul(&b).derivative();
        let rhs = a.derivative().mul(&b).add(&a.mul(&b.derivative()));
        prop_assert!(lhs.sub(&rhs).is_zero_through(lhs.order().min(rhs.order())));
    }

    #[test]
    fn mpoly_parse_print_identity(p in mpoly(3)) {
        prop_assume!(!p.is_zero());
        let text = p.to_string();
        let q = parse_polynomial(&text, Some(3)).unwrap();
        prop_assert_eq!(p, q);
    }

    #[test]
    fn operator_parse_print_identity(coeffs in prop::collection::vec(unipoly(), 1..5)) {
        prop_assume!(coeffs.iter().any(|c| !c.is_zero()));
        let op = DiffOperator::new(coeffs).unwrap();
        let text = op.to_string();
        prop_assert_eq!(parse_operator(&text).unwrap(), op);
    }

    #[test]
    fn adjoint_is_an_involution(coeffs in prop::collection::vec(unipoly(), 1..5)) {
        prop_assume!(coeffs.iter().any(|c| !c.is_zero()));
        let op = DiffOperator::new(coeffs).unwrap();
        prop_assert_eq!(op.adjoint().adjoint(), op);
    }

    #[test]
    fn operator_application_is_linear(
        coeffs in prop::collection::vec(unipoly(), 1..4),
        p in unipoly(),
        q in unipoly(),
    ) {
        prop_assume!(coeffs.iter().any(|c| !c.is_zero()));
        let op = DiffOperator::new(coeffs).unwrap();
        let lhs = op.apply_poly(&(&p + &q));
        let rhs = &op.apply_poly(&p) + &op.apply_poly(&q);
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn corpus_parse_print_identity() {
    // hand-picked corpus covering signs, rationals, and all variables
    for text in [
        "y2^2 - z*y1^2 + y3",
        "y2^2 - z*y1^2 - y1^4 + y3",
        "3/2*z^2 - z + 1",
        "-y1",
        "z^6*y1^6 + 1/7*y2 - 42",
    ] {
        let p = parse_polynomial(text, None).unwrap();
        assert_eq!(parse_polynomial(&p.to_string(), Some(p.nvars())).unwrap(), p);
    }
    for text in ["D^2 - z", "z*D + 1", "D", "-D^3 + 1/2*z^2*D - 7"] {
        let op = parse_operator(text).unwrap();
        assert_eq!(parse_operator(&op.to_string()).unwrap(), op);
    }
}

#[test]
fn series_truncation_is_exact_no_rounding() {
    // π-free sanity: coefficients stay rational under long pipelines
    let (u1, u2) = diffalg::series::airy_basis(100);
    let w = u1.mul(&u2.derivative()).sub(&u1.derivative().mul(&u2));
    assert_eq!(w.coeff(0), BigRat::from_integer(1.into()));
    for k in 1..=w.order() {
        assert!(w.coeff(k).is_zero(), "Wronskian drift at order {}", k);
    }
}
