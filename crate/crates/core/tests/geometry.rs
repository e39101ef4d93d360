use kenmotsu_core::connection::covariant_derivative;
use kenmotsu_core::fixtures::{abelian5_spec, kenmotsu5, kenmotsu5_spec, kenmotsu_spec};
use kenmotsu_core::linalg;
use kenmotsu_core::soliton::{
    divergence, lie_derivative_metric, lie_derivative_metric_brackets, soliton_residual,
    torse_forming_classify, xi_trace_lambda, Mode, SolitonParams, TorseSubtype,
};
use kenmotsu_core::tensor::OneForm;
use kenmotsu_core::verify::{all_pass, mutations};
use kenmotsu_core::{
    build_manifold, build_manifold_relaxed, CoeffExpr, FrameVectorField, Geometry,
};
use num_bigint::BigInt;
use proptest::prelude::*;

fn e(s: &str) -> CoeffExpr {
    CoeffExpr::parse(s).unwrap()
}

#[test]
fn every_check_passes_on_the_example() {
    let g = Geometry::new(kenmotsu5()).unwrap();
    let checks = g.all_checks().unwrap();
    let failing: Vec<_> = checks.iter().filter(|c| !c.passed()).collect();
    assert!(failing.is_empty(), "{failing:?}");
    assert!(checks.len() >= 25);
}

#[test]
fn warped_frames_are_kenmotsu_in_several_dimensions() {
    for n in 1..=3 {
        let g = Geometry::new(build_manifold(kenmotsu_spec(n)).unwrap()).unwrap();
        assert!(all_pass(&g.all_checks().unwrap()), "n = {n}");
        let d = (2 * n + 1) as i64;
        assert_eq!(g.scalar, CoeffExpr::integer(-2 * n as i64 * d));
        let nn = (n * n) as i64;
        assert_eq!(g.star_scalar, CoeffExpr::integer(-2 * n as i64 * d + 4 * nn));
        let t = torse_forming_classify(&g.manifold, &g.connection, g.manifold.xi())
            .unwrap()
            .unwrap();
        assert!(t.psi.is_one());
        let minus_eta: Vec<CoeffExpr> = OneForm::eta(&g.manifold)
            .values()
            .iter()
            .map(|v| -v)
            .collect();
        assert_eq!(t.omega, OneForm::new(minus_eta));
        assert_eq!(t.subtype, TorseSubtype::Generic);
    }
}

#[test]
fn every_mutation_is_caught() {
    let spec = kenmotsu5_spec();
    let m = kenmotsu5();
    let muts = mutations(&spec, &m);
    assert_eq!(muts.len(), 10);
    for mu in muts {
        let caught = match build_manifold_relaxed(mu.spec) {
            Err(_) => true,
            Ok(mm) => {
                let g = Geometry::new(mm).unwrap();
                !all_pass(&g.all_checks().unwrap())
            }
        };
        assert!(caught, "{} went unnoticed", mu.name);
    }
}

#[test]
fn abelian_frame_fails_only_contact_dynamics() {
    let g = Geometry::new(build_manifold(abelian5_spec()).unwrap()).unwrap();
    assert!(all_pass(&g.almost_contact));
    assert!(!g.is_kenmotsu());
    assert!(g.riemann.nonzero().next().is_none());
    assert!(g.star_ricci_closed_form().is_err());
    assert!(xi_trace_lambda(&g, &e("beta")).is_err());
}

#[test]
fn scaled_metric_keeps_connection_consistent() {
    let mut spec = kenmotsu5_spec();
    let mut metric = linalg::identity(5);
    metric[0][0] = num_rational::BigRational::from_integer(BigInt::from(3));
    spec.metric = Some(metric);
    let g = Geometry::new(build_manifold(spec).unwrap()).unwrap();
    let checks = g.all_checks().unwrap();
    for name in [
        "connection.torsion_free",
        "connection.metric_compatible",
        "riemann.antisymmetry",
        "riemann.first_bianchi",
        "riemann.pair_symmetry",
        "ricci.symmetric",
    ] {
        let c = checks.iter().find(|c| c.name == name).unwrap();
        assert!(c.passed(), "{name}");
    }
}

#[test]
fn non_constant_k_is_rejected_in_trace_modes() {
    let g = Geometry::new(kenmotsu5()).unwrap();
    let p = SolitonParams::new(e("1"), e("0"), e("x"));
    for mode in [Mode::Trace, Mode::XiTrace] {
        assert!(soliton_residual(&g, g.manifold.xi(), &p, mode).is_err());
    }
    let p = SolitonParams::new(e("x"), e("0"), e("1")).with_lambda(e("0"));
    assert!(soliton_residual(&g, g.manifold.xi(), &p, Mode::Exact).is_err());
    let p = SolitonParams::new(e("1"), e("0"), e("0")).with_lambda(e("0"));
    assert!(soliton_residual(&g, g.manifold.xi(), &p, Mode::Exact).is_err());
}

fn field_component() -> impl Strategy<Value = CoeffExpr> {
    let atoms = prop_oneof![
        Just("0"),
        Just("1"),
        Just("x"),
        Just("y*exp(v)"),
        Just("exp(-v)"),
        Just("x*z"),
        Just("v^2"),
        Just("u*exp(2*v)"),
    ];
    proptest::collection::vec((atoms, -3i64..=3), 1..3).prop_map(|parts| {
        parts
            .into_iter()
            .map(|(a, c)| e(a).scale(&num_rational::BigRational::from_integer(BigInt::from(c))))
            .sum()
    })
}

fn field() -> impl Strategy<Value = FrameVectorField> {
    proptest::collection::vec(field_component(), 5).prop_map(FrameVectorField::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lie_derivative_routes_agree(v in field()) {
        let m = kenmotsu5();
        let g = Geometry::new(m.clone()).unwrap();
        let a = lie_derivative_metric(&m, &g.connection, &v).unwrap();
        let b = lie_derivative_metric_brackets(&m, &v).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.is_symmetric());
        let half = num_rational::BigRational::new(BigInt::from(1), BigInt::from(2));
        prop_assert_eq!(divergence(&m, &g.connection, &v).unwrap(), a.trace(&m).scale(&half));
    }

    #[test]
    fn covariant_derivative_leibniz(x in field(), w in field(), f in field_component()) {
        let m = kenmotsu5();
        let g = Geometry::new(m.clone()).unwrap();
        let lhs = covariant_derivative(&m, &g.connection, &x, &w.scale(&f)).unwrap();
        let xf = m.directional_derivative(&x, &f).unwrap();
        let rhs = &w.scale(&xf)
            + &covariant_derivative(&m, &g.connection, &x, &w).unwrap().scale(&f);
        prop_assert_eq!(lhs, rhs);
        let fx = covariant_derivative(&m, &g.connection, &x.scale(&f), &w).unwrap();
        let fx2 = covariant_derivative(&m, &g.connection, &x, &w).unwrap().scale(&f);
        prop_assert_eq!(fx, fx2);
    }

    #[test]
    fn brackets_are_antisymmetric(x in field(), y in field()) {
        let m = kenmotsu5();
        let a = m.lie_bracket(&x, &y).unwrap();
        let b = m.lie_bracket(&y, &x).unwrap();
        prop_assert!((&a + &b).is_zero());
        let c = m.structure_bracket(&x, &y).unwrap();
        prop_assert_eq!(a, c);
    }

    #[test]
    fn coordinate_round_trip(x in field()) {
        let m = kenmotsu5();
        let c = m.to_coordinate_components(&x).unwrap();
        prop_assert_eq!(m.to_frame_components(&c).unwrap(), x);
    }
}
