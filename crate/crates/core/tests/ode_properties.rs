use compacton_core::checks::{LINEAR_SIGN_CONDITIONS, NONLINEAR_SIGN_CONDITIONS};
use compacton_core::ode::{solve_velocity_ode, OdeOptions};
use compacton_core::oracle::oracle_rhs;
use compacton_core::perturbation::{closed_form_rhs, is_dissipative, Dissipativity, Family, PerturbationSpec};
use proptest::prelude::*;

/// Root of the quartic factor of the sixth-order rate inside (2, 7/3).
const SIXTH_ORDER_SIGN_CHANGE: f64 = 2.161835419993318;

fn single(family: Family, idx: usize, value: f64) -> PerturbationSpec {
    let name = family.coefficient_names()[idx];
    PerturbationSpec::from_named(family, &[(name, value)]).unwrap()
}

#[test]
fn fourth_order_sign_near_three() {
    let spec = single(Family::Linear4, 0, 1.0);
    let closed = closed_form_rhs(2.9, &spec, 1.0).unwrap();
    let oracle = oracle_rhs(2.9, &spec, 1.0).unwrap().rate;
    assert!(closed < 0.0);
    assert!((closed - oracle).abs() <= 1e-8 * oracle.abs());
}

#[test]
fn sixth_order_terms_change_sign_below_seven_thirds() {
    for idx in 0..7 {
        let spec = single(Family::Linear6, idx, 1.0);
        for n in [SIXTH_ORDER_SIGN_CHANGE - 1e-3, 2.0, 1.5] {
            assert!(closed_form_rhs(n, &spec, 1.0).unwrap() < 0.0);
        }
        for n in [SIXTH_ORDER_SIGN_CHANGE + 1e-3, 2.25, 2.33] {
            assert!(closed_form_rhs(n, &spec, 1.0).unwrap() > 0.0, "gamma{idx} n={n}");
        }
        // The quadrature still resolves the integrand comfortably at 2.2.
        let oracle = oracle_rhs(2.2, &spec, 1.0).unwrap().rate;
        assert!(oracle > 0.0, "gamma{idx}");
    }
}

#[test]
fn dissipative_trajectories_decrease() {
    let cases = [
        (2.0, PerturbationSpec::Linear4([0.001, 0.002, 0.0, 0.001, 0.0])),
        (1.5, PerturbationSpec::Linear2([0.01, 0.01, 0.01])),
        (1.75, PerturbationSpec::Nonlinear2([-0.01, 0.01])),
        (2.0, PerturbationSpec::Nonlinear4([-0.01, 0.0, -0.01, 0.01, -0.01])),
        (2.0, PerturbationSpec::MassDamping { eps0: 0.003 }),
    ];
    for (n, spec) in cases {
        assert_eq!(is_dissipative(n, &spec).unwrap().overall, Dissipativity::Dissipative);
        let tr = solve_velocity_ode(n, &spec, 1.2, 500.0, &OdeOptions::default()).unwrap();
        assert!(tr.truncated.is_none());
        assert!(
            tr.samples
                .windows(2)
                .all(|w| w[1].c < w[0].c && w[1].c > 0.0 && w[1].t > w[0].t),
            "{spec:?}"
        );
    }
}

#[test]
fn sign_tables_cover_every_term() {
    for family in Family::PERTURBATIONS {
        if family == Family::MassDamping {
            continue;
        }
        for name in family.coefficient_names() {
            let listed = LINEAR_SIGN_CONDITIONS
                .iter()
                .chain(&NONLINEAR_SIGN_CONDITIONS)
                .any(|c| c.family == family && c.terms.contains(name));
            assert!(listed, "{family} {name}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn linear_terms_are_homogeneous(idx in 0usize..5, n in 1.05f64..2.95, c in 0.1f64..3.0, k in 1.1f64..3.0) {
        let spec = single(Family::Linear4, idx, 0.3);
        let a = closed_form_rhs(n, &spec, c).unwrap();
        let b = closed_form_rhs(n, &spec, k * c).unwrap();
        let expect = k.powi(idx as i32 + 1);
        prop_assert!((b / a - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn positive_linear_specs_decay(coefs in prop::array::uniform7(0.0f64..1.0), n in 1.02f64..2.98, c in 0.05f64..3.0) {
        prop_assume!(coefs.iter().any(|&v| v > 0.0));
        let l2 = PerturbationSpec::Linear2([coefs[0], coefs[1], coefs[2]]);
        let l4 = PerturbationSpec::Linear4([coefs[0], coefs[1], coefs[2], coefs[3], coefs[4]]);
        prop_assert!(closed_form_rhs(n, &l2, c).unwrap() < 0.0);
        prop_assert!(closed_form_rhs(n, &l4, c).unwrap() < 0.0);
        let n6 = 1.0 + (n - 1.0) * (SIXTH_ORDER_SIGN_CHANGE - 1.0) / 2.0;
        prop_assert!(closed_form_rhs(n6, &PerturbationSpec::Linear6(coefs), c).unwrap() < 0.0);
    }

    #[test]
    fn nonlinear_terms_scale_quadratically(d1 in -1.0f64..1.0, d2 in -1.0f64..1.0, n in 1.05f64..2.95, c in 0.1f64..3.0) {
        let spec = PerturbationSpec::Nonlinear2([d1, d2]);
        let a = closed_form_rhs(n, &spec, c).unwrap();
        let b = closed_form_rhs(n, &spec, 2.0 * c).unwrap();
        prop_assert!((b - 4.0 * a).abs() <= 1e-12 * a.abs().max(1e-300));
    }
}
