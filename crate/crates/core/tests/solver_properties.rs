use compacton_core::compacton::support_halfwidth;
use compacton_core::solver::{run_simulation, spatial_rhs, MidpointStepper, Snapshot, SolverConfig};
use compacton_core::stencil::{spatial_rhs_values, SpatialOperator};
use compacton_core::{
    discrete_mass, discrete_momentum, eval_compacton, sample_compacton, CompactonParams, Exec, GridField,
};
use proptest::prelude::*;
use std::f64::consts::PI;

fn compacton(n: f64, c: f64, length: f64, dx: f64, center: f64) -> Snapshot {
    let p = CompactonParams::new(n, c).unwrap();
    Snapshot::new(0.0, sample_compacton(&p, length, dx, center).unwrap(), n)
}

fn shape_error(s: &Snapshot, n: f64, center: f64) -> f64 {
    let p = CompactonParams::new(n, 1.0).unwrap();
    let f = &s.field;
    (0..f.len())
        .map(|j| (f.values()[j] - eval_compacton(&p, f.x(j) - center)).abs())
        .fold(0.0, f64::max)
        / p.amplitude()
}

#[test]
fn sampled_compacton_integrals() {
    let s = compacton(2.0, 1.0, 100.0, 0.2, 50.0);
    assert!((discrete_mass(&s.field) / (8.0 * PI / 3.0) - 1.0).abs() < 1e-3);
    assert!((discrete_momentum(&s.field, 2.0) / (80.0 * PI / 27.0) - 1.0).abs() < 1e-3);
    assert_eq!(discrete_mass(&GridField::zeros(100.0, 0.2).unwrap()), 0.0);
}

#[test]
fn traveling_wave_identity() {
    // With no frame motion the exact compacton satisfies u_t = -c u_x.
    let s = compacton(2.0, 1.0, 100.0, 0.2, 50.0);
    let cfg = SolverConfig::new(2.0, 0.0, 0.1);
    let f = spatial_rhs(&s.field, &cfg).unwrap();
    let u = s.field.values();
    let hw = support_halfwidth(2.0);
    for j in 2..u.len() - 2 {
        let x = s.field.x(j);
        if (x - 50.0).abs() < hw - 1.0 {
            let ux = (u[j + 1] - u[j - 1]) / 0.4;
            assert!((f.values()[j] + ux).abs() < 0.02, "x = {x}");
        }
    }
}

#[test]
fn mass_conserved_over_ten_thousand_steps() {
    let s = compacton(1.5, 1.0, 60.0, 0.2, 30.0);
    let cfg = SolverConfig::new(1.5, 1.0, 0.1)
        .with_beta0(0.002)
        .with_exec(Exec::Sequential);
    let run = run_simulation(&cfg, &s, 1000.0, 500.0).unwrap();
    assert_eq!(run.newton.steps, 10_000);
    assert!(run.report.max_mass_drift <= 1e-9, "{:e}", run.report.max_mass_drift);
}

#[test]
fn unperturbed_momentum_and_position() {
    let s = compacton(2.0, 1.0, 100.0, 0.2, 50.0);
    let run = run_simulation(&SolverConfig::new(2.0, 1.0, 0.1), &s, 100.0, 10.0).unwrap();
    assert!(run.report.max_momentum_drift <= 0.01);
    for snap in &run.snapshots {
        assert!((snap.diagnostics.peak_x - 50.0).abs() <= 0.2);
    }
    assert!(shape_error(run.snapshots.last().unwrap(), 2.0, 50.0) <= 0.05);
}

#[test]
fn spatial_convergence() {
    let mut errs = Vec::new();
    for dx in [0.2, 0.1] {
        let s = compacton(2.0, 1.0, 60.0, dx, 30.0);
        let run = run_simulation(&SolverConfig::new(2.0, 1.0, 0.1), &s, 10.0, 10.0).unwrap();
        errs.push(shape_error(run.snapshots.last().unwrap(), 2.0, 30.0));
    }
    assert!(errs[0] / errs[1] >= 3.0, "{errs:?}");
}

#[test]
fn fourth_order_damping_reduces_amplitude() {
    let s = compacton(2.0, 1.0, 120.0, 0.2, 90.0);
    let cfg = SolverConfig::new(2.0, 1.0, 0.1).with_beta0(0.001);
    let run = run_simulation(&cfg, &s, 100.0, 10.0).unwrap();
    let amps: Vec<f64> = run
        .snapshots
        .iter()
        .skip(1)
        .map(|s| s.field.peak().unwrap().value)
        .collect();
    assert!(amps.windows(2).all(|w| w[1] < w[0]), "{amps:?}");
}

#[test]
fn mass_decay_per_unit_time() {
    let eps = 0.001;
    let s = compacton(2.0, 1.0, 60.0, 0.2, 30.0);
    let run = run_simulation(&SolverConfig::new(2.0, 1.0, 0.1).with_eps0(eps), &s, 200.0, 20.0).unwrap();
    let m0 = s.diagnostics.mass;
    for snap in &run.snapshots {
        let law = m0 * (-eps * snap.t).exp();
        assert!(((snap.diagnostics.mass - law) / law).abs() <= 1e-6 * snap.t.max(1.0));
    }
}

#[test]
fn execution_policies_agree() {
    let s = compacton(2.5, 1.0, 240.0, 0.2, 120.0);
    let base = SolverConfig::new(2.5, 1.0, 0.1).with_beta0(0.005);
    let a = run_simulation(&base.with_exec(Exec::Sequential), &s, 5.0, 5.0).unwrap();
    let b = run_simulation(&base.with_exec(Exec::Parallel), &s, 5.0, 5.0).unwrap();
    assert_eq!(a.snapshots.last().unwrap().field, b.snapshots.last().unwrap().field);
}

#[test]
fn blow_up_is_detected() {
    let s = compacton(2.0, 1.0, 40.0, 0.2, 20.0);
    let cfg = SolverConfig {
        blowup_factor: 1.0 + 1e-9,
        ..SolverConfig::new(2.0, 0.0, 0.1).with_beta0(-0.05)
    };
    let err = run_simulation(&cfg, &s, 50.0, 50.0).unwrap_err();
    assert!(matches!(err, compacton_core::Error::BlowUp { .. }), "{err}");
}

#[test]
fn newton_failure_is_reported() {
    let s = compacton(2.0, 1.0, 40.0, 0.2, 20.0);
    let cfg = SolverConfig {
        newton_max_iter: 1,
        ..SolverConfig::new(2.0, 1.0, 0.1)
    };
    let err = run_simulation(&cfg, &s, 1.0, 1.0).unwrap_err();
    assert!(
        matches!(err, compacton_core::Error::NewtonFailed { step: 1, .. }),
        "{err}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rhs_sums_to_damping(values in prop::collection::vec(-2.0f64..2.0, 32), n in 1.1f64..3.0,
                           c0 in -2.0f64..2.0, alpha0 in 0.0f64..0.1, beta0 in 0.0f64..0.1, eps0 in 0.0f64..0.1) {
        let op = SpatialOperator { n, c0, alpha0, beta0, eps0 };
        let f = spatial_rhs_values(&values, 0.2, &op, Exec::Sequential);
        let scale: f64 = f.iter().map(|v| v.abs()).sum::<f64>() + 1.0;
        let expect = -eps0 * values.iter().sum::<f64>();
        prop_assert!((f.iter().sum::<f64>() - expect).abs() <= 1e-12 * scale);
    }

    #[test]
    fn one_step_keeps_mass(shift in 0.0f64..0.2, n in 1.2f64..2.9, beta0 in 0.0f64..0.01) {
        let s = compacton(n, 1.0, 60.0, 0.2, 30.0 + shift);
        let mut st = MidpointStepper::new(SolverConfig::new(n, 1.0, 0.1).with_beta0(beta0)).unwrap();
        let out = st.step(&s).unwrap();
        let tol = 1e-12 * s.field.max_abs().max(1.0) * s.field.len() as f64;
        prop_assert!((out.diagnostics.mass - s.diagnostics.mass).abs() <= tol);
    }
}
