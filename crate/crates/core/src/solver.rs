//! Implicit-midpoint method of lines for
//! `u_t − c₀u_x + (uⁿ)_x + (uⁿ)_xxx − α₀u_xx + β₀u_xxxx + ε₀u = 0`
//! on a periodic grid.
//!
//! Each step solves `V = U + Δt·F((U+V)/2)` by Newton's method. The Newton
//! matrix `I − (Δt/2)·∂F` has unit column sums when `ε₀ = 0`, so every Newton
//! update leaves `Σ V` equal to `Σ U` up to rounding, independently of how far
//! the iteration has converged.

use crate::banded::CyclicPentaLu;
use crate::compacton::validate_exponent;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::grid::{discrete_mass, discrete_momentum, GridField};
use crate::perturbation::Family;
use crate::stencil::{jacobian, spatial_rhs_into, SpatialOperator};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub n: f64,
    /// Speed of the moving frame.
    pub c0: f64,
    pub beta0: f64,
    pub eps0: f64,
    pub alpha0: f64,
    pub dt: f64,
    /// Max-norm residual target; `None` means `1e-12·max(1, max|U|)`.
    pub newton_tol: Option<f64>,
    pub newton_max_iter: usize,
    /// Abort when `max|u|` exceeds this multiple of the initial amplitude.
    pub blowup_factor: f64,
    pub exec: Exec,
}

impl SolverConfig {
    pub fn new(n: f64, c0: f64, dt: f64) -> Self {
        SolverConfig {
            n,
            c0,
            beta0: 0.0,
            eps0: 0.0,
            alpha0: 0.0,
            dt,
            newton_tol: None,
            newton_max_iter: 25,
            blowup_factor: 100.0,
            exec: Exec::default(),
        }
    }

    pub fn with_beta0(mut self, beta0: f64) -> Self {
        self.beta0 = beta0;
        self
    }

    pub fn with_eps0(mut self, eps0: f64) -> Self {
        self.eps0 = eps0;
        self
    }

    pub fn with_alpha0(mut self, alpha0: f64) -> Self {
        self.alpha0 = alpha0;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn operator(&self) -> SpatialOperator {
        SpatialOperator {
            n: self.n,
            c0: self.c0,
            alpha0: self.alpha0,
            beta0: self.beta0,
            eps0: self.eps0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_exponent(self.n, Family::Unperturbed).into_result(self.n)?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("time step must be positive, got {}", self.dt),
            });
        }
        for (name, v) in [
            ("c0", self.c0),
            ("beta0", self.beta0),
            ("eps0", self.eps0),
            ("alpha0", self.alpha0),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be finite".into(),
                });
            }
        }
        if let Some(tol) = self.newton_tol {
            if !(tol > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "newton_tol",
                    reason: format!("must be positive, got {tol}"),
                });
            }
        }
        if self.newton_max_iter == 0 {
            return Err(Error::InvalidParameter {
                name: "newton_max_iter",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// Domain length that keeps a trailing tail from wrapping round onto the
/// compacton before `t_end`, rounded up to a multiple of `dx`.
pub fn default_domain_length(c0: f64, t_end: f64, dx: f64) -> f64 {
    let l = f64::max(120.0, 1.3 * c0.abs() * t_end);
    (l / dx).ceil() * dx
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub mass: f64,
    pub momentum: f64,
    pub max_u: f64,
    /// Refined location of the maximum; `NaN` for a field with no positive values.
    pub peak_x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub field: GridField,
    pub diagnostics: Diagnostics,
}

impl Snapshot {
    pub fn new(t: f64, field: GridField, n: f64) -> Self {
        let diagnostics = Diagnostics {
            mass: discrete_mass(&field),
            momentum: discrete_momentum(&field, n),
            max_u: field.values().iter().copied().fold(f64::NEG_INFINITY, f64::max),
            peak_x: field.peak().map_or(f64::NAN, |p| p.x),
        };
        Snapshot { t, field, diagnostics }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NewtonStats {
    pub steps: usize,
    pub iterations: usize,
    pub max_iterations: usize,
    pub max_residual: f64,
}

/// Reusable Newton workspace for one grid size.
pub struct MidpointStepper {
    cfg: SolverConfig,
    op: SpatialOperator,
    mid: Vec<f64>,
    w: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    pub stats: NewtonStats,
}

impl MidpointStepper {
    pub fn new(cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(MidpointStepper {
            cfg,
            op: cfg.operator(),
            mid: Vec::new(),
            w: Vec::new(),
            f: Vec::new(),
            g: Vec::new(),
            stats: NewtonStats::default(),
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    /// Advance `u` by one step of size `dt` (which may be negative).
    pub fn step_values(&mut self, u: &[f64], dx: f64, dt: f64) -> Result<Vec<f64>> {
        let len = u.len();
        let exec = self.cfg.exec;
        let tol = self
            .cfg
            .newton_tol
            .unwrap_or_else(|| 1e-12 * u.iter().fold(1.0f64, |m, v| m.max(v.abs())));
        self.mid.resize(len, 0.0);
        self.f.resize(len, 0.0);
        self.g.resize(len, 0.0);
        let mut v = u.to_vec();
        let mut residual = f64::INFINITY;
        for it in 0..=self.cfg.newton_max_iter {
            for j in 0..len {
                self.mid[j] = 0.5 * (u[j] + v[j]);
            }
            spatial_rhs_into(&self.mid, dx, &self.op, exec, &mut self.w, &mut self.f);
            residual = 0.0;
            for j in 0..len {
                self.g[j] = v[j] - u[j] - dt * self.f[j];
                residual = residual.max(self.g[j].abs());
            }
            if !residual.is_finite() {
                return Err(Error::NonFinite("newton residual"));
            }
            if residual <= tol {
                self.stats.steps += 1;
                self.stats.iterations += it;
                self.stats.max_iterations = self.stats.max_iterations.max(it);
                self.stats.max_residual = self.stats.max_residual.max(residual);
                return Ok(v);
            }
            if it == self.cfg.newton_max_iter {
                break;
            }
            let jac = jacobian(&self.mid, dx, &self.op, 1.0, -0.5 * dt, exec);
            let lu = CyclicPentaLu::factor(&jac)?;
            lu.solve_in_place(&mut self.g);
            for j in 0..len {
                v[j] -= self.g[j];
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("newton iterate"));
            }
        }
        Err(Error::NewtonFailed {
            step: self.stats.steps,
            iterations: self.cfg.newton_max_iter,
            residual,
        })
    }

    pub fn step(&mut self, state: &Snapshot) -> Result<Snapshot> {
        let field = &state.field;
        if !field.is_finite() {
            return Err(Error::NonFinite("input field"));
        }
        let v = self.step_values(field.values(), field.dx(), self.cfg.dt)?;
        Ok(Snapshot::new(state.t + self.cfg.dt, field.with_values(v), self.cfg.n))
    }
}

/// Evaluate the semi-discrete right-hand side `F(U)`.
pub fn spatial_rhs(field: &GridField, cfg: &SolverConfig) -> Result<GridField> {
    if !field.is_finite() {
        return Err(Error::NonFinite("input field"));
    }
    let mut out = vec![0.0; field.len()];
    let mut w = Vec::new();
    spatial_rhs_into(field.values(), field.dx(), &cfg.operator(), cfg.exec, &mut w, &mut out);
    Ok(field.with_values(out))
}

/// One implicit-midpoint step.
pub fn step_implicit_midpoint(state: &Snapshot, cfg: &SolverConfig) -> Result<Snapshot> {
    MidpointStepper::new(*cfg)?.step(state)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationRow {
    pub t: f64,
    pub mass: f64,
    pub momentum: f64,
    pub max_u: f64,
    pub peak_x: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConservationReport {
    pub rows: Vec<ConservationRow>,
    /// `max |M(t) − M(0)| / |M(0)|` over every step, not only the samples.
    pub max_mass_drift: f64,
    pub max_momentum_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRun {
    pub snapshots: Vec<Snapshot>,
    pub report: ConservationReport,
    pub newton: NewtonStats,
}

fn step_count(span: f64, dt: f64, name: &'static str) -> Result<usize> {
    let k = (span / dt).round();
    if !(span > 0.0) || k < 1.0 || (k * dt - span).abs() > 1e-9 * span.max(1.0) {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("{span} must be a positive multiple of dt = {dt}"),
        });
    }
    Ok(k as usize)
}

/// March to `t_end`, calling `on_sample` at `t = 0`, every `sample_every` and
/// at `t_end`.
pub fn run_simulation_with<F>(
    cfg: &SolverConfig,
    initial: &Snapshot,
    t_end: f64,
    sample_every: f64,
    mut on_sample: F,
) -> Result<(ConservationReport, NewtonStats)>
where
    F: FnMut(&Snapshot) -> Result<()>,
{
    let mut stepper = MidpointStepper::new(*cfg)?;
    let steps = step_count(t_end, cfg.dt, "t_end")?;
    let stride = step_count(sample_every, cfg.dt, "sample_every")?;
    if !initial.field.is_finite() {
        return Err(Error::NonFinite("initial field"));
    }
    let n = cfg.n;
    let dx = initial.field.dx();
    let t0 = initial.t;
    let m0 = discrete_mass(&initial.field);
    let p0 = discrete_momentum(&initial.field, n);
    let limit = cfg.blowup_factor * initial.field.max_abs();

    let mut report = ConservationReport::default();
    let record = |s: &Snapshot, report: &mut ConservationReport| {
        report.rows.push(ConservationRow {
            t: s.t,
            mass: s.diagnostics.mass,
            momentum: s.diagnostics.momentum,
            max_u: s.diagnostics.max_u,
            peak_x: s.diagnostics.peak_x,
        });
    };
    record(initial, &mut report);
    on_sample(initial)?;

    let mut u = initial.field.values().to_vec();
    for k in 1..=steps {
        let t = t0 + k as f64 * cfg.dt;
        u = stepper.step_values(&u, dx, cfg.dt).map_err(|e| match e {
            Error::NewtonFailed {
                iterations, residual, ..
            } => Error::NewtonFailed {
                step: k,
                iterations,
                residual,
            },
            other => other,
        })?;
        let max_u = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if limit > 0.0 && max_u > limit {
            return Err(Error::BlowUp { t, max_u, limit });
        }
        let mass: f64 = u.iter().sum::<f64>() * dx;
        if m0 != 0.0 {
            report.max_mass_drift = report.max_mass_drift.max(((mass - m0) / m0).abs());
        }
        if k % stride == 0 || k == steps {
            let snap = Snapshot::new(t, initial.field.with_values(u.clone()), n);
            if p0 != 0.0 {
                report.max_momentum_drift = report
                    .max_momentum_drift
                    .max(((snap.diagnostics.momentum - p0) / p0).abs());
            }
            record(&snap, &mut report);
            on_sample(&snap)?;
        }
    }
    Ok((report, stepper.stats))
}

/// [`run_simulation_with`], keeping every sampled snapshot.
pub fn run_simulation(cfg: &SolverConfig, initial: &Snapshot, t_end: f64, sample_every: f64) -> Result<SimulationRun> {
    let mut snapshots = Vec::new();
    let (report, newton) = run_simulation_with(cfg, initial, t_end, sample_every, |s| {
        snapshots.push(s.clone());
        Ok(())
    })?;
    Ok(SimulationRun {
        snapshots,
        report,
        newton,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compacton::{sample_compacton, CompactonParams};

    fn compacton_snapshot(n: f64, c: f64, length: f64, dx: f64, center: f64) -> Snapshot {
        let p = CompactonParams::new(n, c).unwrap();
        Snapshot::new(0.0, sample_compacton(&p, length, dx, center).unwrap(), n)
    }

    #[test]
    fn zero_field_is_fixed() {
        let cfg = SolverConfig::new(2.0, 1.0, 0.1).with_beta0(0.001);
        let s = Snapshot::new(0.0, GridField::zeros(20.0, 0.2).unwrap(), 2.0);
        let out = step_implicit_midpoint(&s, &cfg).unwrap();
        assert!(out.field.values().iter().all(|&v| v == 0.0));
        assert_eq!(out.t, 0.1);
    }

    #[test]
    fn one_step_conserves_mass() {
        let cfg = SolverConfig::new(2.0, 1.0, 0.1).with_beta0(0.001);
        let s = compacton_snapshot(2.0, 1.0, 40.0, 0.2, 20.0);
        let out = step_implicit_midpoint(&s, &cfg).unwrap();
        let tol = 1e-12 * s.field.max_abs().max(1.0);
        assert!((out.diagnostics.mass - s.diagnostics.mass).abs() <= tol * s.field.len() as f64);
    }

    #[test]
    fn unperturbed_step_is_time_symmetric() {
        let cfg = SolverConfig::new(1.5, 1.0, 0.1);
        let s = compacton_snapshot(1.5, 1.0, 40.0, 0.2, 20.0);
        let mut st = MidpointStepper::new(cfg).unwrap();
        let fwd = st.step_values(s.field.values(), 0.2, 0.1).unwrap();
        let back = st.step_values(&fwd, 0.2, -0.1).unwrap();
        let tol = 1e-12 * s.field.max_abs().max(1.0);
        let err = back
            .iter()
            .zip(s.field.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err <= 10.0 * tol, "round trip error {err:e}");
    }

    #[test]
    fn damping_decays_mass_exponentially() {
        let eps = 0.01;
        let cfg = SolverConfig::new(2.0, 1.0, 0.05).with_eps0(eps);
        let s = compacton_snapshot(2.0, 1.0, 40.0, 0.2, 20.0);
        let run = run_simulation(&cfg, &s, 5.0, 1.0).unwrap();
        // Midpoint applied to M' = −εM gives the Cayley factor exactly.
        let g = (1.0 - 0.5 * eps * 0.05) / (1.0 + 0.5 * eps * 0.05);
        for (k, snap) in run.snapshots.iter().enumerate() {
            let expect = s.diagnostics.mass * g.powi(20 * k as i32);
            assert!(((snap.diagnostics.mass - expect) / expect).abs() < 1e-11);
            let law = s.diagnostics.mass * (-eps * snap.t).exp();
            assert!(((snap.diagnostics.mass - law) / law).abs() < 1e-6 * snap.t.max(1.0));
        }
    }

    #[test]
    fn rejects_bad_schedule() {
        let cfg = SolverConfig::new(2.0, 1.0, 0.1);
        let s = compacton_snapshot(2.0, 1.0, 40.0, 0.2, 20.0);
        assert!(run_simulation(&cfg, &s, 1.05, 0.1).is_err());
        assert!(run_simulation(&cfg, &s, 1.0, 0.0).is_err());
        assert!(run_simulation(&SolverConfig::new(2.0, 1.0, -0.1), &s, 1.0, 0.1).is_err());
    }

    #[test]
    fn default_domain() {
        assert_eq!(default_domain_length(1.0, 50.0, 0.2), 120.0);
        assert!((default_domain_length(1.0, 500.0, 0.2) - 650.0).abs() < 1e-9);
    }
}
