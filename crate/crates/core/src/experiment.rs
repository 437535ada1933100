//! Composite runs shared by the command-line front end and the acceptance
//! suite: a perturbed compacton simulated next to its adiabatic prediction.

use crate::compacton::{sample_compacton, support_halfwidth, validate_exponent, CompactonParams, ExponentVerdict};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::ode::{solve_velocity_ode, OdeOptions, VelocityTrajectory};
use crate::perturbation::{Family, PerturbationSpec};
use crate::solver::{run_simulation_with, ConservationReport, NewtonStats, Snapshot, SolverConfig};
use crate::tail::{TailProbe, TailRecord, DEFAULT_PROBE_OFFSET};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailRunConfig {
    pub n: f64,
    /// Initial compacton velocity; also the speed of the computational frame.
    pub c: f64,
    pub beta0: f64,
    pub dx: f64,
    pub dt: f64,
    pub length: f64,
    pub t_end: f64,
    pub sample_every: f64,
    pub probe_offset: f64,
    pub exec: Exec,
}

impl TailRunConfig {
    /// Desk-scale defaults: `c = 1`, `Δx = 0.2`, `Δt = 0.1`, `L = 700`, `t = 500`.
    pub fn desk(n: f64, beta0: f64) -> Self {
        TailRunConfig {
            n,
            c: 1.0,
            beta0,
            dx: 0.2,
            dt: 0.1,
            length: 700.0,
            t_end: 500.0,
            sample_every: 10.0,
            probe_offset: DEFAULT_PROBE_OFFSET,
            exec: Exec::Sequential,
        }
    }

    pub fn spec(&self) -> PerturbationSpec {
        PerturbationSpec::Linear4([self.beta0, 0.0, 0.0, 0.0, 0.0])
    }

    /// Initial centre: three half-widths from the right end, so the tail
    /// (which trails to the left in the moving frame) has the rest of the domain.
    pub fn center(&self) -> f64 {
        ((self.length - 3.0 * support_halfwidth(self.n)) / self.dx).round() * self.dx
    }
}

#[derive(Debug, Clone)]
pub struct TailRun {
    pub config: TailRunConfig,
    pub limiting: bool,
    pub x0: f64,
    pub trajectory: VelocityTrajectory,
    pub records: Vec<TailRecord>,
    pub final_snapshot: Snapshot,
    pub report: ConservationReport,
    pub newton: NewtonStats,
}

pub fn run_tail_experiment(cfg: &TailRunConfig) -> Result<TailRun> {
    let verdict = validate_exponent(cfg.n, Family::Linear4).into_result(cfg.n)?;
    let params = CompactonParams::new(cfg.n, cfg.c)?;
    let center = cfg.center();
    let x0 = center - support_halfwidth(cfg.n);
    let initial = Snapshot::new(0.0, sample_compacton(&params, cfg.length, cfg.dx, center)?, cfg.n);
    let intervals = (cfg.t_end / cfg.dt).round().max(1.0) as usize;
    let trajectory = solve_velocity_ode(
        cfg.n,
        &cfg.spec(),
        cfg.c,
        cfg.t_end,
        &OdeOptions {
            intervals,
            ..OdeOptions::default()
        },
    )?;
    if trajectory.truncated.is_some() {
        return Err(Error::InvalidParameter {
            name: "beta0",
            reason: format!("velocity trajectory ended early: {:?}", trajectory.truncated),
        });
    }
    let solver = SolverConfig::new(cfg.n, cfg.c, cfg.dt)
        .with_beta0(cfg.beta0)
        .with_exec(cfg.exec);
    let probe = TailProbe::new(cfg.n, &trajectory, x0, cfg.c).with_offset(cfg.probe_offset);
    let mut records = Vec::new();
    let mut last = initial.clone();
    let (report, newton) = run_simulation_with(&solver, &initial, cfg.t_end, cfg.sample_every, |s| {
        records.push(probe.record(s)?);
        last = s.clone();
        Ok(())
    })?;
    Ok(TailRun {
        config: *cfg,
        limiting: verdict == ExponentVerdict::Limiting,
        x0,
        trajectory,
        records,
        final_snapshot: last,
        report,
        newton,
    })
}

/// Measured and predicted tail height behind the compacton at the end of the
/// run, as rows `[x, u_meas, u_pred]` with `x` in laboratory coordinates,
/// from the initial left edge up to the current one.
pub fn tail_profile(run: &TailRun) -> Result<Vec<[f64; 3]>> {
    let probe = TailProbe::new(run.config.n, &run.trajectory, run.x0, run.config.c);
    let snap = &run.final_snapshot;
    let field = &snap.field;
    let length = field.length();
    let edge = probe.edge.at(snap.t)?;
    let edge_grid = probe.to_grid(field, edge, snap.t);
    let span = (edge - run.x0).min(length);
    let mut rows = Vec::new();
    for j in 0..field.len() {
        let behind = (edge_grid - field.x(j)).rem_euclid(length);
        if behind <= span {
            let x = edge - behind;
            rows.push([x, field.values()[j], probe.predicted_at(x)?]);
        }
    }
    rows.sort_by(|a, b| a[0].total_cmp(&b[0]));
    Ok(rows)
}

/// Least-squares slope of `ln y` against `t`, negated: the decay rate of
/// `y ∝ e^{−λt}`.
pub fn fit_decay_rate(ts: &[f64], ys: &[f64]) -> Result<f64> {
    if ts.len() != ys.len() || ts.len() < 2 || ys.iter().any(|&y| !(y > 0.0)) {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: "need at least two positive samples".into(),
        });
    }
    let m = ts.len() as f64;
    let tm = ts.iter().sum::<f64>() / m;
    let lm = ys.iter().map(|y| y.ln()).sum::<f64>() / m;
    let (mut num, mut den) = (0.0, 0.0);
    for (t, y) in ts.iter().zip(ys) {
        num += (t - tm) * (y.ln() - lm);
        den += (t - tm) * (t - tm);
    }
    Ok(-num / den)
}
