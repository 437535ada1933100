use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use compacton_core::checks::{
    all_passed, check_conservation, check_oracle, check_sign_conditions, check_sixth_order_window, CheckLine,
    LINEAR_SIGN_CONDITIONS, NONLINEAR_SIGN_CONDITIONS,
};
use compacton_core::compacton::{sample_compacton, support_halfwidth, CompactonParams};
use compacton_core::experiment::{fit_decay_rate, run_tail_experiment, tail_profile, TailRun, TailRunConfig};
use compacton_core::export::{
    format_number, write_conservation, write_csv_file, write_snapshot, write_tail_records, write_trajectory,
};
use compacton_core::tail::DEFAULT_PROBE_OFFSET;
use compacton_core::{
    analytic_velocity, run_simulation, solve_velocity_ode, Exec, Family, OdeOptions, PerturbationSpec, Snapshot,
    SolverConfig,
};

use crate::args::{CheckArgs, Suite};
use crate::config::{ExperimentConfig, DEFAULT_BETA0, FIGURE1_NS, FIGURE2_BETAS, FIGURE2_NS};
use crate::error::CliError;

type Out<'a> = &'a mut dyn Write;

fn say(out: Out, line: impl AsRef<str>) -> Result<(), CliError> {
    writeln!(out, "{}", line.as_ref()).map_err(CliError::io("stdout"))
}

fn output_dir(cfg: &ExperimentConfig) -> Result<PathBuf, CliError> {
    let dir = cfg.output.dir.clone();
    fs::create_dir_all(&dir).map_err(CliError::io(format!("creating {}", dir.display())))?;
    Ok(dir)
}

fn family(cfg: &ExperimentConfig) -> Result<Family, CliError> {
    Family::from_str(&cfg.perturbation.family).map_err(|e| CliError::Config(e.to_string()))
}

/// Explicit value, else the fourth-order default for `linear4`, else zero.
fn coefficient_or_default(cfg: &ExperimentConfig, name: &str) -> f64 {
    cfg.coefficient(name)
        .unwrap_or(if name == "beta0" && cfg.perturbation.family == "linear4" {
            DEFAULT_BETA0
        } else {
            0.0
        })
}

/// The configured family with its named coefficients.
pub fn perturbation_spec(cfg: &ExperimentConfig) -> Result<PerturbationSpec, CliError> {
    let family = family(cfg)?;
    if family == Family::Unperturbed {
        if let Some(k) = cfg.perturbation.coefficients.keys().next() {
            return Err(CliError::Config(format!(
                "the unperturbed equation has no coefficient `{k}`"
            )));
        }
        return Ok(PerturbationSpec::Linear4([0.0; 5]));
    }
    let mut named: Vec<(&str, f64)> = cfg
        .perturbation
        .coefficients
        .iter()
        .map(|(k, &v)| (k.as_str(), v))
        .collect();
    if family == Family::Linear4 && cfg.coefficient("beta0").is_none() {
        named.push(("beta0", DEFAULT_BETA0));
    }
    Ok(PerturbationSpec::from_named(family, &named)?)
}

/// PDE solver for the terms the discretisation carries: `ε₀`, `α₀`, `β₀`.
pub fn solver_config(cfg: &ExperimentConfig) -> Result<SolverConfig, CliError> {
    const SUPPORTED: [&str; 3] = ["eps0", "alpha0", "beta0"];
    if let Some(k) = cfg
        .perturbation
        .coefficients
        .keys()
        .find(|k| !SUPPORTED.contains(&k.as_str()))
    {
        return Err(CliError::Config(format!(
            "the PDE solver supports eps0, alpha0 and beta0 only, got `{k}`"
        )));
    }
    let mut sc = SolverConfig::new(cfg.compacton.n, cfg.compacton.c0, cfg.solver.dt)
        .with_eps0(coefficient_or_default(cfg, "eps0"))
        .with_alpha0(coefficient_or_default(cfg, "alpha0"))
        .with_beta0(coefficient_or_default(cfg, "beta0"))
        .with_exec(cfg.exec()?);
    sc.newton_tol = cfg.solver.newton_tol;
    sc.validate()?;
    Ok(sc)
}

pub fn cmd_ode(cfg: &ExperimentConfig, out: Out) -> Result<(), CliError> {
    let spec = perturbation_spec(cfg)?;
    let (n, c0, t_end) = (cfg.compacton.n, cfg.compacton.c0, cfg.time.t_end);
    let opts = OdeOptions {
        rtol: cfg.ode.rtol,
        atol: cfg.ode.atol,
        intervals: cfg.ode.samples,
        ..OdeOptions::default()
    };
    let tr = solve_velocity_ode(n, &spec, c0, t_end, &opts)?;
    let dir = output_dir(cfg)?;
    let path = dir.join("trajectory.csv");
    let file = File::create(&path).map_err(CliError::io(path.display().to_string()))?;
    write_trajectory(BufWriter::new(file), &tr).map_err(CliError::io(path.display().to_string()))?;

    let last = tr.samples.last().expect("trajectory has samples");
    say(out, format!("family {} n = {n} c0 = {c0}", spec.family()))?;
    say(out, format!("c({}) = {}", format_number(last.t), format_number(last.c)))?;
    if let Some(exact) = analytic_velocity(n, &spec, c0, last.t) {
        say(
            out,
            format!(
                "analytic c = {} (relative error {:.2e})",
                format_number(exact),
                (last.c - exact).abs() / exact
            ),
        )?;
    }
    if let Some(tr) = tr.truncated {
        say(out, format!("warning: integration stopped early: {tr:?}"))?;
    }
    say(
        out,
        format!(
            "steps {} accepted, {} rejected; wrote {}",
            tr.stats.accepted,
            tr.stats.rejected,
            path.display()
        ),
    )
}

pub fn cmd_simulate(cfg: &ExperimentConfig, out: Out) -> Result<(), CliError> {
    let sc = solver_config(cfg)?;
    let (n, c0, dx, length) = (cfg.compacton.n, cfg.compacton.c0, cfg.solver.dx, cfg.solver.length);
    let params = CompactonParams::new(n, c0)?;
    let center = ((length - 3.0 * support_halfwidth(n)) / dx).round() * dx;
    let initial = Snapshot::new(0.0, sample_compacton(&params, length, dx, center)?, n);
    let dir = output_dir(cfg)?;

    let run = run_simulation(&sc, &initial, cfg.time.t_end, cfg.time.sample_every)?;
    if cfg.output.snapshots {
        for s in &run.snapshots {
            write_snapshot(&dir, s).map_err(CliError::io(format!("snapshot t = {}", s.t)))?;
        }
    }
    let (report, newton) = (run.report, run.newton);
    let last = run.snapshots.last().expect("final snapshot");
    let path = dir.join("conservation.csv");
    let file = File::create(&path).map_err(CliError::io(path.display().to_string()))?;
    write_conservation(BufWriter::new(file), &report).map_err(CliError::io(path.display().to_string()))?;

    let shape = initial
        .field
        .values()
        .iter()
        .zip(last.field.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / params.amplitude();
    let ts: Vec<f64> = report.rows.iter().map(|r| r.t).collect();
    let masses: Vec<f64> = report.rows.iter().map(|r| r.mass).collect();
    let cs: Vec<f64> = report
        .rows
        .iter()
        .map(|r| (n + 1.0) / (2.0 * n) * r.max_u.powf(n - 1.0))
        .collect();
    say(
        out,
        format!(
            "n = {n} c0 = {c0} eps0 = {} alpha0 = {} beta0 = {}",
            sc.eps0, sc.alpha0, sc.beta0
        ),
    )?;
    say(
        out,
        format!(
            "grid {} points, {} steps, {:.2} Newton iterations per step (max {})",
            initial.field.len(),
            newton.steps,
            newton.iterations as f64 / newton.steps.max(1) as f64,
            newton.max_iterations
        ),
    )?;
    say(out, format!("mass drift      {:.3e}", report.max_mass_drift))?;
    say(out, format!("momentum drift  {:.3e}", report.max_momentum_drift))?;
    say(out, format!("shape error     {shape:.3e} of amplitude"))?;
    say(out, format!("mass decay rate {:.6e}", fit_decay_rate(&ts, &masses)?))?;
    say(out, format!("c decay rate    {:.6e}", fit_decay_rate(&ts, &cs)?))?;
    say(out, format!("wrote {}", dir.display()))
}

fn tail_config(cfg: &ExperimentConfig, n: f64, beta0: f64) -> TailRunConfig {
    TailRunConfig {
        n,
        c: cfg.compacton.c0,
        beta0,
        dx: cfg.solver.dx,
        dt: cfg.solver.dt,
        length: cfg.solver.length,
        t_end: cfg.time.t_end,
        sample_every: cfg.time.sample_every,
        probe_offset: DEFAULT_PROBE_OFFSET,
        exec: Exec::Sequential,
    }
}

fn require_linear4(cfg: &ExperimentConfig) -> Result<(), CliError> {
    if family(cfg)? != Family::Linear4 {
        return Err(CliError::Config("the tail experiments use the linear4 family".into()));
    }
    if let Some(k) = cfg.perturbation.coefficients.keys().find(|k| *k != "beta0") {
        return Err(CliError::Config(format!(
            "the tail experiments take beta0 only, got `{k}`"
        )));
    }
    Ok(())
}

fn label(x: f64) -> String {
    format!("{x:.4}")
}

fn write_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<(), CliError> {
    write_csv_file(path, header, rows).map_err(CliError::io(path.display().to_string()))
}

fn figure1_one(dir: &Path, tc: &TailRunConfig) -> Result<TailRun, CliError> {
    let run = run_tail_experiment(tc)?;
    let stem = format!("figure1_n{}", label(tc.n));
    write_rows(
        &dir.join(format!("{stem}.csv")),
        &["t", "A_num", "A_adb"],
        run.records.iter().map(|r| vec![r.t, r.a_num, r.a_adb]),
    )?;
    let path = dir.join(format!("{stem}_tail.csv"));
    let file = File::create(&path).map_err(CliError::io(path.display().to_string()))?;
    write_tail_records(BufWriter::new(file), &run.records).map_err(CliError::io(path.display().to_string()))?;
    Ok(run)
}

pub fn cmd_figure1(cfg: &ExperimentConfig, out: Out) -> Result<(), CliError> {
    require_linear4(cfg)?;
    let beta0 = coefficient_or_default(cfg, "beta0");
    let ns = if cfg.figure.n_values.is_empty() {
        FIGURE1_NS.to_vec()
    } else {
        cfg.figure.n_values.clone()
    };
    let dir = output_dir(cfg)?;
    let results = cfg
        .exec()?
        .map(&ns, |&n| figure1_one(&dir, &tail_config(cfg, n, beta0)));
    say(out, format!("beta0 = {beta0}, t_end = {}", cfg.time.t_end))?;
    for (n, res) in ns.iter().zip(results) {
        let run = res?;
        let last = run.records.last().expect("records");
        let worst = run
            .records
            .iter()
            .filter(|r| r.t > 50.0)
            .map(|r| (r.a_num - r.a_adb).abs() / r.a_adb.abs().max(1e-300))
            .fold(0.0, f64::max);
        say(
            out,
            format!(
                "n = {}  A_num = {:.6e}  A_adb = {:.6e}  worst relative gap after t = 50: {:.3}",
                label(*n),
                last.a_num,
                last.a_adb,
                worst
            ),
        )?;
    }
    say(out, format!("wrote {}", dir.display()))
}

fn figure2_one(dir: &Path, tc: &TailRunConfig) -> Result<TailRun, CliError> {
    let run = run_tail_experiment(tc)?;
    let stem = format!("figure2_n{}_beta{}", label(tc.n), tc.beta0);
    let profile = tail_profile(&run)?;
    write_rows(
        &dir.join(format!("{stem}.csv")),
        &["x", "u_meas", "u_pred"],
        profile.iter().map(|r| r.to_vec()),
    )?;
    let last = run.records.last().expect("records");
    let meta = format!(
        "n = {}\nbeta0 = {}\nt = {}\nlimiting = {}\nc_ode = {}\nc_est = {}\nX = {}\nuT_pred = {}\nuT_meas = {}\n",
        tc.n,
        tc.beta0,
        last.t,
        run.limiting,
        format_number(run.trajectory.c_final()),
        format_number(last.c_est),
        format_number(last.x),
        format_number(last.ut_pred),
        format_number(last.ut_meas),
    );
    let path = dir.join(format!("{stem}.meta"));
    fs::write(&path, meta).map_err(CliError::io(path.display().to_string()))?;
    Ok(run)
}

pub fn cmd_figure2(cfg: &ExperimentConfig, out: Out) -> Result<(), CliError> {
    require_linear4(cfg)?;
    if cfg.coefficient("beta0").is_some() && !cfg.figure.beta0_values.is_empty() {
        return Err(CliError::Config(
            "give either beta0 or figure.beta0_values, not both".into(),
        ));
    }
    let ns = if cfg.figure.n_values.is_empty() {
        FIGURE2_NS.to_vec()
    } else {
        cfg.figure.n_values.clone()
    };
    let betas = match cfg.coefficient("beta0") {
        Some(b) => vec![b],
        None if cfg.figure.beta0_values.is_empty() => FIGURE2_BETAS.to_vec(),
        None => cfg.figure.beta0_values.clone(),
    };
    let pairs: Vec<(f64, f64)> = ns.iter().flat_map(|&n| betas.iter().map(move |&b| (n, b))).collect();
    let dir = output_dir(cfg)?;
    let results = cfg
        .exec()?
        .map(&pairs, |&(n, b)| figure2_one(&dir, &tail_config(cfg, n, b)));
    say(out, format!("t = {}", cfg.time.t_end))?;
    for ((n, b), res) in pairs.iter().zip(results) {
        let run = res?;
        let last = run.records.last().expect("records");
        say(
            out,
            format!(
                "n = {}  beta0 = {b:<6}  uT_pred = {:.4e}  uT_meas = {:.4e}  relative error {:.3}{}",
                label(*n),
                last.ut_pred,
                last.ut_meas,
                (last.ut_meas - last.ut_pred).abs() / last.ut_pred,
                if run.limiting { "  LIMITING" } else { "" }
            ),
        )?;
    }
    say(out, format!("wrote {}", dir.display()))
}

pub fn cmd_check(args: &CheckArgs, out: Out) -> Result<(), CliError> {
    let exec = if args.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    };
    let want = |s: Suite| args.suite == s || args.suite == Suite::All;
    let mut lines: Vec<CheckLine> = Vec::new();
    let mut section = |out: Out, title: &str, part: Vec<CheckLine>| -> Result<(), CliError> {
        say(out, format!("== {title}"))?;
        for l in &part {
            say(out, l.to_string())?;
        }
        lines.extend(part);
        Ok(())
    };
    if want(Suite::Oracle) {
        section(out, "closed form vs quadrature", check_oracle(exec, 1e-8))?;
    }
    if want(Suite::SixthOrder) {
        section(out, "sixth-order window", check_sixth_order_window())?;
    }
    if want(Suite::Dissipativity) {
        section(
            out,
            "dissipativity, linear families",
            check_sign_conditions(&LINEAR_SIGN_CONDITIONS, 20),
        )?;
        section(
            out,
            "dissipativity, nonlinear families",
            check_sign_conditions(&NONLINEAR_SIGN_CONDITIONS, 20),
        )?;
    }
    if want(Suite::Conservation) {
        section(out, "unperturbed conservation", check_conservation(exec))?;
    }
    let failed = lines.iter().filter(|l| !l.passed).count();
    say(out, format!("{} passed, {failed} failed", lines.len() - failed))?;
    if all_passed(&lines) {
        Ok(())
    } else {
        Err(CliError::ChecksFailed(failed))
    }
}
