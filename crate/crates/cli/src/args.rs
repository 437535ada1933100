use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use toml::Value;

use crate::config::{load, parse_assignment, parse_ratio, ExperimentConfig, Preset};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "compacton",
    version,
    about = "Perturbed K(n,n) compactons: velocity ODEs, PDE runs and tail experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the adiabatic velocity ODE and write `t,c,amplitude`.
    Ode(RunArgs),
    /// Evolve the perturbed PDE; write snapshots and `conservation.csv`.
    Simulate(RunArgs),
    /// Tail area against time, measured and adiabatic, for a list of n.
    Figure1(RunArgs),
    /// Tail shape behind the compacton for every (n, beta0) pair.
    Figure2(RunArgs),
    /// Run a built-in verification suite.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Oracle,
    Conservation,
    Dissipativity,
    SixthOrder,
    All,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(value_enum, default_value = "all")]
    pub suite: Suite,
    /// Disable worker threads.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Clone, Default, Args)]
#[command(allow_negative_numbers = true)]
pub struct RunArgs {
    /// TOML config file (`section.key = value` or `[section]` tables).
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override any config key, e.g. `--set solver.dx=0.1`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Long runs: t = 2000 (1900 for figure2) on L = 2400.
    #[arg(long)]
    pub full: bool,
    /// Nonlinearity exponent; ratios such as 5/3 are accepted.
    #[arg(long, value_parser = parse_ratio)]
    pub n: Option<f64>,
    /// Initial velocity (also the speed of the computational frame).
    #[arg(long)]
    pub c0: Option<f64>,
    /// mass-damping, linear2, linear4, linear6, nonlinear2, nonlinear4 or unperturbed.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub eps0: Option<f64>,
    #[arg(long)]
    pub alpha0: Option<f64>,
    #[arg(long)]
    pub beta0: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub dx: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Periodic domain length.
    #[arg(long)]
    pub length: Option<f64>,
    #[arg(long)]
    pub sample_every: Option<f64>,
    /// Number of ODE output intervals.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Comma-separated exponents for the figure sweeps.
    #[arg(long, value_delimiter = ',', value_parser = parse_ratio)]
    pub ns: Vec<f64>,
    /// Comma-separated beta0 values for figure2.
    #[arg(long, value_delimiter = ',')]
    pub beta0s: Vec<f64>,
    /// Disable worker threads.
    #[arg(long)]
    pub sequential: bool,
    /// Output directory (overrides COMPACTON_OUT_DIR).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    /// `--set` assignments followed by the named flags.
    pub fn overrides(&self) -> Result<Vec<(String, Value)>, CliError> {
        let mut out = self
            .set
            .iter()
            .map(|s| parse_assignment(s))
            .collect::<Result<Vec<_>, _>>()?;
        let mut float = |key: &str, v: Option<f64>| {
            if let Some(v) = v {
                out.push((key.to_string(), Value::Float(v)));
            }
        };
        float("compacton.n", self.n);
        float("compacton.c0", self.c0);
        float("perturbation.eps0", self.eps0);
        float("perturbation.alpha0", self.alpha0);
        float("perturbation.beta0", self.beta0);
        float("time.t_end", self.t_end);
        float("time.sample_every", self.sample_every);
        float("solver.dx", self.dx);
        float("solver.dt", self.dt);
        float("solver.length", self.length);
        let floats = |v: &[f64]| Value::Array(v.iter().map(|&x| Value::Float(x)).collect());
        if let Some(f) = &self.family {
            out.push(("perturbation.family".into(), Value::String(f.clone())));
        }
        if let Some(s) = self.samples {
            out.push(("ode.samples".into(), Value::Integer(s as i64)));
        }
        if !self.ns.is_empty() {
            out.push(("figure.n_values".into(), floats(&self.ns)));
        }
        if !self.beta0s.is_empty() {
            out.push(("figure.beta0_values".into(), floats(&self.beta0s)));
        }
        if self.sequential {
            out.push(("solver.exec".into(), Value::String("sequential".into())));
        }
        if let Some(dir) = &self.out {
            out.push(("output.dir".into(), Value::String(dir.to_string_lossy().into_owned())));
        }
        Ok(out)
    }

    /// Resolve the full configuration; `full_t_end` is the run length the
    /// `--full` preset uses for this command.
    pub fn resolve(&self, full_t_end: f64) -> Result<ExperimentConfig, CliError> {
        let preset = if self.full {
            Preset::Full { t_end: full_t_end }
        } else {
            Preset::Desk
        };
        load(preset, self.config.as_deref(), &self.overrides()?)
    }
}
