//! Layered experiment configuration.
//!
//! Keys are dotted `section.key` pairs; a file may use either TOML tables or
//! dotted keys at top level. Layers apply in order: built-in defaults, the
//! `--full` preset, the config file, `COMPACTON_OUT_DIR`, `--set` overrides,
//! then the named flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use compacton_core::Exec;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::CliError;

pub const OUT_DIR_ENV: &str = "COMPACTON_OUT_DIR";

pub const FIGURE1_NS: [f64; 7] = [2.0, 5.0 / 3.0, 1.5, 1.4, 4.0 / 3.0, 9.0 / 7.0, 1.25];
pub const FIGURE2_NS: [f64; 4] = [3.0, 2.0, 1.4, 1.25];
pub const FIGURE2_BETAS: [f64; 3] = [0.01, 0.005, 0.001];

/// Fourth-order dissipation used when `beta0` is not given.
pub const DEFAULT_BETA0: f64 = 0.001;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub compacton: CompactonSection,
    pub perturbation: PerturbationSection,
    pub solver: SolverSection,
    pub time: TimeSection,
    pub ode: OdeSection,
    pub figure: FigureSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompactonSection {
    pub n: f64,
    pub c0: f64,
}

/// Family name plus named coefficients (`beta0`, `eta2`, ...). Coefficient
/// names are checked against the family when a command builds its spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PerturbationSection {
    pub family: String,
    #[serde(flatten)]
    pub coefficients: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub dx: f64,
    pub dt: f64,
    pub length: f64,
    /// `parallel` or `sequential`.
    pub exec: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub newton_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeSection {
    pub t_end: f64,
    pub sample_every: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OdeSection {
    pub rtol: f64,
    pub atol: f64,
    pub samples: usize,
}

/// Sweep lists; empty means the command's own defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FigureSection {
    pub n_values: Vec<f64>,
    pub beta0_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub snapshots: bool,
}

impl Default for CompactonSection {
    fn default() -> Self {
        CompactonSection { n: 2.0, c0: 1.0 }
    }
}

impl Default for PerturbationSection {
    fn default() -> Self {
        PerturbationSection {
            family: "linear4".into(),
            coefficients: BTreeMap::new(),
        }
    }
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            dx: 0.2,
            dt: 0.1,
            length: 700.0,
            exec: "parallel".into(),
            newton_tol: None,
        }
    }
}

impl Default for TimeSection {
    fn default() -> Self {
        TimeSection {
            t_end: 500.0,
            sample_every: 10.0,
        }
    }
}

impl Default for OdeSection {
    fn default() -> Self {
        OdeSection {
            rtol: 1e-10,
            atol: 1e-12,
            samples: 200,
        }
    }
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            snapshots: true,
        }
    }
}

/// Which preset the `--full` flag selects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    Desk,
    /// Long runs: `t = 2000` (`1900` for the tail-shape sweep), `L = 2400`.
    Full {
        t_end: f64,
    },
}

impl ExperimentConfig {
    pub fn preset(preset: Preset) -> Self {
        let mut cfg = ExperimentConfig::default();
        if let Preset::Full { t_end } = preset {
            cfg.time.t_end = t_end;
            cfg.solver.length = 2400.0;
        }
        cfg
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn exec(&self) -> Result<Exec, CliError> {
        match self.solver.exec.as_str() {
            "parallel" => Ok(Exec::Parallel),
            "sequential" => Ok(Exec::Sequential),
            other => Err(CliError::Config(format!(
                "solver.exec must be `parallel` or `sequential`, got `{other}`"
            ))),
        }
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.perturbation.coefficients.get(name).copied()
    }

    /// Range checks that do not depend on the command.
    pub fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("compacton.c0", self.compacton.c0),
            ("solver.dx", self.solver.dx),
            ("solver.dt", self.solver.dt),
            ("solver.length", self.solver.length),
            ("time.t_end", self.time.t_end),
            ("time.sample_every", self.time.sample_every),
            ("ode.rtol", self.ode.rtol),
            ("ode.atol", self.ode.atol),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{key} must be positive and finite, got {v}")));
            }
        }
        if !self.compacton.n.is_finite() {
            return Err(CliError::Config("compacton.n must be finite".into()));
        }
        if self.ode.samples == 0 {
            return Err(CliError::Config("ode.samples must be at least 1".into()));
        }
        for (k, v) in &self.perturbation.coefficients {
            if !v.is_finite() {
                return Err(CliError::Config(format!("perturbation.{k} must be finite, got {v}")));
            }
        }
        for &v in self.figure.n_values.iter().chain(&self.figure.beta0_values) {
            if !v.is_finite() {
                return Err(CliError::Config("figure lists must be finite".into()));
            }
        }
        if let Some(tol) = self.solver.newton_tol {
            if !(tol > 0.0) {
                return Err(CliError::Config(format!(
                    "solver.newton_tol must be positive, got {tol}"
                )));
            }
        }
        self.exec()?;
        Ok(())
    }
}

/// Build a config from the preset, an optional file and `key = value`
/// overrides (applied in order).
pub fn load(preset: Preset, file: Option<&Path>, overrides: &[(String, Value)]) -> Result<ExperimentConfig, CliError> {
    let mut table = Table::try_from(ExperimentConfig::preset(preset)).map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(path) = file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let layer: Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::Config(format!("{}: {e}", path.display())))?;
        merge(&mut table, layer);
    }
    if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
        if !dir.is_empty() {
            set_dotted(&mut table, "output.dir", Value::String(dir))?;
        }
    }
    for (key, value) in overrides {
        set_dotted(&mut table, key, value.clone())?;
    }
    let cfg: ExperimentConfig = Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

fn merge(base: &mut Table, layer: Table) {
    for (k, v) in layer {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(l)) => merge(b, l),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Set `section.key` in a two-level table.
pub fn set_dotted(table: &mut Table, key: &str, value: Value) -> Result<(), CliError> {
    let (section, field) = key
        .split_once('.')
        .filter(|(s, f)| !s.is_empty() && !f.is_empty() && !f.contains('.'))
        .ok_or_else(|| CliError::Config(format!("expected `section.key`, got `{key}`")))?;
    match table.entry(section).or_insert_with(|| Value::Table(Table::new())) {
        Value::Table(t) => {
            t.insert(field.to_string(), value);
            Ok(())
        }
        _ => Err(CliError::Config(format!("`{section}` is not a section"))),
    }
}

/// Parse `key=value`; the value is read as a TOML literal, falling back to
/// a bare string (`--set perturbation.family=linear2`).
pub fn parse_assignment(s: &str) -> Result<(String, Value), CliError> {
    let (key, raw) = s
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("expected KEY=VALUE, got `{s}`")))?;
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));
    Ok((key.trim().to_string(), value))
}

/// `2`, `1.25` or a ratio such as `5/3`.
pub fn parse_ratio(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("bad numerator in `{s}`"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("bad denominator in `{s}`"))?;
            a / b
        }
        None => s.parse().map_err(|_| format!("not a number: `{s}`"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: `{s}`"))
    }
}
