//! Self-check suites with one pass/fail line each.

use std::fmt;

use crate::compacton::{eval_compacton, sample_compacton, CompactonParams, SEVEN_THIRDS};
use crate::error::Error;
use crate::exec::Exec;
use crate::oracle::oracle_rhs;
use crate::perturbation::{closed_form_rhs, is_dissipative, Dissipativity, Family, PerturbationSpec};
use crate::solver::{run_simulation, Snapshot, SolverConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag}  {}: {}", self.name, self.detail)
    }
}

pub fn all_passed(lines: &[CheckLine]) -> bool {
    lines.iter().all(|l| l.passed)
}

/// "A term with the given coefficient sign slows every compacton for
/// `n_lo < n < n_hi`."
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignCondition {
    pub family: Family,
    pub terms: &'static [&'static str],
    pub sign: f64,
    pub n_lo: f64,
    pub n_hi: f64,
}

const fn cond(family: Family, terms: &'static [&'static str], sign: f64, n_lo: f64, n_hi: f64) -> SignCondition {
    SignCondition {
        family,
        terms,
        sign,
        n_lo,
        n_hi,
    }
}

/// Stated sign conditions for the linear families: every coefficient positive.
pub const LINEAR_SIGN_CONDITIONS: [SignCondition; 3] = [
    cond(Family::Linear2, &["alpha0", "alpha1", "alpha2"], 1.0, 1.0, 3.0),
    cond(
        Family::Linear4,
        &["beta0", "beta1", "beta2", "beta3", "beta4"],
        1.0,
        1.0,
        3.0,
    ),
    cond(
        Family::Linear6,
        &["gamma0", "gamma1", "gamma2", "gamma3", "gamma4", "gamma5", "gamma6"],
        1.0,
        1.0,
        SEVEN_THIRDS,
    ),
];

/// Stated sign conditions for single nonlinear terms.
pub const NONLINEAR_SIGN_CONDITIONS: [SignCondition; 11] = [
    cond(Family::Nonlinear2, &["delta1"], -1.0, 1.0, 2.0),
    cond(Family::Nonlinear2, &["delta1"], 1.0, 2.0, 3.0),
    cond(Family::Nonlinear2, &["delta2"], 1.0, 1.0, 1.5),
    cond(Family::Nonlinear2, &["delta2"], 1.0, 2.0, 3.0),
    cond(Family::Nonlinear2, &["delta2"], -1.0, 1.5, 2.0),
    cond(Family::Nonlinear4, &["eta1"], -1.0, 1.0, 3.0),
    cond(Family::Nonlinear4, &["eta2"], -1.0, 1.0, 1.5),
    cond(Family::Nonlinear4, &["eta2"], 1.0, 1.5, 3.0),
    cond(Family::Nonlinear4, &["eta3"], -1.0, 1.0, 3.0),
    cond(Family::Nonlinear4, &["eta4"], 1.0, 1.0, 3.0),
    cond(Family::Nonlinear4, &["eta5"], -1.0, 1.0, 3.0),
];

impl SignCondition {
    pub fn label(&self) -> String {
        let op = if self.sign > 0.0 { ">" } else { "<" };
        format!(
            "{} {op} 0 for {:.4} < n < {:.4}",
            self.terms.join(","),
            self.n_lo,
            self.n_hi
        )
    }

    /// `points` interior exponents, evenly spread.
    pub fn exponents(&self, points: usize) -> Vec<f64> {
        (1..=points)
            .map(|k| self.n_lo + (self.n_hi - self.n_lo) * k as f64 / (points + 1) as f64)
            .collect()
    }

    /// Exponents at which some listed term is not classified as dissipative.
    pub fn violations(&self, points: usize) -> Vec<(f64, &'static str, Option<Dissipativity>)> {
        let mut bad = Vec::new();
        for n in self.exponents(points) {
            for &term in self.terms {
                let spec = PerturbationSpec::from_named(self.family, &[(term, 0.01 * self.sign)]).expect("known term");
                let verdict = is_dissipative(n, &spec).ok().and_then(|r| r.term(term));
                if verdict != Some(Dissipativity::Dissipative) {
                    bad.push((n, term, verdict));
                }
            }
        }
        bad
    }
}

pub fn check_sign_conditions(conditions: &[SignCondition], points: usize) -> Vec<CheckLine> {
    conditions
        .iter()
        .map(|c| {
            let bad = c.violations(points);
            let detail = if bad.is_empty() {
                format!("dissipative at all {points} sampled n")
            } else {
                let lo = bad.iter().map(|b| b.0).fold(f64::INFINITY, f64::min);
                let hi = bad.iter().map(|b| b.0).fold(f64::NEG_INFINITY, f64::max);
                let mut terms: Vec<&str> = bad.iter().map(|b| b.1).collect();
                terms.sort_unstable();
                terms.dedup();
                format!(
                    "{} of {} (n, term) samples not dissipative, n in [{lo:.4}, {hi:.4}], terms {} ({:?})",
                    bad.len(),
                    points * c.terms.len(),
                    terms.join(","),
                    bad[0].2
                )
            };
            CheckLine {
                name: format!("{} {}", c.family, c.label()),
                passed: bad.is_empty(),
                detail,
            }
        })
        .collect()
}

pub const ORACLE_NS: [f64; 5] = [5.0 / 4.0, 4.0 / 3.0, 3.0 / 2.0, 5.0 / 3.0, 2.0];
pub const ORACLE_CS: [f64; 3] = [0.5, 1.0, 2.0];

pub fn oracle_exponents(family: Family) -> Vec<f64> {
    let mut ns = ORACLE_NS.to_vec();
    ns.push(if family == Family::Linear6 {
        9.0 / 4.0
    } else {
        5.0 / 2.0
    });
    ns
}

/// Spec with every coefficient of `family` active, `1/(1+i)` for term `i`.
pub fn mixed_spec(family: Family) -> PerturbationSpec {
    let named: Vec<(&str, f64)> = family
        .coefficient_names()
        .iter()
        .enumerate()
        .map(|(i, &k)| (k, 1.0 / (1.0 + i as f64)))
        .collect();
    PerturbationSpec::from_named(family, &named).expect("family names")
}

/// Closed form vs quadrature oracle, one line per family (worst case).
pub fn check_oracle(exec: Exec, tol: f64) -> Vec<CheckLine> {
    let families = Family::PERTURBATIONS.to_vec();
    exec.map(&families, |&family| {
        let spec = mixed_spec(family);
        let mut worst = (0.0f64, 0.0, 0.0);
        let mut failure = None;
        for n in oracle_exponents(family) {
            for c in ORACLE_CS {
                let closed = closed_form_rhs(n, &spec, c);
                let oracle = oracle_rhs(n, &spec, c);
                match (closed, oracle) {
                    (Ok(a), Ok(b)) => {
                        let e = (a - b.rate).abs() / b.rate.abs().max(1e-300);
                        if e > worst.0 {
                            worst = (e, n, c);
                        }
                    }
                    (a, b) => failure = Some(format!("n = {n}, c = {c}: {a:?} / {:?}", b.map(|o| o.rate))),
                }
            }
        }
        let cases = oracle_exponents(family).len() * ORACLE_CS.len();
        match failure {
            Some(msg) => CheckLine {
                name: format!("oracle {family}"),
                passed: false,
                detail: msg,
            },
            None => CheckLine {
                name: format!("oracle {family}"),
                passed: worst.0 <= tol,
                detail: format!(
                    "{cases} cases, worst relative error {:.2e} at n = {:.4}, c = {}",
                    worst.0, worst.1, worst.2
                ),
            },
        }
    })
}

/// Sixth-order window: quadrature must diverge and the closed form must refuse.
pub fn check_sixth_order_window() -> Vec<CheckLine> {
    [SEVEN_THIRDS, 2.4, 2.5, 2.75]
        .iter()
        .map(|&n| {
            let spec = PerturbationSpec::Linear6([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
            let oracle = oracle_rhs(n, &spec, 1.0);
            let closed = closed_form_rhs(n, &spec, 1.0);
            let diverged = matches!(oracle, Err(Error::QuadratureDiverged { .. }));
            let refused = matches!(closed, Err(Error::InvalidExponent { .. }));
            CheckLine {
                name: format!("sixth-order window n = {n:.4}"),
                passed: diverged && refused,
                detail: format!(
                    "quadrature {}, closed form {}",
                    if diverged { "diverges" } else { "converged" },
                    if refused { "refuses" } else { "accepts" }
                ),
            }
        })
        .collect()
}

/// Unperturbed propagation of the `n = 2`, `c = 1` compacton in its own frame.
pub fn check_conservation(exec: Exec) -> Vec<CheckLine> {
    let (n, dx, length, t_end) = (2.0, 0.2, 100.0, 100.0);
    let p = CompactonParams::new(n, 1.0).expect("valid");
    let center = 50.0;
    let run = sample_compacton(&p, length, dx, center).and_then(|f| {
        run_simulation(
            &SolverConfig::new(n, 1.0, 0.1).with_exec(exec),
            &Snapshot::new(0.0, f, n),
            t_end,
            t_end,
        )
    });
    let run = match run {
        Ok(r) => r,
        Err(e) => {
            return vec![CheckLine {
                name: "conservation run".into(),
                passed: false,
                detail: e.to_string(),
            }];
        }
    };
    let last = run.snapshots.last().expect("final snapshot");
    let f = &last.field;
    let shape = (0..f.len())
        .map(|j| (f.values()[j] - eval_compacton(&p, f.x(j) - center)).abs())
        .fold(0.0, f64::max)
        / p.amplitude();
    let shift = (last.diagnostics.peak_x - center).abs();
    vec![
        CheckLine {
            name: "mass drift".into(),
            passed: run.report.max_mass_drift <= 1e-9,
            detail: format!("{:.2e} (limit 1e-9)", run.report.max_mass_drift),
        },
        CheckLine {
            name: "momentum drift".into(),
            passed: run.report.max_momentum_drift <= 1e-2,
            detail: format!("{:.2e} (limit 1e-2)", run.report.max_momentum_drift),
        },
        CheckLine {
            name: "shape error".into(),
            passed: shape <= 0.05,
            detail: format!("{shape:.2e} of amplitude (limit 0.05)"),
        },
        CheckLine {
            name: "peak position".into(),
            passed: shift <= dx,
            detail: format!("moved {shift:.3e} (limit one cell, {dx})"),
        },
    ]
}
