//! Dissipative perturbation families and their closed-form velocity ODEs.
//!
//! Each family perturbs `u_t + (u^n)_x + (u^n)_xxx = P(u)`; the adiabatic
//! reduction turns `P` into an ODE `dc/dt = f(c)` for the compacton velocity.
//! Coefficients are taken in physical time, exactly as they appear in the PDE.

use std::fmt;
use std::str::FromStr;

use crate::compacton::{validate_exponent, ExponentVerdict};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Unperturbed,
    MassDamping,
    Linear2,
    Linear4,
    Linear6,
    Nonlinear2,
    Nonlinear4,
}

impl Family {
    pub const PERTURBATIONS: [Family; 6] = [
        Family::MassDamping,
        Family::Linear2,
        Family::Linear4,
        Family::Linear6,
        Family::Nonlinear2,
        Family::Nonlinear4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Unperturbed => "unperturbed",
            Family::MassDamping => "mass-damping",
            Family::Linear2 => "linear2",
            Family::Linear4 => "linear4",
            Family::Linear6 => "linear6",
            Family::Nonlinear2 => "nonlinear2",
            Family::Nonlinear4 => "nonlinear4",
        }
    }

    /// Coefficient names in the order stored by [`PerturbationSpec`].
    pub fn coefficient_names(self) -> &'static [&'static str] {
        match self {
            Family::Unperturbed => &[],
            Family::MassDamping => &["eps0"],
            Family::Linear2 => &["alpha0", "alpha1", "alpha2"],
            Family::Linear4 => &["beta0", "beta1", "beta2", "beta3", "beta4"],
            Family::Linear6 => &["gamma0", "gamma1", "gamma2", "gamma3", "gamma4", "gamma5", "gamma6"],
            Family::Nonlinear2 => &["delta1", "delta2"],
            Family::Nonlinear4 => &["eta1", "eta2", "eta3", "eta4", "eta5"],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let all = [Family::Unperturbed].into_iter().chain(Family::PERTURBATIONS);
        for fam in all {
            if fam.name() == s {
                return Ok(fam);
            }
        }
        Err(Error::InvalidParameter {
            name: "family",
            reason: format!(
                "unknown family `{s}` (expected one of mass-damping, linear2, linear4, linear6, nonlinear2, nonlinear4)"
            ),
        })
    }
}

/// One perturbation family with its small coefficients.
///
/// * `MassDamping`: `-ε₀ u`
/// * `Linear2`: `α₀u_xx - α₁u_xt + α₂u_tt`
/// * `Linear4`: `-β₀u_xxxx + β₁u_xxxt - β₂u_xxtt + β₃u_xttt - β₄u_tttt`
/// * `Linear6`: `γ₀u_6x - γ₁u_5x,t + … + γ₆u_6t` (alternating signs)
/// * `Nonlinear2`: `δ₁(n-1)n u_x² u^{n-2} + δ₂ n u_xx u^{n-1}`
/// * `Nonlinear4`: `η₁u_x⁴u^{n-4} + η₂u_x²u_xx u^{n-3} + η₃u_xx²u^{n-2} + η₄u_x u_xxx u^{n-2} + η₅u_xxxx u^{n-1}`
#[derive(Debug, Clone, PartialEq)]
pub enum PerturbationSpec {
    MassDamping { eps0: f64 },
    Linear2([f64; 3]),
    Linear4([f64; 5]),
    Linear6([f64; 7]),
    Nonlinear2([f64; 2]),
    Nonlinear4([f64; 5]),
}

impl PerturbationSpec {
    pub fn family(&self) -> Family {
        match self {
            PerturbationSpec::MassDamping { .. } => Family::MassDamping,
            PerturbationSpec::Linear2(_) => Family::Linear2,
            PerturbationSpec::Linear4(_) => Family::Linear4,
            PerturbationSpec::Linear6(_) => Family::Linear6,
            PerturbationSpec::Nonlinear2(_) => Family::Nonlinear2,
            PerturbationSpec::Nonlinear4(_) => Family::Nonlinear4,
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        match self {
            PerturbationSpec::MassDamping { eps0 } => std::slice::from_ref(eps0),
            PerturbationSpec::Linear2(a) => a,
            PerturbationSpec::Linear4(b) => b,
            PerturbationSpec::Linear6(g) => g,
            PerturbationSpec::Nonlinear2(d) => d,
            PerturbationSpec::Nonlinear4(e) => e,
        }
    }

    fn coefficients_mut(&mut self) -> &mut [f64] {
        match self {
            PerturbationSpec::MassDamping { eps0 } => std::slice::from_mut(eps0),
            PerturbationSpec::Linear2(a) => a,
            PerturbationSpec::Linear4(b) => b,
            PerturbationSpec::Linear6(g) => g,
            PerturbationSpec::Nonlinear2(d) => d,
            PerturbationSpec::Nonlinear4(e) => e,
        }
    }

    /// All-zero spec of the given family.
    pub fn zero(family: Family) -> Option<Self> {
        Some(match family {
            Family::Unperturbed => return None,
            Family::MassDamping => PerturbationSpec::MassDamping { eps0: 0.0 },
            Family::Linear2 => PerturbationSpec::Linear2([0.0; 3]),
            Family::Linear4 => PerturbationSpec::Linear4([0.0; 5]),
            Family::Linear6 => PerturbationSpec::Linear6([0.0; 7]),
            Family::Nonlinear2 => PerturbationSpec::Nonlinear2([0.0; 2]),
            Family::Nonlinear4 => PerturbationSpec::Nonlinear4([0.0; 5]),
        })
    }

    /// Build a spec from named coefficients; missing names default to zero.
    pub fn from_named(family: Family, named: &[(&str, f64)]) -> Result<Self> {
        let mut spec = PerturbationSpec::zero(family).ok_or(Error::InvalidParameter {
            name: "family",
            reason: "the unperturbed equation has no coefficients".into(),
        })?;
        let names = family.coefficient_names();
        for &(key, value) in named {
            let idx = names
                .iter()
                .position(|&k| k == key)
                .ok_or_else(|| Error::InvalidParameter {
                    name: "coefficient",
                    reason: format!("`{key}` is not a coefficient of family {family}"),
                })?;
            if !value.is_finite() {
                return Err(Error::NonFinite("perturbation coefficient"));
            }
            spec.coefficients_mut()[idx] = value;
        }
        Ok(spec)
    }

    /// Copy of `self` keeping only coefficient `idx`.
    pub fn single_term(&self, idx: usize) -> Self {
        let mut out = self.clone();
        for (i, v) in out.coefficients_mut().iter_mut().enumerate() {
            if i != idx {
                *v = 0.0;
            }
        }
        out
    }

    /// The `η (u^n)_xxxx` perturbation written in the `η₁…η₅` basis.
    pub fn nonlinear4_from_un_xxxx(n: f64, eta: f64) -> Self {
        PerturbationSpec::Nonlinear4([
            eta * (n - 3.0) * (n - 2.0) * (n - 1.0) * n,
            6.0 * eta * (n - 2.0) * (n - 1.0) * n,
            3.0 * eta * (n - 1.0) * n,
            4.0 * eta * (n - 1.0) * n,
            eta * n,
        ])
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients().iter().all(|&v| v == 0.0)
    }
}

fn horner_from_c(coefs: &[f64], c: f64) -> f64 {
    // Σ coefs[i] c^{i+1}
    coefs.iter().rev().fold(0.0, |acc, &k| acc * c + k) * c
}

/// `dc/dt = -ε₀(n-1)c`.
pub fn rhs_mass_damping(n: f64, eps0: f64, c: f64) -> f64 {
    -eps0 * (n - 1.0) * c
}

pub fn linear2_rate(n: f64) -> f64 {
    -(n - 1.0).powi(2) / (n * (n + 3.0))
}

/// `dc/dt = -(n-1)²/(n(n+3)) · (α₀c + α₁c² + α₂c³)`.
pub fn rhs_linear2(n: f64, alpha: &[f64; 3], c: f64) -> f64 {
    linear2_rate(n) * horner_from_c(alpha, c)
}

pub fn linear4_rate(n: f64) -> f64 {
    -(n - 1.0).powi(3) * ((n - 3.0) * n - 1.0) / ((n - 5.0) * n.powi(3) * (n + 3.0))
}

/// `dc/dt = -(n-1)³((n-3)n-1)/((n-5)n³(n+3)) · Σ β_i c^{i+1}`.
pub fn rhs_linear4(n: f64, beta: &[f64; 5], c: f64) -> f64 {
    linear4_rate(n) * horner_from_c(beta, c)
}

pub fn linear6_rate(n: f64) -> f64 {
    let poly = (((3.0 * n - 13.0) * n + 7.0) * n + 13.0) * n + 5.0;
    -(n - 1.0).powi(4) * poly / ((n - 5.0) * n.powi(5) * (n + 3.0) * (3.0 * n - 7.0))
}

/// Sixth-order family; only defined for `1 < n < 7/3`.
pub fn rhs_linear6(n: f64, gamma: &[f64; 7], c: f64) -> Result<f64> {
    validate_exponent(n, Family::Linear6).into_result(n)?;
    Ok(linear6_rate(n) * horner_from_c(gamma, c))
}

/// `dc/dt = (δ₁(n-1) + δ₂(1-2n)) (n-1)²/(2n(n+1)) c²`.
pub fn rhs_nonlinear2(n: f64, delta: &[f64; 2], c: f64) -> f64 {
    (delta[0] * (n - 1.0) + delta[1] * (1.0 - 2.0 * n)) * (n - 1.0).powi(2) / (2.0 * n * (n + 1.0)) * c * c
}

/// Reduced form for `δ₁ = δ₂ = δ`, i.e. the perturbation `δ (u^n)_xx`.
pub fn rhs_nonlinear2_reduced(n: f64, delta: f64, c: f64) -> f64 {
    -delta * (n - 1.0).powi(2) / (2.0 * (n + 1.0)) * c * c
}

pub fn rhs_nonlinear4(n: f64, eta: &[f64; 5], c: f64) -> f64 {
    let q = 2.0 * n * n - 8.0 * n + 3.0;
    let bracket = 3.0 * eta[0] - eta[1] * (2.0 * n - 3.0) + eta[2] * (2.0 * n * n - 2.0 * n + 3.0) + eta[3] * q
        - eta[4] * (2.0 * n - 1.0) * q;
    (n - 1.0).powi(3) * c * c / (2.0 * n.powi(4) * (n + 1.0) * (n + 3.0)) * bracket
}

/// Reduced form for the perturbation `η (u^n)_xxxx`.
pub fn rhs_nonlinear4_reduced(n: f64, eta: f64, c: f64) -> f64 {
    eta * (n - 1.0).powi(3) * (2.0 + n) * c * c / (2.0 * n * (n + 1.0) * (n + 3.0))
}

/// Closed-form `dc/dt` for any family, rejecting exponents outside its window.
pub fn closed_form_rhs(n: f64, spec: &PerturbationSpec, c: f64) -> Result<f64> {
    validate_exponent(n, spec.family()).into_result(n)?;
    Ok(closed_form_rhs_unchecked(n, spec, c))
}

pub(crate) fn closed_form_rhs_unchecked(n: f64, spec: &PerturbationSpec, c: f64) -> f64 {
    match spec {
        PerturbationSpec::MassDamping { eps0 } => rhs_mass_damping(n, *eps0, c),
        PerturbationSpec::Linear2(a) => rhs_linear2(n, a, c),
        PerturbationSpec::Linear4(b) => rhs_linear4(n, b, c),
        PerturbationSpec::Linear6(g) => linear6_rate(n) * horner_from_c(g, c),
        PerturbationSpec::Nonlinear2(d) => rhs_nonlinear2(n, d, c),
        PerturbationSpec::Nonlinear4(e) => rhs_nonlinear4(n, e, c),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dissipativity {
    /// dc/dt < 0 for every c > 0.
    Dissipative,
    /// dc/dt > 0 for every c > 0.
    Amplifying,
    /// The term has no effect on c at this n.
    Neutral,
    /// Active terms pull c in opposite directions.
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermVerdict {
    pub name: &'static str,
    pub coefficient: f64,
    pub verdict: Dissipativity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DissipativityReport {
    pub terms: Vec<TermVerdict>,
    pub overall: Dissipativity,
}

impl DissipativityReport {
    pub fn term(&self, name: &str) -> Option<Dissipativity> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.verdict)
    }
}

fn sign_verdict(rate: f64, scale: f64) -> Dissipativity {
    if rate.abs() <= 1e-13 * scale {
        Dissipativity::Neutral
    } else if rate < 0.0 {
        Dissipativity::Dissipative
    } else {
        Dissipativity::Amplifying
    }
}

/// Classify every nonzero coefficient by the sign of the velocity drift it
/// induces on its own, plus an overall verdict for the composite spec.
///
/// Every term is a positive power of `c` times a coefficient depending only on
/// `n`, so the sign at `c = 1` decides the sign for all `c > 0`.
pub fn is_dissipative(n: f64, spec: &PerturbationSpec) -> Result<DissipativityReport> {
    let verdict = validate_exponent(n, spec.family());
    if let ExponentVerdict::Invalid(bound) = verdict {
        return Err(Error::InvalidExponent { n, bound });
    }
    let names = spec.family().coefficient_names();
    let mut terms = Vec::new();
    for (idx, (&name, &coef)) in names.iter().zip(spec.coefficients()).enumerate() {
        if coef == 0.0 {
            continue;
        }
        let rate = closed_form_rhs_unchecked(n, &spec.single_term(idx), 1.0);
        terms.push(TermVerdict {
            name,
            coefficient: coef,
            verdict: sign_verdict(rate, coef.abs()),
        });
    }
    let any = |d: Dissipativity| terms.iter().any(|t| t.verdict == d);
    let overall = if any(Dissipativity::Dissipative) && any(Dissipativity::Amplifying) {
        Dissipativity::Mixed
    } else {
        let scale = spec.coefficients().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        sign_verdict(closed_form_rhs_unchecked(n, spec, 1.0), scale)
    };
    Ok(DissipativityReport { terms, overall })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compacton::ExponentBound;
    use approx::assert_relative_eq;

    #[test]
    fn mass_damping_values() {
        assert_relative_eq!(rhs_mass_damping(2.0, 0.001, 1.0), -0.001);
        assert_eq!(rhs_mass_damping(2.0, 0.0, 1.0), 0.0);
    }

    #[test]
    fn linear2_values() {
        assert_relative_eq!(rhs_linear2(2.0, &[1.0, 0.0, 0.0], 1.0), -0.1, max_relative = 1e-15);
        assert_relative_eq!(rhs_linear2(2.0, &[0.0, 1.0, 0.0], 2.0), -0.4, max_relative = 1e-15);
        assert!(rhs_linear2(1.7, &[0.3, 0.2, 0.1], 1e-300).abs() < 1e-299);
    }

    #[test]
    fn linear4_values() {
        assert_relative_eq!(
            rhs_linear4(2.0, &[1.0, 0.0, 0.0, 0.0, 0.0], 1.0),
            -0.025,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            rhs_linear4(2.0, &[0.001, 0.0, 0.0, 0.0, 0.0], 1.0),
            -2.5e-5,
            max_relative = 1e-15
        );
        assert_eq!(rhs_linear4(2.0, &[0.0; 5], 1.0), 0.0);
    }

    #[test]
    fn linear6_values_and_window() {
        let mut g = [0.0; 7];
        g[0] = 1.0;
        assert_relative_eq!(rhs_linear6(2.0, &g, 1.0).unwrap(), -1.0 / 160.0, max_relative = 1e-15);
        assert_eq!(rhs_linear6(2.0, &[0.0; 7], 1.0).unwrap(), 0.0);
        assert!(matches!(
            rhs_linear6(7.0 / 3.0, &g, 1.0),
            Err(Error::InvalidExponent {
                bound: ExponentBound::BelowSevenThirds,
                ..
            })
        ));
        assert!(rhs_linear6(2.5, &g, 1.0).is_err());
    }

    #[test]
    fn nonlinear2_values() {
        assert_relative_eq!(rhs_nonlinear2(2.0, &[1.0, 1.0], 1.0), -1.0 / 6.0, max_relative = 1e-15);
        assert_relative_eq!(rhs_nonlinear2(2.0, &[1.0, 0.0], 1.0), 1.0 / 12.0, max_relative = 1e-15);
        assert_eq!(rhs_nonlinear2(1.6, &[0.0, 0.0], 1.0), 0.0);
    }

    #[test]
    fn nonlinear4_values() {
        let spec = PerturbationSpec::nonlinear4_from_un_xxxx(2.0, 1.0);
        let PerturbationSpec::Nonlinear4(eta) = spec else {
            unreachable!()
        };
        assert_relative_eq!(rhs_nonlinear4(2.0, &eta, 1.0), 1.0 / 15.0, max_relative = 1e-14);
        assert_relative_eq!(
            rhs_nonlinear4(2.0, &[0.0, 0.0, 0.0, 1.0, 0.0], 1.0),
            -5.0 / 480.0,
            max_relative = 1e-15
        );
        assert_eq!(rhs_nonlinear4(2.0, &[0.0; 5], 1.0), 0.0);
    }

    #[test]
    fn homogeneity_in_c() {
        for (idx, power) in (0..5).map(|i| (i, i as i32 + 1)) {
            let mut b = [0.0; 5];
            b[idx] = 0.7;
            let r1 = rhs_linear4(1.8, &b, 1.3);
            let r2 = rhs_linear4(1.8, &b, 2.6);
            assert_relative_eq!(r2 / r1, 2f64.powi(power), max_relative = 1e-13);
        }
    }

    #[test]
    fn dissipativity_single_terms() {
        let n = 1.75;
        let r = is_dissipative(n, &PerturbationSpec::Nonlinear2([-0.01, 0.0])).unwrap();
        assert_eq!(r.overall, Dissipativity::Dissipative);
        // δ₂ alone: the induced drift is δ₂(1-2n)·(positive), so only δ₂ > 0 dissipates.
        let r = is_dissipative(n, &PerturbationSpec::Nonlinear2([0.0, -0.01])).unwrap();
        assert_eq!(r.overall, Dissipativity::Amplifying);
        let r = is_dissipative(n, &PerturbationSpec::Nonlinear2([0.0, 0.01])).unwrap();
        assert_eq!(r.overall, Dissipativity::Dissipative);
        let r = is_dissipative(2.0, &PerturbationSpec::Nonlinear4([0.0, 0.0, 0.0, 0.01, 0.0])).unwrap();
        assert_eq!(r.overall, Dissipativity::Dissipative);
    }

    #[test]
    fn dissipativity_neutral_and_mixed() {
        let r = is_dissipative(1.5, &PerturbationSpec::Nonlinear4([0.0, 1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(r.term("eta2"), Some(Dissipativity::Neutral));
        let r = is_dissipative(2.0, &PerturbationSpec::Nonlinear4([-1.0, 0.0, 0.0, -1.0, 0.0])).unwrap();
        assert_eq!(r.term("eta1"), Some(Dissipativity::Dissipative));
        assert_eq!(r.term("eta4"), Some(Dissipativity::Amplifying));
        assert_eq!(r.overall, Dissipativity::Mixed);
        assert!(is_dissipative(2.5, &PerturbationSpec::Linear6([1.0; 7])).is_err());
        let r = is_dissipative(2.0, &PerturbationSpec::Linear4([0.0; 5])).unwrap();
        assert!(r.terms.is_empty());
        assert_eq!(r.overall, Dissipativity::Neutral);
    }

    #[test]
    fn named_construction() {
        let s = PerturbationSpec::from_named(Family::Linear4, &[("beta0", 0.001)]).unwrap();
        assert_eq!(s, PerturbationSpec::Linear4([0.001, 0.0, 0.0, 0.0, 0.0]));
        assert!(PerturbationSpec::from_named(Family::Linear4, &[("alpha0", 1.0)]).is_err());
        assert_eq!("linear6".parse::<Family>().unwrap(), Family::Linear6);
        assert!("linear8".parse::<Family>().is_err());
    }
}
