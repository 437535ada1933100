//! Closed-form compacton of the K(n,n) equation and its exact integrals.
//!
//! A compacton travelling at velocity `c` is
//!
//! ```text
//! u_c(ξ) = { 2nc/(n+1) · cos²((n-1)ξ/(2n)) }^{1/(n-1)},   |ξ| ≤ nπ/(n-1)
//! ```
//!
//! and exactly zero outside that support, with `ξ = x - c t`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::grid::GridField;
use crate::perturbation::Family;
use crate::special::gamma_ratio;

/// Bound violated by a rejected exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentBound {
    /// n must exceed 1.
    AboveOne,
    /// n must be below 3 (n = 3 itself is the limiting case).
    AtMostThree,
    /// Sixth-order dissipation needs n < 7/3 for the balance integral to be finite.
    BelowSevenThirds,
    NotFinite,
}

impl fmt::Display for ExponentBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExponentBound::AboveOne => write!(f, "requires n > 1"),
            ExponentBound::AtMostThree => write!(f, "requires n < 3 (n = 3 accepted only as the limiting case)"),
            ExponentBound::BelowSevenThirds => write!(
                f,
                "requires n < 7/3 for sixth-order dissipation (momentum-balance integral does not converge)"
            ),
            ExponentBound::NotFinite => write!(f, "n is not finite"),
        }
    }
}

/// Verdict of [`validate_exponent`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentVerdict {
    Valid,
    /// n = 3: the ansatz is no longer a classical solution but is still usable.
    Limiting,
    Invalid(ExponentBound),
}

impl ExponentVerdict {
    pub fn is_usable(self) -> bool {
        !matches!(self, ExponentVerdict::Invalid(_))
    }

    pub fn into_result(self, n: f64) -> Result<Self> {
        match self {
            ExponentVerdict::Invalid(bound) => Err(Error::InvalidExponent { n, bound }),
            v => Ok(v),
        }
    }
}

pub const SEVEN_THIRDS: f64 = 7.0 / 3.0;

/// Classify `n` against the validity window of `family`.
pub fn validate_exponent(n: f64, family: Family) -> ExponentVerdict {
    if !n.is_finite() {
        return ExponentVerdict::Invalid(ExponentBound::NotFinite);
    }
    if n <= 1.0 {
        return ExponentVerdict::Invalid(ExponentBound::AboveOne);
    }
    if family == Family::Linear6 && n >= SEVEN_THIRDS {
        return ExponentVerdict::Invalid(ExponentBound::BelowSevenThirds);
    }
    if n == 3.0 {
        return ExponentVerdict::Limiting;
    }
    if n > 3.0 {
        return ExponentVerdict::Invalid(ExponentBound::AtMostThree);
    }
    ExponentVerdict::Valid
}

/// Half-width `nπ/(n-1)` of the compacton support in the travelling coordinate.
pub fn support_halfwidth(n: f64) -> f64 {
    n * PI / (n - 1.0)
}

/// Exponent and velocity of one travelling compacton.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompactonParams {
    n: f64,
    c: f64,
    limiting: bool,
}

impl CompactonParams {
    pub fn new(n: f64, c: f64) -> Result<Self> {
        let verdict = validate_exponent(n, Family::Unperturbed).into_result(n)?;
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidVelocity(c));
        }
        Ok(CompactonParams {
            n,
            c,
            limiting: verdict == ExponentVerdict::Limiting,
        })
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Set for n = 3, where the profile is only a weak solution.
    pub fn is_limiting(&self) -> bool {
        self.limiting
    }

    pub fn with_velocity(&self, c: f64) -> Result<Self> {
        CompactonParams::new(self.n, c)
    }

    pub fn support(&self, center: f64) -> SupportInterval {
        SupportInterval {
            center,
            halfwidth: support_halfwidth(self.n),
        }
    }

    pub fn amplitude(&self) -> f64 {
        compacton_amplitude(self)
    }

    pub fn eval(&self, xi: f64) -> f64 {
        eval_compacton(self, xi)
    }

    pub fn mass(&self) -> f64 {
        mass_unchecked(self.n, self.c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportInterval {
    pub center: f64,
    pub halfwidth: f64,
}

impl SupportInterval {
    pub fn lo(&self) -> f64 {
        self.center - self.halfwidth
    }

    pub fn hi(&self) -> f64 {
        self.center + self.halfwidth
    }

    pub fn contains(&self, x: f64) -> bool {
        (x - self.center).abs() <= self.halfwidth
    }
}

/// Profile value at travelling coordinate `xi`; exactly zero on and outside the support edge.
pub fn eval_compacton(p: &CompactonParams, xi: f64) -> f64 {
    let n = p.n;
    let hw = support_halfwidth(n);
    let dist = hw - xi.abs();
    if dist <= 0.0 || !dist.is_finite() {
        return 0.0;
    }
    // cos((n-1)ξ/(2n)) written as sin of the angular distance to the edge,
    // which stays accurate where the profile vanishes.
    let s = ((n - 1.0) / (2.0 * n) * dist).sin();
    let base = 2.0 * n * p.c / (n + 1.0) * s * s;
    if base <= 0.0 {
        return 0.0;
    }
    (base.ln() / (n - 1.0)).exp()
}

/// Peak value `(2nc/(n+1))^{1/(n-1)}`.
pub fn compacton_amplitude(p: &CompactonParams) -> f64 {
    (2.0 * p.n * p.c / (p.n + 1.0)).powf(1.0 / (p.n - 1.0))
}

fn check_mass_domain(n: f64, c: f64) -> Result<()> {
    if !n.is_finite() || n <= 1.0 {
        return Err(Error::InvalidExponent {
            n,
            bound: ExponentBound::AboveOne,
        });
    }
    if n > 3.0 {
        return Err(Error::InvalidExponent {
            n,
            bound: ExponentBound::AtMostThree,
        });
    }
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::InvalidVelocity(c));
    }
    Ok(())
}

/// Prefactor `K(n)` with `M_c(c) = K(n) · c^{1/(n-1)}`.
pub fn mass_prefactor(n: f64) -> f64 {
    let p = 1.0 / (n - 1.0);
    let log_base = (n * 2f64.ln() + n.ln() - (n + 1.0).ln()) * p;
    n * PI.sqrt() * log_base.exp() * gamma_ratio(0.5 + p, p)
}

fn mass_unchecked(n: f64, c: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    let p = 1.0 / (n - 1.0);
    let log_k = n.ln() + 0.5 * PI.ln() + (n * 2f64.ln() + n.ln() - (n + 1.0).ln() + c.ln()) * p;
    log_k.exp() * gamma_ratio(0.5 + p, p)
}

/// Exact mass `∫ u_c dx` of a compacton with velocity `c`; valid for 1 < n ≤ 3.
pub fn compacton_mass(n: f64, c: f64) -> Result<f64> {
    check_mass_domain(n, c)?;
    Ok(mass_unchecked(n, c))
}

/// `dM_c/dc = K(n)/(n-1) · c^{(2-n)/(n-1)}`.
pub fn compacton_mass_dc(n: f64, c: f64) -> Result<f64> {
    check_mass_domain(n, c)?;
    if c == 0.0 {
        return Ok(if n < 2.0 {
            0.0
        } else if n == 2.0 {
            mass_prefactor(n)
        } else {
            f64::INFINITY
        });
    }
    Ok(mass_unchecked(n, c) / ((n - 1.0) * c))
}

fn check_momentum_domain(n: f64, c: f64) -> Result<()> {
    match validate_exponent(n, Family::Unperturbed) {
        ExponentVerdict::Valid => {}
        ExponentVerdict::Limiting => {
            return Err(Error::InvalidExponent {
                n,
                bound: ExponentBound::AtMostThree,
            })
        }
        ExponentVerdict::Invalid(bound) => return Err(Error::InvalidExponent { n, bound }),
    }
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::InvalidVelocity(c));
    }
    Ok(())
}

/// `∫ u_c^{n+1}/(n+1) dx`, the momentum density integral entering the balance law.
pub fn compacton_momentum_density_integral(n: f64, c: f64) -> Result<f64> {
    check_momentum_domain(n, c)?;
    if c == 0.0 {
        return Ok(0.0);
    }
    let q = 1.0 / (n - 1.0);
    let log_val = 0.5 * PI.ln() - (n + 1.0).ln() + 2.0 * n * q * (2.0 * n / (n + 1.0)).ln() + (n + 1.0) * q * c.ln();
    let ratio = gamma_ratio((3.0 * n + 1.0) * q / 2.0, (n + 1.0) * q);
    Ok(log_val.exp() * ratio)
}

/// Derivative in `c` of [`compacton_momentum_density_integral`].
pub fn compacton_momentum_density_integral_dc(n: f64, c: f64) -> Result<f64> {
    let i = compacton_momentum_density_integral(n, c)?;
    if c == 0.0 {
        return Ok(0.0);
    }
    Ok((n + 1.0) / (n - 1.0) * i / c)
}

/// Point samples of the compacton centred at `center` on a periodic grid of
/// the given length and spacing.
pub fn sample_compacton(p: &CompactonParams, length: f64, dx: f64, center: f64) -> Result<GridField> {
    let mut field = GridField::zeros(length, dx)?;
    let support = p.support(center);
    if support.lo() < 0.0 || support.hi() > length {
        return Err(Error::SupportTooWide {
            lo: support.lo(),
            hi: support.hi(),
            length,
        });
    }
    let dx = field.dx();
    for (j, u) in field.values_mut().iter_mut().enumerate() {
        *u = eval_compacton(p, j as f64 * dx - center);
    }
    Ok(field)
}
