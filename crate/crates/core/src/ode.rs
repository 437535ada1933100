//! Adaptive integration of the adiabatic velocity ODE.
//!
//! The state carried by the integrator is `(c, D)` with `D' = c`, so every
//! trajectory also knows the distance travelled, `D(t) = ∫₀ᵗ c dz`, to the
//! same tolerance as `c` itself.

use crate::compacton::validate_exponent;
use crate::error::{Error, Result};
use crate::perturbation::{closed_form_rhs_unchecked, linear2_rate, linear4_rate, linear6_rate, PerturbationSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Number of equal intervals between stored samples.
    pub intervals: usize,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            intervals: 200,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub c: f64,
    /// `∫₀ᵗ c dz`
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    VelocityVanished { t: f64 },
    NonFinite { t: f64 },
    StepSizeUnderflow { t: f64 },
    MaxSteps { t: f64 },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityTrajectory {
    pub n: f64,
    pub spec: PerturbationSpec,
    pub samples: Vec<TrajectorySample>,
    pub rtol: f64,
    pub atol: f64,
    pub stats: StepStats,
    pub truncated: Option<Truncation>,
}

impl VelocityTrajectory {
    pub fn t_end(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    pub fn c_initial(&self) -> f64 {
        self.samples[0].c
    }

    pub fn c_final(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.c)
    }

    /// `dc/dt` at velocity `c`.
    pub fn rate(&self, c: f64) -> f64 {
        closed_form_rhs_unchecked(self.n, &self.spec, c)
    }

    fn bracket(&self, t: f64) -> Result<(usize, f64)> {
        let t0 = self.samples[0].t;
        let t1 = self.t_end();
        if !(t >= t0 && t <= t1) {
            return Err(Error::Extrapolation {
                t,
                t_min: t0,
                t_max: t1,
            });
        }
        let i = self.samples.partition_point(|s| s.t <= t).saturating_sub(1);
        let i = i.min(self.samples.len().saturating_sub(2));
        Ok((i, t))
    }

    /// Cubic Hermite interpolation using the exact derivative at both ends.
    fn hermite(
        &self,
        t: f64,
        value: impl Fn(&TrajectorySample) -> f64,
        slope: impl Fn(&TrajectorySample) -> f64,
    ) -> Result<f64> {
        if self.samples.len() == 1 {
            return if t == self.samples[0].t {
                Ok(value(&self.samples[0]))
            } else {
                Err(Error::Extrapolation {
                    t,
                    t_min: self.samples[0].t,
                    t_max: self.samples[0].t,
                })
            };
        }
        let (i, t) = self.bracket(t)?;
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        let h = b.t - a.t;
        let s = (t - a.t) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        Ok(h00 * value(a) + h10 * h * slope(a) + h01 * value(b) + h11 * h * slope(b))
    }

    pub fn velocity_at(&self, t: f64) -> Result<f64> {
        self.hermite(t, |s| s.c, |s| self.rate(s.c))
    }

    pub fn distance_at(&self, t: f64) -> Result<f64> {
        self.hermite(t, |s| s.distance, |s| s.c)
    }

    /// `dc/dt` along the trajectory.
    pub fn acceleration_at(&self, t: f64) -> Result<f64> {
        Ok(self.rate(self.velocity_at(t)?))
    }
}

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b̂
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type State = [f64; 2];

fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (coef, k) in terms {
        for i in 0..2 {
            out[i] += h * coef * k[i];
        }
    }
    out
}

struct Dopri<'a, F: Fn(&State) -> State> {
    f: &'a F,
    rtol: f64,
    atol: f64,
    stats: StepStats,
}

impl<F: Fn(&State) -> State> Dopri<'_, F> {
    fn eval(&mut self, y: &State) -> State {
        self.stats.rhs_evaluations += 1;
        (self.f)(y)
    }

    /// One trial step with first-same-as-last; returns (y_new, k7, error norm).
    fn trial(&mut self, y: &State, k1: &State, h: f64) -> (State, State, f64) {
        let k2 = self.eval(&axpy(y, &[(A21, k1)], h));
        let k3 = self.eval(&axpy(y, &[(A31, k1), (A32, &k2)], h));
        let k4 = self.eval(&axpy(y, &[(A41, k1), (A42, &k2), (A43, &k3)], h));
        let k5 = self.eval(&axpy(y, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)], h));
        let k6 = self.eval(&axpy(
            y,
            &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            h,
        ));
        let y_new = axpy(y, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
        let k7 = self.eval(&y_new);
        let mut err2 = 0.0;
        for i in 0..2 {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
            err2 += (e / sc).powi(2);
        }
        (y_new, k7, (err2 / 2.0).sqrt())
    }
}

/// Integrate `dc/dt = f(c)` from `c0`, storing samples at `times` (strictly
/// increasing, starting at 0).
pub fn solve_velocity_ode_at(
    n: f64,
    spec: &PerturbationSpec,
    c0: f64,
    times: &[f64],
    opts: &OdeOptions,
) -> Result<VelocityTrajectory> {
    validate_exponent(n, spec.family()).into_result(n)?;
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(Error::InvalidVelocity(c0));
    }
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: "tolerances must be positive".into(),
        });
    }
    if times.first() != Some(&0.0) || times.windows(2).any(|w| !(w[1] > w[0])) || times.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "times",
            reason: "sample times must start at 0 and increase strictly".into(),
        });
    }

    let rhs = |y: &State| [closed_form_rhs_unchecked(n, spec, y[0]), y[0]];
    let mut dp = Dopri {
        f: &rhs,
        rtol: opts.rtol,
        atol: opts.atol,
        stats: StepStats::default(),
    };

    let mut y: State = [c0, 0.0];
    let mut t = 0.0;
    let mut k1 = dp.eval(&y);
    let mut samples = vec![TrajectorySample {
        t,
        c: c0,
        distance: 0.0,
    }];
    let mut truncated = None;

    // Initial step from the scale of the solution and its slope.
    let sc0 = opts.atol + opts.rtol * y[0].abs();
    let d0 = y[0] / sc0;
    let d1 = k1[0].abs() / sc0;
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(times[times.len() - 1]);

    let mut next = 1;
    'outer: while next < times.len() {
        let target = times[next];
        loop {
            if dp.stats.accepted + dp.stats.rejected >= opts.max_steps {
                truncated = Some(Truncation::MaxSteps { t });
                break 'outer;
            }
            let remaining = target - t;
            let step = h.min(remaining);
            let lands = step >= remaining;
            let (y_new, k7, err) = dp.trial(&y, &k1, step);
            if !err.is_finite() || !y_new.iter().all(|v| v.is_finite()) {
                if step < 1e-14 * t.abs().max(1.0) {
                    truncated = Some(Truncation::NonFinite { t });
                    break 'outer;
                }
                dp.stats.rejected += 1;
                h = step * 0.2;
                continue;
            }
            if err <= 1.0 {
                dp.stats.accepted += 1;
                t = if lands { target } else { t + step };
                y = y_new;
                k1 = k7;
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                // Do not let a short landing step shrink the controller's step.
                h = if lands { h.max(step * factor) } else { step * factor };
                if !(y[0] > 0.0) {
                    truncated = Some(Truncation::VelocityVanished { t });
                    break 'outer;
                }
                if lands {
                    break;
                }
            } else {
                dp.stats.rejected += 1;
                h = step * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                if h < 1e-14 * t.abs().max(1.0) {
                    truncated = Some(Truncation::StepSizeUnderflow { t });
                    break 'outer;
                }
            }
        }
        samples.push(TrajectorySample {
            t,
            c: y[0],
            distance: y[1],
        });
        next += 1;
    }

    Ok(VelocityTrajectory {
        n,
        spec: spec.clone(),
        samples,
        rtol: opts.rtol,
        atol: opts.atol,
        stats: dp.stats,
        truncated,
    })
}

/// Integrate to `t_end` with `opts.intervals` equal sample intervals.
pub fn solve_velocity_ode(
    n: f64,
    spec: &PerturbationSpec,
    c0: f64,
    t_end: f64,
    opts: &OdeOptions,
) -> Result<VelocityTrajectory> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t_end",
            reason: format!("must be positive, got {t_end}"),
        });
    }
    let m = opts.intervals.max(1);
    let times: Vec<f64> = (0..=m).map(|i| t_end * i as f64 / m as f64).collect();
    solve_velocity_ode_at(n, spec, c0, &times, opts)
}

/// Exact `c(t)` where the ODE has an elementary solution: `c' = k c^p` (mass
/// damping, any nonlinear spec, any single linear term) and the second-order
/// family with `α₂ = 0` (Bernoulli). Returns `None` otherwise.
pub fn analytic_velocity(n: f64, spec: &PerturbationSpec, c0: f64, t: f64) -> Option<f64> {
    let coefs = spec.coefficients();
    let active: Vec<usize> = (0..coefs.len()).filter(|&i| coefs[i] != 0.0).collect();
    if active.is_empty() {
        return Some(c0);
    }
    let (k, p) = match spec {
        PerturbationSpec::MassDamping { eps0 } => (-eps0 * (n - 1.0), 1),
        PerturbationSpec::Nonlinear2(_) | PerturbationSpec::Nonlinear4(_) => {
            (closed_form_rhs_unchecked(n, spec, 1.0), 2)
        }
        PerturbationSpec::Linear2([a0, a1, 0.0]) if active.len() == 2 => {
            let a = linear2_rate(n) * a0;
            let r = a1 / a0;
            return Some(1.0 / ((1.0 / c0 + r) * (-a * t).exp() - r));
        }
        _ if active.len() != 1 => return None,
        PerturbationSpec::Linear2(a) => (linear2_rate(n) * a[active[0]], active[0] as i32 + 1),
        PerturbationSpec::Linear4(b) => (linear4_rate(n) * b[active[0]], active[0] as i32 + 1),
        PerturbationSpec::Linear6(g) => (linear6_rate(n) * g[active[0]], active[0] as i32 + 1),
    };
    Some(if p == 1 {
        c0 * (k * t).exp()
    } else {
        let q = 1.0 - p as f64;
        (c0.powf(q) + q * k * t).powf(1.0 / q)
    })
}
