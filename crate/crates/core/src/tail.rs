//! Compacton/tail split of simulated fields and the adiabatic tail predictions.
//!
//! Under a mass-conserving dissipative perturbation the compacton slows down,
//! loses mass `M_c(c)` and deposits it as a trailing tail:
//!
//! * tail area `A(t) = M_c(c(0)) − M_c(c(t))`,
//! * left edge `X(t) = X(0) + ∫₀ᵗ c dz`,
//! * tail height where the edge currently is, `u_T(X(t)) = (1/c)·dA/dt`.
//!
//! Because the tail is left at rest in the laboratory frame, the tail value
//! at a laboratory position `x = X(t')` keeps the value predicted at `t'`.

use crate::compacton::{compacton_mass, compacton_mass_dc, support_halfwidth};
use crate::error::{Error, Result};
use crate::grid::{discrete_mass, GridField};
use crate::ode::VelocityTrajectory;
use crate::perturbation::{closed_form_rhs_unchecked, PerturbationSpec};
use crate::solver::Snapshot;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityEstimate {
    pub c: f64,
    pub amplitude: f64,
    pub peak_x: f64,
}

/// Invert the amplitude relation `max u = (2nc/(n+1))^{1/(n−1)}` at the
/// parabolically refined maximum.
pub fn estimate_velocity(field: &GridField, n: f64) -> Result<VelocityEstimate> {
    let peak = field.peak().ok_or(Error::EmptyField)?;
    Ok(VelocityEstimate {
        c: (n + 1.0) / (2.0 * n) * peak.value.powf(n - 1.0),
        amplitude: peak.value,
        peak_x: peak.x,
    })
}

/// Mass shed by a compacton slowing from `c_initial` to `c_now`.
pub fn tail_area_adiabatic(n: f64, c_initial: f64, c_now: f64) -> Result<f64> {
    if !(c_now > 0.0 && c_now <= c_initial) {
        return Err(Error::Ordering { c_initial, c_now });
    }
    Ok(compacton_mass(n, c_initial)? - compacton_mass(n, c_now)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailArea {
    /// Total mass minus the mass of the compacton with the estimated velocity.
    pub mass_subtraction: f64,
    /// Field integrated outside the estimated compacton support.
    pub direct: f64,
    pub c_est: f64,
    /// `peak_x − nπ/(n−1)`, in grid coordinates.
    pub left_edge: f64,
}

pub fn tail_area_numeric(field: &GridField, n: f64) -> Result<TailArea> {
    let est = estimate_velocity(field, n)?;
    let hw = support_halfwidth(n);
    let length = field.length();
    let direct: f64 = (0..field.len())
        .filter(|&j| {
            let d = (field.x(j) - est.peak_x + 0.5 * length).rem_euclid(length) - 0.5 * length;
            d.abs() > hw
        })
        .map(|j| field.values()[j])
        .sum::<f64>()
        * field.dx();
    Ok(TailArea {
        mass_subtraction: discrete_mass(field) - compacton_mass(n, est.c)?,
        direct,
        c_est: est.c,
        left_edge: (est.peak_x - hw).rem_euclid(length),
    })
}

/// Left edge `X(t) = X(0) + ∫₀ᵗ c dz` in laboratory coordinates.
#[derive(Debug, Clone, Copy)]
pub struct LeftEdge<'a> {
    pub trajectory: &'a VelocityTrajectory,
    pub x0: f64,
}

pub fn left_edge_position(trajectory: &VelocityTrajectory, x0: f64) -> LeftEdge<'_> {
    LeftEdge { trajectory, x0 }
}

impl LeftEdge<'_> {
    pub fn at(&self, t: f64) -> Result<f64> {
        Ok(self.x0 + self.trajectory.distance_at(t)?)
    }

    /// The time at which the edge passed `x`; `None` if it has not yet
    /// reached `x` within the trajectory or `x` lies behind `X(0)`.
    pub fn time_at(&self, x: f64) -> Result<Option<f64>> {
        let (mut lo, mut hi) = (0.0, self.trajectory.t_end());
        let slack = 1e-12 * x.abs().max(1.0);
        if x < self.at(lo)? - slack || x > self.at(hi)? + slack {
            return Ok(None);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.at(mid)? < x {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-12 * hi.max(1.0) {
                break;
            }
        }
        Ok(Some(0.5 * (lo + hi)))
    }
}

/// `u_T = −M_c'(c)·c'/c` for velocity `c` under `spec`.
pub fn tail_amplitude_adiabatic(n: f64, spec: &PerturbationSpec, c: f64) -> Result<f64> {
    let rate = closed_form_rhs_unchecked(n, spec, c);
    Ok(-compacton_mass_dc(n, c)? * rate / c)
}

/// Predicted tail height at the moving left edge along a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct TailShape<'a> {
    pub n: f64,
    pub trajectory: &'a VelocityTrajectory,
}

pub fn tail_shape_adiabatic(n: f64, trajectory: &VelocityTrajectory) -> TailShape<'_> {
    TailShape { n, trajectory }
}

impl TailShape<'_> {
    pub fn at(&self, t: f64) -> Result<f64> {
        let c = self.trajectory.velocity_at(t)?;
        tail_amplitude_adiabatic(self.n, &self.trajectory.spec, c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailRecord {
    pub t: f64,
    pub c_est: f64,
    /// Tracked left edge, laboratory coordinates.
    pub x: f64,
    pub a_num: f64,
    pub a_direct: f64,
    pub a_adb: f64,
    pub ut_pred: f64,
    pub ut_meas: f64,
}

/// Compares snapshots of a run in a frame moving at `frame_speed` with the
/// adiabatic predictions of `trajectory`.
///
/// Tail heights are compared a distance `probe_offset` behind the tracked
/// edge, where the field is pure tail; the prediction used there is the
/// one made when the edge passed that point.
#[derive(Debug, Clone, Copy)]
pub struct TailProbe<'a> {
    pub edge: LeftEdge<'a>,
    pub shape: TailShape<'a>,
    pub frame_speed: f64,
    pub probe_offset: f64,
}

pub const DEFAULT_PROBE_OFFSET: f64 = 2.0;

impl<'a> TailProbe<'a> {
    pub fn new(n: f64, trajectory: &'a VelocityTrajectory, x0: f64, frame_speed: f64) -> Self {
        TailProbe {
            edge: left_edge_position(trajectory, x0),
            shape: tail_shape_adiabatic(n, trajectory),
            frame_speed,
            probe_offset: DEFAULT_PROBE_OFFSET,
        }
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.probe_offset = offset;
        self
    }

    fn n(&self) -> f64 {
        self.shape.n
    }

    /// Grid coordinate of laboratory position `x` at time `t`.
    pub fn to_grid(&self, field: &GridField, x: f64, t: f64) -> f64 {
        (x - self.frame_speed * t).rem_euclid(field.length())
    }

    /// Predicted tail height at laboratory position `x` (zero ahead of the
    /// edge's path or behind its start).
    pub fn predicted_at(&self, x: f64) -> Result<f64> {
        match self.edge.time_at(x)? {
            Some(t) => self.shape.at(t),
            None => Ok(0.0),
        }
    }

    pub fn record(&self, snap: &Snapshot) -> Result<TailRecord> {
        let t = snap.t;
        let n = self.n();
        let area = tail_area_numeric(&snap.field, n)?;
        let c_now = self.edge.trajectory.velocity_at(t)?;
        let c_start = self.edge.trajectory.c_initial();
        let a_adb = tail_area_adiabatic(n, c_start, c_now.min(c_start))?;
        let x = self.edge.at(t)?;
        let probe = x - self.probe_offset;
        let ut_meas = snap.field.interpolate(self.to_grid(&snap.field, probe, t));
        Ok(TailRecord {
            t,
            c_est: area.c_est,
            x,
            a_num: area.mass_subtraction,
            a_direct: area.direct,
            a_adb,
            ut_pred: self.predicted_at(probe)?,
            ut_meas,
        })
    }
}
