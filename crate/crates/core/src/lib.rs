//! Compactons of the K(n,n) Rosenau–Hyman equation under weak dissipation.
//!
//! * [`compacton`]: closed-form profile, support and exact integrals.
//! * [`perturbation`], [`oracle`], [`ode`]: adiabatic velocity dynamics for the
//!   dissipative families, an independent quadrature check of every closed
//!   form, and an adaptive integrator for `c(t)`.
//! * [`solver`]: conservative implicit-midpoint method of lines for the
//!   perturbed equation on a periodic grid.
//! * [`tail`]: compacton/tail split of simulated fields and adiabatic tail
//!   predictions; [`experiment`] runs both side by side.

pub mod banded;
pub mod checks;
pub mod compacton;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod export;
pub mod grid;
pub mod ode;
pub mod oracle;
pub mod perturbation;
pub mod quadrature;
pub mod solver;
pub mod special;
pub mod stencil;
pub mod tail;
pub mod trig;

pub use compacton::{
    compacton_amplitude, compacton_mass, compacton_momentum_density_integral, eval_compacton, sample_compacton,
    validate_exponent, CompactonParams, ExponentBound, ExponentVerdict, SupportInterval,
};
pub use error::{Error, Result};
pub use exec::Exec;
pub use grid::{discrete_mass, discrete_momentum, GridField};
pub use ode::{analytic_velocity, solve_velocity_ode, OdeOptions, VelocityTrajectory};
pub use oracle::{oracle_rhs, OracleEstimate};
pub use perturbation::{closed_form_rhs, is_dissipative, Dissipativity, Family, PerturbationSpec};
pub use solver::{run_simulation, spatial_rhs, step_implicit_midpoint, Snapshot, SolverConfig};
pub use stencil::signed_power;
pub use tail::{
    estimate_velocity, left_edge_position, tail_area_adiabatic, tail_area_numeric, tail_shape_adiabatic, TailRecord,
};
