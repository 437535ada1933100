use thiserror::Error;

use crate::compacton::ExponentBound;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("exponent n = {n} rejected: {bound}")]
    InvalidExponent { n: f64, bound: ExponentBound },

    #[error("velocity must be positive and finite, got {0}")]
    InvalidVelocity(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("compacton support [{lo}, {hi}] does not fit inside the periodic domain [0, {length})")]
    SupportTooWide { lo: f64, hi: f64, length: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("quadrature did not converge: {reason} (last estimate {estimate:e})")]
    QuadratureDiverged { estimate: f64, reason: String },

    #[error("newton iteration failed at step {step} after {iterations} iterations (residual {residual:e})")]
    NewtonFailed {
        step: usize,
        iterations: usize,
        residual: f64,
    },

    #[error("singular matrix in banded solve (pivot column {0})")]
    Singular(usize),

    #[error("blow-up at t = {t}: max |u| = {max_u:e} exceeds {limit:e}")]
    BlowUp { t: f64, max_u: f64, limit: f64 },

    #[error("velocity ordering violated: need 0 < c_now <= c_initial, got c_initial = {c_initial}, c_now = {c_now}")]
    Ordering { c_initial: f64, c_now: f64 },

    #[error("time {t} outside trajectory range [{t_min}, {t_max}]")]
    Extrapolation { t: f64, t_min: f64, t_max: f64 },

    #[error("field has no positive maximum")]
    EmptyField,
}
