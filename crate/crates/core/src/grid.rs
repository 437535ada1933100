//! Uniform periodic grids and discrete integrals on them.

use crate::error::{Error, Result};
use crate::stencil::signed_power;

pub const MIN_POINTS: usize = 16;

/// Samples `u(x_j)` at `x_j = j·dx`, `j = 0..N`, on a periodic domain of length `N·dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    length: f64,
    dx: f64,
    values: Vec<f64>,
}

impl GridField {
    pub fn zeros(length: f64, dx: f64) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dx",
                reason: format!("spacing must be positive, got {dx}"),
            });
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "length",
                reason: format!("domain length must be positive, got {length}"),
            });
        }
        let points = (length / dx).round();
        if (points * dx - length).abs() > 1e-9 * length {
            return Err(Error::InvalidParameter {
                name: "length",
                reason: format!("length {length} is not a multiple of dx = {dx}"),
            });
        }
        let points = points as usize;
        if points < MIN_POINTS {
            return Err(Error::InvalidParameter {
                name: "length",
                reason: format!("grid needs at least {MIN_POINTS} points, got {points}"),
            });
        }
        Ok(GridField {
            length,
            dx,
            values: vec![0.0; points],
        })
    }

    pub fn from_values(length: f64, dx: f64, values: Vec<f64>) -> Result<Self> {
        let mut f = GridField::zeros(length, dx)?;
        if values.len() != f.values.len() {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: format!("expected {} samples, got {}", f.values.len(), values.len()),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("grid field"));
        }
        f.values = values;
        Ok(f)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn with_values(&self, values: Vec<f64>) -> GridField {
        assert_eq!(values.len(), self.values.len());
        GridField {
            length: self.length,
            dx: self.dx,
            values,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Linear interpolation at an arbitrary position, wrapped into the domain.
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.values.len();
        let s = x.rem_euclid(self.length) / self.dx;
        let j = (s.floor() as usize) % n;
        let w = s - s.floor();
        (1.0 - w) * self.values[j] + w * self.values[(j + 1) % n]
    }

    /// Location and height of the maximum, refined by a parabola through the
    /// discrete maximum and its two periodic neighbours.
    pub fn peak(&self) -> Option<Peak> {
        let n = self.values.len();
        let (j, &um) = self.values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
        if !(um > 0.0) {
            return None;
        }
        let ul = self.values[(j + n - 1) % n];
        let ur = self.values[(j + 1) % n];
        let curv = ul - 2.0 * um + ur;
        let (offset, height) = if curv < 0.0 {
            let d = 0.5 * (ul - ur) / curv;
            (d, um - 0.25 * (ul - ur) * d)
        } else {
            (0.0, um)
        };
        Some(Peak {
            index: j,
            x: ((j as f64 + offset) * self.dx).rem_euclid(self.length),
            value: height,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub x: f64,
    pub value: f64,
}

/// `Σ U_j Δx`.
pub fn discrete_mass(field: &GridField) -> f64 {
    field.values.iter().sum::<f64>() * field.dx
}

/// `Σ U_j^{n+1} Δx` with the sign-preserving power.
pub fn discrete_momentum(field: &GridField, n: f64) -> f64 {
    field.values.iter().map(|&u| signed_power(u, n + 1.0)).sum::<f64>() * field.dx
}
