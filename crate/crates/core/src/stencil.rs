//! Periodic finite-difference kernels for the perturbed K(n,n) operator
//!
//! `F(U) = c₀·D1U − D1W − D3W + α₀·D2U − β₀·D4U − ε₀·U`, `W = sgn(U)|U|ⁿ`,
//!
//! and its cyclic pentadiagonal Jacobian. Every stencil telescopes under
//! periodic summation, so `Σ F = −ε₀ Σ U` and every Jacobian column sums to
//! `−ε₀`.

use crate::exec::Exec;

/// `sign(u)·|u|^n`, exactly zero at the origin.
pub fn signed_power(u: f64, n: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u.signum() * u.abs().powf(n)
    }
}

/// `d/du signed_power(u, n) = n·|u|^{n−1}`.
pub fn signed_power_slope(u: f64, n: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        n * u.abs().powf(n - 1.0)
    }
}

/// Coefficients of the spatial operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialOperator {
    pub n: f64,
    pub c0: f64,
    pub alpha0: f64,
    pub beta0: f64,
    pub eps0: f64,
}

/// Stencil weights for offsets −2..=2: `(linear, flux)` where the linear part
/// acts on `U` and the flux part on `W`.
fn weights(op: &SpatialOperator, dx: f64) -> ([f64; 5], [f64; 5]) {
    let d1 = [0.0, -0.5, 0.0, 0.5, 0.0].map(|w| w / dx);
    let d2 = [0.0, 1.0, -2.0, 1.0, 0.0].map(|w| w / (dx * dx));
    let d3 = [-0.5, 1.0, 0.0, -1.0, 0.5].map(|w| w / (dx * dx * dx));
    let d4 = [1.0, -4.0, 6.0, -4.0, 1.0].map(|w| w / (dx * dx * dx * dx));
    let mut lin = [0.0; 5];
    let mut flux = [0.0; 5];
    for o in 0..5 {
        lin[o] = op.c0 * d1[o] + op.alpha0 * d2[o] - op.beta0 * d4[o];
        flux[o] = -(d1[o] + d3[o]);
    }
    lin[2] -= op.eps0;
    (lin, flux)
}

#[inline]
fn wrap(j: usize, o: usize, len: usize) -> usize {
    // o in 0..5 stands for offset o − 2
    (j + len + o - 2) % len
}

/// Evaluate `F(U)` into `out`. `u.len()` must be at least 5.
pub fn spatial_rhs_into(u: &[f64], dx: f64, op: &SpatialOperator, exec: Exec, w: &mut Vec<f64>, out: &mut [f64]) {
    let len = u.len();
    assert!(len >= 5 && out.len() == len);
    w.resize(len, 0.0);
    exec.fill(w, |j| signed_power(u[j], op.n));
    let (lin, flux) = weights(op, dx);
    let w = &*w;
    exec.fill(out, |j| {
        if (2..len - 2).contains(&j) {
            let mut s = 0.0;
            for o in 0..5 {
                s += lin[o] * u[j + o - 2] + flux[o] * w[j + o - 2];
            }
            s
        } else {
            let mut s = 0.0;
            for o in 0..5 {
                let k = wrap(j, o, len);
                s += lin[o] * u[k] + flux[o] * w[k];
            }
            s
        }
    });
}

/// Allocating convenience wrapper around [`spatial_rhs_into`].
pub fn spatial_rhs_values(u: &[f64], dx: f64, op: &SpatialOperator, exec: Exec) -> Vec<f64> {
    let mut out = vec![0.0; u.len()];
    let mut w = Vec::new();
    spatial_rhs_into(u, dx, op, exec, &mut w, &mut out);
    out
}

/// Cyclic matrix with half-bandwidth 2: `bands[o][j] = A[j][(j + o − 2) mod N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicPenta {
    pub bands: [Vec<f64>; 5],
}

impl CyclicPenta {
    pub fn len(&self) -> usize {
        self.bands[2].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `A[j][k]`, zero outside the band.
    pub fn get(&self, j: usize, k: usize) -> f64 {
        let len = self.len();
        let o = (k + len + 2 - j) % len;
        if o < 5 {
            self.bands[o][j]
        } else {
            0.0
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let len = self.len();
        (0..len)
            .map(|j| (0..5).map(|o| self.bands[o][j] * x[wrap(j, o, len)]).sum())
            .collect()
    }
}

/// Jacobian of `scale_identity·I + scale_f·∂F/∂U` at `u`.
pub fn jacobian(
    u: &[f64],
    dx: f64,
    op: &SpatialOperator,
    scale_identity: f64,
    scale_f: f64,
    exec: Exec,
) -> CyclicPenta {
    let len = u.len();
    let mut slope = vec![0.0; len];
    exec.fill(&mut slope, |j| signed_power_slope(u[j], op.n));
    let (lin, flux) = weights(op, dx);
    let bands = std::array::from_fn(|o| {
        let mut b = vec![0.0; len];
        let diag = if o == 2 { scale_identity } else { 0.0 };
        exec.fill(&mut b, |j| diag + scale_f * (lin[o] + flux[o] * slope[wrap(j, o, len)]));
        b
    });
    CyclicPenta { bands }
}
