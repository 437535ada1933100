//! Tanh-sinh (double-exponential) quadrature with endpoint-distance abscissae.
//!
//! The substitution `x = a + (b-a)/2 · (1 + tanh(π/2 · sinh t))` clusters nodes
//! double-exponentially at both ends. The integrand receives the distances to
//! both endpoints, each computed without cancellation, so functions with
//! algebraic endpoint singularities can be evaluated accurately right down to
//! `min_distance`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct TanhSinh {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_levels: u32,
    /// Nodes closer than this to an endpoint are dropped.
    pub min_distance: f64,
    /// An outermost weighted sample larger than `tail_tol · |sum|` signal a
    /// non-integrable endpoint.
    pub tail_tol: f64,
}

impl Default for TanhSinh {
    fn default() -> Self {
        TanhSinh {
            abs_tol: 1e-12,
            rel_tol: 1e-13,
            max_levels: 10,
            min_distance: 1e-200,
            tail_tol: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub error: f64,
    pub levels: u32,
    pub evaluations: usize,
}

struct Node {
    left: f64,
    right: f64,
    weight: f64,
}

/// Node at parameter `t` on an interval of half-width `half`.
fn node(t: f64, half: f64) -> Node {
    let y = FRAC_PI_2 * t.sinh();
    let e = (-2.0 * y.abs()).exp();
    // 1 - tanh|y| = 2e/(1+e)
    let near = half * 2.0 * e / (1.0 + e);
    let far = 2.0 * half - near;
    let sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
    let weight = half * FRAC_PI_2 * t.cosh() * sech2;
    if t < 0.0 {
        Node {
            left: near,
            right: far,
            weight,
        }
    } else {
        Node {
            left: far,
            right: near,
            weight,
        }
    }
}

struct Sweep {
    sum: f64,
    tail: f64,
    evaluations: usize,
}

impl TanhSinh {
    /// Sum `w f` over nodes `t = k h`, `k = start, start + stride, …` and mirrored, walking
    /// outwards on both sides until nodes come within `min_distance` of an end.
    fn sweep<F>(&self, f: &F, half: f64, h: f64, start: i64, stride: i64) -> Result<Sweep>
    where
        F: Fn(f64, f64) -> f64,
    {
        let mut sum = 0.0;
        let mut tail = 0.0f64;
        let mut evaluations = 0;
        for dir in [1i64, -1] {
            let mut k = if dir > 0 { start } else { -1 };
            let mut outer = 0.0f64;
            loop {
                let t = k as f64 * h;
                let nd = node(t, half);
                if nd.left < self.min_distance || nd.right < self.min_distance || nd.weight == 0.0 {
                    break;
                }
                let v = f(nd.left, nd.right);
                evaluations += 1;
                let term = nd.weight * v;
                if !term.is_finite() {
                    return Err(Error::QuadratureDiverged {
                        estimate: sum,
                        reason: format!(
                            "non-finite integrand at distance {:e} from the endpoint",
                            nd.left.min(nd.right)
                        ),
                    });
                }
                sum += term;
                outer = term.abs();
                k += dir * stride;
            }
            tail = tail.max(outer);
        }
        Ok(Sweep { sum, tail, evaluations })
    }

    /// Integrate `f(x - a, b - x)` over `[a, b]`.
    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<QuadEstimate>
    where
        F: Fn(f64, f64) -> f64,
    {
        let half = 0.5 * (b - a);
        let mut h = 1.0;
        let first = self.sweep(&f, half, h, 0, 1)?;
        let mut evaluations = first.evaluations;
        let mut estimate = h * first.sum;
        let mut prev_diff = f64::INFINITY;
        for level in 1..=self.max_levels {
            h *= 0.5;
            let fresh = self.sweep(&f, half, h, 1, 2)?;
            evaluations += fresh.evaluations;
            let next = 0.5 * estimate + h * fresh.sum;
            let tail = h * fresh.tail;
            let diff = (next - estimate).abs();
            estimate = next;
            let scale = estimate.abs().max(self.abs_tol);
            if tail > self.tail_tol * scale {
                return Err(Error::QuadratureDiverged {
                    estimate,
                    reason: format!(
                        "endpoint contributions do not decay (outermost weighted sample {tail:e} vs estimate {estimate:e})"
                    ),
                });
            }
            if level >= 3 && diff <= self.abs_tol.max(self.rel_tol * estimate.abs()) {
                return Ok(QuadEstimate {
                    value: estimate,
                    error: diff,
                    levels: level,
                    evaluations,
                });
            }
            if level >= 4 && diff > 2.0 * prev_diff {
                return Err(Error::QuadratureDiverged {
                    estimate,
                    reason: format!("level-to-level change grew from {prev_diff:e} to {diff:e}"),
                });
            }
            prev_diff = diff;
        }
        Err(Error::QuadratureDiverged {
            estimate,
            reason: format!(
                "no convergence after {} levels (last change {prev_diff:e})",
                self.max_levels
            ),
        })
    }
}
