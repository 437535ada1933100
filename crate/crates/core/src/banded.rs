//! Direct solver for cyclic pentadiagonal systems.
//!
//! The open band (half-bandwidth 2) is factored by LU with partial pivoting;
//! the four wrap-around rows are restored with a rank-4 Woodbury correction.

use crate::error::{Error, Result};
use crate::stencil::CyclicPenta;

const KL: usize = 2;
// Row storage covers columns r−2..=r+4: the band plus pivoting fill-in.
const WIDTH: usize = 7;

/// LU factors of a banded matrix with two sub- and two super-diagonals.
#[derive(Debug, Clone)]
struct BandLu {
    len: usize,
    rows: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandLu {
    #[inline]
    fn idx(r: usize, c: usize) -> usize {
        r * WIDTH + (c + KL - r)
    }

    fn factor(a: &CyclicPenta) -> Result<Self> {
        let len = a.len();
        let mut rows = vec![0.0; len * WIDTH];
        for r in 0..len {
            for o in 0..5 {
                let c = r as isize + o as isize - 2;
                if c >= 0 && (c as usize) < len {
                    rows[Self::idx(r, c as usize)] = a.bands[o][r];
                }
            }
        }
        let scale = rows.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut pivots = vec![0; len];
        for k in 0..len {
            let last = (k + KL).min(len - 1);
            let mut p = k;
            let mut best = rows[Self::idx(k, k)].abs();
            for r in k + 1..=last {
                let v = rows[Self::idx(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if !(best > f64::EPSILON * scale * 1e-3) || !best.is_finite() {
                return Err(Error::Singular(k));
            }
            pivots[k] = p;
            let cmax = (k + 4).min(len - 1);
            if p != k {
                for c in k..=cmax {
                    rows.swap(Self::idx(k, c), Self::idx(p, c));
                }
            }
            let piv = rows[Self::idx(k, k)];
            for r in k + 1..=last {
                let l = rows[Self::idx(r, k)] / piv;
                rows[Self::idx(r, k)] = l;
                if l != 0.0 {
                    for c in k + 1..=cmax {
                        rows[Self::idx(r, c)] -= l * rows[Self::idx(k, c)];
                    }
                }
            }
        }
        Ok(BandLu { len, rows, pivots })
    }

    fn solve_in_place(&self, b: &mut [f64]) {
        let len = self.len;
        for k in 0..len {
            b.swap(k, self.pivots[k]);
            let bk = b[k];
            for r in k + 1..=(k + KL).min(len - 1) {
                b[r] -= self.rows[Self::idx(r, k)] * bk;
            }
        }
        for k in (0..len).rev() {
            let mut s = b[k];
            for c in k + 1..=(k + 4).min(len - 1) {
                s -= self.rows[Self::idx(k, c)] * b[c];
            }
            b[k] = s / self.rows[Self::idx(k, k)];
        }
    }
}

/// Factorisation of a [`CyclicPenta`] matrix, reusable for many right-hand sides.
#[derive(Debug, Clone)]
pub struct CyclicPentaLu {
    band: BandLu,
    /// Corner entries as `(row, col, value)`.
    corners: Vec<(usize, usize, f64)>,
    /// `Z = B⁻¹U`, one column per corner row.
    z: [Vec<f64>; 4],
    corner_rows: [usize; 4],
    /// LU of the 4×4 capacitance matrix `I + VᵀZ` with row pivots.
    cap: [[f64; 4]; 4],
    cap_piv: [usize; 4],
}

impl CyclicPentaLu {
    pub fn factor(a: &CyclicPenta) -> Result<Self> {
        let len = a.len();
        if len < 8 {
            return Err(Error::InvalidParameter {
                name: "len",
                reason: format!("cyclic solver needs at least 8 unknowns, got {len}"),
            });
        }
        let band = BandLu::factor(a)?;
        let corner_rows = [0, 1, len - 2, len - 1];
        let mut corners = Vec::with_capacity(6);
        for &r in &corner_rows {
            for o in 0..5 {
                let c = r as isize + o as isize - 2;
                if c < 0 || c >= len as isize {
                    corners.push((r, c.rem_euclid(len as isize) as usize, a.bands[o][r]));
                }
            }
        }
        let z = std::array::from_fn(|i| {
            let mut e = vec![0.0; len];
            e[corner_rows[i]] = 1.0;
            band.solve_in_place(&mut e);
            e
        });
        let mut cap = [[0.0; 4]; 4];
        for (i, &r) in corner_rows.iter().enumerate() {
            cap[i][i] = 1.0;
            for &(row, col, v) in &corners {
                if row == r {
                    for (j, zj) in z.iter().enumerate() {
                        cap[i][j] += v * zj[col];
                    }
                }
            }
        }
        let cap_piv = lu4(&mut cap)?;
        Ok(CyclicPentaLu {
            band,
            corners,
            z,
            corner_rows,
            cap,
            cap_piv,
        })
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        self.band.solve_in_place(b);
        // y = B⁻¹b; x = y − Z (I + VᵀZ)⁻¹ Vᵀ y
        let mut v = [0.0; 4];
        for (i, &r) in self.corner_rows.iter().enumerate() {
            for &(row, col, a) in &self.corners {
                if row == r {
                    v[i] += a * b[col];
                }
            }
        }
        solve4(&self.cap, &self.cap_piv, &mut v);
        for (zj, vj) in self.z.iter().zip(v) {
            if vj != 0.0 {
                for (bi, zi) in b.iter_mut().zip(zj) {
                    *bi -= vj * zi;
                }
            }
        }
    }
}

/// Solve `A x = b` for a cyclic pentadiagonal `A`.
pub fn solve_cyclic(a: &CyclicPenta, b: &[f64]) -> Result<Vec<f64>> {
    let lu = CyclicPentaLu::factor(a)?;
    let mut x = b.to_vec();
    lu.solve_in_place(&mut x);
    Ok(x)
}

fn lu4(m: &mut [[f64; 4]; 4]) -> Result<[usize; 4]> {
    let mut piv = [0; 4];
    for k in 0..4 {
        let p = (k..4).max_by(|&a, &b| m[a][k].abs().total_cmp(&m[b][k].abs())).unwrap();
        if !(m[p][k].abs() > 0.0) || !m[p][k].is_finite() {
            return Err(Error::Singular(k));
        }
        piv[k] = p;
        m.swap(k, p);
        for r in k + 1..4 {
            let l = m[r][k] / m[k][k];
            m[r][k] = l;
            for c in k + 1..4 {
                m[r][c] -= l * m[k][c];
            }
        }
    }
    Ok(piv)
}

fn solve4(m: &[[f64; 4]; 4], piv: &[usize; 4], b: &mut [f64; 4]) {
    for k in 0..4 {
        b.swap(k, piv[k]);
    }
    for k in 0..4 {
        for r in k + 1..4 {
            b[r] -= m[r][k] * b[k];
        }
    }
    for k in (0..4).rev() {
        let mut s = b[k];
        for c in k + 1..4 {
            s -= m[k][c] * b[c];
        }
        b[k] = s / m[k][k];
    }
}
