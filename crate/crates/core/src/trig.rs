//! Exact derivatives of powers of cosine.
//!
//! A [`TrigSeries`] is `Σ_k a_k C^{b+k} + S · Σ_k s_k C^{b+k}` with `C = cos θ`,
//! `S = sin θ`, a real base exponent `b` and integer offsets `k`. Differentiation
//! and multiplication are closed over this form once `S²` is rewritten as
//! `1 - C²`, so every spatial derivative of the compacton profile stays exact.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct TrigSeries {
    base: f64,
    even: BTreeMap<i32, f64>,
    odd: BTreeMap<i32, f64>,
}

fn accumulate(map: &mut BTreeMap<i32, f64>, k: i32, v: f64) {
    if v != 0.0 {
        *map.entry(k).or_insert(0.0) += v;
    }
}

impl TrigSeries {
    /// `coef · C^base`.
    pub fn monomial(coef: f64, base: f64) -> Self {
        let mut even = BTreeMap::new();
        accumulate(&mut even, 0, coef);
        TrigSeries {
            base,
            even,
            odd: BTreeMap::new(),
        }
    }

    pub fn zero(base: f64) -> Self {
        TrigSeries {
            base,
            even: BTreeMap::new(),
            odd: BTreeMap::new(),
        }
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    /// Number of stored monomials.
    pub fn terms(&self) -> usize {
        self.even.len() + self.odd.len()
    }

    pub fn has_odd_part(&self) -> bool {
        self.odd.values().any(|&v| v != 0.0)
    }

    /// Smallest exponent of `C` with a nonzero coefficient in the even part.
    pub fn min_even_exponent(&self) -> Option<f64> {
        self.even
            .iter()
            .find(|(_, &v)| v != 0.0)
            .map(|(&k, _)| self.base + k as f64)
    }

    pub fn scale(mut self, s: f64) -> Self {
        for v in self.even.values_mut().chain(self.odd.values_mut()) {
            *v *= s;
        }
        self
    }

    /// d/dθ.
    pub fn derivative(&self) -> Self {
        let mut out = TrigSeries::zero(self.base);
        for (&k, &a) in &self.even {
            // d(C^p) = -p C^{p-1} S
            let p = self.base + k as f64;
            accumulate(&mut out.odd, k - 1, -p * a);
        }
        for (&k, &a) in &self.odd {
            // d(C^p S) = -p C^{p-1} S² + C^{p+1} = -p C^{p-1} + (p+1) C^{p+1}
            let p = self.base + k as f64;
            accumulate(&mut out.even, k - 1, -p * a);
            accumulate(&mut out.even, k + 1, (p + 1.0) * a);
        }
        out
    }

    pub fn add(&self, other: &TrigSeries) -> Self {
        assert!(
            (self.base - other.base).abs() <= 1e-12 * self.base.abs().max(1.0),
            "series bases differ: {} vs {}",
            self.base,
            other.base
        );
        let mut out = self.clone();
        for (&k, &v) in &other.even {
            accumulate(&mut out.even, k, v);
        }
        for (&k, &v) in &other.odd {
            accumulate(&mut out.odd, k, v);
        }
        out
    }

    pub fn mul(&self, other: &TrigSeries) -> Self {
        let mut out = TrigSeries::zero(self.base + other.base);
        for (&i, &a) in &self.even {
            for (&j, &b) in &other.even {
                accumulate(&mut out.even, i + j, a * b);
            }
            for (&j, &b) in &other.odd {
                accumulate(&mut out.odd, i + j, a * b);
            }
        }
        for (&i, &a) in &self.odd {
            for (&j, &b) in &other.even {
                accumulate(&mut out.odd, i + j, a * b);
            }
            for (&j, &b) in &other.odd {
                accumulate(&mut out.even, i + j, a * b);
                accumulate(&mut out.even, i + j + 2, -a * b);
            }
        }
        out
    }

    /// Evaluate with `cos θ` and `sin θ` supplied separately, so callers can
    /// compute whichever is small without cancellation.
    pub fn eval(&self, cos: f64, sin: f64) -> f64 {
        self.eval_even(cos) + sin * self.eval_part(&self.odd, cos)
    }

    /// Even part only; over a symmetric interval the odd part integrates to zero.
    pub fn eval_even(&self, cos: f64) -> f64 {
        self.eval_part(&self.even, cos)
    }

    fn eval_part(&self, part: &BTreeMap<i32, f64>, cos: f64) -> f64 {
        if cos <= 0.0 {
            return 0.0;
        }
        let lc = cos.ln();
        part.iter()
            .map(|(&k, &a)| a * ((self.base + k as f64) * lc).exp())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fd(f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let h = 1e-5;
        (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
    }

    #[test]
    fn derivative_of_cos_squared() {
        // d/dθ cos²θ = -2 cos θ sin θ, d²/dθ² = 2 - 4cos²θ
        let s = TrigSeries::monomial(1.0, 2.0);
        let d1 = s.derivative();
        let d2 = d1.derivative();
        for &t in &[0.1f64, 0.7, 1.3] {
            assert_relative_eq!(
                d1.eval(t.cos(), t.sin()),
                -2.0 * t.cos() * t.sin(),
                max_relative = 1e-14
            );
            assert_relative_eq!(
                d2.eval(t.cos(), t.sin()),
                2.0 - 4.0 * t.cos().powi(2),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn fractional_power_derivatives_match_finite_differences() {
        let p = 8.0 / 3.0;
        let mut s = TrigSeries::monomial(1.3, p);
        let mut f: Vec<Box<dyn Fn(f64) -> f64>> = vec![Box::new(move |t: f64| 1.3 * t.cos().powf(p))];
        for _ in 0..4 {
            let next = s.derivative();
            let prev_series = s.clone();
            f.push(Box::new(move |t: f64| fd(|x| prev_series.eval(x.cos(), x.sin()), t)));
            s = next;
            let last = f.last().unwrap();
            for &t in &[0.2f64, 0.9, 1.2] {
                assert_relative_eq!(s.eval(t.cos(), t.sin()), last(t), max_relative = 1e-7, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn product_reduces_sine_squared() {
        // (C S)(C S) = C² - C⁴
        let a = TrigSeries::monomial(1.0, 2.0).derivative().scale(-0.5);
        let sq = a.mul(&a);
        assert!(!sq.has_odd_part());
        for &t in &[0.3f64, 1.1] {
            let (c, s) = (t.cos(), t.sin());
            assert_relative_eq!(sq.eval(c, s), (c * s).powi(2), max_relative = 1e-14);
        }
    }
}
