use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Uniform abscissae `start + k·step`, `k = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridDomain {
    pub start: f64,
    pub step: f64,
    pub n: usize,
}

impl GridDomain {
    pub fn new(start: f64, step: f64, n: usize) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) || n < 2 || !start.is_finite() {
            return domain(format!("grid needs step > 0 and n >= 2 (start={start}, step={step}, n={n})"));
        }
        Ok(Self { start, step, n })
    }

    /// Symmetric grid on `[−half_width, half_width]` with the given step,
    /// which must divide `half_width`.
    pub fn symmetric(half_width: f64, step: f64) -> Result<Self> {
        let k = (half_width / step).round();
        if (k * step - half_width).abs() > 1e-9 * half_width {
            return domain("step must divide the half width");
        }
        Self::new(-half_width, step, 2 * k as usize + 1)
    }

    pub fn point(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.point(self.n - 1)
    }
}

/// A complex function sampled on a [`GridDomain`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub start: f64,
    pub step: f64,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(start: f64, step: f64, values: Vec<Complex64>) -> Result<Self> {
        GridDomain::new(start, step, values.len())?;
        Ok(Self {
            start,
            step,
            values,
        })
    }

    pub fn from_fn(dom: GridDomain, f: impl Fn(f64) -> Complex64 + Sync) -> Self {
        let values = (0..dom.n).into_par_iter().map(|k| f(dom.point(k))).collect();
        Self {
            start: dom.start,
            step: dom.step,
            values,
        }
    }

    pub fn domain(&self) -> GridDomain {
        GridDomain {
            start: self.start,
            step: self.step,
            n: self.values.len(),
        }
    }

    pub fn point(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    /// Linear interpolation; zero outside the sampled interval.
    pub fn interp(&self, x: f64) -> Complex64 {
        let u = (x - self.start) / self.step;
        let last = (self.values.len() - 1) as f64;
        if !(u >= -1e-9 && u <= last + 1e-9) {
            return Complex64::new(0.0, 0.0);
        }
        let u = u.clamp(0.0, last);
        let k = (u.floor() as usize).min(self.values.len() - 2);
        let f = u - k as f64;
        self.values[k] * (1.0 - f) + self.values[k + 1] * f
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// CSV with a comment header carrying `(start, step, n)` and columns
    /// `t,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# start={:e},step={:e},n={}\nt,re,im\n",
            self.start,
            self.step,
            self.values.len()
        );
        for (k, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{:e},{:e},{:e}\n", self.point(k), v.re, v.im));
        }
        out
    }
}

/// `∫_{−T}^{T} f(t) e^{−iτt} dt` by the trapezoid rule at `step`. For
/// band-limited `f` this is exact up to truncation at `±T` once
/// `2π/step` exceeds the band plus `|τ|`.
pub fn fourier_trapezoid(
    f: impl Fn(f64) -> f64 + Sync,
    tau: f64,
    half_width: f64,
    step: f64,
) -> Complex64 {
    let k = (half_width / step).round() as i64;
    let sum: Complex64 = (-k..=k)
        .into_par_iter()
        .map(|j| {
            let t = j as f64 * step;
            let w = if j.abs() == k { 0.5 } else { 1.0 };
            Complex64::from_polar(w * f(t), -tau * t)
        })
        .sum();
    sum * step
}
