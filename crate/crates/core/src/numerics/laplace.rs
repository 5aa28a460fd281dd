//! Laplace integrals `∫_{t0}^∞ w(t) e^{−st} dt` along a rotated ray.
//!
//! For `Re s ≥ 0, s ≠ 0` and a weight `w` analytic and bounded in the sector
//! between the real axis and the ray `t0 + y·e^{−i arg s}`, Cauchy's theorem
//! moves the path onto the ray, where the exponential decays like
//! `e^{−|s|y}`. This turns the oscillatory integrals on the imaginary axis
//! into monotone ones; for real `s` the ray is the real half-line.

use num_complex::Complex64;

use super::quad::{integrate_with_breaks, QuadConfig};
use crate::error::{domain, Result};

/// Past this many e-folds the remaining mass is below 1e-21 of the total.
const V_MAX: f64 = 48.0;

/// `∫_{t0}^∞ w(t) e^{−st} dt` for `t0 > 0`, `Re s ≥ 0`, `s ≠ 0`.
pub fn laplace_ray<W>(t0: f64, s: Complex64, w: W, cfg: QuadConfig) -> Result<Complex64>
where
    W: Fn(Complex64) -> Complex64,
{
    if !(t0 > 0.0) {
        return domain(format!("ray start must be positive, got {t0}"));
    }
    if !(s.re >= 0.0) || s == Complex64::new(0.0, 0.0) || !s.is_finite() {
        return domain(format!("ray quadrature needs Re s >= 0 and s != 0, got {s}"));
    }
    let rho = s.norm();
    let dir = Complex64::from_polar(1.0, -s.arg());
    // v = |s|·y, so the exponential is e^{−v}; w varies on the scale v ~ |s|·t0.
    let integrand = |v: f64| w(t0 + dir * (v / rho)) * (-v).exp();
    let mut breaks = Vec::new();
    let mut b = rho * t0 / 16.0;
    while b < V_MAX {
        breaks.push(b);
        b *= 4.0;
    }
    breaks.extend([1.0, 4.0, 12.0, 24.0]);
    let res = integrate_with_breaks(integrand, 0.0, V_MAX, &breaks, cfg)?;
    Ok(res.value * dir / rho * (-s * t0).exp())
}

/// Generalised exponential integral `E_p(s) = ∫_1^∞ t^{−p} e^{−st} dt`.
pub fn expint(p: f64, s: Complex64, cfg: QuadConfig) -> Result<Complex64> {
    laplace_ray(1.0, s, |t| t.powf(-p), cfg)
}
