//! Majorants and minorants of exponential type for the truncated exponential
//! `E_ω(t) = e^{−ωt}·1{t ≥ 0}`, their powers and rescalings, and their
//! Fourier transforms `f̂(τ) = ∫ f(t) e^{−iτt} dt`.

mod grid;
mod spectral;

pub use grid::{fourier_trapezoid, GridDomain, GridFunction};
pub use spectral::{hat_limit, hat_ml, hat_ml_binomial, LimitTransform, SpectralPower};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::numerics::special::{q1, sin_pi, trigamma};

/// Which of the two extremal functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Majorant,
    Minorant,
}

/// Parameters `(L, σ, δ)` of `M^L_{σ,δ}(t) = M^L_ω(δt/2π)`, `ω = 2πσ/δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalSpec {
    #[serde(rename = "L")]
    pub l: u32,
    pub sigma: f64,
    pub delta: f64,
}

impl ExtremalSpec {
    pub fn new(l: u32, sigma: f64, delta: f64) -> Result<Self> {
        if l == 0 {
            return domain("L must be positive");
        }
        if !(sigma > 0.0 && sigma.is_finite()) || !(delta > 0.0 && delta.is_finite()) {
            return domain(format!("sigma and delta must be positive, got {sigma}, {delta}"));
        }
        Ok(Self { l, sigma, delta })
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI * self.sigma / self.delta
    }
}

/// Default absolute tolerance for the series of `M_ω^1`.
pub const SERIES_TOL: f64 = 1e-15;
const SERIES_MAX_TERMS: usize = 1_000_000;

pub fn e_omega(omega: f64, t: f64) -> f64 {
    if t >= 0.0 {
        (-omega * t).exp()
    } else {
        0.0
    }
}

fn series_terms(omega: f64, abs_tol: f64) -> Result<usize> {
    // e^{−Nω}/(1 − e^{−ω}) ≤ abs_tol
    let denom = -(-omega).exp_m1();
    let n = ((1.0 / (abs_tol * denom)).ln() / omega).ceil().max(1.0);
    if !(n <= SERIES_MAX_TERMS as f64) {
        return Err(Error::Accuracy {
            what: format!("series for M_omega at omega = {omega:e}"),
            achieved: (-omega * SERIES_MAX_TERMS as f64).exp() / denom,
            requested: abs_tol,
        });
    }
    Ok(n as usize)
}

/// `M_ω^1(t) = (sin πt/π)² Q_ω(t)` summed to absolute accuracy `abs_tol`.
pub fn majorant1_tol(omega: f64, t: f64, abs_tol: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return domain(format!("majorant1 needs omega > 0, got {omega}"));
    }
    let n_terms = series_terms(omega, abs_tol)?;
    // Σ_{n≥0} e^{−nω} q1(t−n) − (ω/π) Σ_{n≥1} e^{−nω} (sin²πt/π)·n/(t(t−n));
    // the second sum is q2(t−n) − q2(t) with the cancellation done by hand.
    let s2 = sin_pi(t).powi(2) / PI;
    let decay = (-omega).exp();
    let mut w = 1.0;
    let mut first = 0.0;
    let mut second = 0.0;
    for n in 0..=n_terms {
        let nf = n as f64;
        first += w * q1(t - nf);
        if n > 0 && s2 != 0.0 {
            second += w * nf / (t * (t - nf));
        }
        w *= decay;
    }
    Ok(first - omega / PI * s2 * second)
}

pub fn majorant1(omega: f64, t: f64) -> Result<f64> {
    majorant1_tol(omega, t, SERIES_TOL)
}

/// `m_ω^1(t) = M_ω^1(t) − (sin πt/πt)²`.
pub fn minorant1(omega: f64, t: f64) -> Result<f64> {
    Ok(majorant1(omega, t)? - q1(t))
}

/// The `ω → 0+` limit `M_0^1`, a majorant of the Heaviside step:
/// `(sin²πt/π²)(ψ'(−t) + 1/t)` rewritten through the reflection formula.
pub fn majorant1_limit(t: f64) -> f64 {
    let s2 = sin_pi(t).powi(2) / (PI * PI);
    if t == 0.0 {
        return 1.0;
    }
    if t > 0.5 {
        1.0 - s2 * trigamma(1.0 + t) + s2 / t
    } else {
        q1(t) + s2 * trigamma(1.0 - t) + s2 / t
    }
}

pub fn minorant1_limit(t: f64) -> f64 {
    majorant1_limit(t) - q1(t)
}

fn require_odd(which: Which, l: u32) -> Result<()> {
    if which == Which::Minorant && l % 2 == 0 {
        return domain(format!("minorant powers need odd L, got {l}"));
    }
    Ok(())
}

/// `M^L_{σ,δ}(t)` or `m^L_{σ,δ}(t)`.
pub fn extremal_l(spec: &ExtremalSpec, which: Which, t: f64) -> Result<f64> {
    require_odd(which, spec.l)?;
    let y = spec.delta * t / (2.0 * PI);
    let base = match which {
        Which::Majorant => majorant1(spec.omega(), y)?,
        Which::Minorant => minorant1(spec.omega(), y)?,
    };
    Ok(base.powi(spec.l as i32))
}

pub fn majorant_l(spec: &ExtremalSpec, t: f64) -> Result<f64> {
    extremal_l(spec, Which::Majorant, t)
}

pub fn minorant_l(spec: &ExtremalSpec, t: f64) -> Result<f64> {
    extremal_l(spec, Which::Minorant, t)
}

/// `σ → 0+` limit of `M^L_{σ,δ}` / `m^L_{σ,δ}`, bounding the Heaviside step.
pub fn extremal_l_limit(l: u32, delta: f64, which: Which, t: f64) -> Result<f64> {
    require_odd(which, l)?;
    if !(delta > 0.0) || l == 0 {
        return domain("need L >= 1 and delta > 0");
    }
    let y = delta * t / (2.0 * PI);
    let base = match which {
        Which::Majorant => majorant1_limit(y),
        Which::Minorant => minorant1_limit(y),
    };
    Ok(base.powi(l as i32))
}

/// Triangle `1 − |τ|/2π` on `[−2π, 2π)`, zero elsewhere.
pub fn hat_q1(tau: f64) -> f64 {
    if (-2.0 * PI..0.0).contains(&tau) {
        1.0 + tau / (2.0 * PI)
    } else if (0.0..2.0 * PI).contains(&tau) {
        1.0 - tau / (2.0 * PI)
    } else {
        0.0
    }
}

/// `i/2` on `[−2π, 0)`, `−i/2` on `[0, 2π)`, zero elsewhere.
pub fn hat_q2(tau: f64) -> Complex64 {
    if (-2.0 * PI..0.0).contains(&tau) {
        Complex64::new(0.0, 0.5)
    } else if (0.0..2.0 * PI).contains(&tau) {
        Complex64::new(0.0, -0.5)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// `A = 1/(1 − e^{−(ω+iτ)})` and `B = 1/(1 − e^{−ω})`.
fn geometric_factors(omega: f64, tau: f64) -> (Complex64, f64) {
    let z = Complex64::new(omega, tau);
    let a = 1.0 / (1.0 - (-z).exp());
    let b = 1.0 / -(-omega).exp_m1();
    (a, b)
}

/// Closed-form `M̂_ω^1(τ) = A·q̂₁ − (ω/π)(A − B)·q̂₂`.
pub fn hat_m1_major(omega: f64, tau: f64) -> Result<Complex64> {
    if !(omega > 0.0) {
        return domain(format!("hat_M1 needs omega > 0, got {omega}"));
    }
    let (a, b) = geometric_factors(omega, tau);
    Ok(a * hat_q1(tau) - (a - b) * hat_q2(tau) * (omega / PI))
}

/// Closed-form `m̂_ω^1(τ) = A e^{−(ω+iτ)}·q̂₁ − (ω/π)(A − B)·q̂₂`.
pub fn hat_m1_minor(omega: f64, tau: f64) -> Result<Complex64> {
    if !(omega > 0.0) {
        return domain(format!("hat_m1 needs omega > 0, got {omega}"));
    }
    let (a, b) = geometric_factors(omega, tau);
    let z = Complex64::new(omega, tau);
    Ok(a * (-z).exp() * hat_q1(tau) - (a - b) * hat_q2(tau) * (omega / PI))
}

pub fn hat_m1(omega: f64, tau: f64, which: Which) -> Result<Complex64> {
    match which {
        Which::Majorant => hat_m1_major(omega, tau),
        Which::Minorant => hat_m1_minor(omega, tau),
    }
}
