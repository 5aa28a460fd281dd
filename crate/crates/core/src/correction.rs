//! Correction functions `g*` and `h*` whose transforms reproduce the first
//! `L` singular and Taylor coefficients of `φ`, and the smooth remainder
//! `ξ = φ − G* − H*`.
//!
//! `g*(t) = Σ g_k t^{−(r+k+1)}` on `t ≥ 1` carries the singular part;
//! `h*(t) = Σ d_k·k e^{−kt}` fixes the analytic part left over.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::dist::Distribution;
use crate::error::{domain, Error, Result};
use crate::ls_transform::{phi_quadrature, SingularityForm, SingularityKind};
use crate::numerics::laplace::expint;
use crate::numerics::lstsq::lstsq;
use crate::numerics::quad::{richardson3, QuadConfig};
use crate::numerics::special::{factorial, gamma};
use crate::numerics::geomspace;

/// Largest supported `L`; the Vandermonde system degrades quickly beyond.
pub const MAX_ORDER: usize = 6;
/// Window for extracting `β̃` from `G*` along the positive reals.
pub const TILDE_BETA_WINDOW: (f64, f64) = (1e-3, 1e-1);
/// Extra polynomial degree used when fitting `β̃` (only the first `L`
/// coefficients are kept).
const TILDE_BETA_EXTRA_DEGREE: usize = 6;
const TILDE_BETA_POINTS: usize = 80;
const TILDE_BETA_MAX_RESIDUAL: f64 = 1e-6;
const SOLVE_MAX_RESIDUAL: f64 = 1e-10;
/// Abscissae for the limit onto the imaginary axis.
pub const AXIS_SIGMAS: [f64; 3] = [1e-4, 5e-5, 2.5e-5];

/// Default `L = max(⌈r⌉, 2)`, bumped to odd so minorants exist.
pub fn default_order(r: f64) -> usize {
    let l = (r.ceil() as usize).max(2);
    if l % 2 == 0 {
        l + 1
    } else {
        l
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionPair {
    pub r: f64,
    pub kind: SingularityKind,
    /// `g_0..g_{L−1}`
    pub g: Vec<f64>,
    /// `d_1..d_L`
    pub d: Vec<f64>,
    /// `β̃_0..β̃_{L−1}`
    pub tilde_beta: Vec<f64>,
}

fn sign(n: i64) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_order(l: usize) -> Result<()> {
    if l == 0 || l > MAX_ORDER {
        return domain(format!("L must lie in 1..={MAX_ORDER}, got {l}"));
    }
    Ok(())
}

/// Weights `g_k` with `g_k·c_{r+k} = α_k`, `c_p` the singular coefficient of
/// `L(t^{−(p+1)} Δ_1)`.
pub fn g_coefficients(form: &SingularityForm, l: usize) -> Result<Vec<f64>> {
    check_order(l)?;
    if form.alpha.len() < l {
        return domain(format!("form has {} alpha coefficients, need {l}", form.alpha.len()));
    }
    let r = form.r;
    let g: Vec<f64> = (0..l)
        .map(|k| {
            let a = form.alpha[k];
            match form.kind {
                SingularityKind::PowerLog => {
                    let p = r as i64 + k as i64;
                    sign(p + 1) * factorial(p as u32) * a
                }
                SingularityKind::PurePower => {
                    let r0 = r.floor() as i64;
                    let rbar = r - r.floor();
                    sign(r0 + k as i64 + 1) * (PI * rbar).sin() / PI
                        * gamma(r + k as f64 + 1.0)
                        * a
                }
            }
        })
        .collect();
    if !(g[0] > 0.0) {
        return Err(Error::Invariant(format!(
            "g_0 = {} must be positive; alpha_0 = {} has the wrong sign for r = {r}",
            g[0], form.alpha[0]
        )));
    }
    Ok(g)
}

/// `V[k−1][n] = (−1/k)^n`, `k = 1..L`, `n = 0..L−1`.
pub fn vandermonde(l: usize) -> DMatrix<f64> {
    DMatrix::from_fn(l, l, |i, n| (-1.0 / (i as f64 + 1.0)).powi(n as i32))
}

/// `d` with `d·V = β − β̃`.
pub fn solve_h_coeffs(beta: &[f64], tilde_beta: &[f64]) -> Result<Vec<f64>> {
    if beta.len() != tilde_beta.len() || beta.is_empty() {
        return domain("beta and tilde_beta must have equal nonzero length");
    }
    let l = beta.len();
    check_order(l)?;
    let vt = vandermonde(l).transpose();
    let rhs = nalgebra::DVector::from_iterator(l, beta.iter().zip(tilde_beta).map(|(b, t)| b - t));
    let d = vt
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numeric("Vandermonde system is singular".into()))?;
    let res = (&vt * &d - &rhs).amax();
    if !(res <= SOLVE_MAX_RESIDUAL) {
        return Err(Error::Numeric(format!("Vandermonde residual {res:e} exceeds {SOLVE_MAX_RESIDUAL:e}")));
    }
    Ok(d.iter().copied().collect())
}

/// `h*(t) = Σ d_k·k e^{−kt}`.
pub fn h_star(d: &[f64], t: f64) -> f64 {
    d.iter()
        .enumerate()
        .map(|(i, dk)| {
            let k = i as f64 + 1.0;
            dk * k * (-k * t).exp()
        })
        .sum()
}

/// `H*(s) = Σ d_k·k/(s + k)`.
pub fn capital_h_star(d: &[f64], s: Complex64) -> Complex64 {
    d.iter()
        .enumerate()
        .map(|(i, dk)| {
            let k = i as f64 + 1.0;
            *dk * k / (s + k)
        })
        .sum()
}

fn singular_term(kind: SingularityKind, p: f64, s: Complex64) -> Complex64 {
    match kind {
        SingularityKind::PowerLog => s.powf(p) * s.ln(),
        SingularityKind::PurePower => s.powf(p),
    }
}

/// `G*(s) = Σ g_k E_{r+k+1}(s)` for `Re s ≥ 0`; `G*(0) = Σ g_k/(r+k)`.
pub fn capital_g_star(r: f64, g: &[f64], s: Complex64) -> Result<Complex64> {
    if s == Complex64::new(0.0, 0.0) {
        return Ok(g
            .iter()
            .enumerate()
            .map(|(k, gk)| gk / (r + k as f64))
            .sum::<f64>()
            .into());
    }
    let cfg = QuadConfig::new(1e-15, 1e-12);
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, gk) in g.iter().enumerate() {
        acc += expint(r + k as f64 + 1.0, s, cfg)? * *gk;
    }
    Ok(acc)
}

/// Taylor coefficients `β̃_0..β̃_{L−1}` of the analytic part of `G*`,
/// fitted on [`TILDE_BETA_WINDOW`] after removing the exact singular terms.
pub fn tilde_beta_coefficients(form: &SingularityForm, g: &[f64], l: usize) -> Result<Vec<f64>> {
    let mut p = tilde_beta_polynomial(form, g, l)?;
    p.truncate(l);
    Ok(p)
}

/// The whole fitted polynomial behind [`tilde_beta_coefficients`], degree
/// `L − 1 + 6`; the extra terms absorb the `O(s^L)` remainder on the window.
pub fn tilde_beta_polynomial(form: &SingularityForm, g: &[f64], l: usize) -> Result<Vec<f64>> {
    check_order(l)?;
    if g.len() < l {
        return domain("need at least L weights g_k");
    }
    let (lo, hi) = TILDE_BETA_WINDOW;
    let s_grid = geomspace(lo, hi, TILDE_BETA_POINTS);
    let deg = l + TILDE_BETA_EXTRA_DEGREE;
    let mut y = Vec::with_capacity(s_grid.len());
    for &s in &s_grid {
        let sc = Complex64::new(s, 0.0);
        let mut v = capital_g_star(form.r, &g[..l], sc)?.re;
        for (k, gk) in g[..l].iter().enumerate() {
            let p = form.r + k as f64;
            let coef = match form.kind {
                SingularityKind::PowerLog => crate::ls_transform::power_log_coefficient(p as u32),
                SingularityKind::PurePower => crate::ls_transform::pure_power_coefficient(p),
            };
            v -= gk * coef * singular_term(form.kind, p, sc).re;
        }
        y.push(v);
    }
    // Monomials in u = s/hi keep the design matrix well scaled.
    let design = DMatrix::from_fn(s_grid.len(), deg + 1, |i, n| (s_grid[i] / hi).powi(n as i32));
    let fit = lstsq(&design, &y, 1e12)?;
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    if fit.rms_residual > TILDE_BETA_MAX_RESIDUAL * scale {
        return Err(Error::Accuracy {
            what: "polynomial fit of the analytic part of G*".into(),
            achieved: fit.rms_residual / scale,
            requested: TILDE_BETA_MAX_RESIDUAL,
        });
    }
    Ok((0..=deg).map(|n| fit.coeffs[n] / hi.powi(n as i32)).collect())
}

impl CorrectionPair {
    /// Weights, analytic remainder and exponential mixture for `form`.
    pub fn build(form: &SingularityForm, l: usize) -> Result<Self> {
        check_order(l)?;
        if form.beta.len() < l {
            return domain(format!("form has {} beta coefficients, need {l}", form.beta.len()));
        }
        let g = g_coefficients(form, l)?;
        let tilde_beta = tilde_beta_coefficients(form, &g, l)?;
        let d = solve_h_coeffs(&form.beta[..l], &tilde_beta)?;
        Ok(Self {
            r: form.r,
            kind: form.kind,
            g,
            d,
            tilde_beta,
        })
    }

    pub fn order(&self) -> usize {
        self.g.len()
    }

    /// `g*(t) = Σ g_k t^{−(r+k+1)}` for `t ≥ 1`, zero below.
    pub fn g_star(&self, t: f64) -> f64 {
        if t < 1.0 {
            return 0.0;
        }
        self.g
            .iter()
            .enumerate()
            .map(|(k, gk)| gk * t.powf(-(self.r + k as f64 + 1.0)))
            .sum()
    }

    pub fn h_star(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        h_star(&self.d, t)
    }

    /// `f* = g* + h*`.
    pub fn f_star(&self, t: f64) -> f64 {
        self.g_star(t) + self.h_star(t)
    }

    /// `∫_x^∞ f*(t) dt` for `x ≥ 0`.
    pub fn f_star_tail(&self, x: f64) -> f64 {
        let xg = x.max(1.0);
        let g_part: f64 = self
            .g
            .iter()
            .enumerate()
            .map(|(k, gk)| gk * xg.powf(-(self.r + k as f64)) / (self.r + k as f64))
            .sum();
        let h_part: f64 = self
            .d
            .iter()
            .enumerate()
            .map(|(i, dk)| dk * (-(i as f64 + 1.0) * x.max(0.0)).exp())
            .sum();
        g_part + h_part
    }

    pub fn capital_g_star(&self, s: Complex64) -> Result<Complex64> {
        capital_g_star(self.r, &self.g, s)
    }

    pub fn capital_h_star(&self, s: Complex64) -> Complex64 {
        capital_h_star(&self.d, s)
    }

    /// `φ*(s) = G*(s) + H*(s)`.
    pub fn phi_star(&self, s: Complex64) -> Result<Complex64> {
        Ok(self.capital_g_star(s)? + self.capital_h_star(s))
    }

    /// Smallest grid point `T_0` in `[1, upper]` with `f* > 0` on the rest of
    /// a fine geometric grid up to `upper`, or `None` if `f*(upper) ≤ 0`.
    pub fn positivity_threshold(&self, upper: f64) -> Option<f64> {
        let grid = geomspace(1.0, upper, 4000);
        let mut t0 = None;
        for &t in grid.iter().rev() {
            if self.f_star(t) > 0.0 {
                t0 = Some(t);
            } else {
                break;
            }
        }
        t0
    }
}

/// `ξ(s) = φ(s) − G*(s) − H*(s)` for `Re s ≥ 0` within the strip
/// `|Im s| < singularity_distance`. On the imaginary axis the value is the
/// limit from the right, extrapolated from [`AXIS_SIGMAS`].
pub fn xi(
    phi: &dyn Fn(Complex64) -> Result<Complex64>,
    pair: &CorrectionPair,
    s: Complex64,
    singularity_distance: Option<f64>,
) -> Result<Complex64> {
    if !(s.re >= 0.0) || !s.is_finite() {
        return domain(format!("xi needs Re s >= 0, got {s}"));
    }
    if let Some(dist) = singularity_distance {
        if s.im.abs() >= dist {
            return domain(format!("|Im s| = {} reaches the singularity distance {dist}", s.im.abs()));
        }
    }
    let direct = |z: Complex64| -> Result<Complex64> { Ok(phi(z)? - pair.phi_star(z)?) };
    if s.re > 0.0 {
        return direct(s);
    }
    if s.im == 0.0 {
        // φ(0) = 1 for a proper distribution.
        return Ok(Complex64::new(1.0, 0.0) - pair.phi_star(s)?);
    }
    let v: Vec<Complex64> = AXIS_SIGMAS
        .iter()
        .map(|&sig| direct(Complex64::new(sig, s.im)))
        .collect::<Result<_>>()?;
    Ok(richardson3(v[0], v[1], v[2]))
}

/// [`xi`] with `φ` computed by quadrature or series for a catalog member.
pub fn xi_for_dist(dist: &Distribution, pair: &CorrectionPair, s: Complex64, rel_tol: f64) -> Result<Complex64> {
    let phi = |z: Complex64| phi_quadrature(dist, z, rel_tol);
    xi(&phi, pair, s, dist.singularity_distance())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_orders() {
        assert_eq!(default_order(0.5), 3);
        assert_eq!(default_order(1.0), 3);
        assert_eq!(default_order(3.0), 3);
        assert_eq!(default_order(3.5), 5);
    }

    #[test]
    fn g_examples() {
        let f = SingularityForm::new(1.0, vec![1.0, 0.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(g_coefficients(&f, 2).unwrap(), vec![1.0, 0.0]);
        let f = SingularityForm::new(2.0, vec![-0.5], vec![1.0]).unwrap();
        assert!((g_coefficients(&f, 1).unwrap()[0] - 1.0).abs() < 1e-15);
        let f = SingularityForm::new(0.5, vec![-PI.sqrt()], vec![1.0]).unwrap();
        assert!((g_coefficients(&f, 1).unwrap()[0] - 0.5).abs() < 1e-14);
        let bad = SingularityForm::new(1.0, vec![-1.0], vec![1.0]).unwrap();
        assert!(matches!(g_coefficients(&bad, 1), Err(Error::Invariant(_))));
    }

    #[test]
    fn vandermonde_examples() {
        assert_eq!(vandermonde(1), DMatrix::from_element(1, 1, 1.0));
        let v2 = vandermonde(2);
        assert_eq!(v2, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, 1.0, -0.5]));
        assert!((v2.determinant() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn h_examples() {
        assert_eq!(solve_h_coeffs(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(solve_h_coeffs(&[3.0], &[1.0]).unwrap(), vec![2.0]);
        assert_eq!(h_star(&[0.0, 0.0], 1.3), 0.0);
        assert_eq!(h_star(&[1.0], 0.0), 1.0);
    }

    #[test]
    fn g_star_examples() {
        let pair = CorrectionPair {
            r: 1.0,
            kind: SingularityKind::PowerLog,
            g: vec![1.0, 0.0],
            d: vec![0.0, 0.0],
            tilde_beta: vec![1.0, 0.0],
        };
        assert_eq!(pair.g_star(0.5), 0.0);
        assert_eq!(pair.g_star(2.0), 0.25);
        let neg = CorrectionPair {
            g: vec![1.0, -3.0],
            ..pair
        };
        for t in [3.01, 10.0, 1e3] {
            assert!(neg.g_star(t) > 0.0);
        }
        assert!(neg.g_star(2.0) < 0.0);
    }
}
