//! Laplace–Stieltjes transforms and their singular expansion at `s = 0`.
//!
//! Near the origin a heavy-tailed transform splits as
//! `φ(s) = α(s)·s^r·log s + β(s)` (integer `r`, [`SingularityKind::PowerLog`])
//! or `φ(s) = α(s)·s^r + β(s)` (non-integer `r`, [`SingularityKind::PurePower`])
//! with `α`, `β` analytic. This module evaluates `φ`, the canonical singular
//! parts, and fits the expansion from samples.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::dist::{zeta_diff_pmf, Distribution};
use crate::error::{domain, Error, Result};
use crate::numerics::laplace::laplace_ray;
use crate::numerics::lstsq::lstsq;
use crate::numerics::quad::QuadConfig;
use crate::numerics::special::{factorial, gamma, harmonic, zeta, zeta_int};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularityKind {
    PowerLog,
    PurePower,
}

impl SingularityKind {
    /// The form a given exponent produces.
    pub fn for_exponent(r: f64) -> Self {
        if r.fract() == 0.0 {
            Self::PowerLog
        } else {
            Self::PurePower
        }
    }
}

/// Truncated local expansion of `φ` at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityForm {
    pub kind: SingularityKind,
    pub r: f64,
    /// `α_0..α_{L−1}`
    pub alpha: Vec<f64>,
    /// `β_0..β_{L−1}`
    pub beta: Vec<f64>,
}

impl SingularityForm {
    pub fn new(r: f64, alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return domain(format!("singularity exponent must be positive, got {r}"));
        }
        if alpha.is_empty() || alpha.len() != beta.len() {
            return domain("alpha and beta must be nonempty and of equal length");
        }
        if alpha[0] == 0.0 {
            return domain("alpha_0 must be nonzero");
        }
        Ok(Self {
            kind: SingularityKind::for_exponent(r),
            r,
            alpha,
            beta,
        })
    }

    /// Number of retained coefficients `L`.
    pub fn order(&self) -> usize {
        self.alpha.len()
    }

    /// `s^r·log s` or `s^r`, principal branches.
    pub fn singular_basis(&self, s: Complex64) -> Complex64 {
        let p = s.powf(self.r);
        match self.kind {
            SingularityKind::PowerLog => p * s.ln(),
            SingularityKind::PurePower => p,
        }
    }

    /// Truncated `α(s)·basis(s) + β(s)`.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        horner(&self.alpha, s) * self.singular_basis(s) + horner(&self.beta, s)
    }
}

pub(crate) fn horner<T: Into<Complex64> + Copy>(c: &[T], s: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &x| acc * s + x.into())
}

/// A transform value at one abscissa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexSample {
    pub s: Complex64,
    pub value: Complex64,
}

/// `φ(s)` for `Re s > 0` to relative accuracy `rel_tol`.
pub fn phi_quadrature(dist: &Distribution, s: Complex64, rel_tol: f64) -> Result<Complex64> {
    if !(s.re > 0.0) {
        return domain(format!("phi_quadrature needs Re s > 0, got {s}"));
    }
    if !(rel_tol > 1e-14 && rel_tol < 1e-2) {
        return domain(format!("rel_tol must lie in (1e-14, 1e-2), got {rel_tol}"));
    }
    phi_closed_half_plane(dist, s, rel_tol)
}

/// As [`phi_quadrature`] but also admits the imaginary axis (`s ≠ 0`), where
/// the defining integral converges conditionally.
pub fn phi_closed_half_plane(dist: &Distribution, s: Complex64, rel_tol: f64) -> Result<Complex64> {
    if !(s.re >= 0.0) || s == Complex64::new(0.0, 0.0) {
        return domain(format!("transform evaluated outside Re s >= 0, s != 0: {s}"));
    }
    let cfg = QuadConfig::new(1e-300, rel_tol.max(1e-14));
    match *dist {
        Distribution::Pareto { r } => {
            Ok(laplace_ray(1.0, s, |t| t.powf(-(r + 1.0)), cfg)? * r)
        }
        Distribution::ZetaDiff { r } => zeta_phi(r, s, rel_tol, cfg),
    }
}

const ZETA_HEAD: u64 = 256;
/// Euler–Maclaurin correction terms; they shrink like `(|s|/2π)^{2k}`.
const ZETA_EM_TERMS: usize = 20;
/// Above this abscissa the series is summed directly.
const ZETA_DIRECT_RE: f64 = 0.5;

/// `Σ p_n e^{−sn}`: direct head plus an Euler–Maclaurin tail whose integral
/// is done on the rotated ray. `φ` is `2πi`-periodic, so `Im s` is first
/// reduced to `[−π, π]`, which keeps `|s| < 2π` where the tail expansion
/// converges. For `Re s` not small the series is summed directly.
fn zeta_phi(r: u32, s: Complex64, rel_tol: f64, cfg: QuadConfig) -> Result<Complex64> {
    let rf = r as f64;
    let s = Complex64::new(s.re, s.im - 2.0 * PI * (s.im / (2.0 * PI)).round());
    if s.norm() == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if s.re >= ZETA_DIRECT_RE {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut n = 0u64;
        loop {
            sum += (-s * n as f64).exp() * zeta_diff_pmf(r, n);
            n += 1;
            let bound = (n as f64 + 1.0).powf(-rf) * (-s.re * n as f64).exp();
            if bound <= 0.1 * rel_tol * sum.norm() {
                return Ok(sum);
            }
            if n > 10_000_000 {
                return Err(Error::Accuracy {
                    what: format!("zeta-difference series at s = {s}"),
                    achieved: bound / sum.norm(),
                    requested: rel_tol,
                });
            }
        }
    }
    let head: Complex64 = (0..ZETA_HEAD)
        .map(|n| (-s * n as f64).exp() * zeta_diff_pmf(r, n))
        .sum();
    let a = ZETA_HEAD as f64;
    let g = |t: Complex64| (t + 1.0).powf(-rf) - (t + 2.0).powf(-rf);
    let integral = laplace_ray(a, s, g, cfg)?;
    // g^{(j)}(a) = (−1)^j (r)_j [(a+1)^{−r−j} − (a+2)^{−r−j}]
    const K: usize = ZETA_EM_TERMS;
    let mut gder = [0.0; 2 * K];
    let mut rising = 1.0;
    for (j, gd) in gder.iter_mut().enumerate() {
        let jf = j as f64;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        *gd = sign * rising * ((a + 1.0).powf(-rf - jf) - (a + 2.0).powf(-rf - jf));
        rising *= rf + jf;
    }
    let ea = (-s * a).exp();
    let f_der = |m: usize| -> Complex64 {
        // d^m/dt^m [g(t) e^{−st}] at t = a
        let mut acc = Complex64::new(0.0, 0.0);
        let mut binom = 1.0;
        for j in 0..=m {
            acc += (-s).powu((m - j) as u32) * gder[j] * binom;
            binom *= (m - j) as f64 / (j + 1) as f64;
        }
        acc * ea
    };
    let mut tail = integral + f_der(0) * 0.5;
    for k in 1..=K {
        // B_{2k}/(2k)! = (−1)^{k+1} 2ζ(2k)/(2π)^{2k}
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let coef = sign * 2.0 * zeta(2.0 * k as f64) / (2.0 * PI).powi(2 * k as i32);
        tail -= f_der(2 * k - 1) * coef;
    }
    Ok(head + tail)
}

/// Coefficient `c_r = (−1)^{r+1}/r!` of `s^r log s` in the transform of
/// `t^{−(r+1)} Δ_1(t)`.
pub fn power_log_coefficient(r: u32) -> f64 {
    let sign = if r % 2 == 1 { 1.0 } else { -1.0 };
    sign / factorial(r)
}

/// Coefficient `(−1)^{r_0+1} π / (Γ(r+1) sin πr̄)` of `s^r` in the transform
/// of `t^{−(r+1)} Δ_1(t)`, non-integer `r`. Equals `Γ(−r)`.
pub fn pure_power_coefficient(r: f64) -> f64 {
    let r0 = r.floor();
    let rbar = r - r0;
    let sign = if (r0 as i64) % 2 == 1 { 1.0 } else { -1.0 };
    sign * PI / (gamma(r + 1.0) * (PI * rbar).sin())
}

fn check_small_disc(s: Complex64) -> Result<()> {
    if !(s.re > 0.0 && s.norm() < 1.0) {
        return domain(format!("canonical forms need Re s > 0 and |s| < 1, got {s}"));
    }
    Ok(())
}

/// Singular part `c_r·s^r·log s` of `L(t^{−(r+1)} Δ_1)(s)`, integer `r ≥ 1`.
pub fn canonical_power_log(r: f64, s: Complex64) -> Result<Complex64> {
    if !(r >= 1.0 && r.fract() == 0.0) {
        return domain(format!("canonical_power_log needs a positive integer r, got {r}"));
    }
    check_small_disc(s)?;
    Ok(s.powf(r) * s.ln() * power_log_coefficient(r as u32))
}

/// Singular part of `L(t^{−(r+1)} Δ_1)(s)` for non-integer `r > 0`.
pub fn canonical_pure_power(r: f64, s: Complex64) -> Result<Complex64> {
    if !(r > 0.0) || r.fract() == 0.0 {
        return domain(format!("canonical_pure_power needs non-integer r > 0, got {r}"));
    }
    check_small_disc(s)?;
    Ok(s.powf(r) * pure_power_coefficient(r))
}

/// Exact Taylor data of `L(t^{−(r+1)} Δ_1)(s) = E_{r+1}(s)`: the coefficient
/// of the singular term and `β_0..β_{n−1}` of the analytic part.
pub fn unit_density_expansion(r: f64, n: usize) -> (f64, Vec<f64>) {
    // E_p(s) = Σ_j −(−s)^j/(j!(j−p+1)) + singular term; at integer p the
    // j = p−1 term is replaced by (−s)^{p−1}ψ(p)/(p−1)!.
    let integer = r.fract() == 0.0;
    let beta = (0..n)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let jf = j as f64;
            if integer && jf == r {
                sign * crate::numerics::special::digamma(r + 1.0) / factorial(j as u32)
            } else {
                -sign / (factorial(j as u32) * (jf - r))
            }
        })
        .collect();
    let alpha0 = if integer {
        power_log_coefficient(r as u32)
    } else {
        pure_power_coefficient(r)
    };
    (alpha0, beta)
}

/// Exact expansion of a catalog member to `order` coefficients.
pub fn catalog_form(dist: &Distribution, order: usize) -> Result<SingularityForm> {
    if order == 0 {
        return domain("order must be positive");
    }
    match *dist {
        Distribution::Pareto { r } => {
            // φ = r·E_{r+1}(s): α is constant.
            let (a0, beta) = unit_density_expansion(r, order);
            let mut alpha = vec![0.0; order];
            alpha[0] = r * a0;
            SingularityForm::new(r, alpha, beta.iter().map(|b| r * b).collect())
        }
        Distribution::ZetaDiff { r } => {
            // φ(s) = −c(s)·Li_r(e^{−s}) + e^s with c(s) = e^s(e^s − 1), and
            // Li_r(e^μ) = μ^{r−1}(H_{r−1} − log(−μ))/(r−1)! + Σ_{k≠r−1} ζ(r−k)μ^k/k!.
            let rr = r as usize;
            let n = order + rr + 1;
            let c: Vec<f64> = (0..=n)
                .map(|k| {
                    if k == 0 {
                        0.0
                    } else {
                        (2f64.powi(k as i32) - 1.0) / factorial(k as u32)
                    }
                })
                .collect();
            let sign_r = if r % 2 == 1 { 1.0 } else { -1.0 };
            let alpha = (0..order)
                .map(|k| sign_r * c[k + 1] / factorial(r - 1))
                .collect();
            let q: Vec<f64> = (0..=n)
                .map(|k| {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    if k == rr - 1 {
                        sign * harmonic(r - 1) / factorial(k as u32)
                    } else {
                        sign * zeta_int(r as i32 - k as i32) / factorial(k as u32)
                    }
                })
                .collect();
            let beta = (0..order)
                .map(|k| {
                    let conv: f64 = (0..=k).map(|j| c[j] * q[k - j]).sum();
                    1.0 / factorial(k as u32) - conv
                })
                .collect();
            SingularityForm::new(r as f64, alpha, beta)
        }
    }
}

/// Probability generating function evaluated at `z = e^{−s}`.
pub fn pgf_to_ls(coeffs: &[f64], s: Complex64, rel_tol: f64) -> Result<Complex64> {
    if !(s.re > 0.0) {
        return domain(format!("pgf_to_ls needs Re s > 0, got {s}"));
    }
    let mut mass = 0.0;
    for (n, &p) in coeffs.iter().enumerate() {
        if !(p.is_finite() && p >= 0.0) {
            return domain(format!("coefficient {n} is not a probability: {p}"));
        }
        mass += p;
    }
    if mass > 1.0 + 1e-12 {
        return domain(format!("coefficients sum to {mass} > 1"));
    }
    let z = (-s).exp();
    let mut zn = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for &p in coeffs {
        sum += zn * p;
        zn *= z;
    }
    // Missing mass sits at indices ≥ len, where |z^n| ≤ |z|^len.
    let bound = (1.0 - mass).max(0.0) * zn.norm();
    if bound > rel_tol * sum.norm() {
        return Err(Error::Accuracy {
            what: "pgf truncation".into(),
            achieved: bound / sum.norm(),
            requested: rel_tol,
        });
    }
    Ok(sum)
}

/// `φ` on a set of abscissae, evaluated in parallel.
pub fn sample_phi(dist: &Distribution, s: &[Complex64], rel_tol: f64) -> Result<Vec<ComplexSample>> {
    s.par_iter()
        .map(|&s| {
            phi_quadrature(dist, s, rel_tol).map(|value| ComplexSample { s, value })
        })
        .collect()
}

/// CSV dump with columns `sigma,tau,re,im`.
pub fn samples_to_csv(samples: &[ComplexSample]) -> String {
    let mut out = String::from("sigma,tau,re,im\n");
    for c in samples {
        out.push_str(&format!(
            "{:e},{:e},{:e},{:e}\n",
            c.s.re, c.s.im, c.value.re, c.value.im
        ));
    }
    out
}

/// Outcome of [`fit_singularity`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityFit {
    pub form: SingularityForm,
    pub residual: f64,
    pub runner_up_r: Option<f64>,
    pub runner_up_residual: Option<f64>,
    pub condition: f64,
}

struct CandidateFit {
    r: f64,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    /// Scaled singular coefficients `α_k ε^{r+k}`, for the nesting test.
    scaled_alpha: Vec<f64>,
    residual: f64,
    condition: f64,
}

const MAX_CONDITION: f64 = 1e12;

fn fit_candidate(s: &[f64], y: &[f64], r: f64, order: usize) -> Result<CandidateFit> {
    let kind = SingularityKind::for_exponent(r);
    let eps = s.iter().copied().fold(0.0, f64::max);
    let n_beta = r.floor() as usize + order;
    let cols = order + n_beta;
    // Work in u = s/ε so that log u is O(1) and not nearly constant.
    let design = DMatrix::from_fn(s.len(), cols, |i, j| {
        let u = s[i] / eps;
        if j < order {
            let p = u.powf(r + j as f64);
            match kind {
                SingularityKind::PowerLog => p * u.ln(),
                SingularityKind::PurePower => p,
            }
        } else {
            u.powi((j - order) as i32)
        }
    });
    let fit = lstsq(&design, y, MAX_CONDITION)?;
    let scaled_alpha = fit.coeffs[..order].to_vec();
    let alpha: Vec<f64> = scaled_alpha
        .iter()
        .enumerate()
        .map(|(k, a)| a / eps.powf(r + k as f64))
        .collect();
    let mut beta: Vec<f64> = fit.coeffs[order..].to_vec();
    if kind == SingularityKind::PowerLog {
        // a_k u^{r+k} log u = α_k s^{r+k} (log s − log ε)
        let ri = r as usize;
        for (k, a) in scaled_alpha.iter().enumerate() {
            if ri + k < n_beta {
                beta[ri + k] -= a * eps.ln();
            }
        }
    }
    for (n, b) in beta.iter_mut().enumerate() {
        *b /= eps.powi(n as i32);
    }
    beta.truncate(order);
    Ok(CandidateFit {
        r,
        alpha,
        beta,
        scaled_alpha,
        residual: fit.rms_residual,
        condition: fit.condition,
    })
}

/// Fit `φ` samples on real `s ∈ (0, ε]` to each candidate exponent and pick
/// the best.
///
/// Each candidate model carries `order` singular coefficients and enough
/// analytic terms to reach the same power of `s`. A candidate whose leading
/// coefficient vanishes while a larger candidate differs from it by an integer
/// is only reproducing that larger one (the models are nested) and is
/// dropped. The winner must beat the runner-up's RMS residual by a factor 2.
pub fn fit_singularity(
    samples: &[ComplexSample],
    candidates: &[f64],
    order: usize,
) -> Result<SingularityFit> {
    if samples.len() < 20 {
        return domain(format!("need at least 20 samples, got {}", samples.len()));
    }
    if order == 0 || candidates.is_empty() {
        return domain("order and candidate set must be nonempty");
    }
    let mut s = Vec::with_capacity(samples.len());
    let mut y = Vec::with_capacity(samples.len());
    for c in samples {
        if c.s.im != 0.0 || !(c.s.re > 0.0) {
            return domain(format!("fit samples must lie on the positive real axis, got {}", c.s));
        }
        s.push(c.s.re);
        y.push(c.value.re);
    }
    let (lo, hi) = s
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    if hi / lo < 10.0 * (1.0 - 1e-12) {
        return domain("fit samples must span at least one decade");
    }
    for &r in candidates {
        if !(r.is_finite() && r > 0.0) {
            return domain(format!("candidate exponents must be positive, got {r}"));
        }
    }
    let fits = candidates
        .iter()
        .map(|&r| fit_candidate(&s, &y, r, order))
        .collect::<Result<Vec<_>>>()?;

    let nested = |f: &CandidateFit| {
        let top = f.scaled_alpha.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let dominated = f.scaled_alpha[0].abs() <= 1e-6 * top;
        let has_parent = candidates.iter().any(|&q| {
            let d = q - f.r;
            d >= 1.0 - 1e-12 && (d - d.round()).abs() < 1e-12
        });
        dominated && has_parent
    };
    let mut live: Vec<&CandidateFit> = fits.iter().filter(|f| !nested(f)).collect();
    if live.is_empty() {
        live = fits.iter().collect();
    }
    live.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    let best = live[0];
    let runner = live.get(1);
    // Residuals under the rounding level of the data carry no information.
    let floor = 1e-15 * y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(run) = runner {
        if run.residual.max(floor) <= 2.0 * best.residual.max(floor) {
            return Err(Error::Ambiguous {
                best_r: best.r,
                best_residual: best.residual,
                runner_up_r: run.r,
                runner_up_residual: run.residual,
            });
        }
    }
    let form = SingularityForm::new(best.r, best.alpha.clone(), best.beta.clone())?;
    Ok(SingularityFit {
        form,
        residual: best.residual,
        runner_up_r: runner.map(|f| f.r),
        runner_up_residual: runner.map(|f| f.residual),
        condition: best.condition,
    })
}

/// Verdict of the parity rule for `sign α_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignCheck {
    pub pass: bool,
    /// +1 or −1.
    pub expected_sign: i8,
    pub alpha0: f64,
    pub diagnostic: String,
}

/// `α_0 > 0` when `⌊r⌋` is odd and `α_0 < 0` when it is even.
pub fn sign_check(form: &SingularityForm) -> SignCheck {
    let r0 = form.r.floor() as i64;
    let expected_sign: i8 = if r0 % 2 == 1 { 1 } else { -1 };
    let a0 = form.alpha[0];
    let pass = a0 != 0.0 && (a0 > 0.0) == (expected_sign > 0);
    let diagnostic = format!(
        "{:?} r={} floor(r)={} ({}): alpha_0={a0:e}, expected {}",
        form.kind,
        form.r,
        r0,
        if r0 % 2 == 1 { "odd" } else { "even" },
        if expected_sign > 0 { "> 0" } else { "< 0" }
    );
    SignCheck {
        pass,
        expected_sign,
        alpha0: a0,
        diagnostic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn pareto_one_at_s_one_matches_riemann_sum() {
        let p1 = Distribution::pareto(1.0).unwrap();
        let v = phi_quadrature(&p1, c(1.0), 1e-12).unwrap();
        // Midpoint sum of e^{−x} x^{−2} on [1, 60] at step 1e-6 (error ~1e-13).
        let h = 1e-6;
        let n = (59.0 / h) as usize;
        let mut sum = 0.0;
        for i in 0..n {
            let x = 1.0 + (i as f64 + 0.5) * h;
            sum += (-x).exp() / (x * x);
        }
        assert!((v.re - sum * h).abs() < 1e-10, "{} vs {}", v.re, sum * h);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn zeta_two_at_tenth_matches_long_partial_sum() {
        let z2 = Distribution::zeta_diff(2).unwrap();
        let v = phi_quadrature(&z2, c(0.1), 1e-12).unwrap();
        let mut sum = 0.0;
        for n in (0..10_000_000u64).rev() {
            sum += zeta_diff_pmf(2, n) * (-0.1 * n as f64).exp();
        }
        assert!((v.re - sum).abs() < 1e-13, "{} vs {sum}", v.re);
    }

    #[test]
    fn zeta_off_axis_matches_partial_sum() {
        let z3 = Distribution::zeta_diff(3).unwrap();
        for s in [Complex64::new(0.05, 0.4), Complex64::new(0.3, -1.7), Complex64::new(0.5, 4.0)] {
            let v = phi_quadrature(&z3, s, 1e-12).unwrap();
            let mut sum = Complex64::new(0.0, 0.0);
            for n in (0..2_000_000u64).rev() {
                sum += (-s * n as f64).exp() * zeta_diff_pmf(3, n);
            }
            assert!((v - sum).norm() < 1e-12, "s={s}: {v} vs {sum}");
        }
    }

    #[test]
    fn small_s_tends_to_one() {
        for d in [
            Distribution::pareto(1.0).unwrap(),
            Distribution::pareto(0.5).unwrap(),
            Distribution::zeta_diff(2).unwrap(),
        ] {
            let v = phi_quadrature(&d, c(1e-9), 1e-12).unwrap();
            assert!((v.re - 1.0).abs() < 1e-3, "{d:?}: {v}");
        }
    }

    #[test]
    fn phi_domain_errors() {
        let d = Distribution::pareto(1.0).unwrap();
        assert!(matches!(phi_quadrature(&d, c(0.0), 1e-8), Err(Error::Domain(_))));
        assert!(matches!(phi_quadrature(&d, c(-1.0), 1e-8), Err(Error::Domain(_))));
        assert!(matches!(phi_quadrature(&d, c(1.0), 1e-20), Err(Error::Domain(_))));
    }

    #[test]
    fn canonical_constants() {
        assert_eq!(power_log_coefficient(1), 1.0);
        assert_eq!(power_log_coefficient(2), -0.5);
        assert!((pure_power_coefficient(0.5) + 2.0 * PI.sqrt()).abs() < 1e-13);
        assert!((pure_power_coefficient(1.5) - 4.0 * PI.sqrt() / 3.0).abs() < 1e-13);
        // Same constant as Γ(−r).
        assert!((pure_power_coefficient(2.3) - gamma(-2.3)).abs() < 1e-12);
        let v = canonical_pure_power(0.5, c(0.25)).unwrap();
        assert!((v.re + PI.sqrt()).abs() < 1e-13 && v.im == 0.0);
        assert!(canonical_pure_power(2.0, c(0.1)).is_err());
        assert!(canonical_power_log(1.5, c(0.1)).is_err());
        assert!(canonical_power_log(1.0, c(1.5)).is_err());
    }

    #[test]
    fn exact_expansion_matches_quadrature() {
        for (d, order) in [
            (Distribution::pareto(1.0).unwrap(), 4),
            (Distribution::pareto(0.5).unwrap(), 4),
            (Distribution::pareto(1.5).unwrap(), 4),
            (Distribution::zeta_diff(1).unwrap(), 4),
            (Distribution::zeta_diff(2).unwrap(), 4),
            (Distribution::zeta_diff(3).unwrap(), 5),
        ] {
            let form = catalog_form(&d, order).unwrap();
            for s in [c(1e-3), Complex64::new(1e-3, 2e-3), c(1e-2)] {
                let v = phi_quadrature(&d, s, 1e-13).unwrap();
                let e = form.eval(s);
                let scale = s.norm().powi(order as i32) * (1.0 + s.norm().ln().abs());
                assert!((v - e).norm() < 20.0 * scale, "{d:?} s={s}: {v} vs {e}");
            }
        }
    }

    #[test]
    fn zeta_two_alpha_from_closed_form() {
        let f = catalog_form(&Distribution::zeta_diff(2).unwrap(), 3).unwrap();
        assert!((f.alpha[0] + 1.0).abs() < 1e-15);
        assert!((f.alpha[1] + 1.5).abs() < 1e-15);
        assert!((f.alpha[2] + 7.0 / 6.0).abs() < 1e-15);
        assert!((f.beta[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pgf_examples() {
        assert!((pgf_to_ls(&[1.0], c(0.7), 1e-12).unwrap() - 1.0).norm() < 1e-15);
        let v = pgf_to_ls(&[0.0, 1.0], c(0.5), 1e-12).unwrap();
        assert!((v.re - (-0.5f64).exp()).abs() < 1e-15);
        assert!(pgf_to_ls(&[0.7, 0.7], c(0.5), 1e-12).is_err());
        assert!(pgf_to_ls(&[-0.1, 1.1], c(0.5), 1e-12).is_err());
        assert!(matches!(
            pgf_to_ls(&[0.5], c(0.5), 1e-12),
            Err(Error::Accuracy { .. })
        ));
    }

    #[test]
    fn pgf_agrees_with_zeta_transform() {
        let z2 = Distribution::zeta_diff(2).unwrap();
        let coeffs: Vec<f64> = (0..2000).map(|n| zeta_diff_pmf(2, n)).collect();
        let a = pgf_to_ls(&coeffs, c(0.1), 1e-8).unwrap();
        let b = phi_quadrature(&z2, c(0.1), 1e-12).unwrap();
        assert!((a - b).norm() < 1e-8);
    }

    #[test]
    fn sign_check_examples() {
        let f = |r: f64, a0: f64| SingularityForm::new(r, vec![a0], vec![1.0]).unwrap();
        assert!(sign_check(&f(1.0, 1.0)).pass);
        assert!(sign_check(&f(2.0, -0.5)).pass);
        assert!(!sign_check(&f(0.5, 1.0)).pass);
        assert!(sign_check(&f(1.5, 0.3)).pass);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let d = Distribution::pareto(1.0).unwrap();
        let s = sample_phi(&d, &[c(0.1), c(0.2)], 1e-10).unwrap();
        let csv = samples_to_csv(&s);
        assert!(csv.starts_with("sigma,tau,re,im\n"));
        assert_eq!(csv.lines().count(), 3);
    }
}
