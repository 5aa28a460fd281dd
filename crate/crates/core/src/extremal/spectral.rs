//! Fourier transforms of `(M_ω^1)^L` and `(m_ω^1)^L` on a frequency grid.
//!
//! Since `M_ω^1(t) ≈ e^{−ωt}` for large `t`, the transform of the `l`-th
//! power carries the pole-like term `P_{lω}(ν) = 1/(lω + iν)`, which becomes
//! `πδ(ν) + 1/(iν)` as `ω → 0`. We therefore store
//! `Ĝ_l = FT(M^l) = P_{lω} + D̂_l` with `D̂_l` bounded uniformly in `ω`, and
//! build `Ĝ_{l+1} = (2π)^{−1} Ĝ_l ∗ Ĝ_1` term by term: the `P∗P` part in
//! closed form, `P∗D̂` parts by product integration (linear interpolation of
//! `D̂` against exact moments of `P`), and `D̂∗D̂` by the trapezoid rule.
//! This stays accurate down to `ω ≈ 1e-8`, which is how the `σ → 0+` limit
//! transform is obtained.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use super::grid::{GridDomain, GridFunction};
use super::{hat_q1, hat_q2, Which};
use crate::error::{domain, Error, Result};
use crate::numerics::binomial;
use crate::numerics::special::sin_pi;

/// Grid points per `2π` used when the caller does not ask for finer.
pub const DEFAULT_POINTS_PER_PERIOD: usize = 1024;
const COARSEST_STEP: f64 = 2.0 * PI / 256.0;
/// Stand-in for `ω → 0+`.
const OMEGA_LIMIT: f64 = 1e-8;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `ln(1 + w)` without cancellation for small `w`.
fn ln_1p(w: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * w.re + w.norm_sqr()).ln_1p();
    let im = w.im.atan2(1.0 + w.re);
    c(re, im)
}

/// `ln(a + i·x1) − ln(a + i·x0)` for `a > 0`.
fn ln_ratio(a: f64, x0: f64, x1: f64) -> Complex64 {
    let base = c(a, x0);
    let w = c(0.0, x1 - x0) / base;
    if w.norm() < 0.5 {
        ln_1p(w)
    } else {
        c(a, x1).ln() - base.ln()
    }
}

/// `1/(1 − e^{−z}) − 1/z` for `z = ω + 2πi·p`.
fn k_fun(omega: f64, p: f64) -> Complex64 {
    let z = c(omega, 2.0 * PI * p);
    if z.norm() < 0.1 {
        let z2 = z * z;
        return 0.5 + z / 12.0 - z * z2 / 720.0 + z * z2 * z2 / 30_240.0
            - z * z2 * z2 * z2 / 1_209_600.0;
    }
    let decay = (-omega).exp();
    // 1 − e^{−ω}cos 2πp = −expm1(−ω) + 2e^{−ω} sin²πp
    let re = -(-omega).exp_m1() + 2.0 * decay * sin_pi(p).powi(2);
    let im = decay * sin_pi(2.0 * p);
    1.0 / c(re, im) - 1.0 / z
}

/// `D̂_1(ν) = FT(M_ω^1)(ν) − P_ω(ν)` at `ν = 2πp`, arranged so that no
/// `1/ω`-sized terms cancel.
fn d1(omega: f64, p: f64, which: Which) -> Complex64 {
    let nu = 2.0 * PI * p;
    let z = c(omega, nu);
    let q1 = hat_q1(nu);
    let q2 = hat_q2(nu);
    // ω·B = ω/(1 − e^{−ω})
    let omega_b = omega / -(-omega).exp_m1();
    let u = q2 * (-omega / PI) + q1;
    // (û − 1)/z + B·v̂ + K·û
    let s = (u - 1.0) / z + q2 * (omega_b / PI);
    let mut d = s + k_fun(omega, p) * u;
    if which == Which::Minorant {
        d -= q1;
    }
    d
}

/// Product-integration weights of `P_a(x) = 1/(a + ix)` against the linear
/// hat functions of each panel `[p·h, (p+1)·h]`, `p = −n..n−1`.
struct PanelWeights {
    n: i64,
    left: Vec<Complex64>,
    right: Vec<Complex64>,
}

impl PanelWeights {
    fn new(a: f64, h: f64, n: i64) -> Self {
        let (left, right) = (-n..n)
            .map(|p| {
                let x0 = p as f64 * h;
                let x1 = x0 + h;
                let lr = ln_ratio(a, x0, x1);
                let i0 = c(0.0, -1.0) * lr;
                let i1 = c(0.0, -h) + lr * a;
                ((i0 * x1 - i1) / h, (i1 - i0 * x0) / h)
            })
            .unzip();
        Self { n, left, right }
    }

    fn at(&self, p: i64) -> (Complex64, Complex64) {
        let i = (p + self.n) as usize;
        (self.left[i], self.right[i])
    }
}

/// Transform of the `l`-th power of `M_ω^1` or `m_ω^1`, as `P_{lω} + D̂_l`
/// with `D̂_l` tabulated on `[−2πl, 2πl]`.
#[derive(Debug, Clone)]
pub struct SpectralPower {
    pub omega: f64,
    pub l: u32,
    pub which: Which,
    m: usize,
    /// `D̂_l(k·h)` for `k = −l·m..=l·m`.
    d: Vec<Complex64>,
}

impl SpectralPower {
    /// Grid step is `2π/points_per_period`.
    pub fn new(omega: f64, l: u32, which: Which, points_per_period: usize) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return domain(format!("spectral power needs omega > 0, got {omega}"));
        }
        if l == 0 {
            return domain("L must be positive");
        }
        if which == Which::Minorant && l % 2 == 0 {
            return domain(format!("minorant powers need odd L, got {l}"));
        }
        let m = points_per_period;
        if 2.0 * PI / (m as f64) > COARSEST_STEP * (1.0 + 1e-12) {
            return Err(Error::Accuracy {
                what: "frequency grid for the extremal transform".into(),
                achieved: 2.0 * PI / m as f64,
                requested: COARSEST_STEP,
            });
        }
        let mi = m as i64;
        let base: Vec<Complex64> = (-mi..=mi)
            .map(|k| d1(omega, k as f64 / mi as f64, which))
            .collect();
        let mut cur = base.clone();
        let h = 2.0 * PI / m as f64;
        let w_b = PanelWeights::new(omega, h, mi);
        for j in 1..l {
            cur = Self::step(omega, j as i64, mi, h, &cur, &base, &w_b);
        }
        Ok(Self {
            omega,
            l,
            which,
            m,
            d: cur,
        })
    }

    /// `D̂_{j+1}` from `D̂_j` (`dj`, half-width `j·m`) and `D̂_1` (`d1v`).
    fn step(
        omega: f64,
        j: i64,
        m: i64,
        h: f64,
        dj: &[Complex64],
        d1v: &[Complex64],
        w_b: &PanelWeights,
    ) -> Vec<Complex64> {
        let a = j as f64 * omega;
        let b = omega;
        let cj = j * m;
        let w_a = PanelWeights::new(a, h, cj + m);
        let dj_at = |p: i64| dj[(p + cj) as usize];
        let d1_at = |p: i64| d1v[(p + m) as usize];
        let out_half = (j + 1) * m;
        (-out_half..=out_half)
            .into_par_iter()
            .map(|k| {
                let nu = k as f64 * h;
                let lo = (-cj).max(k - m);
                let hi = cj.min(k + m);
                let pole = 1.0 / c(a + b, nu);
                if lo >= hi {
                    return -pole;
                }
                let (xlo, xhi) = (lo as f64 * h, hi as f64 * h);
                // ∫ P_a(x) P_b(ν − x) dx = P_{a+b}(ν)·J
                let jint = c(0.0, -1.0) * ln_ratio(a, xlo, xhi)
                    + c(0.0, 1.0) * ln_ratio(b, nu - xlo, nu - xhi);
                let mut acc = c(0.0, 0.0);
                for p in lo..hi {
                    // ∫ P_a(x) D̂_1(ν − x) dx
                    let (wl, wr) = w_a.at(p);
                    acc += wl * d1_at(k - p) + wr * d1_at(k - p - 1);
                    // ∫ D̂_j(x) P_b(ν − x) dx with y = ν − x on panel [q, q+1]
                    let q = k - p - 1;
                    let (vl, vr) = w_b.at(q);
                    acc += vl * dj_at(k - q) + vr * dj_at(k - q - 1);
                }
                // ∫ D̂_j(x) D̂_1(ν − x) dx
                let mut trap = c(0.0, 0.0);
                for p in lo..=hi {
                    let w = if p == lo || p == hi { 0.5 } else { 1.0 };
                    trap += dj_at(p) * d1_at(k - p) * w;
                }
                acc += trap * h;
                pole * (jint / (2.0 * PI) - 1.0) + acc / (2.0 * PI)
            })
            .collect()
    }

    pub fn step_size(&self) -> f64 {
        2.0 * PI / self.m as f64
    }

    pub fn half_width(&self) -> f64 {
        2.0 * PI * self.l as f64
    }

    /// `D̂_l(ν)` by linear interpolation; `−P_{lω}(ν)` beyond the support.
    pub fn regular_part(&self, nu: f64) -> Complex64 {
        let hw = self.half_width();
        if nu.abs() > hw {
            return -1.0 / c(self.l as f64 * self.omega, nu);
        }
        let h = self.step_size();
        let n = self.d.len();
        let u = ((nu + hw) / h).clamp(0.0, (n - 1) as f64);
        let k = (u.floor() as usize).min(n - 2);
        let f = u - k as f64;
        self.d[k] * (1.0 - f) + self.d[k + 1] * f
    }

    /// `FT((M_ω^1)^l)(ν)`; zero outside `[−2πl, 2πl]`.
    pub fn eval(&self, nu: f64) -> Complex64 {
        if nu.abs() > self.half_width() {
            return c(0.0, 0.0);
        }
        1.0 / c(self.l as f64 * self.omega, nu) + self.regular_part(nu)
    }

    /// The transform on its own grid.
    pub fn to_grid(&self) -> GridFunction {
        let h = self.step_size();
        let hw = self.half_width();
        let values = (0..self.d.len())
            .map(|k| {
                let nu = -hw + k as f64 * h;
                1.0 / c(self.l as f64 * self.omega, nu) + self.d[k]
            })
            .collect();
        GridFunction {
            start: -hw,
            step: h,
            values,
        }
    }
}

fn check_domain(l: u32, dom: &GridDomain) -> Result<usize> {
    if dom.step > COARSEST_STEP * (1.0 + 1e-12) {
        return Err(Error::Accuracy {
            what: "requested grid is too coarse for the extremal transform".into(),
            achieved: dom.step,
            requested: COARSEST_STEP,
        });
    }
    let hw = 2.0 * PI * l as f64;
    if dom.start > -hw + 1e-9 || dom.end() < hw - 1e-9 {
        return domain(format!("grid must cover [-2πL, 2πL] = [{:.6}, {:.6}]", -hw, hw));
    }
    let m = (2.0 * PI / dom.step).ceil() as usize;
    Ok(m.max(DEFAULT_POINTS_PER_PERIOD))
}

/// `FT(M_ω^L)` (or `FT(m_ω^L)`) sampled on `dom`.
pub fn hat_ml(omega: f64, l: u32, which: Which, dom: &GridDomain) -> Result<GridFunction> {
    let m = check_domain(l, dom)?;
    let sp = SpectralPower::new(omega, l, which, m)?;
    Ok(GridFunction::from_fn(*dom, |nu| sp.eval(nu)))
}

/// `FT(M_ω^L)` as the binomial sum
/// `(2π)^{−(L−1)} Σ_l C(L,l) (A·û)^{∗l} ∗ (B·v̂)^{∗(L−l)}`, each factor kept
/// inside its convolution, with trapezoid grid convolutions. Needs `ω` of
/// order one: `A` has height `1/(1 − e^{−ω})` near the origin.
pub fn hat_ml_binomial(
    omega: f64,
    l: u32,
    which: Which,
    points_per_period: usize,
) -> Result<GridFunction> {
    if !(omega > 0.0) || l == 0 {
        return domain("binomial form needs omega > 0 and L >= 1");
    }
    if which == Which::Minorant && l % 2 == 0 {
        return domain(format!("minorant powers need odd L, got {l}"));
    }
    let m = points_per_period as i64;
    let h = 2.0 * PI / m as f64;
    if h > COARSEST_STEP * (1.0 + 1e-12) {
        return Err(Error::Accuracy {
            what: "frequency grid for the binomial form".into(),
            achieved: h,
            requested: COARSEST_STEP,
        });
    }
    let shift = if which == Which::Minorant { 1.0 } else { 0.0 };
    let b_fac = 1.0 / -(-omega).exp_m1() - shift;
    // Jumps of q̂₂ at 0 and ±2π take the mean of the one-sided values.
    let q2_mid = |k: i64| -> Complex64 {
        if k == 0 {
            c(0.0, 0.0)
        } else if k == -m {
            c(0.0, 0.25)
        } else if k == m {
            c(0.0, -0.25)
        } else {
            hat_q2(k as f64 * h)
        }
    };
    let mut f_u = Vec::with_capacity(2 * m as usize + 1);
    let mut f_v = Vec::with_capacity(2 * m as usize + 1);
    for k in -m..=m {
        let p = k as f64 / m as f64;
        let nu = 2.0 * PI * p;
        let a_fac = k_fun(omega, p) + 1.0 / c(omega, nu) - shift;
        let q2 = q2_mid(k);
        let u = q2 * (-omega / PI) + hat_q1(nu);
        f_u.push(a_fac * u);
        f_v.push(q2 * (omega / PI * b_fac));
    }
    let conv = |f: &[Complex64], g: &[Complex64]| -> Vec<Complex64> {
        let nf = f.len() as i64;
        let ng = g.len() as i64;
        let (hf, hg) = ((nf - 1) / 2, (ng - 1) / 2);
        let hw = hf + hg;
        (-hw..=hw)
            .into_par_iter()
            .map(|k| {
                let lo = (-hf).max(k - hg);
                let hi = hf.min(k + hg);
                let mut acc = c(0.0, 0.0);
                for p in lo..=hi {
                    let w = if p == lo || p == hi { 0.5 } else { 1.0 };
                    acc += f[(p + hf) as usize] * g[(k - p + hg) as usize] * w;
                }
                acc * h
            })
            .collect()
    };
    let power = |f: &[Complex64], n: u32| -> Option<Vec<Complex64>> {
        if n == 0 {
            return None;
        }
        let mut acc = f.to_vec();
        for _ in 1..n {
            acc = conv(&acc, f);
        }
        Some(acc)
    };
    let half = l as i64 * m;
    let mut total = vec![c(0.0, 0.0); 2 * half as usize + 1];
    for j in 0..=l {
        let term = match (power(&f_u, j), power(&f_v, l - j)) {
            (Some(a), Some(b)) => conv(&a, &b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => unreachable!("L >= 1"),
        };
        let coef = binomial(l as usize, j as usize);
        for (t, v) in total.iter_mut().zip(term) {
            *t += v * coef;
        }
    }
    let scale = (2.0 * PI).powi(-(l as i32 - 1));
    for v in &mut total {
        *v *= scale;
    }
    GridFunction::new(-(half as f64) * h, h, total)
}

/// The `σ → 0+` transform `lim M̂^L_{σ,δ}(τ)`, split as
/// `π·δ(τ)` plus a function that is `1/(iν) + D̂_L(ν)` in the unscaled
/// variable `ν = 2πτ/δ`.
#[derive(Debug, Clone)]
pub struct LimitTransform {
    power: SpectralPower,
}

impl LimitTransform {
    pub fn new(l: u32, which: Which, points_per_period: usize) -> Result<Self> {
        Ok(Self {
            power: SpectralPower::new(OMEGA_LIMIT, l, which, points_per_period)?,
        })
    }

    pub fn l(&self) -> u32 {
        self.power.l
    }

    /// Weight of the point mass at the origin, in either scaling.
    pub fn dirac_weight(&self) -> f64 {
        PI
    }

    /// Grid step in `ν`.
    pub fn step_size(&self) -> f64 {
        self.power.step_size()
    }

    /// Unscaled limit at `ν ≠ 0`.
    pub fn eval_unscaled(&self, nu: f64) -> Complex64 {
        if nu.abs() > self.power.half_width() {
            return c(0.0, 0.0);
        }
        1.0 / c(0.0, nu) + self.power.regular_part(nu)
    }

    /// Regular part `D̂_L(ν)` (bounded through `ν = 0`).
    pub fn regular_unscaled(&self, nu: f64) -> Complex64 {
        self.power.regular_part(nu)
    }

    /// `lim_{σ→0+} M̂^L_{σ,δ}(τ)` for `τ ≠ 0`.
    pub fn eval(&self, tau: f64, delta: f64) -> Complex64 {
        self.eval_unscaled(2.0 * PI * tau / delta) * (2.0 * PI / delta)
    }
}

/// `lim_{σ→0+} M̂^L_{σ,δ}(τ)` (or the minorant analogue) at `0 < |τ| ≤ Lδ`.
pub fn hat_limit(l: u32, delta: f64, tau: f64, which: Which) -> Result<Complex64> {
    if tau == 0.0 {
        return domain("the limit transform is singular at tau = 0");
    }
    if !(delta > 0.0) {
        return domain(format!("delta must be positive, got {delta}"));
    }
    if tau.abs() > l as f64 * delta * (1.0 + 1e-12) {
        return domain(format!("|tau| = {} exceeds L·delta = {}", tau.abs(), l as f64 * delta));
    }
    Ok(LimitTransform::new(l, which, DEFAULT_POINTS_PER_PERIOD)?.eval(tau, delta))
}

#[cfg(test)]
mod tests {
    use super::super::{hat_m1, majorant1_limit};
    use super::*;

    #[test]
    fn l1_matches_closed_form() {
        for which in [Which::Majorant, Which::Minorant] {
            for omega in [1e-3, 0.5, 2.0] {
                let sp = SpectralPower::new(omega, 1, which, 256).unwrap();
                let g = sp.to_grid();
                for (k, v) in g.values.iter().enumerate() {
                    let nu = g.point(k);
                    let exact = hat_m1(omega, nu, which).unwrap();
                    assert!((v - exact).norm() < 1e-10 * (1.0 + exact.norm()), "{nu}");
                }
            }
        }
    }

    #[test]
    fn k_series_joins_direct_formula() {
        let z_p = 0.0999 / (2.0 * PI);
        let direct = {
            let z = c(1e-4, 2.0 * PI * z_p);
            1.0 / (1.0 - (-z).exp()) - 1.0 / z
        };
        assert!((k_fun(1e-4, z_p) - direct).norm() < 1e-12);
    }

    #[test]
    fn limit_l1_example() {
        let v = hat_limit(1, 2.0 * PI, PI, Which::Majorant).unwrap();
        let expect = c(0.25, -1.0 / (2.0 * PI));
        assert!((v - expect).norm() < 1e-6, "{v}");
        assert!(hat_limit(1, 1.0, 0.0, Which::Majorant).is_err());
        assert!(hat_limit(2, 1.0, 0.5, Which::Minorant).is_err());
    }

    #[test]
    fn limit_agrees_with_time_domain_transform() {
        // Trapezoid sums of M_0^L − H. M_0^L is band-limited, so its sum is
        // exact; the sum of H (mean value at the jump) is −i(h/2)cot(νh/2)
        // rather than 1/(iν). M_0 − H = O(1/t²), so truncation costs O(1/T).
        let lt = LimitTransform::new(3, Which::Majorant, 1024).unwrap();
        let f = |t: f64| {
            let m = majorant1_limit(t).powi(3);
            if t > 0.0 {
                m - 1.0
            } else if t == 0.0 {
                m - 0.5
            } else {
                m
            }
        };
        for nu in [0.7, 3.0, -5.5, 11.0] {
            let h = 1.0 / 16.0;
            let ft = crate::extremal::fourier_trapezoid(f, nu, 4000.0, h);
            let oracle = ft + c(0.0, -0.5 * h / (0.5 * nu * h).tan());
            let v = lt.eval_unscaled(nu);
            assert!((v - oracle).norm() < 1e-3, "nu={nu}: {v} vs {oracle}");
        }
    }
}
