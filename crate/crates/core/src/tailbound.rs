//! Upper and lower bounds on `P(X > x)` from the extremal functions, decay
//! rate estimation, and the auxiliary asymptotic checks.
//!
//! With `M = lim_{σ→0+} M^L_{σ,δ}` (a majorant of the unit step) and the
//! correction density `f* = g* + h*`,
//!
//! `∫ M(t − x) dF(t) = T1 + T2`,
//! `T1 = ∫ M(t − x) f*(t) dt`,
//! `T2 = (1/2π) ∫ M̂(−τ) ξ(iτ) e^{ixτ} dτ`,
//!
//! where `M̂` has a point mass `π` at the origin, contributing `ξ(0)/2`.
//! The left side dominates `P(X ≥ x)`; with the minorant it is dominated by
//! `P(X > x)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::correction::{default_order, xi_for_dist, CorrectionPair};
use crate::dist::Distribution;
use crate::error::{domain, Error, Result};
use crate::extremal::{extremal_l_limit, LimitTransform, Which};
use crate::ls_transform::{
    fit_singularity, sample_phi, sign_check, phi_quadrature, SingularityFit,
};
use crate::numerics::quad::{integrate, integrate_to_infinity, integrate_with_breaks, QuadConfig};
use crate::numerics::special::gamma;
use crate::numerics::geomspace;

/// Tilt parameters used for the exponential-tilt check.
pub const SIGMA2_SCHEDULE: [f64; 3] = [1e-2, 1e-3, 1e-4];
/// `ξ(iτ)` is tabulated at this many points on `[0, Lδ]`.
const XI_POINTS: usize = 513;
/// Frequency grid of the limit transforms, points per `2π`.
const HAT_POINTS_PER_PERIOD: usize = 2048;
/// Half-periods of `M(· − x)` resolved panel by panel on each side of `x`.
const T1_HALF_PERIODS: i64 = 200;
const CANDIDATES: [f64; 6] = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0];

/// `Lδ = min(0.1 × distance to the nearest other singularity, 1)`.
pub fn default_delta(dist: &Distribution, l: u32) -> f64 {
    let width = dist.singularity_distance().map_or(1.0, |d| (0.1 * d).min(1.0));
    width / l as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    #[serde(rename = "L")]
    pub l: u32,
    pub delta: f64,
    /// Only used by the tilt check; the bounds are evaluated at `σ2 = 0+`.
    pub sigma2_schedule: Vec<f64>,
}

impl BoundParams {
    pub fn new(l: u32, delta: f64) -> Result<Self> {
        if l == 0 || !(delta > 0.0 && delta.is_finite()) {
            return domain(format!("need L >= 1 and delta > 0, got L={l}, delta={delta}"));
        }
        Ok(Self {
            l,
            delta,
            sigma2_schedule: SIGMA2_SCHEDULE.to_vec(),
        })
    }

    pub fn default_for(dist: &Distribution, l: u32) -> Result<Self> {
        Self::new(l, default_delta(dist, l))
    }
}

/// The two parts of a bound at one `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundTerms {
    pub t1: f64,
    pub t2: f64,
    pub value: f64,
}

/// Filon weights `∫_0^1 e^{iθu} du` and `∫_0^1 u e^{iθu} du`.
fn filon_weights(theta: f64) -> (Complex64, Complex64) {
    if theta.abs() < 0.5 {
        let it = Complex64::new(0.0, theta);
        let mut w0 = Complex64::new(0.0, 0.0);
        let mut w1 = Complex64::new(0.0, 0.0);
        let mut p = Complex64::new(1.0, 0.0); // (iθ)^n/n!
        for n in 0..24 {
            let nf = n as f64;
            w0 += p / (nf + 1.0);
            w1 += p / (nf + 2.0);
            p = p * it / (nf + 1.0);
        }
        return (w0, w1);
    }
    let it = Complex64::new(0.0, theta);
    let e = it.exp();
    let w0 = (e - 1.0) / it;
    let w1 = e / it + (e - 1.0) / (theta * theta);
    (w0, w1)
}

/// Tabulated `T2` integrand `M̂(−τ)ξ(iτ)` on `τ_k = k·Δ`, `k = 0..=L·m`.
#[derive(Debug, Clone)]
struct OscillatoryTable {
    step: f64,
    values: Vec<Complex64>,
}

impl OscillatoryTable {
    /// `(1/2π)∫_{−Λ}^{Λ} P(τ) e^{ixτ} dτ` for `P(−τ) = conj P(τ)`, by Filon
    /// with `P` linear on each panel.
    fn integrate(&self, x: f64) -> f64 {
        let h = self.step;
        let (w0, w1) = filon_weights(x * h);
        let (wl, wr) = (w0 - w1, w1);
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..self.values.len() - 1 {
            let phase = Complex64::from_polar(1.0, x * k as f64 * h);
            acc += phase * (wl * self.values[k] + wr * self.values[k + 1]);
        }
        2.0 * (acc * h).re / (2.0 * PI)
    }
}

/// Everything needed to evaluate both bounds at many `x`.
#[derive(Debug, Clone)]
pub struct BoundEngine {
    pub dist: Distribution,
    pub pair: CorrectionPair,
    pub params: BoundParams,
    xi0: f64,
    upper_table: OscillatoryTable,
    lower_table: Option<OscillatoryTable>,
}

impl BoundEngine {
    pub fn new(dist: &Distribution, pair: CorrectionPair, params: BoundParams) -> Result<Self> {
        let l = params.l;
        if (l as f64) < pair.r {
            return domain(format!("need L >= r, got L={l}, r={}", pair.r));
        }
        let width = l as f64 * params.delta;
        if let Some(d) = dist.singularity_distance() {
            if width >= d {
                return domain(format!("L·delta = {width} reaches the singularity at distance {d}"));
            }
        }
        // ξ(iτ) on a coarse grid, carried to the fine one by cubic
        // (Catmull–Rom) interpolation; ξ(−iτ) = conj ξ(iτ) supplies the ghost
        // node below 0. Linear interpolation leaves a sawtooth whose
        // transform is visible against T2 at large x.
        let xi_step = width / (XI_POINTS - 1) as f64;
        let xi_vals: Vec<Complex64> = (0..XI_POINTS)
            .into_par_iter()
            .map(|k| xi_for_dist(dist, &pair, Complex64::new(0.0, k as f64 * xi_step), 1e-12))
            .collect::<Result<_>>()?;
        let node = |k: i64| -> Complex64 {
            let last = XI_POINTS as i64 - 1;
            if k < 0 {
                xi_vals[(-k) as usize].conj()
            } else if k > last {
                xi_vals[last as usize] * 2.0 - xi_vals[(2 * last - k) as usize]
            } else {
                xi_vals[k as usize]
            }
        };
        let xi_at = |tau: f64| -> Complex64 {
            let u = (tau / xi_step).clamp(0.0, (XI_POINTS - 1) as f64);
            let k = (u.floor() as i64).min(XI_POINTS as i64 - 2);
            let f = u - k as f64;
            let (p0, p1, p2, p3) = (node(k - 1), node(k), node(k + 1), node(k + 2));
            let f2 = f * f;
            let f3 = f2 * f;
            (p1 * 2.0
                + (p2 - p0) * f
                + (p0 * 2.0 - p1 * 5.0 + p2 * 4.0 - p3) * f2
                + (p1 * 3.0 - p0 - p2 * 3.0 + p3) * f3)
                * 0.5
        };
        let m = HAT_POINTS_PER_PERIOD;
        let n = l as usize * m;
        let tau_step = params.delta / m as f64;
        let table = |which: Which| -> Result<OscillatoryTable> {
            let lt = LimitTransform::new(l, which, m)?;
            let mut values: Vec<Complex64> = (0..=n)
                .map(|k| {
                    if k == 0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let tau = k as f64 * tau_step;
                    lt.eval(-tau, params.delta) * xi_at(tau)
                })
                .collect();
            // The 1/τ part is odd; the symmetric neighbour average at 0 is Re P(Δ).
            values[0] = Complex64::new(values[1].re, 0.0);
            Ok(OscillatoryTable {
                step: tau_step,
                values,
            })
        };
        let upper_table = table(Which::Majorant)?;
        let lower_table = if l % 2 == 1 {
            Some(table(Which::Minorant)?)
        } else {
            None
        };
        Ok(Self {
            dist: *dist,
            xi0: xi_vals[0].re,
            pair,
            params,
            upper_table,
            lower_table,
        })
    }

    /// `ξ(0)`, zero up to the accuracy of the singularity form.
    pub fn xi_at_zero(&self) -> f64 {
        self.xi0
    }

    fn check_x(&self, x: f64) -> Result<()> {
        let min = self.dist.support_start() + 1.0;
        if !(x > min) || !x.is_finite() {
            return domain(format!("bounds need x > {min}, got {x}"));
        }
        Ok(())
    }

    /// `∫_0^∞ M(t − x) f*(t) dt`, as the tail of `f*` plus the integral of
    /// `(M − H)(t − x) f*(t)`.
    fn t1(&self, which: Which, x: f64) -> Result<f64> {
        let l = self.params.l;
        let delta = self.params.delta;
        let pair = &self.pair;
        let kernel = |u: f64| -> f64 {
            let v = extremal_l_limit(l, delta, which, u).expect("validated parameters");
            if u >= 0.0 {
                v - 1.0
            } else {
                v
            }
        };
        let f = |t: f64| kernel(t - x) * pair.f_star(t);
        let half = PI / delta;
        let mut breaks = vec![1.0, x];
        for j in -T1_HALF_PERIODS..=T1_HALF_PERIODS {
            breaks.push(x + j as f64 * half);
        }
        let reach = T1_HALF_PERIODS as f64 * half;
        let mut d = reach;
        while x - 2.0 * d > 0.0 {
            d *= 2.0;
            breaks.push(x - d);
        }
        let far = x + reach * 1024.0;
        let mut d = reach;
        while x + d < far {
            d *= 2.0;
            breaks.push(x + d);
        }
        let scale = pair.f_star_tail(x).abs().max(1e-300);
        let cfg = QuadConfig::new(1e-12 * scale, 1e-10).with_max_intervals(40_000);
        let near = integrate_with_breaks(f, 0.0, far, &breaks, cfg)?.value;
        let rest = integrate_to_infinity(f, far, cfg)?.value;
        Ok(pair.f_star_tail(x) + near + rest)
    }

    fn terms(&self, which: Which, x: f64) -> Result<BoundTerms> {
        self.check_x(x)?;
        let table = match which {
            Which::Majorant => &self.upper_table,
            Which::Minorant => self.lower_table.as_ref().ok_or_else(|| {
                Error::Domain(format!("lower bound needs odd L, got {}", self.params.l))
            })?,
        };
        let t1 = self.t1(which, x)?;
        let t2 = table.integrate(x) + 0.5 * self.xi0;
        Ok(BoundTerms { t1, t2, value: t1 + t2 })
    }

    pub fn upper(&self, x: f64) -> Result<BoundTerms> {
        self.terms(Which::Majorant, x)
    }

    pub fn lower(&self, x: f64) -> Result<BoundTerms> {
        self.terms(Which::Minorant, x)
    }
}

/// `∫ M(t − x) dF(t)` evaluated directly against the distribution; equal to
/// `T1 + T2` for any correction pair.
pub fn direct_bound(dist: &Distribution, l: u32, delta: f64, which: Which, x: f64) -> Result<f64> {
    let k = |u: f64| extremal_l_limit(l, delta, which, u);
    extremal_l_limit(l, delta, which, 0.0)?;
    let half = PI / delta;
    match *dist {
        Distribution::Pareto { r } => {
            let f = |t: f64| k(t - x).unwrap() * r * t.powf(-r - 1.0);
            let mut breaks = vec![x];
            for j in -T1_HALF_PERIODS..=T1_HALF_PERIODS {
                breaks.push(x + j as f64 * half);
            }
            let far = (x + T1_HALF_PERIODS as f64 * half) * 64.0;
            let cfg = QuadConfig::new(1e-13 * x.powf(-r), 1e-11).with_max_intervals(40_000);
            let a = integrate_with_breaks(f, 1.0, far, &breaks, cfg)?.value;
            let b = integrate_to_infinity(f, far, cfg)?.value;
            Ok(a + b)
        }
        Distribution::ZetaDiff { .. } => {
            // Σ p_n M(n − x); beyond n_max, M(n − x) = 1 + O((n − x)^{−2}).
            let n_max = (x + 2e4 * half).ceil() as u64;
            let mut acc = 0.0;
            for n in 0..=n_max {
                acc += dist.pmf(n)? * k(n as f64 - x)?;
            }
            Ok(acc + dist.tail(n_max as f64)?)
        }
    }
}

pub fn upper_bound(dist: &Distribution, pair: &CorrectionPair, params: &BoundParams, x: f64) -> Result<f64> {
    Ok(BoundEngine::new(dist, pair.clone(), params.clone())?.upper(x)?.value)
}

pub fn lower_bound(dist: &Distribution, pair: &CorrectionPair, params: &BoundParams, x: f64) -> Result<f64> {
    if params.l % 2 == 0 {
        return domain(format!("lower bound needs odd L, got {}", params.l));
    }
    Ok(BoundEngine::new(dist, pair.clone(), params.clone())?.lower(x)?.value)
}

/// Log-log slope fitted on the top decade of the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub eta: f64,
    /// Intercept: the fitted line is `log p = log_c + eta·log x`.
    pub log_c: f64,
    pub std_err: f64,
    pub points_used: usize,
    pub x_lo: f64,
    pub x_hi: f64,
}

pub fn decay_rate_estimate(points: &[(f64, f64)]) -> Result<DecayFit> {
    if points.len() < 10 {
        return domain(format!("need at least 10 points, got {}", points.len()));
    }
    for &(x, p) in points {
        if !(p > 0.0) || !(x > 0.0) {
            return domain(format!("decay fit needs x > 0 and p > 0, got ({x}, {p})"));
        }
    }
    let x_min = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x_max = points.iter().map(|p| p.0).fold(0.0, f64::max);
    if x_max / x_min < 100.0 * (1.0 - 1e-9) {
        return domain("decay fit needs points spanning at least two decades");
    }
    let lo = x_max / 10.0 * (1.0 - 1e-12);
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.0 >= lo)
        .map(|&(x, p)| (x.ln(), p.ln()))
        .collect();
    let n = used.len();
    if n < 3 {
        return domain("need at least 3 points in the top decade");
    }
    let mx = used.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = used.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = used.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = used.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let eta = sxy / sxx;
    let ssr: f64 = used
        .iter()
        .map(|p| (p.1 - my - eta * (p.0 - mx)).powi(2))
        .sum();
    let std_err = if n > 2 { (ssr / (n - 2) as f64 / sxx).sqrt() } else { 0.0 };
    Ok(DecayFit {
        eta,
        log_c: my - eta * mx,
        std_err,
        points_used: n,
        x_lo: lo,
        x_hi: x_max,
    })
}

/// Exact tail with its local log-log slope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailPoint {
    pub x: f64,
    pub tail: f64,
    /// Centred difference of `log tail` in `log x` (one-sided at the ends).
    pub slope: f64,
}

pub fn tail_profile(dist: &Distribution, x_grid: &[f64]) -> Result<Vec<TailPoint>> {
    if x_grid.len() < 2 || x_grid.windows(2).any(|w| !(w[1] > w[0])) || !(x_grid[0] > 0.0) {
        return domain("x grid must be positive, strictly increasing, with >= 2 points");
    }
    let tails = x_grid.iter().map(|&x| dist.tail(x)).collect::<Result<Vec<_>>>()?;
    let n = x_grid.len();
    Ok((0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            let slope = (tails[b].ln() - tails[a].ln()) / (x_grid[b].ln() - x_grid[a].ln());
            TailPoint {
                x: x_grid[i],
                tail: tails[i],
                slope,
            }
        })
        .collect())
}

/// Settings for [`theorem_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremCheckOptions {
    #[serde(rename = "L")]
    pub l: Option<u32>,
    pub delta: Option<f64>,
    pub x_window: (f64, f64),
    pub points: usize,
    /// `(ε_min, ε_max)` for the singularity fit.
    pub fit_window: Option<(f64, f64)>,
    pub eta_tolerance: Option<f64>,
}

impl TheoremCheckOptions {
    pub fn new(x_window: (f64, f64)) -> Self {
        Self {
            l: None,
            delta: None,
            x_window,
            points: 31,
            fit_window: None,
            eta_tolerance: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub x_grid: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    /// `P(X > x)`.
    pub tail_exact: Vec<f64>,
    pub scaled_upper: Vec<f64>,
    pub scaled_lower: Vec<f64>,
    pub t2_upper: Vec<f64>,
    pub eta_upper: DecayFit,
    pub eta_lower: DecayFit,
    pub eta_tail: DecayFit,
    /// Mean of the slopes of the two bounds.
    pub eta_estimate: f64,
    pub eta_tolerance: f64,
    pub r_predicted: f64,
    pub params: BoundParams,
    pub fit: SingularityFit,
    pub pair: CorrectionPair,
    /// Grid points where `lower ≤ P(X > x)` and `P(X ≥ x) ≤ upper` fail.
    pub sandwich_violations: usize,
    /// `min x^r·lower` and `max x^r·upper` on the top decade.
    pub scaled_lower_min: f64,
    pub scaled_upper_max: f64,
    /// `max |T2|/T1` of the upper bound on the top decade.
    pub t2_ratio_max: f64,
    /// Grid points with `lower ≤ 0`, left out of the slope fit.
    pub lower_nonpositive: usize,
    pub pass: bool,
}

impl BoundReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,lower,upper,tail_exact,scaled_lower,scaled_upper\n");
        for i in 0..self.x_grid.len() {
            out.push_str(&format!(
                "{:e},{:e},{:e},{:e},{:e},{:e}\n",
                self.x_grid[i],
                self.lower[i],
                self.upper[i],
                self.tail_exact[i],
                self.scaled_lower[i],
                self.scaled_upper[i]
            ));
        }
        out
    }
}

fn default_fit_window(r_hint: f64) -> (f64, f64) {
    if r_hint >= 3.0 {
        (1e-3, 1e-1)
    } else {
        (1e-4, 1e-2)
    }
}

/// Fit the singularity of a catalog member from transform samples alone.
pub fn fit_for_dist(dist: &Distribution, order: usize, window: Option<(f64, f64)>) -> Result<SingularityFit> {
    let (lo, hi) = window.unwrap_or_else(|| default_fit_window(dist.r()));
    let s: Vec<Complex64> = geomspace(lo, hi, 40).into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    let samples = sample_phi(dist, &s, 1e-13)?;
    fit_singularity(&samples, &CANDIDATES, order)
}

/// Full pipeline: fit, sign check, correction pair, bounds on a geometric
/// grid, and log-log slopes of bounds and exact tail.
pub fn theorem_check(dist: &Distribution, opts: &TheoremCheckOptions) -> Result<BoundReport> {
    let (x_lo, x_hi) = opts.x_window;
    if !(x_lo > dist.support_start() + 1.0) || !(x_hi >= 100.0 * x_lo) || opts.points < 10 {
        return domain("x window must start above support + 1, span two decades, with >= 10 points");
    }
    let l_guess = opts.l.unwrap_or(default_order(dist.r()) as u32);
    let fit = fit_for_dist(dist, l_guess as usize, opts.fit_window)?;
    let sc = sign_check(&fit.form);
    if !sc.pass {
        return Err(Error::Invariant(sc.diagnostic));
    }
    let r = fit.form.r;
    let l = opts.l.unwrap_or(default_order(r) as u32);
    if l != l_guess {
        return domain(format!("fitted r = {r} needs L = {l}; pass L explicitly"));
    }
    let pair = CorrectionPair::build(&fit.form, l as usize)?;
    let params = match opts.delta {
        Some(d) => BoundParams::new(l, d)?,
        None => BoundParams::default_for(dist, l)?,
    };
    let engine = BoundEngine::new(dist, pair.clone(), params.clone())?;
    let mut x_grid = geomspace(x_lo, x_hi, opts.points);
    if dist.is_discrete() {
        // Exact tails of lattice laws are step functions; sample at integers.
        for x in &mut x_grid {
            *x = x.round();
        }
        x_grid.dedup();
    }
    let rows: Vec<(BoundTerms, BoundTerms)> = x_grid
        .par_iter()
        .map(|&x| Ok((engine.upper(x)?, engine.lower(x)?)))
        .collect::<Result<_>>()?;
    let upper: Vec<f64> = rows.iter().map(|r| r.0.value).collect();
    let lower: Vec<f64> = rows.iter().map(|r| r.1.value).collect();
    let t2_upper: Vec<f64> = rows.iter().map(|r| r.0.t2).collect();
    let tail_exact = x_grid.iter().map(|&x| dist.tail(x)).collect::<Result<Vec<_>>>()?;
    let tail_incl = x_grid.iter().map(|&x| dist.tail_inclusive(x)).collect::<Result<Vec<_>>>()?;
    let scaled_upper: Vec<f64> = x_grid.iter().zip(&upper).map(|(x, u)| x.powf(r) * u).collect();
    let scaled_lower: Vec<f64> = x_grid.iter().zip(&lower).map(|(x, v)| x.powf(r) * v).collect();
    let slack = 1e-9;
    let sandwich_violations = (0..x_grid.len())
        .filter(|&i| {
            lower[i] > tail_exact[i] * (1.0 + slack) || upper[i] < tail_incl[i] * (1.0 - slack)
        })
        .count();
    let pts = |v: &[f64]| -> Vec<(f64, f64)> { x_grid.iter().copied().zip(v.iter().copied()).collect() };
    // The bounds only need to be positive for large x; the slope uses the
    // top decade, so drop the leading nonpositive entries.
    let positive = |v: &[f64]| -> Vec<(f64, f64)> { pts(v).into_iter().filter(|p| p.1 > 0.0).collect() };
    let lower_nonpositive = lower.iter().filter(|&&v| !(v > 0.0)).count();
    let eta_upper = decay_rate_estimate(&positive(&upper))?;
    let eta_lower = decay_rate_estimate(&positive(&lower))?;
    let eta_tail = decay_rate_estimate(&pts(&tail_exact))?;
    let eta_estimate = 0.5 * (eta_upper.eta + eta_lower.eta);
    let top = x_hi / 10.0 * (1.0 - 1e-12);
    let in_top: Vec<usize> = (0..x_grid.len()).filter(|&i| x_grid[i] >= top).collect();
    let scaled_lower_min = in_top.iter().map(|&i| scaled_lower[i]).fold(f64::INFINITY, f64::min);
    let scaled_upper_max = in_top.iter().map(|&i| scaled_upper[i]).fold(0.0, f64::max);
    let t2_ratio_max = in_top
        .iter()
        .map(|&i| (rows[i].0.t2 / rows[i].0.t1).abs())
        .fold(0.0, f64::max);
    let eta_tolerance = opts
        .eta_tolerance
        .unwrap_or(if dist.is_discrete() { 0.1 } else { 0.05 });
    let pass = (eta_estimate + dist.r()).abs() <= eta_tolerance
        && sandwich_violations == 0
        && scaled_lower_min > 0.0
        && scaled_upper_max / scaled_lower_min <= 50.0;
    Ok(BoundReport {
        x_grid,
        upper,
        lower,
        tail_exact,
        scaled_upper,
        scaled_lower,
        t2_upper,
        eta_upper,
        eta_lower,
        eta_tail,
        eta_estimate,
        eta_tolerance,
        r_predicted: r,
        params,
        fit,
        pair,
        sandwich_violations,
        scaled_lower_min,
        scaled_upper_max,
        t2_ratio_max,
        lower_nonpositive,
        pass,
    })
}

/// `e^{Lσ2·x} ∫_{[x,∞)} e^{−Lσ2·t} dF(t)` over the schedule, approaching
/// `P(X ≥ x)` from below as `σ2 → 0+`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltCheck {
    pub x: f64,
    pub sigma2: Vec<f64>,
    pub values: Vec<f64>,
    /// Linear extrapolation in `σ2` from the two smallest values.
    pub extrapolated: f64,
    pub exact: f64,
    pub monotone: bool,
}

pub fn tilt_check(dist: &Distribution, l: u32, x: f64, schedule: &[f64]) -> Result<TiltCheck> {
    if schedule.len() < 2 || schedule.windows(2).any(|w| !(w[1] < w[0] && w[1] > 0.0)) {
        return domain("schedule must be positive and strictly decreasing, length >= 2");
    }
    let exact = dist.tail_inclusive(x)?;
    let values = schedule
        .iter()
        .map(|&s2| {
            let a = l as f64 * s2;
            match *dist {
                Distribution::Pareto { r } => {
                    let x0 = x.max(1.0);
                    let f = |t: f64| (-a * (t - x)).exp() * r * t.powf(-r - 1.0);
                    let cfg = QuadConfig::new(1e-15 * exact, 1e-12);
                    let v = integrate(f, x0, x0 + 1.0 / a, cfg)?.value
                        + integrate_to_infinity(f, x0 + 1.0 / a, cfg)?.value;
                    Ok(v)
                }
                Distribution::ZetaDiff { .. } => {
                    let start = x.ceil().max(1.0) as u64;
                    let mut acc = 0.0;
                    let mut n = start;
                    loop {
                        let w = (-a * (n as f64 - x)).exp();
                        acc += w * dist.pmf(n)?;
                        if w * dist.tail(n as f64)? < 1e-15 * acc {
                            break;
                        }
                        n += 1;
                    }
                    Ok(acc)
                }
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let k = values.len();
    let (s1, s2) = (schedule[k - 2], schedule[k - 1]);
    let (v1, v2) = (values[k - 2], values[k - 1]);
    let extrapolated = v2 - (v1 - v2) * s2 / (s1 - s2);
    let monotone = values.windows(2).all(|w| w[1] >= w[0]) && values[k - 1] <= exact * (1.0 + 1e-12);
    Ok(TiltCheck {
        x,
        sigma2: schedule.to_vec(),
        values,
        extrapolated,
        exact,
        monotone,
    })
}

/// Integrals of the appendix lemmas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case")]
pub enum AppendixCase {
    /// `x^{min(n1,n2)} ∫_1^{x−1} (x−t)^{−n1} t^{−n2} dt`, bounded.
    A1 { n1: u32, n2: u32 },
    /// `x^n ∫_0^{x−1} e^{−kt} (x−t)^{−n} dt → 1/k`.
    A2 { k: f64, n: u32 },
}

pub fn appendix_asymptotics(case: AppendixCase, x_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    match case {
        AppendixCase::A1 { n1, n2 } if n1 < 2 || n2 < 2 => return domain("A1 needs n1, n2 >= 2"),
        AppendixCase::A2 { k, .. } if !(k > 0.0) => return domain("A2 needs k > 0"),
        _ => {}
    }
    x_grid
        .par_iter()
        .map(|&x| {
            if !(x > 2.0) {
                return domain(format!("appendix integrals need x > 2, got {x}"));
            }
            let cfg = QuadConfig::new(0.0, 1e-12).with_max_intervals(10_000);
            let v = match case {
                AppendixCase::A1 { n1, n2 } => {
                    let f = |t: f64| (x - t).powi(-(n1 as i32)) * t.powi(-(n2 as i32));
                    let breaks = geometric_breaks(1.0, x - 1.0);
                    integrate_with_breaks(f, 1.0, x - 1.0, &breaks, cfg)?.value
                        * x.powi(n1.min(n2) as i32)
                }
                AppendixCase::A2 { k, n } => {
                    let f = |t: f64| (-k * t).exp() * (x - t).powi(-(n as i32));
                    let breaks: Vec<f64> = (1..60).map(|j| j as f64 / k).filter(|&b| b < x - 1.0).collect();
                    integrate_with_breaks(f, 0.0, x - 1.0, &breaks, cfg)?.value * x.powi(n as i32)
                }
            };
            Ok((x, v))
        })
        .collect()
}

/// Breaks clustering geometrically towards both ends of `[a, b]`.
fn geometric_breaks(a: f64, b: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mid = 0.5 * (a + b);
    let mut d = 1.0;
    while a + d < mid {
        out.push(a + d);
        out.push(b - d);
        d *= 2.0;
    }
    out.push(mid);
    out
}

/// Both sides of Korevaar's Tauberian equivalence with `l ≡ 1`:
/// `(F(x) − 1)·x^r` and `(φ(1/x) − 1)·x^r/Γ(1 − r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KorevaarReport {
    pub x: Vec<f64>,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub final_left: f64,
    pub final_right: f64,
    /// `|left − right| / |left|` at the largest `x`.
    pub relative_gap: f64,
}

pub fn korevaar_check(dist: &Distribution, x_grid: &[f64]) -> Result<KorevaarReport> {
    let r = dist.r();
    if !(r > 0.0 && r < 1.0) {
        return domain(format!("Korevaar check needs 0 < r < 1, got r = {r}"));
    }
    if x_grid.is_empty() {
        return domain("empty x grid");
    }
    let mut left = Vec::with_capacity(x_grid.len());
    let mut right = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        left.push(-dist.tail(x)? * x.powf(r));
        // φ(1/x) − 1 = −∫(1 − e^{−t/x}) dF(t); the complement avoids cancellation.
        let s = 1.0 / x;
        let one_minus = match *dist {
            Distribution::Pareto { r } => {
                let f = |t: f64| -(-s * t).exp_m1() * r * t.powf(-r - 1.0);
                let cfg = QuadConfig::new(0.0, 1e-12).with_max_intervals(10_000);
                integrate_with_breaks(f, 1.0, 1e3 * x, &geometric_breaks(1.0, 1e3 * x), cfg)?.value
                    + integrate_to_infinity(f, 1e3 * x, cfg)?.value
            }
            Distribution::ZetaDiff { .. } => 1.0 - phi_quadrature(dist, Complex64::new(s, 0.0), 1e-13)?.re,
        };
        right.push(-one_minus * x.powf(r) / gamma(1.0 - r));
    }
    let final_left = *left.last().expect("nonempty");
    let final_right = *right.last().expect("nonempty");
    Ok(KorevaarReport {
        x: x_grid.to_vec(),
        relative_gap: ((final_left - final_right) / final_left).abs(),
        left,
        right,
        final_left,
        final_right,
    })
}
