//! Stationary distribution of the M/G/1-type chain
//!
//! ```text
//!     | b0 b1 b2 ... |
//! P = | a0 a1 a2 ... |
//!     | 0  a0 a1 ... |
//!     | ...          |
//! ```
//!
//! whose generating function is `π(z) = π0 (zB(z) − A(z)) / (z − A(z))`.
//! Coefficients come from the level-crossing (Ramaswami) recursion, which
//! only adds nonnegative terms; a dense solve of the truncated chain serves
//! as an independent oracle.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dist::{zeta_diff_pmf, Distribution};
use crate::error::{domain, Error, Result};
use crate::ls_transform::phi_quadrature;
use crate::numerics::geomspace;
use crate::numerics::special::zeta;
use crate::tailbound::{decay_rate_estimate, DecayFit};

/// Light-tailed coefficient tables are cut where the remaining mass drops
/// below this.
const TABLE_TAIL: f64 = 1e-17;
/// Largest truncation the dense oracle accepts.
pub const ORACLE_MAX_N: usize = 4000;
pub const MAX_N: usize = 1_000_000;
/// Negative coefficients down to this are rounding and get clipped.
const CLIP: f64 = 1e-10;
const PGF_SINGULAR: f64 = 1e-12;

/// A probability sequence on `{0, 1, 2, ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoeffSource {
    Explicit { coeffs: Vec<f64> },
    Poisson { mean: f64 },
    /// `p_n = (1 − q) q^n` with the given mean `q/(1 − q)`.
    Geometric { mean: f64 },
    ZetaDiff { r: u32 },
}

/// Coefficients and tail sums `Σ_{m≥n} p_m`, tabulated or analytic.
#[derive(Debug, Clone)]
enum Coeffs {
    Table { p: Vec<f64>, tail: Vec<f64> },
    Zeta { r: u32 },
}

impl Coeffs {
    fn from_table(p: Vec<f64>) -> Self {
        let mut tail = vec![0.0; p.len() + 1];
        for n in (0..p.len()).rev() {
            tail[n] = tail[n + 1] + p[n];
        }
        Coeffs::Table { p, tail }
    }

    fn coeff(&self, n: usize) -> f64 {
        match self {
            Coeffs::Table { p, .. } => p.get(n).copied().unwrap_or(0.0),
            Coeffs::Zeta { r } => zeta_diff_pmf(*r, n as u64),
        }
    }

    /// `Σ_{m≥n} p_m`.
    fn tail_from(&self, n: usize) -> f64 {
        match self {
            Coeffs::Table { tail, .. } => tail.get(n).copied().unwrap_or(0.0),
            // telescoping: Σ_{m≥n} ((m+1)^{-r} − (m+2)^{-r}) = (n+1)^{-r}
            Coeffs::Zeta { r } => (n as f64 + 1.0).powi(-(*r as i32)),
        }
    }

    /// Index past which all coefficients vanish, if any.
    fn support_len(&self) -> Option<usize> {
        match self {
            Coeffs::Table { p, .. } => Some(p.len()),
            Coeffs::Zeta { .. } => None,
        }
    }
}

impl CoeffSource {
    fn build(&self) -> Result<Coeffs> {
        match *self {
            CoeffSource::Explicit { ref coeffs } => {
                if coeffs.is_empty() || coeffs.iter().any(|&c| !(c >= 0.0) || !c.is_finite()) {
                    return domain("explicit coefficients must be nonempty, finite and nonnegative");
                }
                let total: f64 = coeffs.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return domain(format!("explicit coefficients sum to {total}, not 1"));
                }
                Ok(Coeffs::from_table(coeffs.clone()))
            }
            CoeffSource::Poisson { mean } => {
                if !(mean > 0.0 && mean < 50.0) {
                    return domain(format!("Poisson mean must lie in (0, 50), got {mean}"));
                }
                let mut p = vec![(-mean).exp()];
                let mut acc = p[0];
                while 1.0 - acc > TABLE_TAIL || *p.last().expect("nonempty") > TABLE_TAIL {
                    let n = p.len() as f64;
                    let next = p.last().expect("nonempty") * mean / n;
                    acc += next;
                    p.push(next);
                    if next == 0.0 {
                        break;
                    }
                }
                Ok(Coeffs::from_table(p))
            }
            CoeffSource::Geometric { mean } => {
                if !(mean > 0.0 && mean.is_finite()) {
                    return domain(format!("geometric mean must be positive, got {mean}"));
                }
                let q = mean / (1.0 + mean);
                let len = (TABLE_TAIL.ln() / q.ln()).ceil() as usize + 1;
                Ok(Coeffs::from_table((0..len).map(|n| (1.0 - q) * q.powi(n as i32)).collect()))
            }
            CoeffSource::ZetaDiff { r } => {
                if r == 0 {
                    return domain("zeta-difference needs r >= 1");
                }
                Ok(Coeffs::Zeta { r })
            }
        }
    }

    /// Mean `Σ n p_n`; infinite for the zeta-difference law with `r = 1`.
    pub fn mean(&self) -> Result<f64> {
        match *self {
            CoeffSource::Explicit { ref coeffs } => {
                Ok(coeffs.iter().enumerate().map(|(n, &c)| n as f64 * c).sum())
            }
            CoeffSource::Poisson { mean } | CoeffSource::Geometric { mean } => Ok(mean),
            CoeffSource::ZetaDiff { r } if r >= 2 => Ok(zeta(r as f64) - 1.0),
            CoeffSource::ZetaDiff { r } => domain(format!("zeta-difference r={r} has infinite mean")),
        }
    }

    /// Generating function `Σ p_n z^n` for `|z| < 1`.
    pub fn pgf(&self, z: Complex64) -> Result<Complex64> {
        if !(z.norm() < 1.0) {
            return domain(format!("pgf needs |z| < 1, got {z}"));
        }
        match *self {
            CoeffSource::Explicit { ref coeffs } => {
                Ok(coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c))
            }
            CoeffSource::Poisson { mean } => Ok((mean * (z - 1.0)).exp()),
            CoeffSource::Geometric { mean } => {
                let q = mean / (1.0 + mean);
                Ok(Complex64::new(1.0 - q, 0.0) / (1.0 - z * q))
            }
            CoeffSource::ZetaDiff { r } => {
                if z.norm() < 1e-3 {
                    // Few terms suffice near the origin, where −log z is far out.
                    let mut acc = Complex64::new(0.0, 0.0);
                    let mut zn = Complex64::new(1.0, 0.0);
                    for n in 0..12 {
                        acc += zn * zeta_diff_pmf(r, n);
                        zn *= z;
                    }
                    return Ok(acc);
                }
                // B(z) = φ(−log z) with φ the transform of the lattice law.
                phi_quadrature(&Distribution::ZetaDiff { r }, -z.ln(), 1e-13)
            }
        }
    }
}

/// The chain, with `π0` fixed by `π(1) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mg1Model {
    pub a: CoeffSource,
    pub b: CoeffSource,
    pub pi0: f64,
    pub mean_a: f64,
    pub mean_b: f64,
}

/// `π0 = (1 − ā)/(1 + β̄ − ā)`, the `z → 1` limit of the generating function.
pub fn normalize_pi0(a: &CoeffSource, b: &CoeffSource) -> Result<f64> {
    let mean_a = a.mean()?;
    if mean_a >= 1.0 {
        return Err(Error::Unstable { mean_a });
    }
    let mean_b = b.mean()?;
    Ok((1.0 - mean_a) / (1.0 + mean_b - mean_a))
}

impl Mg1Model {
    pub fn new(a: CoeffSource, b: CoeffSource) -> Result<Self> {
        a.build()?;
        b.build()?;
        let pi0 = normalize_pi0(&a, &b)?;
        Ok(Self {
            mean_a: a.mean()?,
            mean_b: b.mean()?,
            a,
            b,
            pi0,
        })
    }
}

/// `π0 (zB(z) − A(z)) / (z − A(z))` for `|z| < 1`.
pub fn pk_pgf(model: &Mg1Model, z: Complex64) -> Result<Complex64> {
    let az = model.a.pgf(z)?;
    let bz = model.b.pgf(z)?;
    let den = z - az;
    if den.norm() < PGF_SINGULAR {
        return Err(Error::Singularity(format!("z − A(z) vanishes at z = {z}")));
    }
    Ok((z * bz - az) * model.pi0 / den)
}

/// `π_0..π_N` from `π_j a_0 = π_0 B̄_j + Σ_{k=1}^{j−1} π_k Ā_{j−k+1}`, with
/// `B̄_n`, `Ā_n` the tail sums from `n`: probability flow up across the cut
/// between levels `j − 1` and `j` equals the flow down.
pub fn pi_coefficients(model: &Mg1Model, n: usize) -> Result<Vec<f64>> {
    if n == 0 || n > MAX_N {
        return domain(format!("need 1 <= N <= {MAX_N}, got {n}"));
    }
    let a = model.a.build()?;
    let b = model.b.build()?;
    let a0 = a.coeff(0);
    if !(a0 > 0.0) {
        return Err(Error::Numeric("a_0 = 0: the chain never moves down, z − A(z) has no constant term".into()));
    }
    // Ā_m for m >= 2 is all the recursion needs; it vanishes past the support.
    let reach = a.support_len().map_or(n + 1, |len| len.min(n + 1));
    let a_bar: Vec<f64> = (0..=reach + 1).map(|m| a.tail_from(m)).collect();
    let mut pi = vec![0.0; n + 1];
    pi[0] = model.pi0;
    for j in 1..=n {
        let mut acc = model.pi0 * b.tail_from(j);
        // Terms with j − k + 1 > reach vanish.
        let k_lo = (j + 1).saturating_sub(reach).max(1);
        for k in k_lo..j {
            acc += pi[k] * a_bar[j - k + 1];
        }
        let v = acc / a0;
        if v < -CLIP {
            return Err(Error::Numeric(format!("pi_{j} = {v} is negative")));
        }
        pi[j] = v.max(0.0);
    }
    let total: f64 = pi.iter().sum();
    if total > 1.0 + 1e-9 {
        return Err(Error::Numeric(format!("coefficients sum to {total} > 1")));
    }
    Ok(pi)
}

/// Stationary vector of the `(N+1)×(N+1)` northwest truncation of `P`, with
/// each row's lost mass moved to the last column. For a chain that only
/// steps down by one this is the chain watched on `{0..N}`, so the result
/// is `π` conditioned on `{0..N}`.
pub fn chain_oracle(model: &Mg1Model, n: usize) -> Result<Vec<f64>> {
    if n == 0 || n > ORACLE_MAX_N {
        return domain(format!("oracle needs 1 <= N <= {ORACLE_MAX_N}, got {n}"));
    }
    let p = truncated_matrix(model, n)?;
    let size = n + 1;
    // Solve x (P − I) = 0, Σx = 1: transpose, replace the last equation.
    let mut m = p.transpose();
    for i in 0..size {
        m[(i, i)] -= 1.0;
    }
    let mut rhs = nalgebra::DVector::zeros(size);
    for j in 0..size {
        m[(size - 1, j)] = 1.0;
    }
    rhs[size - 1] = 1.0;
    let x = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numeric("singular truncated chain".into()))?;
    let total: f64 = x.iter().sum();
    Ok(x.iter().map(|v| v / total).collect())
}

/// The truncated transition matrix after augmentation.
pub fn truncated_matrix(model: &Mg1Model, n: usize) -> Result<DMatrix<f64>> {
    let a = model.a.build()?;
    let b = model.b.build()?;
    let size = n + 1;
    let mut p = DMatrix::zeros(size, size);
    for j in 0..size {
        p[(0, j)] = b.coeff(j);
    }
    for i in 1..size {
        for j in (i - 1)..size {
            p[(i, j)] = a.coeff(j + 1 - i);
        }
    }
    for i in 0..size {
        let lost = if i == 0 { b.tail_from(size) } else { a.tail_from(size + 1 - i) };
        p[(i, n)] += lost;
    }
    Ok(p)
}

/// Tail-decay comparison of `π` and `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mg1Report {
    pub n_max: usize,
    pub pi0: f64,
    pub mean_a: f64,
    pub mean_b: f64,
    /// Slope of `log P(Q > n)` for the stationary law.
    pub eta_pi: DecayFit,
    /// Slope of `log P(B > n)`.
    pub eta_b: DecayFit,
    /// `|eta_pi − eta_b| <= 0.15`.
    pub verdict: bool,
    /// Dividing by `z − A(z)`, which vanishes to first order at `z = 1`,
    /// lowers the singularity of `B(e^{−s})` by one power of `s`; with a
    /// finite-mean light `a` the tail exponent is `eta_b + 1`.
    pub eta_transfer: f64,
    pub transfer_verdict: bool,
    /// `Σ_{n≤N} π_n` plus the fitted power-law tail at `N`.
    pub mass_check: f64,
    pub pi: Vec<f64>,
}

impl Mg1Report {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,pi,tail_pi\n");
        let mut tail = 1.0;
        for (n, &p) in self.pi.iter().enumerate() {
            tail -= p;
            out.push_str(&format!("{n},{p:e},{tail:e}\n"));
        }
        out
    }
}

pub fn mg1_tail_report(model: &Mg1Model, n: usize) -> Result<Mg1Report> {
    if n < 1000 {
        return domain(format!("tail report needs N >= 1000, got {n}"));
    }
    let b = model.b.build()?;
    if !matches!(model.b, CoeffSource::ZetaDiff { r } if r >= 2) {
        return domain("tail report needs b = zeta-difference with r >= 2");
    }
    let pi = pi_coefficients(model, n)?;
    // P(Q > m) = 1 − Σ_{k≤m} π_k, summed with compensation.
    let mut tails = Vec::with_capacity(n + 1);
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &p in &pi {
        let t = sum + p;
        comp += if sum.abs() >= p.abs() { (sum - t) + p } else { (p - t) + sum };
        sum = t;
        tails.push((1.0 - sum) - comp);
    }
    let mut grid: Vec<usize> = geomspace(10.0, n as f64, 41).into_iter().map(|x| x.round() as usize).collect();
    grid.dedup();
    let pts_pi: Vec<(f64, f64)> = grid.iter().map(|&m| (m as f64, tails[m])).collect();
    let pts_b: Vec<(f64, f64)> = grid.iter().map(|&m| (m as f64, b.tail_from(m + 1))).collect();
    let eta_pi = decay_rate_estimate(&pts_pi)?;
    let eta_b = decay_rate_estimate(&pts_b)?;
    let eta_transfer = eta_b.eta + 1.0;
    let fitted_tail = (eta_pi.log_c + eta_pi.eta * (n as f64).ln()).exp();
    Ok(Mg1Report {
        n_max: n,
        pi0: model.pi0,
        mean_a: model.mean_a,
        mean_b: model.mean_b,
        verdict: (eta_pi.eta - eta_b.eta).abs() <= 0.15,
        transfer_verdict: (eta_pi.eta - eta_transfer).abs() <= 0.15,
        eta_transfer,
        eta_pi,
        eta_b,
        mass_check: sum + comp + fitted_tail,
        pi,
    })
}
