//! Catalog of heavy-tailed distributions with exact tails.
//!
//! Two families are supported:
//!
//! * `Pareto { r }`: `F(x) = 1 − x^{−r}` on `x ≥ 1`, density `r·x^{−(r+1)}`.
//! * `ZetaDiff { r }`: integer-valued, `p_n = (n+1)^{−r} − (n+2)^{−r}` for
//!   `n ≥ 0` and integer `r ≥ 1`, with `P(X > n) = (n+2)^{−r}`.
//!
//! Both have decay rate `−r`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::numerics::special::zeta;

/// A heavy-tailed catalog member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawDistribution")]
pub enum Distribution {
    Pareto { r: f64 },
    ZetaDiff { r: u32 },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawDistribution {
    Pareto { r: f64 },
    ZetaDiff { r: f64 },
}

impl TryFrom<RawDistribution> for Distribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        match raw {
            RawDistribution::Pareto { r } => Distribution::pareto(r),
            RawDistribution::ZetaDiff { r } => {
                if r.fract() != 0.0 || r < 1.0 || r > u32::MAX as f64 {
                    return domain(format!("zeta_diff needs a positive integer r, got {r}"));
                }
                Distribution::zeta_diff(r as u32)
            }
        }
    }
}

impl Distribution {
    pub fn pareto(r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return domain(format!("pareto needs r > 0, got {r}"));
        }
        Ok(Self::Pareto { r })
    }

    pub fn zeta_diff(r: u32) -> Result<Self> {
        if r == 0 {
            return domain("zeta_diff needs r >= 1");
        }
        Ok(Self::ZetaDiff { r })
    }

    /// Tail exponent `r`, so that `P(X > x) ~ x^{−r}`.
    pub fn r(&self) -> f64 {
        match *self {
            Self::Pareto { r } => r,
            Self::ZetaDiff { r } => r as f64,
        }
    }

    /// Left end of the support.
    pub fn support_start(&self) -> f64 {
        match self {
            Self::Pareto { .. } => 1.0,
            Self::ZetaDiff { .. } => 0.0,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, Self::ZetaDiff { .. })
    }

    /// Distance along the imaginary axis from the origin to the nearest other
    /// singularity of the transform, when one is known.
    pub fn singularity_distance(&self) -> Option<f64> {
        match self {
            Self::Pareto { .. } => None,
            // φ(s) = p(e^{−s}) is 2πi-periodic.
            Self::ZetaDiff { .. } => Some(2.0 * std::f64::consts::PI),
        }
    }

    /// Exact `P(X > x)`. Integer-valued members use `P(X > ⌊x⌋)`.
    pub fn tail(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return domain(format!("tail needs x >= 0, got {x}"));
        }
        Ok(match *self {
            Self::Pareto { r } => {
                if x <= 1.0 {
                    1.0
                } else {
                    x.powf(-r)
                }
            }
            Self::ZetaDiff { r } => (x.floor() + 2.0).powi(-(r as i32)),
        })
    }

    /// `P(X ≥ x)`; differs from [`tail`](Self::tail) only at atoms.
    pub fn tail_inclusive(&self, x: f64) -> Result<f64> {
        match *self {
            Self::Pareto { .. } => self.tail(x),
            Self::ZetaDiff { r } => {
                if !(x >= 0.0) {
                    return domain(format!("tail needs x >= 0, got {x}"));
                }
                Ok((x.ceil() + 1.0).powi(-(r as i32)))
            }
        }
    }

    /// Density of a continuous member at `x ≥ 1`.
    pub fn density(&self, x: f64) -> Result<f64> {
        match *self {
            Self::Pareto { r } => {
                if !(x >= 1.0) {
                    return domain(format!("density below support: x = {x}"));
                }
                Ok(r * x.powf(-(r + 1.0)))
            }
            Self::ZetaDiff { .. } => domain("density requested for a discrete distribution"),
        }
    }

    /// Probability mass at `n` of a discrete member.
    pub fn pmf(&self, n: u64) -> Result<f64> {
        match *self {
            Self::ZetaDiff { r } => Ok(zeta_diff_pmf(r, n)),
            Self::Pareto { .. } => domain("pmf requested for a continuous distribution"),
        }
    }

    /// Inverse-CDF transform of a uniform variate `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            Self::Pareto { r } => (1.0 - u).powf(-1.0 / r),
            Self::ZetaDiff { r } => {
                // Smallest n with 1 − (n+2)^{−r} ≥ u.
                let guess = ((1.0 - u).powf(-1.0 / r as f64) - 2.0).ceil().max(0.0);
                let cdf = |n: f64| 1.0 - (n + 2.0).powi(-(r as i32));
                let mut n = guess;
                while n > 0.0 && cdf(n - 1.0) >= u {
                    n -= 1.0;
                }
                while cdf(n) < u {
                    n += 1.0;
                }
                n
            }
        }
    }

    /// `count` inverse-CDF draws from a ChaCha stream seeded by `seed`.
    pub fn sample(&self, count: usize, seed: u64) -> Result<Vec<f64>> {
        if count == 0 {
            return domain("sample count must be positive");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..count)
            .map(|_| self.quantile(rng.random::<f64>()))
            .collect())
    }

    /// Mean, when finite.
    pub fn mean(&self) -> Option<f64> {
        match *self {
            Self::Pareto { r } => (r > 1.0).then(|| r / (r - 1.0)),
            // E[X] = Σ_{n≥0} P(X > n) = Σ_{k≥2} k^{−r} = ζ(r) − 1
            Self::ZetaDiff { r } => (r > 1).then(|| zeta(r as f64) - 1.0),
        }
    }
}

pub(crate) fn zeta_diff_pmf(r: u32, n: u64) -> f64 {
    let a = (n as f64 + 1.0).powi(-(r as i32));
    let b = (n as f64 + 2.0).powi(-(r as i32));
    a - b
}

/// Fraction of `samples` strictly greater than `x`.
pub fn empirical_tail(samples: &[f64], x: f64) -> Result<f64> {
    if samples.is_empty() {
        return domain("empirical tail of an empty sample");
    }
    let above = samples.iter().filter(|&&s| s > x).count();
    Ok(above as f64 / samples.len() as f64)
}
