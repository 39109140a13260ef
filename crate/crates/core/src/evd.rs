//! Generalized Pareto and generalized extreme value distributions.
//!
//! Both families are removable-singular at ξ = 0. When |ξw| is below
//! [`XI_SWITCH`] the shape-dependent terms (1/ξ)·ln(1 + ξw) and (e^{ξt} − 1)/ξ
//! are evaluated from their series, which join the exponential/Gumbel limit
//! continuously. Switching on the product rather than on ξ alone keeps the
//! series inside its range of accuracy for extreme arguments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::ln_gamma_unchecked;

/// Products |ξw| below this use the series form of the ξ-dependent terms.
pub const XI_SWITCH: f64 = 1e-6;

/// ln(1 + ξw)/ξ, requires 1 + ξw > 0.
#[inline]
pub(crate) fn log1p_div(xi: f64, w: f64) -> f64 {
    let x = xi * w;
    if x.abs() < XI_SWITCH {
        w * (1.0 - x * (0.5 - x / 3.0))
    } else {
        (xi * w).ln_1p() / xi
    }
}

/// (e^{ξt} − 1)/ξ.
#[inline]
pub(crate) fn expm1_div(xi: f64, t: f64) -> f64 {
    let y = xi * t;
    if y.abs() < XI_SWITCH {
        t * (1.0 + y * (0.5 + y / 6.0))
    } else {
        (xi * t).exp_m1() / xi
    }
}

/// Scale σ > 0 and shape ξ of a generalized Pareto distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpParams {
    pub sigma: f64,
    pub xi: f64,
}

impl GpParams {
    pub fn new(sigma: f64, xi: f64) -> Result<Self> {
        let p = GpParams { sigma, xi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::domain("GpParams", format!("sigma must be positive, got {}", self.sigma)));
        }
        if !self.xi.is_finite() {
            return Err(Error::domain("GpParams", "xi must be finite"));
        }
        Ok(())
    }

    /// Upper end point of the support, `None` when unbounded (ξ ≥ 0).
    pub fn upper_endpoint(&self) -> Option<f64> {
        (self.xi < 0.0).then(|| -self.sigma / self.xi)
    }
}

/// Location μ, scale σ > 0 and shape ξ of a GEV distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GevParams {
    pub mu: f64,
    pub sigma: f64,
    pub xi: f64,
}

impl GevParams {
    pub fn new(mu: f64, sigma: f64, xi: f64) -> Result<Self> {
        let p = GevParams { mu, sigma, xi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::domain("GevParams", format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.mu.is_finite() && self.xi.is_finite()) {
            return Err(Error::domain("GevParams", "mu and xi must be finite"));
        }
        Ok(())
    }
}

pub(crate) fn sorted_strict(mut values: Vec<f64>) -> Result<Vec<f64>> {
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Data(format!("non-finite value {bad}")));
    }
    values.sort_by(f64::total_cmp);
    if let Some(w) = values.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Tie { value: w[0] });
    }
    Ok(values)
}

/// Threshold excesses z₁ < … < z_m, all positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcessSample {
    threshold: f64,
    z: Vec<f64>,
}

impl ExcessSample {
    /// Builds a sample from excesses (any order). Ties are rejected.
    pub fn new(threshold: f64, excesses: Vec<f64>) -> Result<Self> {
        let z = sorted_strict(excesses)?;
        if z.is_empty() {
            return Err(Error::Data("an excess sample needs at least one value".into()));
        }
        if z[0] <= 0.0 {
            return Err(Error::Data(format!("excesses must be positive, got {}", z[0])));
        }
        Ok(ExcessSample { threshold, z })
    }

    /// Extracts z = x − u for every raw x strictly above `threshold`.
    pub fn from_raw(raw: &[f64], threshold: f64) -> Result<Self> {
        if !threshold.is_finite() {
            return Err(Error::Data("threshold must be finite".into()));
        }
        let excesses = raw.iter().filter(|&&x| x > threshold).map(|x| x - threshold).collect();
        Self::new(threshold, excesses)
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn values(&self) -> &[f64] {
        &self.z
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// Largest excess z_m.
    pub fn max(&self) -> f64 {
        *self.z.last().expect("non-empty by construction")
    }
}

/// Block maxima y₁ < … < y_n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockMaximaSample {
    y: Vec<f64>,
}

impl BlockMaximaSample {
    pub fn new(maxima: Vec<f64>) -> Result<Self> {
        let y = sorted_strict(maxima)?;
        if y.is_empty() {
            return Err(Error::Data("a block-maxima sample needs at least one value".into()));
        }
        Ok(BlockMaximaSample { y })
    }

    /// Per-block maxima of consecutive blocks; a trailing partial block is dropped.
    pub fn from_blocks(raw: &[f64], block_size: usize) -> Result<Self> {
        if block_size == 0 {
            return Err(Error::Data("block size must be positive".into()));
        }
        let maxima = raw
            .chunks_exact(block_size)
            .map(|b| b.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect();
        Self::new(maxima)
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// δ_i = y_i − y₁ for i = 2..n.
    pub fn spacings(&self) -> Vec<f64> {
        self.y[1..].iter().map(|v| v - self.y[0]).collect()
    }
}

/// Log density of GP(σ, ξ) at `z`; −∞ outside the support.
pub fn gp_logpdf(z: f64, p: &GpParams) -> Result<f64> {
    p.validate()?;
    if z.is_nan() {
        return Err(Error::domain("gp_logpdf", "z is NaN"));
    }
    if z < 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let w = z / p.sigma;
    let arg = p.xi * w;
    if 1.0 + arg <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(-p.sigma.ln() - arg.ln_1p() - log1p_div(p.xi, w))
}

/// Distribution function of GP(σ, ξ).
pub fn gp_cdf(z: f64, p: &GpParams) -> Result<f64> {
    p.validate()?;
    if z.is_nan() {
        return Err(Error::domain("gp_cdf", "z is NaN"));
    }
    if z <= 0.0 {
        return Ok(0.0);
    }
    let w = z / p.sigma;
    if 1.0 + p.xi * w <= 0.0 {
        return Ok(1.0);
    }
    Ok(-(-log1p_div(p.xi, w)).exp_m1())
}

/// Quantile of GP(σ, ξ) at probability `q ∈ (0, 1)`, by closed-form inversion.
pub fn gp_quantile(q: f64, p: &GpParams) -> Result<f64> {
    p.validate()?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain("gp_quantile", format!("probability must lie in (0, 1), got {q}")));
    }
    let t = -(-q).ln_1p();
    Ok(p.sigma * expm1_div(p.xi, t))
}

/// `count` GP draws by inversion, using the caller's generator.
pub fn gp_sample_rng<R: Rng + ?Sized>(p: &GpParams, count: usize, rng: &mut R) -> Result<Vec<f64>> {
    p.validate()?;
    Ok((0..count)
        .map(|_| {
            // 1 − U ∈ (0, 1]
            let u: f64 = rng.random();
            let t = -(1.0 - u).ln();
            p.sigma * expm1_div(p.xi, t)
        })
        .collect())
}

/// `count` GP draws from a ChaCha8 stream seeded with `seed`.
pub fn gp_sample(p: &GpParams, count: usize, seed: u64) -> Result<Vec<f64>> {
    gp_sample_rng(p, count, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Log density of GEV(μ, σ, ξ) at `y`; −∞ outside {1 + ξ(y−μ)/σ > 0}.
pub fn gev_logpdf(y: f64, p: &GevParams) -> Result<f64> {
    p.validate()?;
    if y.is_nan() {
        return Err(Error::domain("gev_logpdf", "y is NaN"));
    }
    let s = (y - p.mu) / p.sigma;
    let arg = p.xi * s;
    if 1.0 + arg <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let l = log1p_div(p.xi, s);
    Ok(-p.sigma.ln() - arg.ln_1p() - l - (-l).exp())
}

/// Distribution function of GEV(μ, σ, ξ).
pub fn gev_cdf(y: f64, p: &GevParams) -> Result<f64> {
    p.validate()?;
    if y.is_nan() {
        return Err(Error::domain("gev_cdf", "y is NaN"));
    }
    let s = (y - p.mu) / p.sigma;
    if 1.0 + p.xi * s <= 0.0 {
        return Ok(if p.xi > 0.0 { 0.0 } else { 1.0 });
    }
    Ok((-(-log1p_div(p.xi, s)).exp()).exp())
}

/// Quantile of GEV(μ, σ, ξ) at probability `q ∈ (0, 1)`.
pub fn gev_quantile(q: f64, p: &GevParams) -> Result<f64> {
    p.validate()?;
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::domain("gev_quantile", format!("probability must lie in (0, 1), got {q}")));
    }
    let t = -(-q.ln()).ln();
    Ok(p.mu + p.sigma * expm1_div(p.xi, t))
}

pub fn gev_sample_rng<R: Rng + ?Sized>(p: &GevParams, count: usize, rng: &mut R) -> Result<Vec<f64>> {
    p.validate()?;
    Ok((0..count)
        .map(|_| {
            let u: f64 = rng.random();
            // u ∈ [0, 1); reflect so the log argument stays in (0, 1].
            let q = 1.0 - u;
            let t = -(-q.ln()).ln();
            p.mu + p.sigma * expm1_div(p.xi, t)
        })
        .collect())
}

pub fn gev_sample(p: &GevParams, count: usize, seed: u64) -> Result<Vec<f64>> {
    gev_sample_rng(p, count, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// E(Z^r) = r!·σ^r / ∏_{i=1}^r (1 − iξ), finite only for ξ < 1/r.
pub fn gp_moment(r: u32, p: &GpParams) -> Result<f64> {
    p.validate()?;
    if r == 0 {
        return Err(Error::domain("gp_moment", "order must be a positive integer"));
    }
    if p.xi * r as f64 >= 1.0 {
        return Err(Error::MomentUndefined { order: r, xi: p.xi });
    }
    let mut value = 1.0;
    for i in 1..=r {
        value *= i as f64 * p.sigma / (1.0 - i as f64 * p.xi);
    }
    Ok(value)
}

/// E(Z^{−a/ξ}) for ξ < 0 and a > ξ, via the beta-integral closed form.
pub fn gp_negpower_moment(a: f64, p: &GpParams) -> Result<f64> {
    p.validate()?;
    let xi = p.xi;
    if xi >= 0.0 {
        return Err(Error::domain("gp_negpower_moment", format!("requires xi < 0, got {xi}")));
    }
    if !(a.is_finite() && a > xi) {
        return Err(Error::domain("gp_negpower_moment", format!("requires a > xi, got a = {a}, xi = {xi}")));
    }
    let ln = (a / xi - 1.0) * (-xi).ln() - (a / xi) * p.sigma.ln()
        + ln_gamma_unchecked(1.0 - a / xi)
        + ln_gamma_unchecked(-1.0 / xi)
        - ln_gamma_unchecked(1.0 - (a + 1.0) / xi);
    Ok(ln.exp())
}
