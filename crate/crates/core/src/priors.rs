//! Reference-prior catalog for the GP and GEV models.
//!
//! Every prior has the form π(ξ)/σ (times a flat prior on μ for GEV). All
//! densities are unnormalized and evaluated in log space; −∞ marks points
//! outside the prior support.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evd::{GevParams, GpParams};
use crate::specfun::{
    digamma_unchecked, ln_gamma_unchecked, ALZER_LAMBDA, EULER_GAMMA, PI2_OVER_6, ZETA,
};

/// π²/6 + (1−γ)², the leading constant of the Jeffreys GEV prior.
pub const JEFFREYS_GEV_A: f64 = PI2_OVER_6 + (1.0 - EULER_GAMMA) * (1.0 - EULER_GAMMA);

/// Largest ξ for which the near-half upper bound is claimed, −1/2 + 1.29.
pub const NEAR_HALF_WINDOW_END: f64 = -0.5 + 1.29;

/// Shapes with |ξ| below this use the Taylor expansion of the Jeffreys GEV component.
const JEFFREYS_SERIES_RADIUS: f64 = 0.05;
const SERIES_DEGREE: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Gp,
    Gev,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorFamily {
    JeffreysGp,
    MdiGp,
    MdiGpTrunc,
    UniformGp,
    JeffreysGev,
    JeffreysGevTrunc,
    MdiGev,
    MdiGevTrunc,
    UniformGev,
}

impl PriorFamily {
    pub const ALL: [PriorFamily; 9] = [
        PriorFamily::JeffreysGp,
        PriorFamily::MdiGp,
        PriorFamily::MdiGpTrunc,
        PriorFamily::UniformGp,
        PriorFamily::JeffreysGev,
        PriorFamily::JeffreysGevTrunc,
        PriorFamily::MdiGev,
        PriorFamily::MdiGevTrunc,
        PriorFamily::UniformGev,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PriorFamily::JeffreysGp => "jeffreys_gp",
            PriorFamily::MdiGp => "mdi_gp",
            PriorFamily::MdiGpTrunc => "mdi_gp_trunc",
            PriorFamily::UniformGp => "uniform_gp",
            PriorFamily::JeffreysGev => "jeffreys_gev",
            PriorFamily::JeffreysGevTrunc => "jeffreys_gev_trunc",
            PriorFamily::MdiGev => "mdi_gev",
            PriorFamily::MdiGevTrunc => "mdi_gev_trunc",
            PriorFamily::UniformGev => "uniform_gev",
        }
    }

    pub fn model(self) -> Model {
        match self {
            PriorFamily::JeffreysGp | PriorFamily::MdiGp | PriorFamily::MdiGpTrunc | PriorFamily::UniformGp => {
                Model::Gp
            }
            _ => Model::Gev,
        }
    }

    pub fn is_truncated(self) -> bool {
        matches!(self, PriorFamily::MdiGpTrunc | PriorFamily::JeffreysGevTrunc | PriorFamily::MdiGevTrunc)
    }

    /// Whether ∫ π(ξ) dξ is finite over the family's support.
    pub fn has_proper_xi_component(self) -> bool {
        matches!(
            self,
            PriorFamily::JeffreysGp
                | PriorFamily::MdiGpTrunc
                | PriorFamily::JeffreysGevTrunc
                | PriorFamily::MdiGevTrunc
        )
    }
}

impl fmt::Display for PriorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PriorFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase().replace('-', "_");
        PriorFamily::ALL
            .into_iter()
            .find(|f| f.name() == t)
            .ok_or_else(|| Error::Usage(format!("unknown prior family `{s}`")))
    }
}

/// A prior family plus optional truncation bounds on ξ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub family: PriorFamily,
    pub xi_lower: Option<f64>,
    pub xi_upper: Option<f64>,
}

impl PriorSpec {
    /// The family with its default truncation (ξ ≥ −1 for the truncated MDI priors).
    /// `jeffreys_gev_trunc` has no default upper limit; use [`PriorSpec::with_bounds`].
    pub fn new(family: PriorFamily) -> Result<Self> {
        Self::with_bounds(family, None, None)
    }

    pub fn with_bounds(family: PriorFamily, xi_lower: Option<f64>, xi_upper: Option<f64>) -> Result<Self> {
        let mut spec = PriorSpec { family, xi_lower, xi_upper };
        if matches!(family, PriorFamily::MdiGpTrunc | PriorFamily::MdiGevTrunc) && spec.xi_lower.is_none() {
            spec.xi_lower = Some(-1.0);
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for b in [self.xi_lower, self.xi_upper].into_iter().flatten() {
            if !b.is_finite() {
                return Err(Error::Usage(format!("truncation bound must be finite, got {b}")));
            }
        }
        if !self.family.is_truncated() && (self.xi_lower.is_some() || self.xi_upper.is_some()) {
            return Err(Error::Usage(format!(
                "`{}` takes no truncation bounds; use the truncated variant",
                self.family
            )));
        }
        match self.family {
            PriorFamily::MdiGpTrunc | PriorFamily::MdiGevTrunc if self.xi_lower.is_none() => {
                return Err(Error::Usage(format!("`{}` needs a lower bound on xi", self.family)));
            }
            PriorFamily::JeffreysGevTrunc if self.xi_upper.is_none() => {
                return Err(Error::Usage("`jeffreys_gev_trunc` needs an upper bound xi_upper".into()));
            }
            _ => {}
        }
        if self.family == PriorFamily::JeffreysGevTrunc && self.xi_upper.unwrap() <= -0.5 {
            return Err(Error::Usage("xi_upper must exceed -1/2 for the Jeffreys GEV prior".into()));
        }
        if let (Some(lo), Some(hi)) = (self.xi_lower, self.xi_upper) {
            if lo >= hi {
                return Err(Error::Usage(format!("xi_lower ({lo}) must be below xi_upper ({hi})")));
            }
        }
        Ok(())
    }

    pub fn model(&self) -> Model {
        self.family.model()
    }

    /// Closed ξ-interval containing the support (end points may carry zero density).
    pub fn xi_support(&self) -> (f64, f64) {
        let (mut lo, mut hi) = match self.family {
            PriorFamily::JeffreysGp | PriorFamily::JeffreysGev | PriorFamily::JeffreysGevTrunc => {
                (-0.5, f64::INFINITY)
            }
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        };
        if let Some(l) = self.xi_lower {
            lo = lo.max(l);
        }
        if let Some(h) = self.xi_upper {
            hi = hi.min(h);
        }
        (lo, hi)
    }

    /// ln π(ξ); −∞ off the support.
    pub fn ln_xi_component(&self, xi: f64) -> f64 {
        if xi.is_nan() {
            return f64::NAN;
        }
        if let Some(l) = self.xi_lower {
            if xi < l {
                return f64::NEG_INFINITY;
            }
        }
        if let Some(h) = self.xi_upper {
            if xi > h {
                return f64::NEG_INFINITY;
            }
        }
        match self.family {
            PriorFamily::JeffreysGp => {
                if xi <= -0.5 {
                    f64::NEG_INFINITY
                } else {
                    -xi.ln_1p() - 0.5 * (2.0 * xi).ln_1p()
                }
            }
            PriorFamily::MdiGp => -xi,
            PriorFamily::MdiGpTrunc => -(xi + 1.0),
            PriorFamily::UniformGp | PriorFamily::UniformGev => 0.0,
            PriorFamily::JeffreysGev | PriorFamily::JeffreysGevTrunc => ln_jeffreys_gev_xi(xi),
            PriorFamily::MdiGev | PriorFamily::MdiGevTrunc => -EULER_GAMMA * (1.0 + xi),
        }
    }
}

impl fmt::Display for PriorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        if let Some(l) = self.xi_lower {
            write!(f, " xi>={l}")?;
        }
        if let Some(h) = self.xi_upper {
            write!(f, " xi<={h}")?;
        }
        Ok(())
    }
}

/// Parameters of either model, for [`log_prior`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Params {
    Gp(GpParams),
    Gev(GevParams),
}

impl From<GpParams> for Params {
    fn from(p: GpParams) -> Self {
        Params::Gp(p)
    }
}

impl From<GevParams> for Params {
    fn from(p: GevParams) -> Self {
        Params::Gev(p)
    }
}

/// ln of the unnormalized prior density π(ξ)/σ.
pub fn log_prior(spec: &PriorSpec, params: impl Into<Params>) -> Result<f64> {
    let (sigma, xi) = match (params.into(), spec.model()) {
        (Params::Gp(p), Model::Gp) => {
            p.validate()?;
            (p.sigma, p.xi)
        }
        (Params::Gev(p), Model::Gev) => {
            p.validate()?;
            (p.sigma, p.xi)
        }
        (Params::Gp(_), Model::Gev) => {
            return Err(Error::Usage(format!("`{}` is a GEV prior but GP parameters were given", spec.family)))
        }
        (Params::Gev(_), Model::Gp) => {
            return Err(Error::Usage(format!("`{}` is a GP prior but GEV parameters were given", spec.family)))
        }
    };
    Ok(spec.ln_xi_component(xi) - sigma.ln())
}

/// The pieces of the Jeffreys GEV ξ-component: π_ξ² = (T₁ + T₂)/ξ⁴.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JeffreysGevComponents {
    pub p: f64,
    pub q: f64,
    pub t1: f64,
    pub t2: f64,
    pub pi_xi_sq: f64,
}

/// p, q, T₁, T₂ and (T₁+T₂)/ξ⁴ at ξ ∈ (−1/2, ∞) \ {0}.
pub fn jeffreys_gev_components(xi: f64) -> Result<JeffreysGevComponents> {
    if !(xi.is_finite() && xi > -0.5) {
        return Err(Error::domain("jeffreys_gev_components", format!("requires xi > -1/2, got {xi}")));
    }
    if xi == 0.0 {
        return Err(Error::domain("jeffreys_gev_components", "q is undefined at xi = 0"));
    }
    let g12 = ln_gamma_unchecked(1.0 + 2.0 * xi).exp();
    let g2 = ln_gamma_unchecked(2.0 + xi).exp();
    let psi = digamma_unchecked(1.0 + xi);
    let p = (1.0 + xi) * (1.0 + xi) * g12;
    let q = g2 * (psi + (1.0 + xi) / xi);
    let (t1, t2) = t1_t2(xi);
    Ok(JeffreysGevComponents { p, q, t1, t2, pi_xi_sq: (t1 + t2) / xi.powi(4) })
}

fn t1_t2(xi: f64) -> (f64, f64) {
    let g12 = ln_gamma_unchecked(1.0 + 2.0 * xi).exp();
    let g2 = ln_gamma_unchecked(2.0 + xi).exp();
    let psi = digamma_unchecked(1.0 + xi);
    let t1 = JEFFREYS_GEV_A * (1.0 + xi) * (1.0 + xi) * g12;
    let t2 = PI2_OVER_6 + (2.0 * (1.0 - EULER_GAMMA) * (EULER_GAMMA + psi) - 2.0 * PI2_OVER_6) * g2
        - (1.0 + psi) * (1.0 + psi) * g2 * g2;
    (t1, t2)
}

/// The Jeffreys GEV ξ-component π_ξ(ξ) for ξ > −1/2.
///
/// Evaluated from the T₁/T₂ decomposition; near ξ = 0, where T₁ + T₂ = O(ξ⁴)
/// cancels catastrophically, from its Taylor expansion (which also supplies the
/// removable value at ξ = 0); for large ξ in log space.
pub fn jeffreys_gev_xi(xi: f64) -> Result<f64> {
    if !(xi.is_finite() && xi > -0.5) {
        return Err(Error::domain("jeffreys_gev_xi", format!("requires finite xi > -1/2, got {xi}")));
    }
    Ok(ln_jeffreys_gev_xi(xi).exp())
}

/// ln π_ξ(ξ); −∞ for ξ ≤ −1/2. Finite for all finite ξ > −1/2, including very large ξ.
pub fn ln_jeffreys_gev_xi(xi: f64) -> f64 {
    if xi <= -0.5 {
        return f64::NEG_INFINITY;
    }
    if xi.abs() < JEFFREYS_SERIES_RADIUS {
        return 0.5 * jeffreys_series().eval_shifted(xi).ln();
    }
    if xi <= 5.0 {
        let (t1, t2) = t1_t2(xi);
        return 0.5 * ((t1 + t2).ln() - 4.0 * xi.abs().ln());
    }
    // T₁ dominates; carry T₂/T₁ in log space.
    let ln_t1 = JEFFREYS_GEV_A.ln() + 2.0 * xi.ln_1p() + ln_gamma_unchecked(1.0 + 2.0 * xi);
    let ln_g2 = ln_gamma_unchecked(2.0 + xi);
    let psi = digamma_unchecked(1.0 + xi);
    let b = 2.0 * (1.0 - EULER_GAMMA) * (EULER_GAMMA + psi) - 2.0 * PI2_OVER_6;
    let ratio = (PI2_OVER_6.ln() - ln_t1).exp() + b.signum() * (b.abs().ln() + ln_g2 - ln_t1).exp()
        - (2.0 * (1.0 + psi).abs().ln() + 2.0 * ln_g2 - ln_t1).exp();
    0.5 * (ln_t1 + ratio.ln_1p() - 4.0 * xi.ln())
}

/// The 2×2 Fisher-information determinant form of the Jeffreys GEV
/// ξ-component, evaluated term by term. Ill-conditioned for small |ξ|; kept as
/// an independent cross-check of [`jeffreys_gev_xi`].
pub fn jeffreys_gev_xi_determinant_form(xi: f64) -> Result<f64> {
    let c = jeffreys_gev_components(xi)?;
    let g2 = ln_gamma_unchecked(2.0 + xi).exp();
    let (p, q) = (c.p, c.q);
    let a = 1.0 - 2.0 * g2 + p;
    let one_g = 1.0 - EULER_GAMMA + 1.0 / xi;
    let b = PI2_OVER_6 + one_g * one_g - 2.0 * q / xi + p / (xi * xi);
    let d = one_g - g2 / xi - q + p / xi;
    Ok((a * b - d * d).sqrt() / (xi * xi))
}

/// Truncated power series in ξ.
#[derive(Debug, Clone)]
struct Series(Vec<f64>);

impl Series {
    fn zero() -> Self {
        Series(vec![0.0; SERIES_DEGREE + 1])
    }

    fn constant(c: f64) -> Self {
        let mut s = Self::zero();
        s.0[0] = c;
        s
    }

    fn mul(&self, other: &Series) -> Series {
        let mut out = Series::zero();
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate().take(SERIES_DEGREE + 1 - i) {
                out.0[i + j] += a * b;
            }
        }
        out
    }

    fn add(&self, other: &Series) -> Series {
        Series(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn scale(&self, c: f64) -> Series {
        Series(self.0.iter().map(|a| a * c).collect())
    }

    fn exp(&self) -> Series {
        let a = &self.0;
        let mut e = vec![0.0; SERIES_DEGREE + 1];
        e[0] = a[0].exp();
        for n in 1..=SERIES_DEGREE {
            let s: f64 = (1..=n).map(|k| k as f64 * a[k] * e[n - k]).sum();
            e[n] = s / n as f64;
        }
        Series(e)
    }

    /// Σ_{k≥4} c_k ξ^{k−4}: the series divided by ξ⁴, dropping the terms that vanish identically.
    fn eval_shifted(&self, xi: f64) -> f64 {
        self.0[4..].iter().rev().fold(0.0, |acc, c| acc * xi + c)
    }
}

/// ln Γ(1 + cξ) as a series in ξ.
fn ln_gamma_1p_series(c: f64) -> Series {
    let mut s = Series::zero();
    s.0[1] = -EULER_GAMMA * c;
    for k in 2..=SERIES_DEGREE {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s.0[k] = sign * ZETA[k - 2] * c.powi(k as i32) / k as f64;
    }
    s
}

/// Taylor coefficients of T₁ + T₂ about ξ = 0.
fn jeffreys_series() -> &'static Series {
    use std::sync::OnceLock;
    static SERIES: OnceLock<Series> = OnceLock::new();
    SERIES.get_or_init(|| {
        let one_plus = {
            let mut s = Series::constant(1.0);
            s.0[1] = 1.0;
            s
        };
        let gamma_1p2 = ln_gamma_1p_series(2.0).exp();
        let gamma_2p = one_plus.mul(&ln_gamma_1p_series(1.0).exp());
        let mut psi = Series::constant(-EULER_GAMMA);
        for k in 2..=SERIES_DEGREE + 1 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            psi.0[k - 1] = sign * ZETA[k - 2];
        }
        let t1 = one_plus.mul(&one_plus).mul(&gamma_1p2).scale(JEFFREYS_GEV_A);
        let bracket = psi
            .add(&Series::constant(EULER_GAMMA))
            .scale(2.0 * (1.0 - EULER_GAMMA))
            .add(&Series::constant(-2.0 * PI2_OVER_6));
        let one_psi = psi.add(&Series::constant(1.0));
        let t2 = Series::constant(PI2_OVER_6)
            .add(&bracket.mul(&gamma_2p))
            .add(&one_psi.mul(&one_psi).mul(&gamma_2p).mul(&gamma_2p).scale(-1.0));
        t1.add(&t2)
    })
}

/// c = (4/3)⁴ {[π²/6 + (1−γ)²] π^{−1/2} − 1} ≈ 0.0913.
pub fn jeffreys_gev_bound_constant() -> f64 {
    (4.0f64 / 3.0).powi(4) * (JEFFREYS_GEV_A / std::f64::consts::PI.sqrt() - 1.0)
}

/// c^{1/2}(1+ξ)^{λξ−γ}: a lower bound on π_ξ, proven for ξ > 3.
pub fn jeffreys_gev_lower_bound(xi: f64) -> f64 {
    ln_jeffreys_gev_lower_bound(xi).exp()
}

pub fn ln_jeffreys_gev_lower_bound(xi: f64) -> f64 {
    0.5 * jeffreys_gev_bound_constant().ln() + (ALZER_LAMBDA * xi - EULER_GAMMA) * xi.ln_1p()
}

/// f(ξ) = [π²/6 + (1−γ)²]/(1 + ψ(1+ξ)) − (1−γ), decreasing for ξ > 0.
pub fn jeffreys_gev_completing_square_f(xi: f64) -> f64 {
    JEFFREYS_GEV_A / (1.0 + digamma_unchecked(1.0 + xi)) - (1.0 - EULER_GAMMA)
}

/// 2[π²/6 + (1−γ)²]^{1/2}(1+2ξ)^{−1/2}, an upper bound on π_ξ for −1/2 < ξ < −1/2 + 1.29.
pub fn jeffreys_gev_upper_bound_near_half(xi: f64) -> Result<f64> {
    if !(xi > -0.5 && xi < NEAR_HALF_WINDOW_END) {
        return Err(Error::domain(
            "jeffreys_gev_upper_bound_near_half",
            format!("xi must lie in (-1/2, {NEAR_HALF_WINDOW_END}), got {xi}"),
        ));
    }
    Ok(2.0 * JEFFREYS_GEV_A.sqrt() / (1.0 + 2.0 * xi).sqrt())
}

/// One row of the machine-readable prior catalog.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub family: &'static str,
    pub model: Model,
    pub xi_component: &'static str,
    pub support: &'static str,
    pub proper_xi_component: bool,
    pub parameters: &'static str,
}

pub fn catalog() -> Vec<CatalogEntry> {
    use PriorFamily::*;
    PriorFamily::ALL
        .into_iter()
        .map(|f| {
            let (xi_component, support, parameters) = match f {
                JeffreysGp => ("1/((1+xi) sqrt(1+2xi))", "sigma>0, xi>-1/2", "none"),
                MdiGp => ("exp(-xi)", "sigma>0, xi real", "none"),
                MdiGpTrunc => ("exp(-(xi+1))", "sigma>0, xi>=xi_lower", "xi_lower (default -1), optional xi_upper"),
                UniformGp => ("1", "sigma>0, xi real", "none"),
                JeffreysGev => ("Fisher-information form pi_xi(xi)", "mu real, sigma>0, xi>-1/2", "none"),
                JeffreysGevTrunc => {
                    ("Fisher-information form pi_xi(xi)", "mu real, sigma>0, -1/2<xi<=xi_upper", "xi_upper (required)")
                }
                MdiGev => ("exp(-gamma(1+xi))", "mu real, sigma>0, xi real", "none"),
                MdiGevTrunc => {
                    ("exp(-gamma(1+xi))", "mu real, sigma>0, xi>=xi_lower", "xi_lower (default -1), optional xi_upper")
                }
                UniformGev => ("1", "mu real, sigma>0, xi real", "none"),
            };
            CatalogEntry {
                family: f.name(),
                model: f.model(),
                xi_component,
                support,
                proper_xi_component: f.has_proper_xi_component(),
                parameters,
            }
        })
        .collect()
}

/// One point of a prior curve: the ξ-component and its value scaled to a maximum of 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub xi: f64,
    pub density: f64,
    pub scaled: f64,
}

/// The ξ-component of `spec` on `grid`, with a scaled column whose maximum on the grid is 1.
pub fn xi_curve(spec: &PriorSpec, grid: &[f64]) -> Vec<CurvePoint> {
    let ln: Vec<f64> = grid.iter().map(|&x| spec.ln_xi_component(x)).collect();
    let max = ln.iter().copied().filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    grid.iter()
        .zip(&ln)
        .map(|(&xi, &l)| CurvePoint {
            xi,
            density: l.exp(),
            scaled: if max.is_finite() { (l - max).exp() } else { 0.0 },
        })
        .collect()
}
