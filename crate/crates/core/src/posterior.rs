//! Unnormalized log-posteriors of the GP, GEV and NHPP models.
//!
//! Every function checks the support constraints before taking any power or
//! logarithm and returns −∞ outside the support.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evd::{log1p_div, sorted_strict, BlockMaximaSample, ExcessSample};
use crate::priors::{Model, PriorSpec};
use crate::specfun::ln_gamma_unchecked;

/// Threshold exceedances for the point-process model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NhppData {
    threshold: f64,
    x: Vec<f64>,
    n_blocks: usize,
}

impl NhppData {
    /// `n_blocks` defaults to the number of exceedances.
    pub fn new(threshold: f64, exceedances: Vec<f64>, n_blocks: Option<usize>) -> Result<Self> {
        if !threshold.is_finite() {
            return Err(Error::Data("threshold must be finite".into()));
        }
        let x = sorted_strict(exceedances)?;
        if x.is_empty() {
            return Err(Error::Data("the point-process model needs at least one exceedance".into()));
        }
        if x[0] <= threshold {
            return Err(Error::Data(format!("exceedance {} is not above the threshold {threshold}", x[0])));
        }
        let n_blocks = n_blocks.unwrap_or(x.len());
        if n_blocks == 0 {
            return Err(Error::Data("n_blocks must be positive".into()));
        }
        Ok(NhppData { threshold, x, n_blocks })
    }

    /// Keeps the raw values strictly above `threshold`.
    pub fn from_raw(raw: &[f64], threshold: f64, n_blocks: Option<usize>) -> Result<Self> {
        Self::new(threshold, raw.iter().copied().filter(|&x| x > threshold).collect(), n_blocks)
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn values(&self) -> &[f64] {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }
}

fn require(prior: &PriorSpec, model: Model) -> Result<()> {
    if prior.model() != model {
        return Err(Error::Usage(format!("prior `{}` does not belong to the {model:?} model", prior.family)));
    }
    Ok(())
}

/// `Ok(true)` for σ = +∞, where every posterior density vanishes.
fn check_sigma(op: &'static str, sigma: f64) -> Result<bool> {
    if !(sigma > 0.0) {
        return Err(Error::domain(op, format!("sigma must be positive, got {sigma}")));
    }
    Ok(sigma == f64::INFINITY)
}

/// ln π(ξ) − (m+1) ln σ − (1 + 1/ξ) Σ ln(1 + ξz_i/σ) on {σ > 0, ξ > −σ/z_m}.
pub fn gp_log_posterior(data: &ExcessSample, prior: &PriorSpec, sigma: f64, xi: f64) -> Result<f64> {
    require(prior, Model::Gp)?;
    if check_sigma("gp_log_posterior", sigma)? {
        return Ok(f64::NEG_INFINITY);
    }
    if !xi.is_finite() {
        return Err(Error::domain("gp_log_posterior", format!("xi must be finite, got {xi}")));
    }
    let w_max = data.max() / sigma;
    if !w_max.is_finite() || xi * w_max <= -1.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let lp = prior.ln_xi_component(xi);
    if lp == f64::NEG_INFINITY {
        return Ok(lp);
    }
    let m = data.len() as f64;
    let s: f64 = data
        .values()
        .iter()
        .map(|&z| {
            let w = z / sigma;
            (xi * w).ln_1p() + log1p_div(xi, w)
        })
        .sum();
    Ok(lp - (m + 1.0) * sigma.ln() - s)
}

/// (Σ (1+1/ξ) ln z_i, Σ z_i^{−1/ξ}) with z_i = 1 + ξ(y_i−μ)/σ, or None off the support.
fn gev_terms(ys: &[f64], mu: f64, sigma: f64, xi: f64) -> Option<(f64, f64)> {
    let mut log_part = 0.0;
    let mut exp_part = 0.0;
    for &y in ys {
        let s = (y - mu) / sigma;
        if !s.is_finite() || xi * s <= -1.0 {
            return None;
        }
        let l = log1p_div(xi, s);
        log_part += (xi * s).ln_1p() + l;
        exp_part += (-l).exp();
    }
    Some((log_part, exp_part))
}

/// −(n+1) ln σ + ln π(ξ) − Σ z_i^{−1/ξ} − (1 + 1/ξ) Σ ln z_i with z_i = 1 + ξ(y_i − μ)/σ.
pub fn gev_log_posterior(data: &BlockMaximaSample, prior: &PriorSpec, mu: f64, sigma: f64, xi: f64) -> Result<f64> {
    require(prior, Model::Gev)?;
    if check_sigma("gev_log_posterior", sigma)? {
        return Ok(f64::NEG_INFINITY);
    }
    if !(mu.is_finite() && xi.is_finite()) {
        return Err(Error::domain("gev_log_posterior", "mu and xi must be finite"));
    }
    let lp = prior.ln_xi_component(xi);
    if lp == f64::NEG_INFINITY {
        return Ok(lp);
    }
    let Some((log_part, exp_part)) = gev_terms(data.values(), mu, sigma, xi) else {
        return Ok(f64::NEG_INFINITY);
    };
    let n = data.len() as f64;
    Ok(lp - (n + 1.0) * sigma.ln() - log_part - exp_part)
}

/// −(m+1) ln σ + ln π(ξ) − n[1 + ξ(u−μ)/σ]₊^{−1/ξ} − (1 + 1/ξ) Σ ln[1 + ξ(x_i−μ)/σ]₊ with n = `n_blocks`.
pub fn nhpp_log_posterior(data: &NhppData, prior: &PriorSpec, mu: f64, sigma: f64, xi: f64) -> Result<f64> {
    require(prior, Model::Gev)?;
    if check_sigma("nhpp_log_posterior", sigma)? {
        return Ok(f64::NEG_INFINITY);
    }
    if !(mu.is_finite() && xi.is_finite()) {
        return Err(Error::domain("nhpp_log_posterior", "mu and xi must be finite"));
    }
    let lp = prior.ln_xi_component(xi);
    if lp == f64::NEG_INFINITY {
        return Ok(lp);
    }
    let su = (data.threshold - mu) / sigma;
    if !su.is_finite() || 1.0 + xi * su <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let Some((log_part, _)) = gev_terms(&data.x, mu, sigma, xi) else {
        return Ok(f64::NEG_INFINITY);
    };
    let m = data.len() as f64;
    let count = data.n_blocks as f64 * (-log1p_div(xi, su)).exp();
    Ok(lp - (m + 1.0) * sigma.ln() - log_part - count)
}

/// Log of the σ-integrated GEV posterior at (φ, ξ), with φ = μ − σ/ξ:
/// ln π(ξ) + ln (n−1)! + (1−n) ln|ξ| − (1+1/ξ) Σ ln|y_i−φ| − n ln Σ |y_i−φ|^{−1/ξ}.
///
/// Requires φ < y₁ for ξ > 0 and φ > y_n for ξ < 0; returns −∞ otherwise and at ξ = 0.
pub fn reduced_gev_log_integrand(data: &BlockMaximaSample, prior: &PriorSpec, phi: f64, xi: f64) -> Result<f64> {
    require(prior, Model::Gev)?;
    if phi.is_nan() || xi.is_nan() {
        return Err(Error::domain("reduced_gev_log_integrand", "phi and xi must not be NaN"));
    }
    let y = data.values();
    let on_side = if xi > 0.0 {
        phi < y[0]
    } else if xi < 0.0 {
        phi > y[y.len() - 1]
    } else {
        false
    };
    if !on_side || !phi.is_finite() {
        return Ok(f64::NEG_INFINITY);
    }
    let lp = prior.ln_xi_component(xi);
    if lp == f64::NEG_INFINITY {
        return Ok(lp);
    }
    let n = y.len() as f64;
    let lds: Vec<f64> = y.iter().map(|&v| (v - phi).abs().ln()).collect();
    let sum_ld: f64 = lds.iter().sum();
    // ln Σ exp(−ld/ξ), shifted by its largest term
    let powers: Vec<f64> = lds.iter().map(|ld| -ld / xi).collect();
    let top = powers.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ln_s = top + powers.iter().map(|p| (p - top).exp()).sum::<f64>().ln();
    Ok(lp + ln_gamma_unchecked(n) + (1.0 - n) * xi.abs().ln() - (1.0 + 1.0 / xi) * sum_ld - n * ln_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evd::{gev_logpdf, gp_logpdf, GevParams, GpParams};
    use crate::priors::{log_prior, PriorFamily};
    use crate::quad::TanhSinh;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(f: PriorFamily) -> PriorSpec {
        PriorSpec::new(f).unwrap()
    }

    #[test]
    fn gp_examples() {
        let one = ExcessSample::new(0.0, vec![1.0]).unwrap();
        let u = spec(PriorFamily::UniformGp);
        assert!((gp_log_posterior(&one, &u, 1.0, 0.0).unwrap() + 1.0).abs() < 1e-15);
        assert!((gp_log_posterior(&one, &u, 1.0, 1e-9).unwrap() + 1.0).abs() < 1e-8);
        assert_eq!(gp_log_posterior(&one, &u, 1.0, -2.0).unwrap(), f64::NEG_INFINITY);
        assert!(gp_log_posterior(&one, &u, 0.0, 0.1).is_err());
        assert!(gp_log_posterior(&one, &spec(PriorFamily::UniformGev), 1.0, 0.1).is_err());
    }

    #[test]
    fn gp_matches_density_assembly() {
        let data = ExcessSample::new(0.0, vec![0.5, 1.5]).unwrap();
        let prior = spec(PriorFamily::JeffreysGp);
        let p = GpParams::new(2.0, 0.3).unwrap();
        let by_terms: f64 = data.values().iter().map(|&z| gp_logpdf(z, &p).unwrap()).sum::<f64>()
            + log_prior(&prior, p).unwrap();
        let got = gp_log_posterior(&data, &prior, 2.0, 0.3).unwrap();
        assert!((got - by_terms).abs() < 1e-13, "{got} vs {by_terms}");
    }

    #[test]
    fn gev_examples() {
        let one = BlockMaximaSample::new(vec![0.0]).unwrap();
        let u = spec(PriorFamily::UniformGev);
        assert!((gev_log_posterior(&one, &u, 0.0, 1.0, 0.0).unwrap() + 1.0).abs() < 1e-15);
        let three = BlockMaximaSample::new(vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(gev_log_posterior(&three, &u, 3.0, 1.0, 0.5).unwrap(), f64::NEG_INFINITY);
        let prior = spec(PriorFamily::MdiGevTrunc);
        let p = GevParams::new(0.5, 1.0, 0.1).unwrap();
        let by_terms: f64 = three.values().iter().map(|&y| gev_logpdf(y, &p).unwrap()).sum::<f64>()
            + log_prior(&prior, p).unwrap();
        let got = gev_log_posterior(&three, &prior, 0.5, 1.0, 0.1).unwrap();
        assert!((got - by_terms).abs() < 1e-13);
    }

    #[test]
    fn nhpp_examples() {
        let data = NhppData::new(1.0, vec![1.2, 1.5, 2.0, 3.1], None).unwrap();
        let u = spec(PriorFamily::UniformGev);
        let got = nhpp_log_posterior(&data, &u, 1.0, 1.0, 0.1).unwrap();
        let mut want = -5.0 * 1f64.ln() - 4.0 * 1.0;
        for x in [1.2f64, 1.5, 2.0, 3.1] {
            let z = 1.0 + 0.1 * (x - 1.0);
            want -= (1.0 + 10.0) * z.ln();
        }
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        // ξ → 0: −4 e^{0} − Σ (x_i − 1)
        let lim = nhpp_log_posterior(&data, &u, 1.0, 1.0, 0.0).unwrap();
        assert!((lim - (-4.0 - (0.2 + 0.5 + 1.0 + 2.1))).abs() < 1e-12);
        assert!((nhpp_log_posterior(&data, &u, 1.0, 1.0, 1e-8).unwrap() - lim).abs() < 1e-6);
        assert!(NhppData::new(1.0, vec![0.5, 2.0], None).is_err());
        assert!(matches!(NhppData::new(1.0, vec![2.0, 2.0], None), Err(Error::Tie { .. })));
    }

    #[test]
    fn nhpp_is_dominated_by_gev() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs = vec![1.3, 1.7, 2.2, 2.9, 4.0];
        let data = NhppData::new(1.0, xs.clone(), None).unwrap();
        let gev = BlockMaximaSample::new(xs).unwrap();
        let prior = spec(PriorFamily::UniformGev);
        let mut checked = 0;
        while checked < 200 {
            let mu = rng.random_range(-2.0..3.0);
            let sigma = rng.random_range(0.05..4.0);
            let xi = rng.random_range(-1.5..1.5);
            let a = nhpp_log_posterior(&data, &prior, mu, sigma, xi).unwrap();
            if a == f64::NEG_INFINITY {
                continue;
            }
            let b = gev_log_posterior(&gev, &prior, mu, sigma, xi).unwrap();
            assert!(a <= b, "mu={mu} sigma={sigma} xi={xi}: {a} > {b}");
            checked += 1;
        }
    }

    #[test]
    fn reduced_integrand_matches_sigma_integration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ts = TanhSinh::with_tol(1e-12);
        for n in 2..=4usize {
            let y: Vec<f64> = [0.0, 0.7, 1.9, 3.4][..n].to_vec();
            let data = BlockMaximaSample::new(y.clone()).unwrap();
            let prior = spec(PriorFamily::UniformGev);
            for _ in 0..6 {
                let xi: f64 = if rng.random_bool(0.5) { rng.random_range(0.1..1.2) } else { rng.random_range(-1.2..-0.1) };
                let phi = if xi > 0.0 { y[0] - rng.random_range(0.1..3.0) } else { y[n - 1] + rng.random_range(0.1..3.0) };
                let want = reduced_gev_log_integrand(&data, &prior, phi, xi).unwrap();
                // σ ∈ (0, ∞) with μ = φ + σ/ξ; split at σ = 1
                let f = |s: f64| gev_log_posterior(&data, &prior, phi + s / xi, s, xi).unwrap();
                let lo = ts.ln_integrate(f, 0.0, 1.0);
                let hi = ts.ln_integrate_upper_tail(f, 1.0);
                let got = (lo.value() + hi.value()).ln();
                assert!((got - want).abs() < 1e-5, "n={n} xi={xi} phi={phi}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn reduced_integrand_two_points_integrates_to_half() {
        // ∫ dφ at fixed ξ equals π(ξ)/(2δ₂) on either side
        let data = BlockMaximaSample::new(vec![0.0, 1.5]).unwrap();
        let prior = spec(PriorFamily::UniformGev);
        let ts = TanhSinh::with_tol(1e-12);
        for xi in [0.3, 1.0, -0.4, -2.0] {
            let f = |u: f64| {
                // φ = y₁ − 1/u (ξ > 0) or y₂ + 1/u (ξ < 0); dφ = du/u²
                let phi = if xi > 0.0 { -1.0 / u } else { 1.5 + 1.0 / u };
                reduced_gev_log_integrand(&data, &prior, phi, xi).unwrap() - 2.0 * u.ln()
            };
            let v = ts.ln_integrate(f, 0.0, 1.0).value() + ts.ln_integrate_upper_tail(f, 1.0).value();
            assert!((v - 1.0 / 3.0).abs() < 1e-8, "xi={xi}: {v}");
        }
        assert_eq!(reduced_gev_log_integrand(&data, &prior, 0.5, 0.2).unwrap(), f64::NEG_INFINITY);
        assert_eq!(reduced_gev_log_integrand(&data, &prior, 0.5, -0.2).unwrap(), f64::NEG_INFINITY);
    }
}
