//! Adaptive random-walk Metropolis for the GP, GEV and NHPP posteriors.
//!
//! The sampler works on (ln σ, ξ) for GP and (μ, ln σ, ξ) for GEV and NHPP,
//! with the Jacobian term ln σ added to the target. The proposal covariance
//! is learned from a sliding window during burn-in (diagonal first, full once
//! enough windows are in) with a scale factor steered toward the target
//! acceptance rate; it is frozen afterwards. Sampling refuses prior/sample
//! combinations whose posterior is not known to be proper unless the caller
//! overrides the check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evd::{gev_quantile, gp_quantile, BlockMaximaSample, ExcessSample, GevParams, GpParams};
use crate::posterior::{gev_log_posterior, gp_log_posterior, nhpp_log_posterior, NhppData};
use crate::priors::PriorSpec;
use crate::propriety::{known_propriety, FitModel, KnownPropriety};
use crate::specfun::EULER_GAMMA;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McmcConfig {
    /// Total iterations per chain, burn-in included.
    pub iterations: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub target_acceptance: f64,
    /// Iterations between proposal updates during burn-in.
    pub adaptation_window: usize,
    pub seed: u64,
    pub chains: usize,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            iterations: 20_000,
            burn_in: 5_000,
            thinning: 1,
            target_acceptance: 0.234,
            adaptation_window: 200,
            seed: 1,
            chains: 1,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.thinning == 0 || self.adaptation_window == 0 || self.chains == 0 {
            return Err(Error::Config("iterations, thinning, adaptation_window and chains must be positive".into()));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::Config(format!(
                "burn_in ({}) must be smaller than iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        if !(self.target_acceptance > 0.0 && self.target_acceptance < 1.0) {
            return Err(Error::Config("target_acceptance must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Data for one of the three likelihoods.
#[derive(Debug, Clone, Copy)]
pub enum FitData<'a> {
    Gp(&'a ExcessSample),
    Gev(&'a BlockMaximaSample),
    Nhpp(&'a NhppData),
}

impl FitData<'_> {
    pub fn model(&self) -> FitModel {
        match self {
            FitData::Gp(_) => FitModel::Gp,
            FitData::Gev(_) => FitModel::Gev,
            FitData::Nhpp(_) => FitModel::Nhpp,
        }
    }

    fn len(&self) -> usize {
        match self {
            FitData::Gp(d) => d.len(),
            FitData::Gev(d) => d.len(),
            FitData::Nhpp(d) => d.len(),
        }
    }

    fn n_blocks(&self) -> Option<usize> {
        match self {
            FitData::Nhpp(d) => Some(d.n_blocks()),
            _ => None,
        }
    }

    fn threshold(&self) -> Option<f64> {
        match self {
            FitData::Gp(d) => Some(d.threshold()),
            FitData::Nhpp(d) => Some(d.threshold()),
            FitData::Gev(_) => None,
        }
    }

    /// Log target on sampler coordinates.
    fn ln_target(&self, prior: &PriorSpec, theta: &[f64]) -> f64 {
        let r = match *self {
            FitData::Gp(d) => gp_log_posterior(d, prior, theta[0].exp(), theta[1]).map(|v| v + theta[0]),
            FitData::Gev(d) => gev_log_posterior(d, prior, theta[0], theta[1].exp(), theta[2]).map(|v| v + theta[1]),
            FitData::Nhpp(d) => nhpp_log_posterior(d, prior, theta[0], theta[1].exp(), theta[2]).map(|v| v + theta[1]),
        };
        r.unwrap_or(f64::NEG_INFINITY)
    }

    fn initial_state(&self, prior: &PriorSpec) -> Vec<f64> {
        let xi0 = 0.1f64.clamp(prior.xi_support().0 + 0.05, prior.xi_support().1 - 0.05);
        match *self {
            FitData::Gp(d) => {
                let mean = d.values().iter().sum::<f64>() / d.len() as f64;
                vec![mean.ln(), xi0]
            }
            FitData::Gev(d) => {
                let (mu, sigma) = gumbel_pwm(d.values());
                let theta = vec![mu, sigma.ln(), xi0];
                if self.ln_target(prior, &theta).is_finite() {
                    theta
                } else {
                    vec![d.values()[0], sigma.ln(), xi0]
                }
            }
            FitData::Nhpp(d) => {
                let u = d.threshold();
                let sigma = d.values().iter().map(|x| x - u).sum::<f64>() / d.len() as f64;
                let mu = u + sigma * (d.len() as f64 / d.n_blocks() as f64).ln();
                let theta = vec![mu, sigma.ln(), xi0];
                if self.ln_target(prior, &theta).is_finite() {
                    theta
                } else {
                    vec![u, sigma.ln(), xi0]
                }
            }
        }
    }
}

/// Gumbel location and scale from probability-weighted moments.
fn gumbel_pwm(y: &[f64]) -> (f64, f64) {
    let n = y.len();
    let b0 = y.iter().sum::<f64>() / n as f64;
    let sigma = if n > 1 {
        let b1 = y.iter().enumerate().map(|(i, v)| i as f64 / (n - 1) as f64 * v).sum::<f64>() / n as f64;
        (2.0 * b1 - b0) / std::f64::consts::LN_2
    } else {
        1.0
    };
    let sigma = if sigma.is_finite() && sigma > 0.0 { sigma } else { 1.0 };
    (b0 - EULER_GAMMA * sigma, sigma)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Chain {
    pub model: Option<FitModel>,
    /// Parameter names of each draw, in natural coordinates.
    pub names: Vec<String>,
    pub draws: Vec<Vec<f64>>,
    /// ln posterior density on natural coordinates at each retained draw.
    pub log_posterior: Vec<f64>,
    /// Acceptance rate after burn-in.
    pub acceptance_rate: f64,
    pub burn_in_acceptance_rate: f64,
    pub proposal_covariance: Vec<Vec<f64>>,
    pub seed: u64,
    pub stream: u64,
    pub threshold: Option<f64>,
    /// Set when sampling ran despite a posterior not known to be proper.
    pub propriety_override: Option<String>,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.draws.iter().map(|d| d[j]).collect()
    }

    /// Tab-separated draws, one per row, with a header.
    pub fn to_columns(&self) -> String {
        let mut out = String::from("iteration");
        for n in &self.names {
            out.push('\t');
            out.push_str(n);
        }
        out.push_str("\tlog_posterior\n");
        for (i, (d, lp)) in self.draws.iter().zip(&self.log_posterior).enumerate() {
            out.push_str(&i.to_string());
            for v in d {
                out.push('\t');
                out.push_str(&format!("{v:.10e}"));
            }
            out.push_str(&format!("\t{lp:.10e}\n"));
        }
        out
    }
}

fn cholesky(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let d = a.len();
    let mut l = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let v = a[i][i] - s;
                if !(v > 0.0) || !v.is_finite() {
                    return None;
                }
                l[i][j] = v.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Some(l)
}

fn covariance(xs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = xs[0].len();
    let n = xs.len() as f64;
    let mean: Vec<f64> = (0..d).map(|j| xs.iter().map(|x| x[j]).sum::<f64>() / n).collect();
    let mut c = vec![vec![0.0; d]; d];
    for x in xs {
        for i in 0..d {
            for j in 0..=i {
                c[i][j] += (x[i] - mean[i]) * (x[j] - mean[j]);
            }
        }
    }
    for i in 0..d {
        for j in 0..=i {
            c[i][j] /= n - 1.0;
            c[j][i] = c[i][j];
        }
    }
    c
}

struct Proposal {
    cov: Vec<Vec<f64>>,
    chol: Vec<Vec<f64>>,
}

impl Proposal {
    fn new(cov: Vec<Vec<f64>>) -> Self {
        let chol = cholesky(&cov).unwrap_or_else(|| {
            let d = cov.len();
            (0..d)
                .map(|i| (0..d).map(|j| if i == j { cov[i][i].abs().max(1e-12).sqrt() } else { 0.0 }).collect())
                .collect()
        });
        Proposal { cov, chol }
    }

    fn step<R: Rng>(&self, x: &[f64], rng: &mut R) -> Vec<f64> {
        let d = x.len();
        let z: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        (0..d).map(|i| x[i] + (0..=i).map(|k| self.chol[i][k] * z[k]).sum::<f64>()).collect()
    }
}

/// Sliding-window length, in adaptation windows.
const HISTORY_WINDOWS: usize = 5;

/// Adaptive random-walk Metropolis on an arbitrary log density. Returns draws in the
/// sampler's coordinates; the initial state must have a finite log density.
pub fn metropolis<F>(ln_target: F, init: Vec<f64>, init_sd: &[f64], cfg: &McmcConfig, stream: u64) -> Result<Chain>
where
    F: Fn(&[f64]) -> f64,
{
    cfg.validate()?;
    let d = init.len();
    if d == 0 || init_sd.len() != d {
        return Err(Error::Usage("initial state and step sizes must have the same positive length".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let mut x = init;
    let mut lp = ln_target(&x);
    if !lp.is_finite() {
        return Err(Error::Usage(format!("initial state {x:?} has log density {lp}")));
    }
    let base: Vec<Vec<f64>> =
        (0..d).map(|i| (0..d).map(|j| if i == j { init_sd[i] * init_sd[i] } else { 0.0 }).collect()).collect();
    let mut ln_scale = 0.0f64;
    let mut shape = base.clone();
    let mut proposal = Proposal::new(base);
    let opt = 2.38 * 2.38 / d as f64;

    let window = cfg.adaptation_window;
    let mut history: Vec<Vec<f64>> = Vec::new();
    let mut window_accepts = 0usize;
    let mut burn_accepts = 0usize;
    let mut accepts = 0usize;
    let mut n_windows = 0usize;
    let kept = (cfg.iterations - cfg.burn_in).div_ceil(cfg.thinning);
    let mut draws = Vec::with_capacity(kept);
    let mut trace = Vec::with_capacity(kept);

    for it in 0..cfg.iterations {
        let y = proposal.step(&x, &mut rng);
        let lq = ln_target(&y);
        let u: f64 = rng.random();
        let accepted = lq.is_finite() && u.ln() < lq - lp;
        if accepted {
            x = y;
            lp = lq;
        }
        if it < cfg.burn_in {
            burn_accepts += accepted as usize;
            window_accepts += accepted as usize;
            history.push(x.clone());
            if (it + 1) % window == 0 {
                n_windows += 1;
                let rate = window_accepts as f64 / window as f64;
                window_accepts = 0;
                ln_scale += (rate - cfg.target_acceptance) * 3.0 / (n_windows as f64).sqrt();
                let keep = HISTORY_WINDOWS * window;
                if history.len() > keep {
                    history.drain(..history.len() - keep);
                }
                let c = covariance(&history);
                if c.iter().enumerate().all(|(i, r)| r[i] > 0.0 && r[i].is_finite()) {
                    shape = if n_windows < 3 {
                        (0..d).map(|i| (0..d).map(|j| if i == j { opt * c[i][i] } else { 0.0 }).collect()).collect()
                    } else {
                        (0..d).map(|i| (0..d).map(|j| opt * c[i][j]).collect()).collect()
                    };
                }
                let s2 = (2.0 * ln_scale).exp();
                let cov = (0..d)
                    .map(|i| (0..d).map(|j| s2 * shape[i][j] + if i == j { 1e-12 } else { 0.0 }).collect())
                    .collect();
                proposal = Proposal::new(cov);
            }
        } else {
            accepts += accepted as usize;
            if (it - cfg.burn_in) % cfg.thinning == 0 {
                draws.push(x.clone());
                trace.push(lp);
            }
        }
    }
    Ok(Chain {
        model: None,
        names: (0..d).map(|i| format!("x{i}")).collect(),
        draws,
        log_posterior: trace,
        acceptance_rate: accepts as f64 / (cfg.iterations - cfg.burn_in) as f64,
        burn_in_acceptance_rate: if cfg.burn_in > 0 { burn_accepts as f64 / cfg.burn_in as f64 } else { f64::NAN },
        proposal_covariance: proposal.cov,
        seed: cfg.seed,
        stream,
        threshold: None,
        propriety_override: None,
    })
}

/// Checks the propriety table. `Ok(None)` when proper, `Ok(Some(reason))` when overridden.
pub fn propriety_gate(data: FitData<'_>, prior: &PriorSpec, override_propriety: bool) -> Result<Option<String>> {
    let known = known_propriety(data.model(), prior, data.len(), data.n_blocks())?;
    match known {
        KnownPropriety::Proper(_) => Ok(None),
        KnownPropriety::Improper(reason) | KnownPropriety::Unsettled(reason) if override_propriety => Ok(Some(reason)),
        KnownPropriety::Improper(reason) => Err(Error::Improper(format!(
            "{reason} (prior {prior}, sample size {})",
            data.len()
        ))),
        KnownPropriety::Unsettled(reason) => Err(Error::Improper(format!(
            "{reason} (prior {prior}, sample size {}); pass the propriety override to sample anyway",
            data.len()
        ))),
    }
}

/// Samples the posterior of `prior` given `data` with `cfg.chains` parallel chains.
pub fn sample(data: FitData<'_>, prior: &PriorSpec, cfg: &McmcConfig, override_propriety: bool) -> Result<Vec<Chain>> {
    cfg.validate()?;
    prior.validate()?;
    let overridden = propriety_gate(data, prior, override_propriety)?;
    let init = data.initial_state(prior);
    let init_sd: Vec<f64> = match data {
        FitData::Gp(_) => vec![0.1, 0.1],
        _ => vec![0.1 * init[1].exp(), 0.1, 0.1],
    };
    let names: Vec<String> = match data {
        FitData::Gp(_) => vec!["sigma".into(), "xi".into()],
        _ => vec!["mu".into(), "sigma".into(), "xi".into()],
    };
    let sigma_index = match data {
        FitData::Gp(_) => 0,
        _ => 1,
    };
    (0..cfg.chains as u64)
        .into_par_iter()
        .map(|stream| {
            let mut chain = metropolis(|t| data.ln_target(prior, t), init.clone(), &init_sd, cfg, stream)?;
            for (d, lp) in chain.draws.iter_mut().zip(chain.log_posterior.iter_mut()) {
                *lp -= d[sigma_index];
                d[sigma_index] = d[sigma_index].exp();
            }
            chain.model = Some(data.model());
            chain.names = names.clone();
            chain.threshold = data.threshold();
            chain.propriety_override = overridden.clone();
            Ok(chain)
        })
        .collect()
}

/// Posterior draws of the level exceeded on average once per `period` observations (GP) or blocks (GEV, NHPP).
pub fn return_level(chain: &Chain, period: f64) -> Result<Vec<f64>> {
    if !(period > 1.0) {
        return Err(Error::domain("return_level", format!("return period must exceed 1, got {period}")));
    }
    let q = 1.0 - 1.0 / period;
    match chain.model {
        Some(FitModel::Gp) => {
            let u = chain.threshold.unwrap_or(0.0);
            chain.draws.iter().map(|d| Ok(u + gp_quantile(q, &GpParams::new(d[0], d[1])?)?)).collect()
        }
        Some(FitModel::Gev) | Some(FitModel::Nhpp) => {
            chain.draws.iter().map(|d| gev_quantile(q, &GevParams::new(d[0], d[1], d[2])?)).collect()
        }
        None => Err(Error::Usage("chain was not produced by a model fit".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
    pub q05: f64,
    pub median: f64,
    pub q95: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let mut s = values.to_vec();
        s.sort_by(f64::total_cmp);
        Summary { mean, sd, q05: quantile_sorted(&s, 0.05), median: quantile_sorted(&s, 0.5), q95: quantile_sorted(&s, 0.95) }
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Effective sample size with Geyer's initial monotone sequence estimator, clamped to [1, n].
pub fn effective_sample_size(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 4 {
        return n as f64;
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let c: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let var = c.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if !(var > 0.0) {
        return 1.0;
    }
    let rho = |k: usize| c[..n - k].iter().zip(&c[k..]).map(|(a, b)| a * b).sum::<f64>() / (n as f64 * var);
    let mut sum = 0.0;
    let mut prev_pair = f64::INFINITY;
    let mut k = 0;
    while k + 1 < n {
        let pair = if k == 0 { 1.0 + rho(1) } else { rho(k) + rho(k + 1) };
        if pair <= 0.0 {
            break;
        }
        let pair = pair.min(prev_pair);
        sum += pair;
        prev_pair = pair;
        k += 2;
    }
    let tau = -1.0 + 2.0 * sum;
    (n as f64 / tau).clamp(1.0, n as f64)
}

/// Split-chain potential scale reduction over all chains for one coordinate.
pub fn split_rhat(chains: &[Vec<f64>]) -> f64 {
    let halves: Vec<&[f64]> = chains
        .iter()
        .flat_map(|c| {
            let h = c.len() / 2;
            [&c[..h], &c[c.len() - h..]]
        })
        .filter(|h| h.len() >= 2)
        .collect();
    let m = halves.len() as f64;
    if m < 2.0 {
        return f64::NAN;
    }
    let n = halves.iter().map(|h| h.len()).min().unwrap() as f64;
    let means: Vec<f64> = halves.iter().map(|h| h.iter().sum::<f64>() / h.len() as f64).collect();
    let grand = means.iter().sum::<f64>() / m;
    let b = n / (m - 1.0) * means.iter().map(|mu| (mu - grand).powi(2)).sum::<f64>();
    let w = halves
        .iter()
        .zip(&means)
        .map(|(h, mu)| h.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (h.len() as f64 - 1.0))
        .sum::<f64>()
        / m;
    if !(w > 0.0) {
        return if b > 0.0 { f64::INFINITY } else { 1.0 };
    }
    (((n - 1.0) / n * w + b / n) / w).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub acceptance_rate: f64,
    pub names: Vec<String>,
    /// Summed over chains.
    pub ess: Vec<f64>,
    pub split_rhat: Vec<f64>,
    pub draws: usize,
}

pub fn diagnostics(chains: &[Chain]) -> Result<Diagnostics> {
    let first = chains.first().ok_or_else(|| Error::Usage("no chains to diagnose".into()))?;
    let d = first.names.len();
    let draws: usize = chains.iter().map(|c| c.len()).sum();
    let acceptance_rate = chains.iter().map(|c| c.acceptance_rate * c.len() as f64).sum::<f64>() / draws.max(1) as f64;
    let mut ess = Vec::with_capacity(d);
    let mut rhat = Vec::with_capacity(d);
    for j in 0..d {
        let cols: Vec<Vec<f64>> = chains.iter().map(|c| c.column(j)).collect();
        ess.push(cols.iter().map(|c| effective_sample_size(c)).sum());
        rhat.push(split_rhat(&cols));
    }
    Ok(Diagnostics { acceptance_rate, names: first.names.clone(), ess, split_rhat: rhat, draws })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evd::gp_sample;
    use crate::priors::PriorFamily;

    fn small_cfg(seed: u64) -> McmcConfig {
        McmcConfig { iterations: 6_000, burn_in: 2_000, seed, ..Default::default() }
    }

    #[test]
    fn config_validation() {
        assert!(McmcConfig::default().validate().is_ok());
        assert!(McmcConfig { burn_in: 20_000, ..Default::default() }.validate().is_err());
        assert!(McmcConfig { thinning: 0, ..Default::default() }.validate().is_err());
        assert!(McmcConfig { target_acceptance: 1.0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn identical_seeds_give_identical_chains() {
        let z = gp_sample(&GpParams::new(1.0, 0.1).unwrap(), 40, 3).unwrap();
        let data = ExcessSample::new(0.0, z).unwrap();
        let prior = PriorSpec::new(PriorFamily::MdiGpTrunc).unwrap();
        let cfg = McmcConfig { chains: 2, ..small_cfg(11) };
        let a = sample(FitData::Gp(&data), &prior, &cfg, false).unwrap();
        let b = sample(FitData::Gp(&data), &prior, &cfg, false).unwrap();
        assert_eq!(a, b);
        assert_ne!(a[0].draws, a[1].draws);
        let c = sample(FitData::Gp(&data), &prior, &small_cfg(12), false).unwrap();
        assert_ne!(a[0].draws, c[0].draws);
    }

    #[test]
    fn draws_stay_on_support() {
        let data = BlockMaximaSample::new(vec![0.1, 0.5, 0.9, 1.3, 2.8, 3.1]).unwrap();
        let prior = PriorSpec::new(PriorFamily::MdiGevTrunc).unwrap();
        let chains = sample(FitData::Gev(&data), &prior, &small_cfg(5), false).unwrap();
        assert!(chains[0].log_posterior.iter().all(|v| v.is_finite()));
        for d in &chains[0].draws {
            assert!(gev_log_posterior(&data, &prior, d[0], d[1], d[2]).unwrap().is_finite());
        }
    }

    #[test]
    fn gate_refuses_improper_and_open_cases() {
        let one = BlockMaximaSample::new(vec![2.0]).unwrap();
        let prior = PriorSpec::new(PriorFamily::MdiGevTrunc).unwrap();
        let e = sample(FitData::Gev(&one), &prior, &small_cfg(1), false).unwrap_err();
        assert!(matches!(e, Error::Improper(_)), "{e}");
        let z = ExcessSample::new(0.0, vec![1.0, 2.0, 3.0]).unwrap();
        let mdi = PriorSpec::new(PriorFamily::MdiGp).unwrap();
        assert!(sample(FitData::Gp(&z), &mdi, &small_cfg(1), false).is_err());
        let two = ExcessSample::new(0.0, vec![1.0, 2.0]).unwrap();
        let uniform = PriorSpec::new(PriorFamily::UniformGp).unwrap();
        assert!(sample(FitData::Gp(&two), &uniform, &small_cfg(1), false).is_err());
        let c = sample(FitData::Gp(&two), &uniform, &small_cfg(1), true).unwrap();
        assert!(c[0].propriety_override.is_some());
    }

    #[test]
    fn return_level_of_constant_chain() {
        let chain = Chain {
            model: Some(FitModel::Gev),
            names: vec!["mu".into(), "sigma".into(), "xi".into()],
            draws: vec![vec![1.0, 2.0, 0.1]; 5],
            log_posterior: vec![0.0; 5],
            acceptance_rate: 0.0,
            burn_in_acceptance_rate: 0.0,
            proposal_covariance: vec![],
            seed: 0,
            stream: 0,
            threshold: None,
            propriety_override: None,
        };
        let want = gev_quantile(0.99, &GevParams::new(1.0, 2.0, 0.1).unwrap()).unwrap();
        assert!(return_level(&chain, 100.0).unwrap().iter().all(|&v| v == want));
        assert!(return_level(&chain, 1.0).is_err());
        let gumbel = Chain { draws: vec![vec![0.0, 1.0, 0.0]], ..chain };
        let t = 1e6;
        let v = return_level(&gumbel, t).unwrap()[0];
        assert!((v - t.ln()).abs() < 1e-5, "{v}");
    }

    #[test]
    fn ess_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let iid: Vec<f64> = (0..20_000).map(|_| rng.sample(StandardNormal)).collect();
        let e = effective_sample_size(&iid);
        assert!((e / 20_000.0 - 1.0).abs() < 0.1, "{e}");
        assert_eq!(effective_sample_size(&vec![3.0; 1000]), 1.0);
        let ramp: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert!(effective_sample_size(&ramp) < 5.0);
    }

    #[test]
    fn rhat_detects_disagreement() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a: Vec<f64> = (0..2000).map(|_| rng.sample(StandardNormal)).collect();
        let b: Vec<f64> = (0..2000).map(|_| rng.sample::<f64, _>(StandardNormal) + 3.0).collect();
        assert!((split_rhat(&[a.clone()]) - 1.0).abs() < 0.02);
        assert!(split_rhat(&[a, b]) > 1.5);
    }

    #[test]
    fn summary_quantiles() {
        let v: Vec<f64> = (0..=100).map(|i| i as f64).collect();
        let s = Summary::of(&v);
        assert_eq!(s.median, 50.0);
        assert_eq!(s.q05, 5.0);
        assert_eq!(s.mean, 50.0);
    }
}
