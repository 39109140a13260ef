//! Reference-prior Bayesian inference for extreme-value models.
//!
//! The crate covers the generalized Pareto (GP) model for threshold excesses,
//! the generalized extreme value (GEV) model for block maxima and the
//! non-homogeneous Poisson process (NHPP) model for exceedances, each paired
//! with the Jeffreys, maximal data information (MDI) and uniform reference
//! priors and their truncations.
//!
//! The centerpiece is [`propriety`]: log-space quadrature of the posterior
//! normalizing constants, coupled with closed-form lower bounds, that decides
//! numerically whether a prior/sample-size combination yields a proper
//! posterior. [`mcmc`] samples the posteriors that are proper.

pub mod error;
pub mod evd;
pub mod ingest;
pub mod mcmc;
pub mod posterior;
pub mod priors;
pub mod propriety;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
pub use evd::{BlockMaximaSample, ExcessSample, GevParams, GpParams};
pub use posterior::NhppData;
pub use priors::{PriorFamily, PriorSpec};
