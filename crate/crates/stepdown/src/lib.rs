//! Step-down multiple testing for correlated normal means.
//!
//! Given `x ~ N(mu, Sigma)` with a known correlation matrix `Sigma`, this
//! crate tests `mu_i = 0` against `mu_i != 0` for every coordinate at once
//! under a spike-and-slab prior: each mean is zero with probability `1 - p`
//! or `N(0, V)` with probability `p`.
//!
//! The central procedure is the Bayesian step-down (BSD) test ([`bsd`]),
//! which repeatedly rejects the hypothesis with the largest posterior odds of
//! being the lone signal among the survivors, stopping at the first stage
//! whose odds fall below a threshold. It uses the full correlation structure
//! at every stage and needs only one matrix inverse per run thanks to
//! rank-one inverse identities ([`linalg`]). The closely related
//! maximum-residual step-down procedure ([`mrd`]), empirical Bayes estimators
//! of `(p, V)` ([`estimators`]), and marginal p-value baselines
//! ([`baselines`]) round out the toolbox, and [`experiment`] drives seeded,
//! replicated Monte Carlo comparisons of all of them.
//!
//! Start with the `examples/` directory: each example is a runnable tour of
//! one capability, from single runs and matrix identities to full method
//! comparisons.

pub mod baselines;
pub mod bsd;
pub mod covariance;
pub mod error;
pub mod estimators;
pub mod experiment;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod model;
pub mod mrd;
pub mod normal;
pub mod rng;
pub mod trace;

pub use crate::error::{Error, Result};
pub use crate::linalg::SymMatrix;
pub use crate::model::MixtureParams;
pub use crate::trace::{DecisionVector, StepTrace};
