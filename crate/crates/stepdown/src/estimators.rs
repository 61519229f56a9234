//! Empirical Bayes estimation of the signal proportion and slab variance.
//!
//! The proportion estimator is the cosine-sum statistic
//! `p_hat(gamma) = 1 - m^{gamma-1} sum_j cos(sqrt(2 gamma log m) x_j)`;
//! its exact bias under the mixture model is `E p_hat - p = -p m^{-V gamma}`
//! for any correlation structure. The slab variance estimator inverts the
//! marginal second moment `E x_i^2 = 1 + pV`:
//! `V_hat = (mean(x^2) - 1) / p_hat`.
//!
//! Raw estimates can leave the valid parameter range in finite samples, so
//! both raw and clamped values are returned; plug-in consumers use the
//! clamped ones.

use crate::covariance::CovarianceFamily;
use crate::error::{Error, Result};

/// Tuning and clamping policy for the estimators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorConfig {
    /// Cosine-sum frequency parameter, in `(0, 1/2)`.
    pub gamma: f64,
    /// Lower clamp for the estimated proportion (default `1/m`).
    pub p_floor: f64,
    /// Upper clamp for the estimated proportion (default `1 - 1/m`).
    pub p_ceiling: f64,
    /// Lower clamp for the estimated slab variance.
    pub v_floor: f64,
}

pub const DEFAULT_GAMMA: f64 = 0.25;
pub const DEFAULT_V_FLOOR: f64 = 1e-6;

impl EstimatorConfig {
    /// Defaults for a problem with `m` hypotheses: `gamma = 0.25`,
    /// proportion clamps `(1/m, 1 - 1/m)`, variance floor `1e-6`.
    pub fn for_dim(m: usize) -> Self {
        let m = m.max(2) as f64;
        EstimatorConfig {
            gamma: DEFAULT_GAMMA,
            p_floor: 1.0 / m,
            p_ceiling: 1.0 - 1.0 / m,
            v_floor: DEFAULT_V_FLOOR,
        }
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 0.5) {
            return Err(Error::domain(format!(
                "gamma = {} must lie in (0, 0.5)",
                self.gamma
            )));
        }
        if !(self.p_floor > 0.0 && self.p_floor < self.p_ceiling && self.p_ceiling < 1.0) {
            return Err(Error::domain(format!(
                "proportion clamps ({}, {}) must satisfy 0 < floor < ceiling < 1",
                self.p_floor, self.p_ceiling
            )));
        }
        if !(self.v_floor > 0.0) {
            return Err(Error::domain("variance floor must be positive"));
        }
        Ok(())
    }
}

/// Raw and clamped proportion estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PEstimate {
    pub raw: f64,
    pub clamped: f64,
}

/// Raw and clamped slab variance estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VEstimate {
    pub raw: f64,
    pub clamped: f64,
}

/// Cosine-sum estimator of the signal proportion.
///
/// For `m = 1` the frequency `sqrt(2 gamma log m)` vanishes and the raw
/// estimate is identically zero, which the floor clamp lifts to `p_floor`.
pub fn estimate_p(x: &[f64], cfg: &EstimatorConfig) -> Result<PEstimate> {
    cfg.validate()?;
    let m = x.len();
    if m == 0 {
        return Err(Error::domain("data vector must be nonempty"));
    }
    let mf = m as f64;
    let freq = (2.0 * cfg.gamma * mf.ln()).sqrt();
    let cos_sum: f64 = x.iter().map(|&xi| (freq * xi).cos()).sum();
    let raw = 1.0 - mf.powf(cfg.gamma - 1.0) * cos_sum;
    let clamped = raw.clamp(cfg.p_floor, cfg.p_ceiling);
    Ok(PEstimate { raw, clamped })
}

/// Moment estimator of the slab variance given an estimate of the
/// proportion: `(mean(x^2) - 1) / p_hat`, floored at `cfg.v_floor`.
pub fn estimate_v(x: &[f64], p_hat: f64, cfg: &EstimatorConfig) -> Result<VEstimate> {
    cfg.validate()?;
    if x.is_empty() {
        return Err(Error::domain("data vector must be nonempty"));
    }
    if !(p_hat > 0.0) {
        return Err(Error::domain(format!(
            "proportion estimate {p_hat} must be positive"
        )));
    }
    let mean_sq = x.iter().map(|&xi| xi * xi).sum::<f64>() / x.len() as f64;
    let raw = (mean_sq - 1.0) / p_hat;
    let clamped = raw.max(cfg.v_floor);
    Ok(VEstimate { raw, clamped })
}

/// Closed-form second moment of the cosine statistics for a centered
/// bivariate normal with standard deviations `s1`, `s2` and correlation
/// `rho`, at frequency `sqrt(2 gamma log m)`:
/// `E[cos(c Z1) cos(c Z2)] = (e^{-(s1^2+s2^2+2 rho s1 s2) gamma log m}
///                          + e^{-(s1^2+s2^2-2 rho s1 s2) gamma log m}) / 2`.
pub fn cosine_moment(s1: f64, s2: f64, rho: f64, m: usize, gamma: f64) -> f64 {
    let l = (m as f64).ln();
    let base = s1 * s1 + s2 * s2;
    let cross = 2.0 * rho * s1 * s2;
    0.5 * ((-(base + cross) * gamma * l).exp() + (-(base - cross) * gamma * l).exp())
}

/// Weak-dependence diagnostic for the proportion estimator: the normalized
/// off-diagonal sum
/// `(1 / (m^2 p^2)) * sum_{j != j'} (m^{gamma sigma_jj'} - m^{-gamma sigma_jj'})^2`.
/// Consistency requires this to vanish as `m` grows.
pub fn dependence_condition(family: &CovarianceFamily, p: f64, gamma: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("p = {p} must lie in (0, 1)")));
    }
    let m = family.dim() as f64;
    let l = m.ln();
    let sum: f64 = family
        .offdiagonal_pair_counts()?
        .iter()
        .map(|&(sigma, count)| {
            let term = (gamma * sigma * l).exp() - (-gamma * sigma * l).exp();
            count as f64 * term * term
        })
        .sum();
    Ok(sum / (m * m * p * p))
}
