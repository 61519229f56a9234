//! The two-groups generative model.
//!
//! Each mean is zero with probability `1 - p` or drawn from the slab
//! `N(0, V)` with probability `p`; the observation vector is then
//! `x ~ N(mu, Sigma)` for a known correlation matrix `Sigma`. Conditionally
//! on the indicators, `x ~ N(0, Sigma + V B)` with `B` the diagonal indicator
//! matrix, so each marginal has variance `1 + pV`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::covariance::{CovarianceFamily, FamilyFactor};
use crate::error::{Error, Result};
use crate::rng::replicate_rng;

/// Prior parameters: signal proportion `p`, slab variance `V`, and the
/// step-down decision threshold `delta` (default 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixtureParams {
    p: f64,
    v: f64,
    delta: f64,
}

impl MixtureParams {
    pub fn new(p: f64, v: f64, delta: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("p = {p} must lie in (0, 1)")));
        }
        if !(v > 0.0) {
            return Err(Error::domain(format!("V = {v} must be positive")));
        }
        if !(delta > 0.0) {
            return Err(Error::domain(format!("delta = {delta} must be positive")));
        }
        Ok(MixtureParams { p, v, delta })
    }

    /// Parameters with the default unit threshold.
    pub fn with_unit_threshold(p: f64, v: f64) -> Result<Self> {
        MixtureParams::new(p, v, 1.0)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn slab_variance(&self) -> f64 {
        self.v
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `log(p / (1-p))`, the prior log odds of a signal.
    pub fn log_prior_odds(&self) -> f64 {
        (self.p / (1.0 - self.p)).ln()
    }
}

/// Simulated truth: indicators and means, with `mean[i] = 0` exactly
/// wherever `signal[i]` is false.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    pub signal: Vec<bool>,
    pub mean: Vec<f64>,
}

impl GroundTruth {
    pub fn len(&self) -> usize {
        self.signal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signal.is_empty()
    }

    pub fn n_signals(&self) -> usize {
        self.signal.iter().filter(|&&s| s).count()
    }
}

/// Reusable dataset sampler: family validation and any dense factorization
/// happen once, then replicates draw from independent seeded substreams.
#[derive(Clone, Debug)]
pub struct Sampler {
    family: CovarianceFamily,
    params: MixtureParams,
    factor: FamilyFactor,
}

impl Sampler {
    pub fn new(family: CovarianceFamily, params: MixtureParams) -> Result<Self> {
        let factor = family.factor()?;
        Ok(Sampler {
            family,
            params,
            factor,
        })
    }

    pub fn family(&self) -> &CovarianceFamily {
        &self.family
    }

    pub fn params(&self) -> &MixtureParams {
        &self.params
    }

    /// Draws one replicate. Draw order is fixed: indicators, then slab means
    /// for the signals in index order, then the noise vector; identical
    /// `(seed, replicate)` always reproduces the same output bits.
    pub fn sample(&self, seed: u64, replicate: u64) -> (GroundTruth, Vec<f64>) {
        let m = self.family.dim();
        let mut rng = replicate_rng(seed, replicate);
        let signal: Vec<bool> = (0..m).map(|_| rng.random_bool(self.params.p())).collect();
        let sd = self.params.slab_variance().sqrt();
        let mean: Vec<f64> = signal
            .iter()
            .map(|&s| {
                if s {
                    sd * rng.sample::<f64, _>(StandardNormal)
                } else {
                    0.0
                }
            })
            .collect();
        let mut x = vec![0.0; m];
        self.factor.sample_into(&mut rng, &mut x);
        for (xi, mu) in x.iter_mut().zip(&mean) {
            *xi += mu;
        }
        (GroundTruth { signal, mean }, x)
    }
}

/// One-shot draw from the model (replicate stream 0).
pub fn sample_dataset(
    family: &CovarianceFamily,
    params: &MixtureParams,
    seed: u64,
) -> Result<(GroundTruth, Vec<f64>)> {
    Ok(Sampler::new(family.clone(), *params)?.sample(seed, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_and_se(values: &[f64]) -> (f64, f64) {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    #[test]
    fn params_ranges_enforced() {
        assert!(MixtureParams::new(0.0, 1.0, 1.0).is_err());
        assert!(MixtureParams::new(1.0, 1.0, 1.0).is_err());
        assert!(MixtureParams::new(0.5, 0.0, 1.0).is_err());
        assert!(MixtureParams::new(0.5, 1.0, 0.0).is_err());
        assert!(MixtureParams::with_unit_threshold(0.5, 2.0).is_ok());
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let fam = CovarianceFamily::Ar1 { dim: 6, rho: 0.4 };
        let params = MixtureParams::with_unit_threshold(0.3, 4.0).unwrap();
        let a = sample_dataset(&fam, &params, 42).unwrap();
        let b = sample_dataset(&fam, &params, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_dataset(&fam, &params, 43).unwrap();
        assert_ne!(a.1, c.1);
    }

    #[test]
    fn null_means_are_exactly_zero() {
        let fam = CovarianceFamily::Identity { dim: 50 };
        let params = MixtureParams::with_unit_threshold(0.4, 9.0).unwrap();
        let (truth, _) = sample_dataset(&fam, &params, 9).unwrap();
        for (s, mu) in truth.signal.iter().zip(&truth.mean) {
            if !s {
                assert_eq!(*mu, 0.0);
            }
        }
        assert!(truth.n_signals() > 0);
    }

    #[test]
    fn vanishing_p_gives_standard_marginals() {
        // p ~ 0: no signals, and each coordinate has variance about 1
        let fam = CovarianceFamily::Intraclass { dim: 5, rho: 0.3 };
        let params = MixtureParams::with_unit_threshold(1e-12, 25.0).unwrap();
        let sampler = Sampler::new(fam, params).unwrap();
        let reps = 10_000;
        let mut sq = vec![0.0; 5];
        for r in 0..reps {
            let (truth, x) = sampler.sample(5, r);
            assert_eq!(truth.n_signals(), 0);
            for (acc, xi) in sq.iter_mut().zip(&x) {
                *acc += xi * xi;
            }
        }
        for acc in sq {
            let var = acc / reps as f64;
            assert!((var - 1.0).abs() < 0.05, "coordinate variance {var}");
        }
    }

    #[test]
    fn second_moment_matches_one_plus_pv() {
        // E x_i^2 = 1 + pV under the mixture, any correlation
        let fam = CovarianceFamily::Intraclass { dim: 2, rho: 0.5 };
        let params = MixtureParams::with_unit_threshold(0.3, 4.0).unwrap();
        let sampler = Sampler::new(fam, params).unwrap();
        let reps = 100_000;
        let per_rep: Vec<f64> = (0..reps)
            .map(|r| {
                let (_, x) = sampler.sample(11, r);
                (x[0] * x[0] + x[1] * x[1]) / 2.0
            })
            .collect();
        let (mean, se) = mean_and_se(&per_rep);
        let target = 1.0 + 0.3 * 4.0;
        assert!(
            (mean - target).abs() <= 3.0 * se,
            "mean {mean} vs {target} (se {se})"
        );
    }

    #[test]
    fn squared_covariance_matches_two_sigma_squared() {
        // cov(x_i^2, x_j^2) = 2 sigma_ij^2 = 0.5 at rho = 0.5
        let fam = CovarianceFamily::Intraclass { dim: 2, rho: 0.5 };
        let params = MixtureParams::with_unit_threshold(0.3, 4.0).unwrap();
        let sampler = Sampler::new(fam, params).unwrap();
        let reps = 100_000;
        let draws: Vec<(f64, f64)> = (0..reps)
            .map(|r| {
                let (_, x) = sampler.sample(13, r);
                (x[0] * x[0], x[1] * x[1])
            })
            .collect();
        let m1 = draws.iter().map(|d| d.0).sum::<f64>() / reps as f64;
        let m2 = draws.iter().map(|d| d.1).sum::<f64>() / reps as f64;
        let prods: Vec<f64> = draws.iter().map(|d| (d.0 - m1) * (d.1 - m2)).collect();
        let (cov, se) = mean_and_se(&prods);
        assert!((cov - 0.5).abs() <= 3.0 * se, "cov {cov} vs 0.5 (se {se})");
    }

    #[test]
    fn signal_fraction_tracks_p() {
        let fam = CovarianceFamily::Identity { dim: 100 };
        let p = 0.2;
        let params = MixtureParams::with_unit_threshold(p, 4.0).unwrap();
        let sampler = Sampler::new(fam, params).unwrap();
        let reps = 200u64;
        let total = 100.0 * reps as f64;
        let mut signals = 0usize;
        for r in 0..reps {
            signals += sampler.sample(21, r).0.n_signals();
        }
        let frac = signals as f64 / total;
        let se = (p * (1.0 - p) / total).sqrt();
        assert!(
            (frac - p).abs() <= 3.0 * se,
            "fraction {frac} vs {p} (se {se})"
        );
    }
}
