//! The maximum-residual step-down (MRD) procedure.
//!
//! The stage statistic for a surviving hypothesis `j` is the adaptively
//! formed residual: `x_j` regressed on all other surviving coordinates under
//! the null covariance, standardized by the conditional standard deviation.
//! Both quantities come straight from the inverse column the BSD fast path
//! already maintains: with `b` the `j`-th column of the surviving submatrix
//! inverse, the conditional variance is `1 / b_jj` and the residual is
//! `(sum_k b_kj x_k) / sqrt(b_jj)`, so no extra inversion is performed.
//!
//! The procedure compares `max |U|` against a non-increasing sequence of
//! critical constants and stops at the first non-exceedance.

use crate::bsd::ActiveSet;
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::trace::{DecisionVector, StageRecord, StepTrace};

/// Non-increasing positive critical constants, one per stage.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalSequence(Vec<f64>);

impl CriticalSequence {
    /// Validates positivity and monotonicity.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("critical sequence must be nonempty"));
        }
        for (t, &c) in values.iter().enumerate() {
            if !(c > 0.0) {
                return Err(Error::domain(format!(
                    "critical constant {c} at stage {} must be positive",
                    t + 1
                )));
            }
            if t > 0 && c > values[t - 1] {
                return Err(Error::domain(format!(
                    "critical constants must be non-increasing; stage {} has {c} > {}",
                    t + 1,
                    values[t - 1]
                )));
            }
        }
        Ok(CriticalSequence(values))
    }

    /// Step-down normal-quantile heights at level `alpha`:
    /// `C_t = Phi^{-1}(1 - alpha / (2 (m - t + 1)))`, the two-sided
    /// Holm-style division of `alpha` among the survivors.
    pub fn holm(m: usize, alpha: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("number of hypotheses must be at least 1"));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!("alpha = {alpha} must lie in (0, 1)")));
        }
        let values = (0..m)
            .map(|t| {
                let survivors = (m - t) as f64;
                crate::normal::upper_quantile(alpha / (2.0 * survivors))
            })
            .collect();
        CriticalSequence::new(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Adaptive residual of surviving hypothesis `j` given the removed set:
/// returns `(u, cond_variance)` where `u` is the standardized regression
/// residual of `x_j` on the other survivors and `cond_variance` the
/// conditional variance of coordinate `j`.
pub fn mrd_residual(active: &ActiveSet, j: usize, x: &[f64]) -> Result<(f64, f64)> {
    assert_eq!(x.len(), active.sigma().dim(), "data length mismatch");
    let pos = active
        .position(j)
        .ok_or_else(|| Error::domain(format!("index {j} is not surviving")))?;
    let row = active.inverse().row(pos);
    let bjj = row[pos];
    if bjj <= 0.0 {
        return Err(Error::numeric(format!(
            "inverse diagonal {bjj} is not positive"
        )));
    }
    let w: f64 = row
        .iter()
        .zip(active.surviving().iter())
        .map(|(&b, &k)| b * x[k])
        .sum();
    Ok((w / bjj.sqrt(), 1.0 / bjj))
}

/// Runs the MRD procedure. `sigma` may be any positive definite covariance;
/// the residuals are scale-free in the data/covariance pair.
pub fn mrd_step_down(
    x: &[f64],
    sigma: &SymMatrix,
    critical: &CriticalSequence,
) -> Result<(DecisionVector, StepTrace)> {
    let active = ActiveSet::new(sigma)?;
    mrd_step_down_from(active, x, critical)
}

/// Same as [`mrd_step_down`], starting from a prepared [`ActiveSet`].
pub fn mrd_step_down_from(
    mut active: ActiveSet,
    x: &[f64],
    critical: &CriticalSequence,
) -> Result<(DecisionVector, StepTrace)> {
    let m = active.sigma().dim();
    if x.len() != m {
        return Err(Error::domain(format!(
            "data length {} does not match dimension {m}",
            x.len()
        )));
    }
    if critical.len() != m {
        return Err(Error::domain(format!(
            "critical sequence length {} does not match dimension {m}",
            critical.len()
        )));
    }
    if !active.removed().is_empty() {
        return Err(Error::domain("active set must be fresh"));
    }
    let mut rejected = vec![false; m];
    let mut stages = Vec::new();
    let mut stop_stage = m + 1;
    for t in 1..=m {
        let w = active.weights(x);
        let mut best_pos = 0;
        let mut best = f64::NEG_INFINITY;
        for (pos, &wj) in w.iter().enumerate() {
            let u_abs = (wj / active.inverse().get(pos, pos).sqrt()).abs();
            if u_abs > best {
                best = u_abs;
                best_pos = pos;
            }
        }
        let threshold = critical.values()[t - 1];
        let index = active.surviving()[best_pos];
        let reject = best > threshold;
        stages.push(StageRecord {
            stage: t,
            index,
            statistic: best,
            threshold,
            rejected: reject,
        });
        if !reject {
            stop_stage = t;
            break;
        }
        rejected[index] = true;
        if t < m {
            active.remove(index)?;
        }
    }
    Ok((
        DecisionVector::new(rejected),
        StepTrace { stages, stop_stage },
    ))
}
