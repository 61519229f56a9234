//! The Bayesian step-down (BSD) procedure.
//!
//! At stage `t` with removed indices `(i_1, ..., i_{t-1})`, the statistic for
//! a surviving hypothesis `j` is the posterior odds of "`j` is a signal, all
//! other survivors are null" against "all survivors are null", given the
//! surviving data. The stage rejects the maximizing hypothesis when the odds
//! exceed `delta` (default 1), removes it, and repeats; the first
//! non-exceedance accepts all survivors and stops.
//!
//! Three equivalent evaluations of the log statistic are provided:
//!
//! * [`bsd_stat_fast`]: from one column of the surviving submatrix inverse,
//!   `log S = log(p/(1-p)) - log(1 + V b_jj)/2 + V w^2 / (2 (1 + V b_jj))`
//!   with `w = sum_k b_kj x_k`. Only one inverse per stage is needed, and the
//!   inverse is carried across stages by an `O(k^2)` downdate.
//! * [`bsd_stat_naive`]: the defining ratio of two dense normal densities,
//!   kept as a slow reference for small dimensions.
//! * [`bsd_stat_from_residual`]: through the adaptive residual `U` and
//!   conditional variance of the maximum-residual procedure,
//!   `log S = log(p/(1-p)) + log(s/(V+s))/2 + V u^2 / (2 (V+s))`.
//!
//! Everything is computed in log scale: the exponent grows like `V U^2 / 2`
//! and overflows `exp` in double precision for strong signals.
//!
//! Note that when `p >= 1/2` the prior log odds are nonnegative and the
//! statistic can exceed `delta = 1` even at `x = 0`; the formula is applied
//! as defined, without any special handling.

use crate::covariance::CovarianceFamily;
use crate::error::{Error, Result};
use crate::linalg::{intraclass_inverse_entries, inverse_downdate, log_mvn_density, SymMatrix};
use crate::model::MixtureParams;
use crate::trace::{DecisionVector, StageRecord, StepTrace};

/// Largest surviving dimension the naive density-ratio oracle will evaluate.
pub const NAIVE_DIM_LIMIT: usize = 20;

/// Tolerance on the diagonal for accepting a matrix as a correlation matrix.
const UNIT_DIAG_TOL: f64 = 1e-8;

/// The surviving-hypothesis state of a step-down run: removal order, the
/// surviving indices, and the inverse of the surviving submatrix, downdated
/// in `O(k^2)` per removal.
#[derive(Clone, Debug)]
pub struct ActiveSet {
    sigma: SymMatrix,
    removed: Vec<usize>,
    surviving: Vec<usize>,
    inv: SymMatrix,
}

impl ActiveSet {
    /// Starts a run on the full matrix; computes one inverse.
    pub fn new(sigma: &SymMatrix) -> Result<Self> {
        let inv = sigma.inverse()?;
        Ok(ActiveSet {
            sigma: sigma.clone(),
            removed: Vec::new(),
            surviving: (0..sigma.dim()).collect(),
            inv,
        })
    }

    /// Starts a run from a precomputed inverse of `sigma`. The caller is
    /// responsible for `inverse` actually being `sigma^{-1}`; only the
    /// dimensions are checked.
    pub fn from_parts(sigma: SymMatrix, inverse: SymMatrix) -> Result<Self> {
        if sigma.dim() != inverse.dim() {
            return Err(Error::domain(format!(
                "matrix dimension {} does not match inverse dimension {}",
                sigma.dim(),
                inverse.dim()
            )));
        }
        Ok(ActiveSet {
            surviving: (0..sigma.dim()).collect(),
            removed: Vec::new(),
            sigma,
            inv: inverse,
        })
    }

    pub fn sigma(&self) -> &SymMatrix {
        &self.sigma
    }

    /// Original indices removed so far, in removal order.
    pub fn removed(&self) -> &[usize] {
        &self.removed
    }

    /// Surviving original indices, ascending.
    pub fn surviving(&self) -> &[usize] {
        &self.surviving
    }

    /// Inverse of the surviving principal submatrix.
    pub fn inverse(&self) -> &SymMatrix {
        &self.inv
    }

    /// Position of original index `j` among the survivors.
    pub fn position(&self, j: usize) -> Option<usize> {
        self.surviving.binary_search(&j).ok()
    }

    /// Removes hypothesis `j` (original index) and downdates the inverse.
    pub fn remove(&mut self, j: usize) -> Result<()> {
        let pos = self
            .position(j)
            .ok_or_else(|| Error::domain(format!("index {j} is not surviving")))?;
        self.inv = inverse_downdate(&self.inv, pos)?;
        self.surviving.remove(pos);
        self.removed.push(j);
        Ok(())
    }

    /// `inv * x_surviving`: the weight `w_j = sum_k b_kj x_k` for every
    /// surviving position at once.
    pub(crate) fn weights(&self, x: &[f64]) -> Vec<f64> {
        let xs: Vec<f64> = self.surviving.iter().map(|&j| x[j]).collect();
        self.inv.mul_vec(&xs)
    }
}

#[inline]
fn log_stat_from_parts(bjj: f64, w: f64, params: &MixtureParams) -> f64 {
    let v = params.slab_variance();
    let den = 1.0 + v * bjj;
    params.log_prior_odds() - 0.5 * den.ln() + v * w * w / (2.0 * den)
}

/// Log BSD statistic for surviving hypothesis `j` (original index) via the
/// inverse-column representation. `x` is the full data vector.
///
/// # Panics
/// Panics if `j` is not surviving or `x` has the wrong length.
pub fn bsd_stat_fast(active: &ActiveSet, j: usize, x: &[f64], params: &MixtureParams) -> f64 {
    assert_eq!(x.len(), active.sigma.dim(), "data length mismatch");
    let pos = active.position(j).expect("hypothesis must be surviving");
    let row = active.inv.row(pos); // symmetric: row == column
    let w: f64 = row
        .iter()
        .zip(active.surviving.iter())
        .map(|(&b, &k)| b * x[k])
        .sum();
    log_stat_from_parts(row[pos], w, params)
}

/// Log BSD statistic by direct evaluation of the defining density ratio.
///
/// This is the reference implementation: it builds the surviving submatrix,
/// perturbs the `j`-th diagonal entry by `V`, and evaluates two dense normal
/// log densities. Refuses dimensions above [`NAIVE_DIM_LIMIT`].
pub fn bsd_stat_naive(
    active: &ActiveSet,
    j: usize,
    x: &[f64],
    params: &MixtureParams,
) -> Result<f64> {
    assert_eq!(x.len(), active.sigma.dim(), "data length mismatch");
    let k = active.surviving.len();
    if k > NAIVE_DIM_LIMIT {
        return Err(Error::domain(format!(
            "naive statistic is a reference path, limited to dimension {NAIVE_DIM_LIMIT} (got {k})"
        )));
    }
    let pos = active
        .position(j)
        .ok_or_else(|| Error::domain(format!("index {j} is not surviving")))?;
    let sub = active.sigma.submatrix(&active.surviving);
    let xs: Vec<f64> = active.surviving.iter().map(|&i| x[i]).collect();
    let mut alt = sub.clone();
    alt.set(pos, pos, sub.get(pos, pos) + params.slab_variance());
    Ok(params.log_prior_odds() + log_mvn_density(&xs, &alt)? - log_mvn_density(&xs, &sub)?)
}

/// Log BSD statistic from an adaptive residual `u` and its conditional
/// variance, the functional bridge between the two step-down procedures.
pub fn bsd_stat_from_residual(u: f64, cond_variance: f64, params: &MixtureParams) -> Result<f64> {
    if cond_variance <= 0.0 {
        return Err(Error::numeric(format!(
            "conditional variance {cond_variance} must be positive"
        )));
    }
    let v = params.slab_variance();
    Ok(params.log_prior_odds()
        + 0.5 * (cond_variance / (v + cond_variance)).ln()
        + v * u * u / (2.0 * (v + cond_variance)))
}

/// Selects the stage maximum: returns `(position, statistic)`, breaking ties
/// by the smallest original index (positions scan in ascending index order).
fn argmax_stat(stats: impl Iterator<Item = f64>) -> (usize, f64) {
    let mut best_pos = 0;
    let mut best = f64::NEG_INFINITY;
    for (pos, s) in stats.enumerate() {
        if s > best {
            best = s;
            best_pos = pos;
        }
    }
    (best_pos, best)
}

/// Runs the BSD procedure on a correlation matrix. Costs one `O(m^3)`
/// inversion up front and `O(k^2)` per stage afterwards.
pub fn bsd_step_down(
    x: &[f64],
    sigma: &SymMatrix,
    params: &MixtureParams,
) -> Result<(DecisionVector, StepTrace)> {
    if !sigma.has_unit_diagonal(UNIT_DIAG_TOL) {
        return Err(Error::domain(
            "step-down requires a correlation matrix (unit diagonal); standardize first",
        ));
    }
    let active = ActiveSet::new(sigma)?;
    bsd_step_down_from(active, x, params)
}

/// Runs the BSD procedure from a prepared [`ActiveSet`] (no hypotheses may
/// have been removed yet). Lets callers reuse a precomputed inverse across
/// replicates.
pub fn bsd_step_down_from(
    mut active: ActiveSet,
    x: &[f64],
    params: &MixtureParams,
) -> Result<(DecisionVector, StepTrace)> {
    let m = active.sigma.dim();
    if x.len() != m {
        return Err(Error::domain(format!(
            "data length {} does not match dimension {m}",
            x.len()
        )));
    }
    if !active.removed.is_empty() {
        return Err(Error::domain("active set must be fresh"));
    }
    let log_delta = params.delta().ln();
    let mut rejected = vec![false; m];
    let mut stages = Vec::new();
    let mut stop_stage = m + 1;
    for t in 1..=m {
        let w = active.weights(x);
        let (best_pos, best_stat) = argmax_stat(
            w.iter()
                .enumerate()
                .map(|(pos, &wj)| log_stat_from_parts(active.inv.get(pos, pos), wj, params)),
        );
        let index = active.surviving[best_pos];
        let reject = best_stat > log_delta;
        stages.push(StageRecord {
            stage: t,
            index,
            statistic: best_stat,
            threshold: log_delta,
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

/// Runs the BSD procedure under intraclass correlation without building any
/// matrix: the inverse entries of every surviving submatrix come from the
/// closed form, so a full run costs `O(m)` memory and `O(m)` per stage.
pub fn bsd_step_down_intraclass(
    x: &[f64],
    rho: f64,
    params: &MixtureParams,
) -> Result<(DecisionVector, StepTrace)> {
    let m = x.len();
    if m == 0 {
        return Err(Error::domain("data vector must be nonempty"));
    }
    // validates the full-dimension range once; subsets only relax the bound
    intraclass_inverse_entries(m, rho)?;
    let log_delta = params.delta().ln();
    let mut surviving: Vec<usize> = (0..m).collect();
    let mut sum_x: f64 = x.iter().sum();
    let mut rejected = vec![false; m];
    let mut stages = Vec::new();
    let mut stop_stage = m + 1;
    for t in 1..=m {
        let k = surviving.len();
        let (diag, off) = intraclass_inverse_entries(k, rho)?;
        let (best_pos, best_stat) = argmax_stat(surviving.iter().map(|&j| {
            let w = off * sum_x + (diag - off) * x[j];
            log_stat_from_parts(diag, w, params)
        }));
        let index = surviving[best_pos];
        let reject = best_stat > log_delta;
        stages.push(StageRecord {
            stage: t,
            index,
            statistic: best_stat,
            threshold: log_delta,
            rejected: reject,
        });
        if !reject {
            stop_stage = t;
            break;
        }
        rejected[index] = true;
        surviving.remove(best_pos);
        sum_x -= x[index];
    }
    Ok((
        DecisionVector::new(rejected),
        StepTrace { stages, stop_stage },
    ))
}

/// Family-dispatched BSD run: identity and intraclass structures take the
/// matrix-free path, everything else materializes the correlation matrix.
pub fn bsd_step_down_family(
    x: &[f64],
    family: &CovarianceFamily,
    params: &MixtureParams,
) -> Result<(DecisionVector, StepTrace)> {
    if x.len() != family.dim() {
        return Err(Error::domain(format!(
            "data length {} does not match family dimension {}",
            x.len(),
            family.dim()
        )));
    }
    match family.intraclass_rho() {
        Some(rho) => bsd_step_down_intraclass(x, rho, params),
        None => bsd_step_down(x, &family.build()?, params),
    }
}
