//! Scoring decisions against simulated ground truth.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::GroundTruth;
use crate::trace::DecisionVector;

/// Confusion counts for one replicate of one method.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub true_pos: u64,
    pub false_pos: u64,
    pub true_neg: u64,
    pub false_neg: u64,
}

impl Confusion {
    pub fn total(&self) -> u64 {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }

    pub fn rejections(&self) -> u64 {
        self.true_pos + self.false_pos
    }

    pub fn signals(&self) -> u64 {
        self.true_pos + self.false_neg
    }

    /// Fraction of hypotheses whose decision disagrees with the truth.
    pub fn misclassification(&self) -> f64 {
        (self.false_pos + self.false_neg) as f64 / self.total() as f64
    }

    /// False discovery proportion `fp / max(rejections, 1)`.
    pub fn fdp(&self) -> f64 {
        self.false_pos as f64 / (self.rejections().max(1)) as f64
    }

    /// False non-discovery proportion `fn / max(acceptances, 1)`.
    pub fn fnp(&self) -> f64 {
        let acceptances = self.total() - self.rejections();
        self.false_neg as f64 / (acceptances.max(1)) as f64
    }

    /// Fraction of signals rejected; `None` when the replicate has none.
    pub fn power(&self) -> Option<f64> {
        let s = self.signals();
        (s > 0).then(|| self.true_pos as f64 / s as f64)
    }
}

/// Standard confusion counts of a decision vector against the truth.
pub fn score_replicate(decisions: &DecisionVector, truth: &GroundTruth) -> Result<Confusion> {
    if decisions.len() != truth.len() {
        return Err(Error::domain(format!(
            "decision length {} does not match truth length {}",
            decisions.len(),
            truth.len()
        )));
    }
    let mut c = Confusion::default();
    for (rejected, &is_signal) in decisions.iter().zip(&truth.signal) {
        match (rejected, is_signal) {
            (true, true) => c.true_pos += 1,
            (true, false) => c.false_pos += 1,
            (false, false) => c.true_neg += 1,
            (false, true) => c.false_neg += 1,
        }
    }
    debug_assert_eq!(c.total() as usize, truth.len());
    Ok(c)
}
