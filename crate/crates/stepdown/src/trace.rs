//! Decision vectors and step-down run traces.

/// Per-hypothesis reject/accept flags, indexed by original hypothesis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionVector(Vec<bool>);

impl DecisionVector {
    pub fn new(rejected: Vec<bool>) -> Self {
        DecisionVector(rejected)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when hypothesis `i` is rejected.
    pub fn rejected(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn n_rejections(&self) -> usize {
        self.0.iter().filter(|&&r| r).count()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }
}

/// One stage of a step-down run. For the posterior-odds procedure the
/// statistic is the log odds and the threshold is `log(delta)`; for the
/// residual procedure the statistic is `|U|` and the threshold the stage's
/// critical constant.
#[derive(Clone, Debug, PartialEq)]
pub struct StageRecord {
    /// Stage number, 1-based.
    pub stage: usize,
    /// Original (0-based) index of the hypothesis selected at this stage.
    pub index: usize,
    /// The stage maximum statistic.
    pub statistic: f64,
    /// Threshold the statistic was compared against.
    pub threshold: f64,
    /// True when the stage rejected; false when it accepted all survivors.
    pub rejected: bool,
}

/// Full record of a step-down run.
#[derive(Clone, Debug, PartialEq)]
pub struct StepTrace {
    /// One record per visited stage, including the stopping stage.
    pub stages: Vec<StageRecord>,
    /// Stage at which acceptance occurred, or `m + 1` when every hypothesis
    /// was rejected.
    pub stop_stage: usize,
}

impl StepTrace {
    /// Indices rejected, in rejection order.
    pub fn rejection_order(&self) -> Vec<usize> {
        self.stages
            .iter()
            .filter(|s| s.rejected)
            .map(|s| s.index)
            .collect()
    }
}
