//! Monte Carlo experiment harness.
//!
//! Builds a scenario, runs replicated comparisons of the selected methods,
//! scores every replicate against the simulated truth, and aggregates the
//! standard risk metrics with Monte Carlo standard errors.
//!
//! Replicates are embarrassingly parallel: each draws from its own seeded
//! substream and produces integer confusion counts, which are collected in
//! replicate order and reduced sequentially, so results do not depend on
//! thread scheduling.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{adaptive_bh, bh_step_up, bonferroni, by_step_up, p_values};
use crate::bsd::{bsd_step_down_from, bsd_step_down_intraclass, ActiveSet};
use crate::covariance::CovarianceFamily;
use crate::error::{Error, Result};
use crate::estimators::{estimate_p, estimate_v, EstimatorConfig};
use crate::io::read_sym_matrix;
use crate::linalg::SymMatrix;
use crate::metrics::{score_replicate, Confusion};
use crate::model::{MixtureParams, Sampler};
use crate::mrd::{mrd_step_down_from, CriticalSequence};
use crate::trace::DecisionVector;

/// The procedures the harness can compare.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bsd,
    Mrd,
    Bh,
    By,
    Bonf,
    Abh,
}

pub const ALL_METHODS: [Method; 6] = [
    Method::Bsd,
    Method::Mrd,
    Method::Bh,
    Method::By,
    Method::Bonf,
    Method::Abh,
];

impl Method {
    pub fn token(&self) -> &'static str {
        match self {
            Method::Bsd => "bsd",
            Method::Mrd => "mrd",
            Method::Bh => "bh",
            Method::By => "by",
            Method::Bonf => "bonf",
            Method::Abh => "abh",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bsd" => Ok(Method::Bsd),
            "mrd" => Ok(Method::Mrd),
            "bh" => Ok(Method::Bh),
            "by" => Ok(Method::By),
            "bonf" | "bonferroni" => Ok(Method::Bonf),
            "abh" | "adaptive-bh" => Ok(Method::Abh),
            other => Err(Error::domain(format!(
                "unknown method {other:?} (expected bsd, mrd, bh, by, bonf, abh)"
            ))),
        }
    }
}

/// Covariance family selection as it appears in config files and flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Identity,
    Intraclass,
    Ar1,
    Block,
    Custom,
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "identity" => Ok(FamilyKind::Identity),
            "intraclass" => Ok(FamilyKind::Intraclass),
            "ar1" => Ok(FamilyKind::Ar1),
            "block" => Ok(FamilyKind::Block),
            "custom" => Ok(FamilyKind::Custom),
            other => Err(Error::domain(format!(
                "unknown covariance family {other:?} (expected identity, intraclass, ar1, block, custom)"
            ))),
        }
    }
}

/// Declarative covariance choice; resolved against `m` when the experiment
/// starts (custom matrices are loaded from `sigma_file`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceSpec {
    pub family: FamilyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_file: Option<PathBuf>,
}

impl CovarianceSpec {
    pub fn identity() -> Self {
        CovarianceSpec {
            family: FamilyKind::Identity,
            rho: None,
            block_size: None,
            sigma_file: None,
        }
    }

    pub fn resolve(&self, m: usize) -> Result<CovarianceFamily> {
        let need_rho = || {
            self.rho
                .ok_or_else(|| Error::domain("cov: this family requires --rho"))
        };
        let family = match self.family {
            FamilyKind::Identity => CovarianceFamily::Identity { dim: m },
            FamilyKind::Intraclass => CovarianceFamily::Intraclass {
                dim: m,
                rho: need_rho()?,
            },
            FamilyKind::Ar1 => CovarianceFamily::Ar1 {
                dim: m,
                rho: need_rho()?,
            },
            FamilyKind::Block => CovarianceFamily::Block {
                dim: m,
                block_size: self
                    .block_size
                    .ok_or_else(|| Error::domain("cov: block family requires --block-size"))?,
                rho: need_rho()?,
            },
            FamilyKind::Custom => {
                let path = self
                    .sigma_file
                    .as_ref()
                    .ok_or_else(|| Error::domain("cov: custom family requires --sigma-file"))?;
                let matrix = read_sym_matrix(path)?;
                if matrix.dim() != m {
                    return Err(Error::domain(format!(
                        "cov: matrix dimension {} does not match m = {m}",
                        matrix.dim()
                    )));
                }
                CovarianceFamily::Custom { matrix }
            }
        };
        family.validate()?;
        Ok(family)
    }
}

/// Full description of one Monte Carlo experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub m: usize,
    pub cov: CovarianceSpec,
    /// True signal proportion.
    pub p: f64,
    /// True slab variance.
    pub v: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "all_methods")]
    pub methods: Vec<Method>,
    /// Feed the empirical Bayes plug-ins instead of the true `(p, V)`.
    #[serde(default)]
    pub estimate_params: bool,
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    /// Keep per-replicate confusion counts in the report (JSON only).
    #[serde(default)]
    pub per_replicate: bool,
}

fn default_delta() -> f64 {
    1.0
}

fn default_alpha() -> f64 {
    0.05
}

fn default_gamma() -> f64 {
    crate::estimators::DEFAULT_GAMMA
}

fn all_methods() -> Vec<Method> {
    ALL_METHODS.to_vec()
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |field: &str, msg: String| Err(Error::domain(format!("{field}: {msg}")));
        if self.m == 0 {
            return fail("m", "must be at least 1".into());
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return fail("p", format!("{} must lie in (0, 1)", self.p));
        }
        if !(self.v > 0.0) {
            return fail("v", format!("{} must be positive", self.v));
        }
        if !(self.delta > 0.0) {
            return fail("delta", format!("{} must be positive", self.delta));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return fail("alpha", format!("{} must lie in [0, 1]", self.alpha));
        }
        if !(self.gamma > 0.0 && self.gamma < 0.5) {
            return fail("gamma", format!("{} must lie in (0, 0.5)", self.gamma));
        }
        if self.replicates == 0 {
            return fail("replicates", "must be at least 1".into());
        }
        Ok(())
    }
}

/// Aggregated value with its Monte Carlo standard error and the number of
/// replicates that contributed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub method: Method,
    pub metric: MetricKind,
    pub estimate: f64,
    pub std_error: f64,
    pub replicates: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Misclassification,
    Fdr,
    Fnr,
    Power,
    MeanRejections,
}

pub const METRIC_KINDS: [MetricKind; 5] = [
    MetricKind::Misclassification,
    MetricKind::Fdr,
    MetricKind::Fnr,
    MetricKind::Power,
    MetricKind::MeanRejections,
];

impl MetricKind {
    pub fn token(&self) -> &'static str {
        match self {
            MetricKind::Misclassification => "misclassification",
            MetricKind::Fdr => "fdr",
            MetricKind::Fnr => "fnr",
            MetricKind::Power => "power",
            MetricKind::MeanRejections => "mean_rejections",
        }
    }
}

/// Per-replicate confusion counts, kept when `per_replicate` is set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRow {
    pub replicate: u64,
    pub method: Method,
    #[serde(flatten)]
    pub counts: Confusion,
}

/// The harness output: config echo, library version, one row per
/// (method, metric), and optionally the per-replicate counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub rows: Vec<MetricRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicate_rows: Option<Vec<ReplicateRow>>,
}

impl MetricsReport {
    /// Looks up one aggregated value.
    pub fn get(&self, method: Method, metric: MetricKind) -> Option<&MetricRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.metric == metric)
    }
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

struct Scenario {
    sampler: Sampler,
    true_params: MixtureParams,
    est_config: EstimatorConfig,
    /// Correlation matrix and its inverse, when some method needs them.
    dense: Option<(SymMatrix, SymMatrix)>,
    critical: Option<CriticalSequence>,
    intraclass_rho: Option<f64>,
}

impl Scenario {
    fn prepare(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let family = cfg.cov.resolve(cfg.m)?;
        let true_params = MixtureParams::new(cfg.p, cfg.v, cfg.delta)
            .map_err(|e| Error::domain(format!("p/v/delta: {e}")))?;
        let sampler = Sampler::new(family.clone(), true_params)?;
        let est_config = EstimatorConfig::for_dim(cfg.m).with_gamma(cfg.gamma);
        est_config.validate()?;
        let intraclass_rho = family.intraclass_rho();
        let needs_dense = cfg.methods.iter().any(|m| match m {
            Method::Mrd => true,
            Method::Bsd => intraclass_rho.is_none(),
            _ => false,
        });
        let dense = if needs_dense {
            let sigma = family.build()?;
            let inv = sigma.inverse()?;
            Some((sigma, inv))
        } else {
            None
        };
        let critical = if cfg.methods.contains(&Method::Mrd) {
            if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
                return Err(Error::domain(
                    "alpha: mrd's default critical sequence requires alpha in (0, 1)",
                ));
            }
            Some(CriticalSequence::holm(cfg.m, cfg.alpha)?)
        } else {
            None
        };
        Ok(Scenario {
            sampler,
            true_params,
            est_config,
            dense,
            critical,
            intraclass_rho,
        })
    }

    fn fresh_active_set(&self) -> Result<ActiveSet> {
        let (sigma, inv) = self.dense.as_ref().expect("dense path prepared");
        ActiveSet::from_parts(sigma.clone(), inv.clone())
    }

    fn run_replicate(&self, cfg: &ExperimentConfig, replicate: u64) -> Result<Vec<Confusion>> {
        let (truth, x) = self.sampler.sample(cfg.seed, replicate);
        let estimates = if cfg.estimate_params {
            let pe = estimate_p(&x, &self.est_config)?;
            let ve = estimate_v(&x, pe.clamped, &self.est_config)?;
            Some((pe.clamped, ve.clamped))
        } else {
            None
        };
        let pv: Option<Vec<f64>> = cfg
            .methods
            .iter()
            .any(|m| matches!(m, Method::Bh | Method::By | Method::Bonf | Method::Abh))
            .then(|| p_values(&x));
        let mut out = Vec::with_capacity(cfg.methods.len());
        for method in &cfg.methods {
            let decisions: DecisionVector = match method {
                Method::Bsd => {
                    let params = match estimates {
                        Some((p_hat, v_hat)) => MixtureParams::new(p_hat, v_hat, cfg.delta)?,
                        None => self.true_params,
                    };
                    match self.intraclass_rho {
                        Some(rho) => bsd_step_down_intraclass(&x, rho, &params)?.0,
                        None => bsd_step_down_from(self.fresh_active_set()?, &x, &params)?.0,
                    }
                }
                Method::Mrd => {
                    let crit = self.critical.as_ref().expect("critical sequence prepared");
                    mrd_step_down_from(self.fresh_active_set()?, &x, crit)?.0
                }
                Method::Bh => bh_step_up(pv.as_ref().unwrap(), cfg.alpha)?,
                Method::By => by_step_up(pv.as_ref().unwrap(), cfg.alpha)?,
                Method::Bonf => bonferroni(pv.as_ref().unwrap(), cfg.alpha)?,
                Method::Abh => {
                    let p_hat = estimates.map(|(p_hat, _)| p_hat).unwrap_or(cfg.p);
                    adaptive_bh(pv.as_ref().unwrap(), cfg.alpha, p_hat)?
                }
            };
            out.push(score_replicate(&decisions, &truth)?);
        }
        Ok(out)
    }
}

/// Runs the configured experiment. Deterministic given the config (including
/// the seed), regardless of how replicates are scheduled.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<MetricsReport> {
    let scenario = Scenario::prepare(cfg)?;
    let per_replicate: Vec<Vec<Confusion>> = (0..cfg.replicates as u64)
        .into_par_iter()
        .map(|r| scenario.run_replicate(cfg, r))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(cfg.methods.len() * METRIC_KINDS.len());
    for (mi, method) in cfg.methods.iter().enumerate() {
        let counts: Vec<Confusion> = per_replicate.iter().map(|reps| reps[mi]).collect();
        for metric in METRIC_KINDS {
            let values: Vec<f64> = match metric {
                MetricKind::Misclassification => {
                    counts.iter().map(Confusion::misclassification).collect()
                }
                MetricKind::Fdr => counts.iter().map(Confusion::fdp).collect(),
                MetricKind::Fnr => counts.iter().map(Confusion::fnp).collect(),
                MetricKind::Power => counts.iter().filter_map(Confusion::power).collect(),
                MetricKind::MeanRejections => {
                    counts.iter().map(|c| c.rejections() as f64).collect()
                }
            };
            let (estimate, std_error) = mean_and_se(&values);
            rows.push(MetricRow {
                method: *method,
                metric,
                estimate,
                std_error,
                replicates: values.len() as u64,
            });
        }
    }
    let replicate_rows = cfg.per_replicate.then(|| {
        per_replicate
            .iter()
            .enumerate()
            .flat_map(|(r, reps)| {
                cfg.methods
                    .iter()
                    .zip(reps)
                    .map(move |(method, counts)| ReplicateRow {
                        replicate: r as u64,
                        method: *method,
                        counts: *counts,
                    })
            })
            .collect()
    });
    Ok(MetricsReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        rows,
        replicate_rows,
    })
}

/// Report serialization format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::domain(format!(
                "unknown report format {other:?} (expected csv or json)"
            ))),
        }
    }
}

/// Writes the report. CSV emits the fixed `method,metric,estimate,std_error,
/// replicates` schema; JSON mirrors those rows and adds the config echo, the
/// library version, and any per-replicate counts.
pub fn emit_report<W: Write>(
    report: &MetricsReport,
    format: ReportFormat,
    writer: &mut W,
) -> Result<()> {
    let io_err = |e: std::io::Error| Error::Io {
        path: PathBuf::from("<writer>"),
        source: e,
    };
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            w.write_record(["method", "metric", "estimate", "std_error", "replicates"])
                .map_err(|e| Error::domain(format!("csv: {e}")))?;
            for row in &report.rows {
                w.write_record([
                    row.method.token().to_string(),
                    row.metric.token().to_string(),
                    format!("{}", row.estimate),
                    format!("{}", row.std_error),
                    format!("{}", row.replicates),
                ])
                .map_err(|e| Error::domain(format!("csv: {e}")))?;
            }
            w.flush().map_err(io_err)?;
        }
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut *writer, report)
                .map_err(|e| Error::domain(format!("json: {e}")))?;
            writer.write_all(b"\n").map_err(io_err)?;
        }
    }
    Ok(())
}

/// Writes the report to a file, surfacing I/O failures with the path.
pub fn write_report(
    report: &MetricsReport,
    format: ReportFormat,
    path: &std::path::Path,
) -> Result<()> {
    let mut buf = Vec::new();
    emit_report(report, format, &mut buf)?;
    std::fs::write(path, buf).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
