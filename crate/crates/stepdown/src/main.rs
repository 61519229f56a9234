//! Thin command line front end: `simulate` runs a Monte Carlo comparison and
//! writes a report; `test-one` runs the step-down procedures on a single
//! dataset and prints the stage trace. Progress goes to stderr, reports to
//! the chosen output.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use stepdown::baselines::p_values;
use stepdown::bsd::bsd_step_down;
use stepdown::error::{Error, Result};
use stepdown::estimators::{estimate_p, estimate_v, EstimatorConfig};
use stepdown::experiment::{
    emit_report, run_experiment, write_report, CovarianceSpec, ExperimentConfig, FamilyKind,
    Method, ReportFormat,
};
use stepdown::io::{read_critical_sequence, read_sym_matrix, read_vector};
use stepdown::linalg::to_correlation;
use stepdown::model::MixtureParams;
use stepdown::mrd::{mrd_step_down, CriticalSequence};
use stepdown::trace::StepTrace;

#[derive(Parser)]
#[command(
    name = "stepdown",
    about = "Step-down multiple testing for correlated normal means",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a replicated Monte Carlo comparison and write a metrics report.
    Simulate(SimulateArgs),
    /// Run the procedures on one dataset and print the stage trace.
    TestOne(TestOneArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// TOML config file; command line flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of hypotheses.
    #[arg(long)]
    m: Option<usize>,
    /// Covariance family: identity, intraclass, ar1, block, custom.
    #[arg(long)]
    cov: Option<String>,
    /// Correlation parameter for intraclass / ar1 / block.
    #[arg(long)]
    rho: Option<f64>,
    /// Block size for the block family.
    #[arg(long)]
    block_size: Option<usize>,
    /// Dense matrix file for the custom family.
    #[arg(long)]
    sigma_file: Option<PathBuf>,
    /// True signal proportion.
    #[arg(long)]
    p: Option<f64>,
    /// True slab variance.
    #[arg(long)]
    v: Option<f64>,
    /// Posterior odds threshold (default 1).
    #[arg(long)]
    delta: Option<f64>,
    /// Level for the p-value baselines and the MRD critical sequence.
    #[arg(long)]
    alpha: Option<f64>,
    /// Frequency parameter of the proportion estimator.
    #[arg(long)]
    gamma: Option<f64>,
    /// Comma-separated methods: bsd,mrd,bh,by,bonf,abh.
    #[arg(long)]
    methods: Option<String>,
    /// Plug estimated (p, V) into the procedures instead of the truth.
    #[arg(long)]
    estimate_params: bool,
    /// Number of Monte Carlo replicates.
    #[arg(long)]
    reps: Option<usize>,
    /// Experiment seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format: csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Keep per-replicate confusion counts in the JSON report.
    #[arg(long)]
    per_replicate: bool,
}

#[derive(Args)]
struct TestOneArgs {
    /// Data vector file (whitespace separated reals).
    #[arg(long)]
    x_file: PathBuf,
    /// Covariance matrix file; standardized to correlation, with x rescaled
    /// to match. Identity when omitted.
    #[arg(long)]
    sigma_file: Option<PathBuf>,
    /// Signal proportion (required unless --estimate-params).
    #[arg(long)]
    p: Option<f64>,
    /// Slab variance (required unless --estimate-params).
    #[arg(long)]
    v: Option<f64>,
    /// Posterior odds threshold.
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Level for the MRD critical sequence.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Frequency parameter of the proportion estimator.
    #[arg(long, default_value_t = 0.25)]
    gamma: f64,
    /// Estimate (p, V) from the data before testing.
    #[arg(long)]
    estimate_params: bool,
    /// Methods to run: any of bsd,mrd.
    #[arg(long, default_value = "bsd")]
    methods: String,
    /// Critical sequence file for MRD (defaults to normal quantile heights).
    #[arg(long)]
    critical_file: Option<PathBuf>,
}

/// TOML-facing mirror of [`ExperimentConfig`] with every field optional.
#[derive(Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialConfig {
    m: Option<usize>,
    cov: Option<PartialCov>,
    p: Option<f64>,
    v: Option<f64>,
    delta: Option<f64>,
    alpha: Option<f64>,
    gamma: Option<f64>,
    methods: Option<Vec<String>>,
    estimate_params: Option<bool>,
    replicates: Option<usize>,
    seed: Option<u64>,
    per_replicate: Option<bool>,
}

#[derive(Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct PartialCov {
    family: Option<String>,
    rho: Option<f64>,
    block_size: Option<usize>,
    sigma_file: Option<PathBuf>,
}

fn parse_methods(s: &str) -> Result<Vec<Method>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(Method::from_str)
        .collect()
}

fn build_config(args: &SimulateArgs) -> Result<ExperimentConfig> {
    let mut base = PartialConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        base = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: 0,
            msg: e.to_string(),
        })?;
    }
    let mut cov_base = base.cov.unwrap_or_default();
    if let Some(cov) = &args.cov {
        cov_base.family = Some(cov.clone());
    }
    if let Some(rho) = args.rho {
        cov_base.rho = Some(rho);
    }
    if let Some(bs) = args.block_size {
        cov_base.block_size = Some(bs);
    }
    if let Some(sf) = &args.sigma_file {
        cov_base.sigma_file = Some(sf.clone());
    }
    let family = match &cov_base.family {
        Some(name) => FamilyKind::from_str(name)?,
        None => FamilyKind::Identity,
    };
    let methods = match (&args.methods, &base.methods) {
        (Some(cli), _) => parse_methods(cli)?,
        (None, Some(file)) => file
            .iter()
            .map(|s| Method::from_str(s))
            .collect::<Result<_>>()?,
        (None, None) => stepdown::experiment::ALL_METHODS.to_vec(),
    };
    Ok(ExperimentConfig {
        m: args
            .m
            .or(base.m)
            .ok_or_else(|| Error::domain("m: required (flag --m or config)"))?,
        cov: CovarianceSpec {
            family,
            rho: cov_base.rho,
            block_size: cov_base.block_size,
            sigma_file: cov_base.sigma_file,
        },
        p: args
            .p
            .or(base.p)
            .ok_or_else(|| Error::domain("p: required (flag --p or config)"))?,
        v: args
            .v
            .or(base.v)
            .ok_or_else(|| Error::domain("v: required (flag --v or config)"))?,
        delta: args.delta.or(base.delta).unwrap_or(1.0),
        alpha: args.alpha.or(base.alpha).unwrap_or(0.05),
        gamma: args.gamma.or(base.gamma).unwrap_or(0.25),
        methods,
        estimate_params: args.estimate_params || base.estimate_params.unwrap_or(false),
        replicates: args.reps.or(base.replicates).unwrap_or(100),
        seed: args.seed.or(base.seed).unwrap_or(0),
        per_replicate: args.per_replicate || base.per_replicate.unwrap_or(false),
    })
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let cfg = build_config(args)?;
    let format = match &args.format {
        Some(f) => ReportFormat::from_str(f)?,
        None => ReportFormat::Csv,
    };
    let started = Instant::now();
    eprintln!(
        "running {} replicates of m = {} with methods [{}]",
        cfg.replicates,
        cfg.m,
        cfg.methods
            .iter()
            .map(Method::token)
            .collect::<Vec<_>>()
            .join(", ")
    );
    let report = run_experiment(&cfg)?;
    eprintln!("done in {:.2?}", started.elapsed());
    match &args.out {
        Some(path) => write_report(&report, format, path)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            emit_report(&report, format, &mut lock)?;
            lock.flush().map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })?;
        }
    }
    Ok(())
}

fn print_trace(label: &str, trace: &StepTrace, m: usize) {
    for s in &trace.stages {
        println!(
            "{label} stage {}: index {}, statistic {:.6}, threshold {:.6}, {}",
            s.stage,
            s.index + 1,
            s.statistic,
            s.threshold,
            if s.rejected {
                "reject"
            } else {
                "accept remaining"
            }
        );
    }
    let order: Vec<String> = trace
        .rejection_order()
        .iter()
        .map(|i| (i + 1).to_string())
        .collect();
    println!(
        "{label} stopped at stage {}; rejected {} of {m}: [{}]",
        trace.stop_stage,
        order.len(),
        order.join(", ")
    );
}

fn test_one(args: &TestOneArgs) -> Result<()> {
    let x_raw = read_vector(&args.x_file)?;
    let m = x_raw.len();
    let (sigma, x) = match &args.sigma_file {
        Some(path) => {
            let raw = read_sym_matrix(path)?;
            if raw.dim() != m {
                return Err(Error::domain(format!(
                    "sigma dimension {} does not match x length {m}",
                    raw.dim()
                )));
            }
            // standardize to correlation scale, rescaling x accordingly
            let corr = to_correlation(&raw)?;
            let x: Vec<f64> = x_raw
                .iter()
                .enumerate()
                .map(|(i, xi)| xi / raw.get(i, i).sqrt())
                .collect();
            (corr, x)
        }
        None => (stepdown::SymMatrix::identity(m), x_raw),
    };
    let methods = parse_methods(&args.methods)?;

    let (p, v) = if args.estimate_params {
        let cfg = EstimatorConfig::for_dim(m).with_gamma(args.gamma);
        let pe = estimate_p(&x, &cfg)?;
        let ve = estimate_v(&x, pe.clamped, &cfg)?;
        println!(
            "estimated p = {:.6} (raw {:.6}), V = {:.6} (raw {:.6})",
            pe.clamped, pe.raw, ve.clamped, ve.raw
        );
        (pe.clamped, ve.clamped)
    } else {
        match (args.p, args.v) {
            (Some(p), Some(v)) => (p, v),
            _ => {
                return Err(Error::domain(
                    "p/v: required unless --estimate-params is set",
                ))
            }
        }
    };

    for method in methods {
        match method {
            Method::Bsd => {
                let params = MixtureParams::new(p, v, args.delta)?;
                let (_, trace) = bsd_step_down(&x, &sigma, &params)?;
                print_trace("bsd", &trace, m);
            }
            Method::Mrd => {
                let critical = match &args.critical_file {
                    Some(path) => read_critical_sequence(path)?,
                    None => CriticalSequence::holm(m, args.alpha)?,
                };
                let (_, trace) = mrd_step_down(&x, &sigma, &critical)?;
                print_trace("mrd", &trace, m);
            }
            other => {
                return Err(Error::domain(format!(
                    "test-one runs bsd and mrd; {other} is a simulate-only method"
                )))
            }
        }
    }
    // marginal p-value summary helps eyeball the data scale
    let pv = p_values(&x);
    let min_pv = pv.iter().cloned().fold(f64::INFINITY, f64::min);
    println!("smallest two-sided marginal p-value: {min_pv:.3e}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(args) => simulate(args),
        Command::TestOne(args) => test_one(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
