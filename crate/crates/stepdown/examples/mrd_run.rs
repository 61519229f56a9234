//! The maximum-residual step-down procedure: default normal-quantile
//! critical constants, a custom sequence, and the residuals themselves.
//!
//!     cargo run --example mrd_run

use stepdown::bsd::ActiveSet;
use stepdown::covariance::{build_covariance, CovarianceFamily};
use stepdown::model::{sample_dataset, MixtureParams};
use stepdown::mrd::{mrd_residual, mrd_step_down, CriticalSequence};

fn main() -> stepdown::Result<()> {
    let m = 8;
    let family = CovarianceFamily::Intraclass { dim: m, rho: 0.4 };
    let params = MixtureParams::with_unit_threshold(0.3, 25.0)?;
    let (truth, x) = sample_dataset(&family, &params, 7)?;
    let sigma = build_covariance(&family)?;

    // residuals at stage 1: each coordinate regressed on all the others
    let active = ActiveSet::new(&sigma)?;
    println!("stage-1 residuals (true signals marked *):");
    for j in 0..m {
        let (u, cond) = mrd_residual(&active, j, &x)?;
        println!(
            "  {j}{} u = {u:+.3}, conditional variance {cond:.3}",
            if truth.signal[j] { "*" } else { " " }
        );
    }

    let critical = CriticalSequence::holm(m, 0.05)?;
    println!(
        "\ndefault critical constants: {:?}",
        rounded(critical.values())
    );
    let (decisions, trace) = mrd_step_down(&x, &sigma, &critical)?;
    for s in &trace.stages {
        println!(
            "stage {}: |U| = {:.3} vs C = {:.3} at hypothesis {} -> {}",
            s.stage,
            s.statistic,
            s.threshold,
            s.index,
            if s.rejected { "reject" } else { "stop" }
        );
    }
    println!("rejections: {}", decisions.n_rejections());

    // a flat, very strict sequence accepts everything
    let strict = CriticalSequence::new(vec![8.0; m])?;
    let (decisions, _) = mrd_step_down(&x, &sigma, &strict)?;
    println!(
        "with C_t = 8 for all t: {} rejections",
        decisions.n_rejections()
    );
    Ok(())
}

fn rounded(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| (v * 1000.0).round() / 1000.0).collect()
}
