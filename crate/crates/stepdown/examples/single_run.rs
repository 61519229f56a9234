//! Run the Bayesian step-down procedure on one simulated dataset and walk
//! through the stage trace.
//!
//!     cargo run --example single_run

use stepdown::bsd::bsd_step_down;
use stepdown::covariance::{build_covariance, CovarianceFamily};
use stepdown::model::{sample_dataset, MixtureParams};

fn main() -> stepdown::Result<()> {
    let m = 12;
    let family = CovarianceFamily::Ar1 { dim: m, rho: 0.5 };
    let params = MixtureParams::with_unit_threshold(0.25, 16.0)?;

    let (truth, x) = sample_dataset(&family, &params, 42)?;
    println!("true signals at: {:?}", indices(&truth.signal));
    println!("data: {:?}\n", rounded(&x));

    let sigma = build_covariance(&family)?;
    let (decisions, trace) = bsd_step_down(&x, &sigma, &params)?;

    for s in &trace.stages {
        println!(
            "stage {}: hypothesis {} has log posterior odds {:+.3} vs log delta = {:.1} -> {}",
            s.stage,
            s.index,
            s.statistic,
            s.threshold,
            if s.rejected {
                "reject"
            } else {
                "accept all survivors"
            }
        );
    }
    println!(
        "\nstopped at stage {}; rejected {:?}",
        trace.stop_stage,
        indices(decisions.as_slice())
    );
    let missed: Vec<usize> = (0..m)
        .filter(|&i| truth.signal[i] && !decisions.rejected(i))
        .collect();
    let false_hits: Vec<usize> = (0..m)
        .filter(|&i| !truth.signal[i] && decisions.rejected(i))
        .collect();
    println!("missed signals: {missed:?}, false rejections: {false_hits:?}");
    Ok(())
}

fn indices(flags: &[bool]) -> Vec<usize> {
    flags
        .iter()
        .enumerate()
        .filter_map(|(i, &f)| f.then_some(i))
        .collect()
}

fn rounded(x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| (v * 100.0).round() / 100.0).collect()
}
