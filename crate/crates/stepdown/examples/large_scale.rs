//! The matrix-free intraclass path at one hundred thousand hypotheses:
//! no matrix is ever built, so memory stays linear and a full run takes
//! milliseconds.
//!
//!     cargo run --release --example large_scale

use std::time::Instant;

use stepdown::bsd::bsd_step_down_intraclass;
use stepdown::covariance::CovarianceFamily;
use stepdown::model::{sample_dataset, MixtureParams};

fn main() -> stepdown::Result<()> {
    let m = 100_000;
    let rho = 0.3;
    let family = CovarianceFamily::Intraclass { dim: m, rho };
    let params = MixtureParams::with_unit_threshold(0.0005, 49.0)?;

    let started = Instant::now();
    let (truth, x) = sample_dataset(&family, &params, 1)?;
    println!(
        "sampled m = {m} with {} signals in {:.2?}",
        truth.n_signals(),
        started.elapsed()
    );

    let started = Instant::now();
    let (decisions, trace) = bsd_step_down_intraclass(&x, rho, &params)?;
    let elapsed = started.elapsed();

    let tp = (0..m)
        .filter(|&i| decisions.rejected(i) && truth.signal[i])
        .count();
    println!(
        "step-down finished in {elapsed:.2?}: {} stages, {} rejections ({tp} true)",
        trace.stages.len(),
        decisions.n_rejections()
    );
    for s in trace.stages.iter().take(5) {
        println!(
            "  stage {}: hypothesis {} at log odds {:+.1}",
            s.stage, s.index, s.statistic
        );
    }
    println!("  ...");
    Ok(())
}
