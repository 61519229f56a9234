//! Empirical Bayes plug-in: estimate the signal proportion and slab variance
//! from the data, feed them to the step-down procedure, and compare against
//! the oracle that knows the true values.
//!
//!     cargo run --example empirical_bayes

use stepdown::bsd::bsd_step_down_family;
use stepdown::covariance::CovarianceFamily;
use stepdown::estimators::{estimate_p, estimate_v, EstimatorConfig};
use stepdown::metrics::score_replicate;
use stepdown::model::{sample_dataset, MixtureParams};

fn main() -> stepdown::Result<()> {
    // the proportion estimator needs m large relative to 1/p^4 to settle
    // down, and independence keeps its weak-dependence condition trivially
    // satisfied; identity also lets the step-down run matrix-free
    let m = 10_000;
    let p = 0.1;
    let v = 25.0;
    let family = CovarianceFamily::Identity { dim: m };
    let truth_params = MixtureParams::with_unit_threshold(p, v)?;
    let (truth, x) = sample_dataset(&family, &truth_params, 314)?;
    println!(
        "m = {m}, true p = {p}, true V = {v}, {} signals\n",
        truth.n_signals()
    );

    let cfg = EstimatorConfig::for_dim(m);
    let pe = estimate_p(&x, &cfg)?;
    let ve = estimate_v(&x, pe.clamped, &cfg)?;
    println!("estimated p: raw {:+.4}, clamped {:.4}", pe.raw, pe.clamped);
    println!(
        "estimated V: raw {:+.2}, clamped {:.2}\n",
        ve.raw, ve.clamped
    );

    let plugin_params = MixtureParams::with_unit_threshold(pe.clamped, ve.clamped)?;
    for (label, params) in [("oracle", truth_params), ("plug-in", plugin_params)] {
        let (decisions, trace) = bsd_step_down_family(&x, &family, &params)?;
        let c = score_replicate(&decisions, &truth)?;
        println!(
            "{label:>8}: {} rejections in {} stages; tp {}, fp {}, fn {}, misclassification {:.4}",
            decisions.n_rejections(),
            trace.stages.len(),
            c.true_pos,
            c.false_pos,
            c.false_neg,
            c.misclassification()
        );
    }
    Ok(())
}
