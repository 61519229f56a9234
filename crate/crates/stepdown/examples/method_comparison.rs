//! Replicated Monte Carlo comparison of all the procedures on one scenario,
//! printed as the standard CSV report.
//!
//!     cargo run --example method_comparison

use stepdown::experiment::{
    emit_report, run_experiment, CovarianceSpec, ExperimentConfig, FamilyKind, Method, MetricKind,
    ReportFormat,
};

fn main() -> stepdown::Result<()> {
    let cfg = ExperimentConfig {
        m: 100,
        cov: CovarianceSpec {
            family: FamilyKind::Intraclass,
            rho: Some(0.5),
            block_size: None,
            sigma_file: None,
        },
        p: 0.1,
        v: 16.0,
        delta: 1.0,
        alpha: 0.05,
        gamma: 0.25,
        methods: vec![
            Method::Bsd,
            Method::Mrd,
            Method::Bh,
            Method::By,
            Method::Bonf,
            Method::Abh,
        ],
        estimate_params: false,
        replicates: 400,
        seed: 99,
        per_replicate: false,
    };
    let report = run_experiment(&cfg)?;

    println!("misclassification / fdr / power by method:");
    for method in &cfg.methods {
        let mis = report.get(*method, MetricKind::Misclassification).unwrap();
        let fdr = report.get(*method, MetricKind::Fdr).unwrap();
        let pow = report.get(*method, MetricKind::Power).unwrap();
        println!(
            "  {:>5}: {:.4} (se {:.4}) / {:.4} / {:.4}",
            method.token(),
            mis.estimate,
            mis.std_error,
            fdr.estimate,
            pow.estimate
        );
    }

    println!("\nfull CSV report:");
    let mut stdout = std::io::stdout();
    emit_report(&report, ReportFormat::Csv, &mut stdout)?;
    Ok(())
}
