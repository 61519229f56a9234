//! Tour of the built-in correlation structures and the dense text format.
//!
//!     cargo run --example covariance_families

use stepdown::covariance::{build_covariance, CovarianceFamily};
use stepdown::io::{format_sym_matrix, parse_sym_matrix};
use stepdown::linalg::{to_correlation, SymMatrix};

fn show(name: &str, family: &CovarianceFamily) -> stepdown::Result<()> {
    let m = build_covariance(family)?;
    println!("{name}:");
    for i in 0..m.dim() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:5.2}")).collect();
        println!("  [{}]", row.join(" "));
    }
    Ok(())
}

fn main() -> stepdown::Result<()> {
    show("identity", &CovarianceFamily::Identity { dim: 4 })?;
    show(
        "intraclass rho = 0.5",
        &CovarianceFamily::Intraclass { dim: 4, rho: 0.5 },
    )?;
    show("ar1 rho = 0.6", &CovarianceFamily::Ar1 { dim: 5, rho: 0.6 })?;
    show(
        "blocks of 2, rho = 0.8",
        &CovarianceFamily::Block {
            dim: 5,
            block_size: 2,
            rho: 0.8,
        },
    )?;

    // a covariance matrix standardizes to correlation scale
    let cov = SymMatrix::new(2, vec![4.0, 3.0, 3.0, 9.0])?;
    let corr = to_correlation(&cov)?;
    println!(
        "covariance [[4, 3], [3, 9]] standardizes to off-diagonal {}",
        corr.get(0, 1)
    );

    // the dense text format round-trips
    let text = format_sym_matrix(&corr);
    println!("\nserialized:\n{text}");
    let back = parse_sym_matrix(&text, std::path::Path::new("<demo>"))?;
    assert_eq!(back, corr);
    println!("parsed back identically");

    // out-of-range parameters are rejected up front
    let bad = CovarianceFamily::Intraclass { dim: 4, rho: -0.5 };
    println!(
        "\nintraclass rho = -0.5 at m = 4: {}",
        build_covariance(&bad).unwrap_err()
    );
    Ok(())
}
