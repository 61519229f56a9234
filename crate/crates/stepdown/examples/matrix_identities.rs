//! The rank-one inverse identities that make the step-down procedures cheap:
//! update, determinant ratio, single-column extraction, downdate, and the
//! inversion-free intraclass closed form.
//!
//!     cargo run --example matrix_identities

use stepdown::covariance::{build_covariance, CovarianceFamily};
use stepdown::linalg::{
    block_inverse_entries, determinant_ratio, intraclass_inverse_entries, inverse_downdate,
    rank_one_inverse_update, SymMatrix,
};

fn max_abs_diff(a: &SymMatrix, b: &SymMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            worst = worst.max((a.get(i, j) - b.get(i, j)).abs());
        }
    }
    worst
}

fn main() -> stepdown::Result<()> {
    let family = CovarianceFamily::Ar1 { dim: 6, rho: 0.7 };
    let sigma = build_covariance(&family)?;
    let inv = sigma.inverse()?;

    // (sigma + v e_2 e_2')^{-1} without a second factorization
    let v = 9.0;
    let updated = rank_one_inverse_update(&inv, 2, v)?;
    let mut perturbed = sigma.clone();
    let rows: Vec<Vec<f64>> = (0..6)
        .map(|i| {
            (0..6)
                .map(|j| perturbed.get(i, j) + if i == j && i == 2 { v } else { 0.0 })
                .collect()
        })
        .collect();
    perturbed = SymMatrix::from_rows(&rows)?;
    let direct = perturbed.inverse()?;
    println!(
        "rank-one update vs direct inversion: max abs gap {:.2e}",
        max_abs_diff(&updated, &direct)
    );

    // the same perturbation's determinant ratio is a single inverse entry
    let ratio = determinant_ratio(&inv, 2, v);
    let direct_ratio = (perturbed.log_determinant()? - sigma.log_determinant()?).exp();
    println!(
        "determinant ratio {ratio:.6} vs direct {direct_ratio:.6} (gap {:.2e})",
        (ratio - direct_ratio).abs()
    );

    // one column of the inverse from the reduced problem
    let col = block_inverse_entries(&sigma, 3)?;
    let gap: f64 = (0..6)
        .map(|r| (col.column[r] - inv.get(r, 3)).abs())
        .fold(0.0, f64::max);
    println!("extracted inverse column 3: max abs gap {gap:.2e}");

    // removing a coordinate downdates the inverse in O(n^2)
    let down = inverse_downdate(&inv, 0)?;
    let keep: Vec<usize> = (1..6).collect();
    let direct_sub = sigma.submatrix(&keep).inverse()?;
    println!(
        "inverse downdate vs direct subinverse: max abs gap {:.2e}",
        max_abs_diff(&down, &direct_sub)
    );

    // intraclass matrices need no factorization at all
    let (diag, off) = intraclass_inverse_entries(100_000, 0.3)?;
    println!(
        "intraclass inverse entries at k = 100000, rho = 0.3: diag {diag:.6}, offdiag {off:.3e}"
    );
    Ok(())
}
