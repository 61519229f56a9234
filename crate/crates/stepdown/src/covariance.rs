//! Correlation matrix families used by the generative model and harness.
//!
//! Each family realizes a valid correlation matrix (unit diagonal, positive
//! definite). Structured families also know how to apply an exact square-root
//! factor to a standard normal vector in `O(m)` time and memory, so sampling
//! never has to materialize the matrix:
//!
//! * intraclass `(1-rho) I + rho J` has symmetric square root
//!   `beta I + ((alpha - beta)/m) J` with `alpha = sqrt(1+(m-1) rho)`,
//!   `beta = sqrt(1-rho)`;
//! * AR(1) is generated by the stationary recursion
//!   `e_1 = z_1`, `e_i = rho e_{i-1} + sqrt(1-rho^2) z_i`, which is exactly
//!   the action of its Cholesky factor;
//! * block dependence applies the intraclass root within each block.
//!
//! Custom matrices fall back to a dense Cholesky factor computed once.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{to_correlation, CholeskyFactor, SymMatrix};

/// A correlation structure for the joint distribution of the test statistics.
#[derive(Clone, Debug, PartialEq)]
pub enum CovarianceFamily {
    Identity {
        dim: usize,
    },
    /// Equal correlation `rho` between every pair.
    Intraclass {
        dim: usize,
        rho: f64,
    },
    /// Short-range dependence `sigma_jk = rho^{|j-k|}`.
    Ar1 {
        dim: usize,
        rho: f64,
    },
    /// Block-diagonal intraclass blocks of `block_size` (last block may be
    /// smaller when `block_size` does not divide `dim`).
    Block {
        dim: usize,
        block_size: usize,
        rho: f64,
    },
    /// User-supplied covariance; standardized to a correlation matrix.
    Custom {
        matrix: SymMatrix,
    },
}

impl CovarianceFamily {
    pub fn dim(&self) -> usize {
        match self {
            CovarianceFamily::Identity { dim }
            | CovarianceFamily::Intraclass { dim, .. }
            | CovarianceFamily::Ar1 { dim, .. }
            | CovarianceFamily::Block { dim, .. } => *dim,
            CovarianceFamily::Custom { matrix } => matrix.dim(),
        }
    }

    /// Checks family parameters against their positive definite ranges.
    pub fn validate(&self) -> Result<()> {
        match self {
            CovarianceFamily::Identity { dim } => {
                require_dim(*dim)?;
            }
            CovarianceFamily::Intraclass { dim, rho } => {
                require_dim(*dim)?;
                check_intraclass_rho(*dim, *rho)?;
            }
            CovarianceFamily::Ar1 { dim, rho } => {
                require_dim(*dim)?;
                if rho.abs() >= 1.0 {
                    return Err(Error::domain(format!(
                        "ar1 correlation {rho} must satisfy |rho| < 1"
                    )));
                }
            }
            CovarianceFamily::Block {
                dim,
                block_size,
                rho,
            } => {
                require_dim(*dim)?;
                if *block_size == 0 {
                    return Err(Error::domain("block size must be at least 1"));
                }
                let k = (*block_size).min(*dim);
                check_intraclass_rho(k, *rho)?;
            }
            CovarianceFamily::Custom { .. } => {}
        }
        Ok(())
    }

    /// Realizes the correlation matrix.
    pub fn build(&self) -> Result<SymMatrix> {
        self.validate()?;
        let m = self.dim();
        let out = match self {
            CovarianceFamily::Identity { .. } => SymMatrix::identity(m),
            CovarianceFamily::Intraclass { rho, .. } => {
                let mut data = vec![*rho; m * m];
                for i in 0..m {
                    data[i * m + i] = 1.0;
                }
                SymMatrix::new(m, data)?
            }
            CovarianceFamily::Ar1 { rho, .. } => {
                let mut data = vec![0.0; m * m];
                for i in 0..m {
                    for j in 0..m {
                        data[i * m + j] = rho.powi((i as i32 - j as i32).abs());
                    }
                }
                SymMatrix::new(m, data)?
            }
            CovarianceFamily::Block {
                block_size, rho, ..
            } => {
                let mut data = vec![0.0; m * m];
                for start in (0..m).step_by(*block_size) {
                    let end = (start + block_size).min(m);
                    for i in start..end {
                        for j in start..end {
                            data[i * m + j] = if i == j { 1.0 } else { *rho };
                        }
                    }
                }
                SymMatrix::new(m, data)?
            }
            CovarianceFamily::Custom { matrix } => {
                let corr = to_correlation(matrix)?;
                // surface indefiniteness as a domain error at build time
                corr.cholesky()
                    .map_err(|e| Error::domain(format!("custom matrix: {e}")))?;
                corr
            }
        };
        Ok(out)
    }

    /// Precomputes whatever the square-root factor needs.
    pub(crate) fn factor(&self) -> Result<FamilyFactor> {
        self.validate()?;
        Ok(match self {
            CovarianceFamily::Identity { .. } => FamilyFactor::Identity,
            CovarianceFamily::Intraclass { dim, rho } => FamilyFactor::Intraclass {
                alpha: (1.0 + (*dim as f64 - 1.0) * rho).sqrt(),
                beta: (1.0 - rho).sqrt(),
            },
            CovarianceFamily::Ar1 { rho, .. } => FamilyFactor::Ar1 { rho: *rho },
            CovarianceFamily::Block {
                block_size, rho, ..
            } => FamilyFactor::Block {
                block_size: *block_size,
                rho: *rho,
            },
            CovarianceFamily::Custom { .. } => FamilyFactor::Dense(self.build()?.cholesky()?),
        })
    }

    /// True for families the step-down drivers can run without storing a
    /// matrix (identity is intraclass with `rho = 0`).
    pub fn intraclass_rho(&self) -> Option<f64> {
        match self {
            CovarianceFamily::Identity { .. } => Some(0.0),
            CovarianceFamily::Intraclass { rho, .. } => Some(*rho),
            _ => None,
        }
    }

    /// Distinct off-diagonal correlation values with their ordered-pair
    /// counts; used by the weak-dependence diagnostics.
    pub fn offdiagonal_pair_counts(&self) -> Result<Vec<(f64, u64)>> {
        self.validate()?;
        let m = self.dim() as u64;
        Ok(match self {
            CovarianceFamily::Identity { .. } => vec![],
            CovarianceFamily::Intraclass { rho, .. } => {
                vec![(*rho, m * (m - 1))]
            }
            CovarianceFamily::Ar1 { dim, rho } => (1..*dim)
                .map(|d| (rho.powi(d as i32), 2 * (m - d as u64)))
                .collect(),
            CovarianceFamily::Block {
                dim,
                block_size,
                rho,
            } => {
                let mut pairs = 0u64;
                for start in (0..*dim).step_by(*block_size) {
                    let k = (start + block_size).min(*dim) as u64 - start as u64;
                    pairs += k * (k - 1);
                }
                vec![(*rho, pairs)]
            }
            CovarianceFamily::Custom { matrix } => {
                let corr = to_correlation(matrix)?;
                let mut out = Vec::new();
                for i in 0..matrix.dim() {
                    for j in 0..matrix.dim() {
                        if i != j {
                            out.push((corr.get(i, j), 1));
                        }
                    }
                }
                out
            }
        })
    }
}

fn require_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    Ok(())
}

fn check_intraclass_rho(k: usize, rho: f64) -> Result<()> {
    if k <= 1 {
        return Ok(());
    }
    let lo = -1.0 / (k as f64 - 1.0);
    if rho <= lo || rho >= 1.0 {
        return Err(Error::domain(format!(
            "intraclass correlation {rho} outside positive definite range ({lo}, 1) for dimension {k}"
        )));
    }
    Ok(())
}

/// Builds the correlation matrix for a covariance family.
pub fn build_covariance(family: &CovarianceFamily) -> Result<SymMatrix> {
    family.build()
}

/// Exact square-root factor of a family, applied to standard normal draws.
#[derive(Clone, Debug)]
pub(crate) enum FamilyFactor {
    Identity,
    Intraclass { alpha: f64, beta: f64 },
    Ar1 { rho: f64 },
    Block { block_size: usize, rho: f64 },
    Dense(CholeskyFactor),
}

impl FamilyFactor {
    /// Draws `out.len()` correlated N(0, Sigma) values into `out`,
    /// consuming exactly `out.len()` standard normals from `rng`.
    pub(crate) fn sample_into<R: Rng>(&self, rng: &mut R, out: &mut [f64]) {
        let m = out.len();
        for slot in out.iter_mut() {
            *slot = rng.sample(StandardNormal);
        }
        match self {
            FamilyFactor::Identity => {}
            FamilyFactor::Intraclass { alpha, beta } => {
                apply_intraclass_root(out, *alpha, *beta);
            }
            FamilyFactor::Ar1 { rho } => {
                let scale = (1.0 - rho * rho).sqrt();
                for i in 1..m {
                    out[i] = rho * out[i - 1] + scale * out[i];
                }
            }
            FamilyFactor::Block { block_size, rho } => {
                for chunk in out.chunks_mut(*block_size) {
                    let k = chunk.len();
                    let alpha = (1.0 + (k as f64 - 1.0) * rho).sqrt();
                    let beta = (1.0 - rho).sqrt();
                    apply_intraclass_root(chunk, alpha, beta);
                }
            }
            FamilyFactor::Dense(chol) => {
                let x = chol.apply(out);
                out.copy_from_slice(&x);
            }
        }
    }
}

fn apply_intraclass_root(z: &mut [f64], alpha: f64, beta: f64) {
    let m = z.len() as f64;
    let mean = z.iter().sum::<f64>() / m;
    let shift = (alpha - beta) * mean;
    for v in z.iter_mut() {
        *v = beta * *v + shift;
    }
}
