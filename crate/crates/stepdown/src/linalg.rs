//! Dense symmetric linear algebra kernels.
//!
//! Everything here is built around one theme: once the inverse of a symmetric
//! positive definite matrix is known, the inverses, determinants and Schur
//! complements of its rank-one perturbations and principal submatrices are
//! cheap algebraic updates rather than fresh factorizations.
//!
//! * [`rank_one_inverse_update`]: `(A + v e_i e_i')^{-1}` from `A^{-1}` in `O(n^2)`.
//! * [`determinant_ratio`]: `|A + v e_i e_i'| / |A| = 1 + v a^{-1}_{ii}`.
//! * [`block_inverse_entries`]: one column of `A^{-1}` from the inverse of the
//!   matrix with row/column `i` removed.
//! * [`inverse_downdate`]: the inverse of a principal submatrix from the full
//!   inverse in `O(n^2)`.
//! * [`intraclass_inverse_entries`]: closed-form inverse entries of
//!   `(1-rho) I + rho J`, no factorization at all.
//!
//! All indices are 0-based. Factorizations use Cholesky; a pivot below
//! `1e-12 * max(diag)` rejects the input as not positive definite.

use crate::error::{Error, Result};

/// Absolute tolerance for accepting a matrix as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Relative pivot tolerance: a Cholesky pivot below `PIVOT_RTOL * max(diag)`
/// marks the matrix as not positive definite.
pub const PIVOT_RTOL: f64 = 1e-12;

/// Dense symmetric matrix, full row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds a matrix from row-major entries, checking shape and symmetry
    /// (entries must match across the diagonal within [`SYMMETRY_TOL`]).
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("matrix dimension must be at least 1"));
        }
        if data.len() != dim * dim {
            return Err(Error::domain(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        for i in 0..dim {
            for j in 0..i {
                let a = data[i * dim + j];
                let b = data[j * dim + i];
                if (a - b).abs() > SYMMETRY_TOL {
                    return Err(Error::domain(format!(
                        "matrix is not symmetric: entry ({i},{j})={a} vs ({j},{i})={b}"
                    )));
                }
            }
        }
        Ok(SymMatrix { dim, data })
    }

    /// Builds from whole rows; each row must have length `dim`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::domain(format!(
                    "row length {} does not match dimension {dim}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        SymMatrix::new(dim, data)
    }

    /// Internal constructor for matrices that are symmetric by construction.
    pub(crate) fn from_raw(dim: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        SymMatrix { dim, data }
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        SymMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn max_diagonal(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.get(i, i))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// True when every diagonal entry equals 1 within `tol`.
    pub fn has_unit_diagonal(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (self.get(i, i) - 1.0).abs() <= tol)
    }

    /// The principal submatrix on the given (strictly increasing) indices.
    pub fn submatrix(&self, keep: &[usize]) -> SymMatrix {
        let k = keep.len();
        let mut data = Vec::with_capacity(k * k);
        for &i in keep {
            let row = self.row(i);
            for &j in keep {
                data.push(row[j]);
            }
        }
        SymMatrix { dim: k, data }
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim).map(|i| dot(self.row(i), x)).collect()
    }

    /// Cholesky factorization `A = L L'`. Fails with a numeric error when a
    /// pivot falls below [`PIVOT_RTOL`] times the largest diagonal entry.
    pub fn cholesky(&self) -> Result<CholeskyFactor> {
        let n = self.dim;
        let tol = PIVOT_RTOL * self.max_diagonal().max(f64::MIN_POSITIVE);
        let mut lower = vec![0.0; n * n];
        for i in 0..n {
            let (head, tail) = lower.split_at_mut(i * n);
            let row_i = &mut tail[..n];
            for j in 0..=i {
                let s = if j == 0 {
                    0.0
                } else if j == i {
                    dot(&row_i[..j], &row_i[..j])
                } else {
                    dot(&row_i[..j], &head[j * n..j * n + j])
                };
                let a = self.data[i * n + j];
                if i == j {
                    let pivot = a - s;
                    if pivot <= tol {
                        return Err(Error::numeric(format!(
                            "matrix is not positive definite: pivot {pivot:.3e} at index {i}"
                        )));
                    }
                    row_i[j] = pivot.sqrt();
                } else {
                    row_i[j] = (a - s) / head[j * n + j];
                }
            }
        }
        Ok(CholeskyFactor { dim: n, lower })
    }

    /// Inverse via Cholesky.
    pub fn inverse(&self) -> Result<SymMatrix> {
        Ok(self.cholesky()?.inverse())
    }

    pub fn log_determinant(&self) -> Result<f64> {
        Ok(self.cholesky()?.log_determinant())
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lower-triangular Cholesky factor of a positive definite matrix.
#[derive(Clone, Debug)]
pub struct CholeskyFactor {
    dim: usize,
    lower: Vec<f64>,
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.lower[i * self.dim + j]
    }

    /// `log |A| = 2 sum_i log L_ii`.
    pub fn log_determinant(&self) -> f64 {
        let n = self.dim;
        2.0 * (0..n).map(|i| self.lower[i * n + i].ln()).sum::<f64>()
    }

    /// Solves `L y = b` in place.
    pub fn solve_lower_in_place(&self, b: &mut [f64]) {
        let n = self.dim;
        for i in 0..n {
            let s = dot(&self.lower[i * n..i * n + i], &b[..i]);
            b[i] = (b[i] - s) / self.lower[i * n + i];
        }
    }

    /// Solves `A x = b` through the two triangular systems.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut y = b.to_vec();
        self.solve_lower_in_place(&mut y);
        // back substitution with L'
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.lower[k * n + i] * y[k];
            }
            y[i] = s / self.lower[i * n + i];
        }
        y
    }

    /// Applies the factor: `L z`.
    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|i| dot(&self.lower[i * n..i * n + i + 1], &z[..i + 1]))
            .collect()
    }

    /// `A^{-1}` from the factor.
    ///
    /// Computes `W = L^{-1}` row by row (contiguous axpy updates), then
    /// accumulates `A^{-1} = W' W` over rank-one row contributions, so both
    /// passes stream over contiguous memory.
    pub fn inverse(&self) -> SymMatrix {
        let n = self.dim;
        let l = &self.lower;
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            let (head, tail) = w.split_at_mut(i * n);
            let row_i = &mut tail[..n];
            for k in 0..i {
                let lik = l[i * n + k];
                if lik != 0.0 {
                    let row_k = &head[k * n..k * n + k + 1];
                    for (a, &b) in row_i[..k + 1].iter_mut().zip(row_k) {
                        *a -= lik * b;
                    }
                }
            }
            let dinv = 1.0 / l[i * n + i];
            for a in row_i[..i].iter_mut() {
                *a *= dinv;
            }
            row_i[i] = dinv;
        }
        let mut out = vec![0.0; n * n];
        for k in 0..n {
            let row_k = &w[k * n..k * n + k + 1];
            for i in 0..=k {
                let wki = row_k[i];
                if wki != 0.0 {
                    let out_row = &mut out[i * n..i * n + i + 1];
                    for (a, &b) in out_row.iter_mut().zip(&row_k[..i + 1]) {
                        *a += wki * b;
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                out[j * n + i] = out[i * n + j];
            }
        }
        SymMatrix::from_raw(n, out)
    }
}

/// One column of a symmetric inverse, as produced by [`block_inverse_entries`].
#[derive(Clone, Debug, PartialEq)]
pub struct InverseColumn {
    /// Column index the entries belong to.
    pub index: usize,
    /// Full column of the inverse, length equal to the matrix dimension.
    pub column: Vec<f64>,
}

impl InverseColumn {
    /// The diagonal entry `b_ii`; positive for positive definite input.
    pub fn diagonal(&self) -> f64 {
        self.column[self.index]
    }
}

/// Rescales a positive definite matrix to unit diagonal:
/// `D^{-1/2} S D^{-1/2}` with `D = diag(S)`.
pub fn to_correlation(s: &SymMatrix) -> Result<SymMatrix> {
    let n = s.dim();
    let mut scale = Vec::with_capacity(n);
    for i in 0..n {
        let d = s.get(i, i);
        if d <= 0.0 {
            return Err(Error::domain(format!(
                "diagonal entry {i} is {d}; must be positive to standardize"
            )));
        }
        scale.push(1.0 / d.sqrt());
    }
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        let row = s.row(i);
        for j in 0..n {
            out[i * n + j] = row[j] * scale[i] * scale[j];
        }
        out[i * n + i] = 1.0;
    }
    Ok(SymMatrix::from_raw(n, out))
}

/// Sherman-Morrison step: given `Binv = (A)^{-1}` for symmetric positive
/// definite `A`, returns `(A + v e_i e_i')^{-1} = Binv - (v / (1 + v b_ii)) b_i b_i'`
/// where `b_i` is column `i` of `Binv`.
pub fn rank_one_inverse_update(binv: &SymMatrix, i: usize, v: f64) -> Result<SymMatrix> {
    let n = binv.dim();
    assert!(i < n, "index {i} out of bounds for dimension {n}");
    let bii = binv.get(i, i);
    let den = 1.0 + v * bii;
    if den <= 0.0 {
        return Err(Error::numeric(format!(
            "rank-one update denominator 1 + v*b_ii = {den} is not positive"
        )));
    }
    let coef = v / den;
    let col = binv.row(i); // symmetric: row i == column i
    let mut out = Vec::with_capacity(n * n);
    for r in 0..n {
        let cr = coef * col[r];
        let row = binv.row(r);
        out.extend(row.iter().zip(col).map(|(&b, &c)| b - cr * c));
    }
    Ok(SymMatrix::from_raw(n, out))
}

/// Determinant ratio of the same rank-one perturbation:
/// `|A + v e_i e_i'| / |A| = 1 + v b_ii` with `b_ii` the diagonal entry of `A^{-1}`.
pub fn determinant_ratio(binv: &SymMatrix, i: usize, v: f64) -> f64 {
    assert!(i < binv.dim(), "index out of bounds");
    1.0 + v * binv.get(i, i)
}

/// Column `i` of `M^{-1}` computed from the inverse of the reduced matrix:
/// `b_ii = [m_ii - s' M_(-i,-i)^{-1} s]^{-1}` (the reciprocal Schur complement)
/// and off-diagonal part `-b_ii M_(-i,-i)^{-1} s`, where `s` is column `i` of
/// `M` with entry `i` deleted.
pub fn block_inverse_entries(m: &SymMatrix, i: usize) -> Result<InverseColumn> {
    let n = m.dim();
    assert!(i < n, "index {i} out of bounds for dimension {n}");
    if n == 1 {
        let d = m.get(0, 0);
        if d <= 0.0 {
            return Err(Error::numeric("1x1 matrix is not positive definite"));
        }
        return Ok(InverseColumn {
            index: 0,
            column: vec![1.0 / d],
        });
    }
    let keep: Vec<usize> = (0..n).filter(|&k| k != i).collect();
    let sub = m.submatrix(&keep);
    let sigma: Vec<f64> = keep.iter().map(|&k| m.get(k, i)).collect();
    let solved = sub.cholesky()?.solve(&sigma);
    let schur = m.get(i, i) - dot(&sigma, &solved);
    if schur <= 0.0 {
        return Err(Error::numeric(format!(
            "Schur complement {schur:.3e} is not positive; input is not positive definite"
        )));
    }
    let bii = 1.0 / schur;
    let mut column = vec![0.0; n];
    column[i] = bii;
    for (t, &k) in keep.iter().enumerate() {
        column[k] = -bii * solved[t];
    }
    Ok(InverseColumn { index: i, column })
}

/// Given `Ainv = A^{-1}`, returns the inverse of `A` with row and column `k`
/// removed: `Ainv_(-k,-k) - c c' / d` where `c` is column `k` of `Ainv` with
/// entry `k` deleted and `d = Ainv[k,k]`. Costs `O(n^2)`.
pub fn inverse_downdate(ainv: &SymMatrix, k: usize) -> Result<SymMatrix> {
    let n = ainv.dim();
    assert!(k < n, "index {k} out of bounds for dimension {n}");
    if n < 2 {
        return Err(Error::domain(
            "cannot downdate a 1x1 inverse to dimension zero",
        ));
    }
    let d = ainv.get(k, k);
    if d <= 0.0 {
        return Err(Error::numeric(format!(
            "downdate pivot Ainv[{k},{k}] = {d} is not positive"
        )));
    }
    let col_k = ainv.row(k);
    let m = n - 1;
    let mut out = Vec::with_capacity(m * m);
    for r in 0..n {
        if r == k {
            continue;
        }
        let row = ainv.row(r);
        let cr = col_k[r] / d;
        out.extend(row[..k].iter().zip(&col_k[..k]).map(|(&a, &c)| a - cr * c));
        out.extend(
            row[k + 1..]
                .iter()
                .zip(&col_k[k + 1..])
                .map(|(&a, &c)| a - cr * c),
        );
    }
    Ok(SymMatrix::from_raw(m, out))
}

/// Closed-form inverse entries of the intraclass matrix `(1-rho) I + rho J`
/// of dimension `k`: returns `(diag, offdiag)` such that assembling them into
/// a `k x k` matrix yields the exact inverse. Requires `-1/(k-1) < rho < 1`.
pub fn intraclass_inverse_entries(k: usize, rho: f64) -> Result<(f64, f64)> {
    if k == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    if k == 1 {
        return Ok((1.0, 0.0));
    }
    let lo = -1.0 / (k as f64 - 1.0);
    if rho <= lo || rho >= 1.0 {
        return Err(Error::domain(format!(
            "intraclass correlation {rho} outside positive definite range ({lo}, 1) for dimension {k}"
        )));
    }
    let denom = (1.0 - rho) * (1.0 + (k as f64 - 1.0) * rho);
    let diag = (1.0 + (k as f64 - 2.0) * rho) / denom;
    let off = -rho / denom;
    Ok((diag, off))
}

/// Log density of `N(0, cov)` at `x`.
pub fn log_mvn_density(x: &[f64], cov: &SymMatrix) -> Result<f64> {
    let n = cov.dim();
    assert_eq!(x.len(), n, "vector length does not match dimension");
    let chol = cov.cholesky()?;
    let mut y = x.to_vec();
    chol.solve_lower_in_place(&mut y);
    let quad = dot(&y, &y);
    let ln_2pi = (2.0 * std::f64::consts::PI).ln();
    Ok(-0.5 * (quad + chol.log_determinant() + n as f64 * ln_2pi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replicate_rng;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand_distr::StandardNormal;

    /// Gauss-Jordan inverse with partial pivoting; deliberately a different
    /// algorithm from the Cholesky production path.
    pub(crate) fn gauss_jordan_inverse(m: &SymMatrix) -> SymMatrix {
        let n = m.dim();
        let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
        let mut inv: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
                .unwrap();
            a.swap(col, pivot_row);
            inv.swap(col, pivot_row);
            let pivot = a[col][col];
            for j in 0..n {
                a[col][j] /= pivot;
                inv[col][j] /= pivot;
            }
            for r in 0..n {
                if r != col {
                    let f = a[r][col];
                    for j in 0..n {
                        a[r][j] -= f * a[col][j];
                        inv[r][j] -= f * inv[col][j];
                    }
                }
            }
        }
        let mut data = Vec::with_capacity(n * n);
        for row in &inv {
            data.extend_from_slice(row);
        }
        SymMatrix::from_raw(n, data)
    }

    /// Determinant by cofactor expansion; exponential, fine for n <= 8.
    pub(crate) fn cofactor_det(rows: &[Vec<f64>]) -> f64 {
        let n = rows.len();
        if n == 1 {
            return rows[0][0];
        }
        let mut det = 0.0;
        for j in 0..n {
            let minor: Vec<Vec<f64>> = rows[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, &v)| v)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            det += sign * rows[0][j] * cofactor_det(&minor);
        }
        det
    }

    pub(crate) fn random_spd(dim: usize, seed: u64) -> SymMatrix {
        let mut rng = replicate_rng(seed, 0);
        let g: Vec<f64> = (0..dim * dim)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let mut s = 0.0;
                for k in 0..dim {
                    s += g[i * dim + k] * g[j * dim + k];
                }
                data[i * dim + j] = s + if i == j { 0.5 * dim as f64 } else { 0.0 };
            }
        }
        SymMatrix::from_raw(dim, data)
    }

    fn rows_of(m: &SymMatrix) -> Vec<Vec<f64>> {
        (0..m.dim()).map(|i| m.row(i).to_vec()).collect()
    }

    fn max_abs_diff(a: &SymMatrix, b: &SymMatrix) -> f64 {
        assert_eq!(a.dim(), b.dim());
        let mut worst: f64 = 0.0;
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                worst = worst.max((a.get(i, j) - b.get(i, j)).abs());
            }
        }
        worst
    }

    #[test]
    fn rejects_asymmetric_input() {
        let err = SymMatrix::new(2, vec![1.0, 0.5, 0.5 + 1e-9, 1.0]).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        // within tolerance is fine
        SymMatrix::new(2, vec![1.0, 0.5, 0.5 + 1e-13, 1.0]).unwrap();
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = SymMatrix::new(2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(matches!(m.cholesky(), Err(Error::Numeric(_))));
    }

    #[test]
    fn inverse_matches_gauss_jordan() {
        for seed in 0..20 {
            let dim = 2 + (seed as usize % 7);
            let m = random_spd(dim, seed);
            let inv = m.inverse().unwrap();
            let oracle = gauss_jordan_inverse(&m);
            assert!(max_abs_diff(&inv, &oracle) < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn to_correlation_identity_is_identity() {
        let id = SymMatrix::identity(3);
        assert_eq!(to_correlation(&id).unwrap(), id);
    }

    #[test]
    fn to_correlation_hand_case() {
        // covariance diag(4, 9) with off-diagonal 3 -> correlation 3 / (2*3)
        let s = SymMatrix::new(2, vec![4.0, 3.0, 3.0, 9.0]).unwrap();
        let c = to_correlation(&s).unwrap();
        assert_eq!(c.get(0, 0), 1.0);
        assert_eq!(c.get(1, 1), 1.0);
        assert_relative_eq!(c.get(0, 1), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn to_correlation_unit_diagonal_exact() {
        let m = random_spd(5, 3);
        let c = to_correlation(&m).unwrap();
        for i in 0..5 {
            assert_eq!(c.get(i, i), 1.0);
        }
    }

    #[test]
    fn to_correlation_rejects_nonpositive_diagonal() {
        let s = SymMatrix::new(2, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(to_correlation(&s), Err(Error::Domain(_))));
    }

    #[test]
    fn rank_one_update_identity_case() {
        // (I + 3 e_0 e_0')^{-1} = diag(1/4, 1)
        let out = rank_one_inverse_update(&SymMatrix::identity(2), 0, 3.0).unwrap();
        assert_relative_eq!(out.get(0, 0), 0.25, max_relative = 1e-15);
        assert_relative_eq!(out.get(1, 1), 1.0, max_relative = 1e-15);
        assert_eq!(out.get(0, 1), 0.0);
    }

    #[test]
    fn rank_one_update_matches_direct_inverse() {
        let m = random_spd(4, 11);
        let binv = m.inverse().unwrap();
        let updated = rank_one_inverse_update(&binv, 1, 10.0).unwrap();
        let mut perturbed = m.clone();
        perturbed.set(1, 1, m.get(1, 1) + 10.0);
        let oracle = gauss_jordan_inverse(&perturbed);
        assert!(max_abs_diff(&updated, &oracle) < 1e-10 * oracle.max_diagonal().abs().max(1.0));
    }

    #[test]
    fn rank_one_update_zero_v_is_identity_map() {
        let m = random_spd(3, 5);
        let binv = m.inverse().unwrap();
        let out = rank_one_inverse_update(&binv, 2, 0.0).unwrap();
        assert!(max_abs_diff(&out, &binv) == 0.0);
    }

    #[test]
    fn determinant_ratio_hand_and_oracle() {
        assert_eq!(determinant_ratio(&SymMatrix::identity(3), 1, 3.0), 4.0);
        assert_eq!(determinant_ratio(&SymMatrix::identity(3), 0, 0.0), 1.0);

        let m = random_spd(5, 17);
        let binv = m.inverse().unwrap();
        let ratio = determinant_ratio(&binv, 3, 7.0);
        let mut perturbed_rows = rows_of(&m);
        perturbed_rows[3][3] += 7.0;
        let oracle = cofactor_det(&perturbed_rows) / cofactor_det(&rows_of(&m));
        assert_relative_eq!(ratio, oracle, max_relative = 1e-10);
    }

    #[test]
    fn block_inverse_identity_and_hand_case() {
        let col = block_inverse_entries(&SymMatrix::identity(3), 1).unwrap();
        assert_eq!(col.diagonal(), 1.0);
        assert_eq!(col.column, vec![0.0, 1.0, 0.0]);

        // 2x2 correlation with rho = 0.5, column 0: b_00 = 4/3, b_10 = -2/3
        let m = SymMatrix::new(2, vec![1.0, 0.5, 0.5, 1.0]).unwrap();
        let col = block_inverse_entries(&m, 0).unwrap();
        assert_relative_eq!(col.diagonal(), 4.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(col.column[1], -2.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn block_inverse_matches_full_inverse_column() {
        let m = random_spd(6, 23);
        let full = gauss_jordan_inverse(&m);
        for i in 0..6 {
            let col = block_inverse_entries(&m, i).unwrap();
            for r in 0..6 {
                assert_relative_eq!(col.column[r], full.get(r, i), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn block_inverse_rejects_indefinite() {
        let m = SymMatrix::new(2, vec![1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(matches!(
            block_inverse_entries(&m, 0),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn downdate_identity_case() {
        let out = inverse_downdate(&SymMatrix::identity(3), 1).unwrap();
        assert_eq!(out, SymMatrix::identity(2));
    }

    #[test]
    fn downdate_matches_direct_subinverse() {
        let m = random_spd(5, 31);
        let ainv = m.inverse().unwrap();
        let down = inverse_downdate(&ainv, 0).unwrap();
        let keep = [1usize, 2, 3, 4];
        let oracle = gauss_jordan_inverse(&m.submatrix(&keep));
        assert!(max_abs_diff(&down, &oracle) < 1e-10);
    }

    #[test]
    fn downdate_two_by_two() {
        let m = random_spd(2, 41);
        let ainv = m.inverse().unwrap();
        let down = inverse_downdate(&ainv, 0).unwrap();
        assert_relative_eq!(down.get(0, 0), 1.0 / m.get(1, 1), max_relative = 1e-12);
    }

    #[test]
    fn downdate_order_independent() {
        // removing {1, 3} in either order equals direct inversion of the submatrix
        let m = random_spd(6, 57);
        let ainv = m.inverse().unwrap();
        let a = inverse_downdate(&inverse_downdate(&ainv, 1).unwrap(), 2).unwrap(); // 3 shifts to 2
        let b = inverse_downdate(&inverse_downdate(&ainv, 3).unwrap(), 1).unwrap();
        let keep = [0usize, 2, 4, 5];
        let oracle = gauss_jordan_inverse(&m.submatrix(&keep));
        assert!(max_abs_diff(&a, &b) < 1e-10);
        assert!(max_abs_diff(&a, &oracle) < 1e-9);
    }

    #[test]
    fn downdate_refuses_dimension_one() {
        let one = SymMatrix::new(1, vec![2.0]).unwrap();
        assert!(matches!(inverse_downdate(&one, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn intraclass_entries_hand_cases() {
        assert_eq!(intraclass_inverse_entries(4, 0.0).unwrap(), (1.0, 0.0));
        let (d, o) = intraclass_inverse_entries(2, 0.5).unwrap();
        assert_relative_eq!(d, 4.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(o, -2.0 / 3.0, max_relative = 1e-15);
        assert!(matches!(
            intraclass_inverse_entries(3, -0.6),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            intraclass_inverse_entries(3, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn intraclass_entries_match_dense_inverse() {
        for &k in &[2usize, 3, 10, 50] {
            for &rho in &[-0.01, 0.0, 0.3, 0.9] {
                let (d, o) = intraclass_inverse_entries(k, rho).unwrap();
                let mut data = vec![rho; k * k];
                for i in 0..k {
                    data[i * k + i] = 1.0;
                }
                let m = SymMatrix::from_raw(k, data);
                let inv = m.inverse().unwrap();
                for i in 0..k {
                    for j in 0..k {
                        let want = if i == j { d } else { o };
                        assert_relative_eq!(inv.get(i, j), want, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn intraclass_k3_example() {
        let (d, o) = intraclass_inverse_entries(3, 0.5).unwrap();
        let m = SymMatrix::new(3, vec![1.0, 0.5, 0.5, 0.5, 1.0, 0.5, 0.5, 0.5, 1.0]).unwrap();
        let inv = gauss_jordan_inverse(&m);
        assert_relative_eq!(d, inv.get(0, 0), epsilon = 1e-12);
        assert_relative_eq!(o, inv.get(0, 1), epsilon = 1e-12);
    }

    #[test]
    fn smw_identity_product_is_identity() {
        // update times perturbed matrix equals identity, across v scales
        for (case, &v) in [0.1, 1.0, 100.0].iter().enumerate() {
            let dim = 3 + case * 2;
            let m = random_spd(dim, 71 + case as u64);
            let binv = m.inverse().unwrap();
            let i = case % dim;
            let updated = rank_one_inverse_update(&binv, i, v).unwrap();
            let mut perturbed = m.clone();
            perturbed.set(i, i, m.get(i, i) + v);
            for r in 0..dim {
                for c in 0..dim {
                    let prod = dot(updated.row(r), perturbed.row(c));
                    let want = if r == c { 1.0 } else { 0.0 };
                    assert!(
                        (prod - want).abs() < 1e-8,
                        "case {case}, entry ({r},{c}): {prod}"
                    );
                }
            }
        }
    }

    #[test]
    fn mvn_log_density_matches_univariate() {
        let cov = SymMatrix::new(1, vec![4.0]).unwrap();
        let got = log_mvn_density(&[1.0], &cov).unwrap();
        let want =
            -0.5 * (1.0 / 4.0) - 0.5 * (4.0f64).ln() - 0.5 * (2.0 * std::f64::consts::PI).ln();
        assert_relative_eq!(got, want, max_relative = 1e-14);
    }

    #[test]
    fn solve_matches_inverse_action() {
        let m = random_spd(6, 91);
        let chol = m.cholesky().unwrap();
        let mut rng = replicate_rng(91, 1);
        let b: Vec<f64> = (0..6)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let x = chol.solve(&b);
        let inv = m.inverse().unwrap();
        let want = inv.mul_vec(&b);
        for (a, w) in x.iter().zip(&want) {
            assert_relative_eq!(a, w, epsilon = 1e-10);
        }
    }
}
