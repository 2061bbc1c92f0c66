//! Dense symmetric linear algebra.
//!
//! Every matrix in the crate is a column-major [`DenseMatrix`]. Kernel
//! matrices are symmetric positive semidefinite in exact arithmetic, so the
//! eigendecomposition clamps tiny negative eigenvalues to zero and reports
//! the spectrum in non-increasing order, which makes it double as the SVD.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub type DenseMatrix = DMatrix<f64>;

/// Symmetry tolerance relative to the Frobenius norm.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Default relative cutoff for [`pinv_rank_k`].
pub const DEFAULT_PINV_TOL: f64 = 1e-12;

/// Eigenpairs of a symmetric matrix, sorted by non-increasing value.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub vectors: DenseMatrix,
    pub values: Vec<f64>,
}

impl SymEig {
    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

pub fn frobenius_norm(m: &DenseMatrix) -> f64 {
    // Scaled accumulation avoids overflow for huge entries.
    let scale = m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let sum: f64 = m.iter().map(|v| (v / scale).powi(2)).sum();
    scale * sum.sqrt()
}

/// Largest entry of |A - Aᵀ|.
fn asymmetry(a: &DenseMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for j in 0..n {
        for i in (j + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

pub(crate) fn check_symmetric(a: &DenseMatrix) -> Result<f64> {
    if a.nrows() != a.ncols() {
        return Err(Error::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let norm = frobenius_norm(a);
    let asym = asymmetry(a);
    let tolerance = SYMMETRY_TOL * norm;
    if asym > tolerance {
        return Err(Error::NotSymmetric {
            asymmetry: asym,
            tolerance,
        });
    }
    Ok(norm)
}

/// Eigendecomposition of a symmetric matrix.
///
/// Eigenvalues that are negative but smaller in magnitude than
/// `1e-10 * |A|_F` are clamped to zero.
pub fn sym_eig(a: &DenseMatrix) -> Result<SymEig> {
    let norm = check_symmetric(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(SymEig {
            vectors: DenseMatrix::zeros(0, 0),
            values: Vec::new(),
        });
    }
    // Work on the exactly symmetrized matrix so the solver sees a consistent input.
    let sym = (a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });

    let clamp = SYMMETRY_TOL * norm;
    let mut vectors = DenseMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let v = eig.eigenvalues[src];
        values.push(if v < 0.0 && -v < clamp { 0.0 } else { v });
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(SymEig { vectors, values })
}

/// Best rank-k approximation `U_k Σ_k U_kᵀ`.
pub fn best_rank_k(eig: &SymEig, k: usize) -> Result<DenseMatrix> {
    let n = eig.dim();
    if k == 0 || k > n {
        return Err(Error::RankOutOfRange { k, max: n });
    }
    let uk = eig.vectors.columns(0, k);
    let scaled = DenseMatrix::from_fn(n, k, |i, j| uk[(i, j)] * eig.values[j]);
    Ok(symmetrize(scaled * uk.transpose()))
}

/// Pseudoinverse of the best rank-k approximation of a symmetric matrix.
///
/// Modes with value `<= tol * σ₁` are dropped even when they fall inside
/// the top k.
pub fn pinv_rank_k(w: &DenseMatrix, k: usize, tol: f64) -> Result<DenseMatrix> {
    let eig = sym_eig(w)?;
    pinv_from_eig(&eig, k, tol)
}

pub fn pinv_from_eig(eig: &SymEig, k: usize, tol: f64) -> Result<DenseMatrix> {
    let n = eig.dim();
    if k == 0 || k > n {
        return Err(Error::RankOutOfRange { k, max: n });
    }
    let top = eig.values.first().copied().unwrap_or(0.0);
    let cutoff = tol.max(0.0) * top;
    let kept: Vec<usize> = (0..k)
        .filter(|&j| eig.values[j] > 0.0 && eig.values[j] > cutoff)
        .collect();
    if kept.is_empty() {
        return Ok(DenseMatrix::zeros(n, n));
    }
    let basis = DenseMatrix::from_fn(n, kept.len(), |i, c| eig.vectors[(i, kept[c])]);
    let scaled = DenseMatrix::from_fn(n, kept.len(), |i, c| {
        eig.vectors[(i, kept[c])] / eig.values[kept[c]]
    });
    Ok(symmetrize(scaled * basis.transpose()))
}

/// Minimizer of `|A w - b|² + λ|w|²`.
///
/// With `lambda == 0` the normal matrix must be numerically nonsingular.
pub fn ridge_solve(a: &DenseMatrix, b: &DVector<f64>, lambda: f64) -> Result<DVector<f64>> {
    if a.nrows() != b.len() {
        return Err(Error::DimensionMismatch(a.nrows(), b.len()));
    }
    ridge_solve_normal(&(a.transpose() * a), &(a.transpose() * b), lambda)
}

/// Solves `(AᵀA + λI) w = Aᵀb` given `normal = AᵀA` and `rhs = Aᵀb`.
pub fn ridge_solve_normal(
    normal: &DenseMatrix,
    rhs: &DVector<f64>,
    lambda: f64,
) -> Result<DVector<f64>> {
    let p = check_symmetric(normal).map(|_| normal.nrows())?;
    if rhs.len() != p {
        return Err(Error::DimensionMismatch(p, rhs.len()));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidConfig(format!("ridge penalty {lambda}")));
    }
    let mut shifted = normal.clone();
    for i in 0..p {
        shifted[(i, i)] += lambda;
    }

    if lambda == 0.0 {
        let eig = sym_eig(&shifted)?;
        let largest = eig.values.first().copied().unwrap_or(0.0);
        let smallest = eig.values.last().copied().unwrap_or(0.0);
        if largest <= 0.0 || smallest <= 1e-13 * largest * p as f64 {
            return Err(Error::SingularSystem);
        }
    }
    let chol = shifted.cholesky().ok_or(Error::SingularSystem)?;
    let w = chol.solve(rhs);
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    Ok(w)
}

/// `‖approx − reference‖_F / ‖reference‖_F`.
pub fn relative_error(approx: &DenseMatrix, reference: &DenseMatrix) -> Result<f64> {
    if approx.shape() != reference.shape() {
        return Err(Error::DimensionMismatch(approx.len(), reference.len()));
    }
    let denom = frobenius_norm(reference);
    if denom == 0.0 {
        return Err(Error::ZeroTarget);
    }
    Ok(frobenius_norm(&(approx - reference)) / denom)
}

/// Averages a square matrix with its transpose, giving exact symmetry.
pub fn symmetrize(mut m: DenseMatrix) -> DenseMatrix {
    let n = m.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
    m
}

/// Submatrix `m[rows, cols]`.
pub fn select(m: &DenseMatrix, rows: &[usize], cols: &[usize]) -> DenseMatrix {
    DenseMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Rows of `m` in the given order.
pub fn select_rows(m: &DenseMatrix, rows: &[usize]) -> DenseMatrix {
    DenseMatrix::from_fn(rows.len(), m.ncols(), |i, j| m[(rows[i], j)])
}
