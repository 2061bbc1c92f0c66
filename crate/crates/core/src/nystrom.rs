//! The standard Nyström learner `C W_k† Cᵀ`, kept in factored form.

use crate::error::{Error, Result};
use crate::linalg::{self, frobenius_norm, DenseMatrix, DEFAULT_PINV_TOL, SYMMETRY_TOL};
use crate::sampling::IndexSet;

/// Default guard for [`NystromFactor::reconstruct_full`].
pub const DEFAULT_RECONSTRUCT_LIMIT: usize = 10_000;

/// One weak learner: sampled columns `C = G[:, I]` and `W_k†`.
#[derive(Debug, Clone, PartialEq)]
pub struct NystromFactor {
    indices: IndexSet,
    c: DenseMatrix,
    wk_pinv: DenseMatrix,
    k: usize,
}

impl NystromFactor {
    pub fn indices(&self) -> &IndexSet {
        &self.indices
    }

    pub fn columns(&self) -> &DenseMatrix {
        &self.c
    }

    pub fn wk_pinv(&self) -> &DenseMatrix {
        &self.wk_pinv
    }

    pub fn rank(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.c.nrows()
    }

    /// Rebuilds a factor from stored parts, checking shapes and symmetry.
    pub fn from_parts(
        indices: IndexSet,
        c: DenseMatrix,
        wk_pinv: DenseMatrix,
        k: usize,
    ) -> Result<Self> {
        let m = indices.len();
        if c.ncols() != m || wk_pinv.shape() != (m, m) {
            return Err(Error::DimensionMismatch(c.ncols(), m));
        }
        if k == 0 || k > m {
            return Err(Error::RankOutOfRange { k, max: m });
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= c.nrows()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                bound: c.nrows(),
            });
        }
        linalg::check_symmetric(&wk_pinv)?;
        Ok(Self {
            indices,
            c,
            wk_pinv,
            k,
        })
    }

    /// `C[rows, :] · W_k† · C[cols, :]ᵀ`
    pub fn evaluate_block(&self, rows: &[usize], cols: &[usize]) -> Result<DenseMatrix> {
        let n = self.n();
        if let Some(&bad) = rows.iter().chain(cols).find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: bad, bound: n });
        }
        let left = linalg::select_rows(&self.c, rows) * &self.wk_pinv;
        let right = linalg::select_rows(&self.c, cols);
        Ok(left * right.transpose())
    }

    /// The full `n × n` approximation, exactly symmetric.
    pub fn reconstruct_full(&self) -> Result<DenseMatrix> {
        self.reconstruct_full_limited(DEFAULT_RECONSTRUCT_LIMIT)
    }

    pub fn reconstruct_full_limited(&self, limit: usize) -> Result<DenseMatrix> {
        let n = self.n();
        if n > limit {
            return Err(Error::TooLarge { n, limit });
        }
        let left = &self.c * &self.wk_pinv;
        Ok(linalg::symmetrize(left * self.c.transpose()))
    }
}

/// `Σ wᵢ Cᵢ[rows, :] Wᵢ† Cᵢ[cols, :]ᵀ` as one product of stacked factors.
pub fn weighted_block(
    learners: &[NystromFactor],
    weights: &[f64],
    rows: &[usize],
    cols: &[usize],
) -> Result<DenseMatrix> {
    if learners.len() != weights.len() {
        return Err(Error::DimensionMismatch(learners.len(), weights.len()));
    }
    let width: usize = learners.iter().map(|l| l.c.ncols()).sum();
    let mut left = DenseMatrix::zeros(rows.len(), width);
    let mut right = DenseMatrix::zeros(cols.len(), width);
    let mut offset = 0;
    for (learner, &w) in learners.iter().zip(weights) {
        let n = learner.n();
        if let Some(&bad) = rows.iter().chain(cols).find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: bad, bound: n });
        }
        let m = learner.c.ncols();
        left.columns_mut(offset, m)
            .copy_from(&(linalg::select_rows(&learner.c, rows) * (&learner.wk_pinv * w)));
        right.columns_mut(offset, m)
            .copy_from(&linalg::select_rows(&learner.c, cols));
        offset += m;
    }
    Ok(left * right.transpose())
}

/// Builds `C W_k† Cᵀ` from the sampled columns `C = G[:, I]`.
///
/// Only entries of `C` are read; `W` is the row subset `C[I, :]`.
pub fn standard_nystrom(c: DenseMatrix, indices: IndexSet, k: usize) -> Result<NystromFactor> {
    let m = indices.len();
    if c.ncols() != m {
        return Err(Error::DimensionMismatch(c.ncols(), m));
    }
    if k == 0 || k > m {
        return Err(Error::RankOutOfRange { k, max: m });
    }
    if let Some(&bad) = indices.iter().find(|&&i| i >= c.nrows()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            bound: c.nrows(),
        });
    }
    let w = linalg::select_rows(&c, &indices);
    let norm = frobenius_norm(&w);
    let asym = frobenius_norm(&(&w - w.transpose()));
    if asym > SYMMETRY_TOL * norm {
        return Err(Error::InconsistentBlock(asym));
    }
    let wk_pinv = linalg::pinv_rank_k(&linalg::symmetrize(w), k, DEFAULT_PINV_TOL)?;
    Ok(NystromFactor {
        indices,
        c,
        wk_pinv,
        k,
    })
}

/// Weighted sum of Nyström learners.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureModel {
    learners: Vec<NystromFactor>,
    weights: Vec<f64>,
}

impl MixtureModel {
    pub fn new(learners: Vec<NystromFactor>, weights: Vec<f64>) -> Result<Self> {
        if learners.len() != weights.len() {
            return Err(Error::DimensionMismatch(learners.len(), weights.len()));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("mixture weights"));
        }
        if let Some(first) = learners.first() {
            let n = first.n();
            if let Some(bad) = learners.iter().find(|l| l.n() != n) {
                return Err(Error::DimensionMismatch(n, bad.n()));
            }
        }
        Ok(Self { learners, weights })
    }

    pub fn learners(&self) -> &[NystromFactor] {
        &self.learners
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.learners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.learners.is_empty()
    }

    /// `Σ wᵢ · evaluate_block(learnerᵢ, rows, cols)`
    pub fn mixture_block(&self, rows: &[usize], cols: &[usize]) -> Result<DenseMatrix> {
        if self.learners.is_empty() {
            return Err(Error::EmptyModel);
        }
        weighted_block(&self.learners, &self.weights, rows, cols)
    }

    /// Full `n × n` mixture, exactly symmetric.
    pub fn reconstruct_full(&self) -> Result<DenseMatrix> {
        let first = self.learners.first().ok_or(Error::EmptyModel)?;
        let n = first.n();
        if n > DEFAULT_RECONSTRUCT_LIMIT {
            return Err(Error::TooLarge {
                n,
                limit: DEFAULT_RECONSTRUCT_LIMIT,
            });
        }
        let mut out = DenseMatrix::zeros(n, n);
        for (learner, &w) in self.learners.iter().zip(&self.weights) {
            let left = learner.columns() * (learner.wk_pinv() * w);
            out.gemm(1.0, &left, &learner.columns().transpose(), 1.0);
        }
        Ok(linalg::symmetrize(out))
    }
}
