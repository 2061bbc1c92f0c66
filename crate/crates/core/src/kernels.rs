//! Kernel functions and Gram matrix construction.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::sampling::IndexSet;

/// `n` points in `d` dimensions, stored row-major so each point is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    d: usize,
    values: Vec<f64>,
}

impl Dataset {
    pub fn from_rows(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidConfig(format!("dataset shape {n}x{d}")));
        }
        if values.len() != n * d {
            return Err(Error::DimensionMismatch(values.len(), n * d));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dataset"));
        }
        Ok(Self { n, d, values })
    }

    pub fn from_matrix(points: &DenseMatrix) -> Result<Self> {
        let (n, d) = points.shape();
        let mut values = Vec::with_capacity(n * d);
        for i in 0..n {
            values.extend(points.row(i).iter());
        }
        Self::from_rows(n, d, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.values
    }

    pub fn to_matrix(&self) -> DenseMatrix {
        DenseMatrix::from_row_slice(self.n, self.d, &self.values)
    }

    /// Rows at the given indices, in order.
    pub fn subset(&self, rows: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(rows.len() * self.d);
        for &r in rows {
            if r >= self.n {
                return Err(Error::IndexOutOfRange {
                    index: r,
                    bound: self.n,
                });
            }
            values.extend_from_slice(self.point(r));
        }
        Self::from_rows(rows.len(), self.d, values)
    }
}

/// Centers every column and divides by its sample standard deviation.
///
/// Constant columns are centered and left unscaled.
pub fn standardize_columns(data: &Dataset) -> Result<Dataset> {
    let (n, d) = (data.n, data.d);
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    let mut values = data.values.clone();
    for j in 0..d {
        let mean = (0..n).map(|i| values[i * d + j]).sum::<f64>() / n as f64;
        let ss: f64 = (0..n).map(|i| (values[i * d + j] - mean).powi(2)).sum();
        let sd = (ss / (n - 1) as f64).sqrt();
        let divisor = if sd > 0.0 { sd } else { 1.0 };
        for i in 0..n {
            values[i * d + j] = (values[i * d + j] - mean) / divisor;
        }
    }
    Dataset::from_rows(n, d, values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// `exp(-|x - y|² / (2σ²))`
    Gaussian { sigma: f64 },
    /// `⟨x, y⟩`
    Linear,
}

impl KernelSpec {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidConfig(format!("gaussian bandwidth {sigma}")));
        }
        Ok(KernelSpec::Gaussian { sigma })
    }
}

pub fn kernel_eval(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(x.len(), y.len()));
    }
    Ok(eval_unchecked(spec, x, y))
}

#[inline]
fn eval_unchecked(spec: &KernelSpec, x: &[f64], y: &[f64]) -> f64 {
    match *spec {
        KernelSpec::Gaussian { sigma } => {
            let dist2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
            (-dist2 / (2.0 * sigma * sigma)).exp()
        }
        KernelSpec::Linear => x.iter().zip(y).map(|(a, b)| a * b).sum(),
    }
}

/// Entry `G[i, j]`, always evaluated with the smaller index first so that
/// column access and full construction agree bit for bit.
#[inline]
fn canonical_entry(spec: &KernelSpec, data: &Dataset, i: usize, j: usize) -> f64 {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    eval_unchecked(spec, data.point(a), data.point(b))
}

/// Full `n × n` Gram matrix. The upper triangle is evaluated and mirrored.
pub fn gram_full(spec: &KernelSpec, data: &Dataset) -> DenseMatrix {
    let n = data.n();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| eval_unchecked(spec, data.point(i), data.point(j)))
                .collect()
        })
        .collect();
    let mut g = DenseMatrix::zeros(n, n);
    for (i, row) in upper.iter().enumerate() {
        for (offset, &v) in row.iter().enumerate() {
            let j = i + offset;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

fn validate_indices(cols: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &c in cols {
        if c >= n {
            return Err(Error::IndexOutOfRange { index: c, bound: n });
        }
        if std::mem::replace(&mut seen[c], true) {
            return Err(Error::DuplicateIndex(c));
        }
    }
    Ok(())
}

/// Columns `G[:, cols]` without forming the rest of `G`.
pub fn gram_columns(spec: &KernelSpec, data: &Dataset, cols: &[usize]) -> Result<DenseMatrix> {
    let n = data.n();
    validate_indices(cols, n)?;
    let columns: Vec<Vec<f64>> = cols
        .par_iter()
        .map(|&c| (0..n).map(|r| canonical_entry(spec, data, r, c)).collect())
        .collect();
    let mut out = DenseMatrix::zeros(n, cols.len());
    for (j, col) in columns.iter().enumerate() {
        out.column_mut(j).copy_from_slice(col);
    }
    Ok(out)
}

/// Read access to a symmetric kernel matrix.
pub trait KernelAccess: Sync {
    fn size(&self) -> usize;

    /// `G[:, cols]`
    fn columns(&self, cols: &IndexSet) -> Result<DenseMatrix>;

    /// `G[rows, cols]`
    fn block(&self, rows: &IndexSet, cols: &IndexSet) -> Result<DenseMatrix>;
}

/// A materialized Gram matrix.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    g: DenseMatrix,
}

impl GramMatrix {
    pub fn new(g: DenseMatrix) -> Result<Self> {
        crate::linalg::check_symmetric(&g)?;
        Ok(Self { g })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.g
    }

    fn check(&self, idx: &IndexSet) -> Result<()> {
        validate_indices(idx.as_slice(), self.g.nrows())
    }
}

impl KernelAccess for GramMatrix {
    fn size(&self) -> usize {
        self.g.nrows()
    }

    fn columns(&self, cols: &IndexSet) -> Result<DenseMatrix> {
        self.check(cols)?;
        let n = self.g.nrows();
        let mut out = DenseMatrix::zeros(n, cols.len());
        for (j, &c) in cols.iter().enumerate() {
            out.set_column(j, &self.g.column(c));
        }
        Ok(out)
    }

    fn block(&self, rows: &IndexSet, cols: &IndexSet) -> Result<DenseMatrix> {
        self.check(rows)?;
        self.check(cols)?;
        Ok(crate::linalg::select(&self.g, rows, cols))
    }
}

/// Kernel entries evaluated on demand from raw data.
#[derive(Debug, Clone)]
pub struct KernelColumns<'a> {
    spec: KernelSpec,
    data: &'a Dataset,
}

impl<'a> KernelColumns<'a> {
    pub fn new(spec: KernelSpec, data: &'a Dataset) -> Self {
        Self { spec, data }
    }
}

impl KernelAccess for KernelColumns<'_> {
    fn size(&self) -> usize {
        self.data.n()
    }

    fn columns(&self, cols: &IndexSet) -> Result<DenseMatrix> {
        gram_columns(&self.spec, self.data, cols)
    }

    fn block(&self, rows: &IndexSet, cols: &IndexSet) -> Result<DenseMatrix> {
        let n = self.data.n();
        validate_indices(rows, n)?;
        validate_indices(cols, n)?;
        Ok(DenseMatrix::from_fn(rows.len(), cols.len(), |i, j| {
            canonical_entry(&self.spec, self.data, rows[i], cols[j])
        }))
    }
}
