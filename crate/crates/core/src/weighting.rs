//! Mixture weights for combining Nyström learners.
//!
//! Exponential and ridge weights are fitted on the fixed validation block
//! `G[V₁, V₁]`; the ridge penalty is chosen by the error on `G[V₂, V₂]`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, ridge_solve, ridge_solve_normal, DenseMatrix};
use crate::nystrom::NystromFactor;
use crate::sampling::IndexSet;

pub const DEFAULT_ETA: f64 = 0.01;

/// `{1e-6, 1e-5, …, 1e2}`
pub fn default_lambda_grid() -> Vec<f64> {
    (-6..=2).map(|e| 10f64.powi(e)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Uniform,
    Exponential,
    Ridge,
}

impl SchemeKind {
    pub fn letter(self) -> char {
        match self {
            SchemeKind::Uniform => 'U',
            SchemeKind::Exponential => 'E',
            SchemeKind::Ridge => 'R',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'U' => Some(SchemeKind::Uniform),
            'E' => Some(SchemeKind::Exponential),
            'R' => Some(SchemeKind::Ridge),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightScheme {
    Uniform,
    Exponential { eta: f64 },
    Ridge { lambda_grid: Vec<f64> },
}

impl WeightScheme {
    pub fn from_kind(kind: SchemeKind, eta: f64, lambda_grid: &[f64]) -> Result<Self> {
        let scheme = match kind {
            SchemeKind::Uniform => WeightScheme::Uniform,
            SchemeKind::Exponential => WeightScheme::Exponential { eta },
            SchemeKind::Ridge => WeightScheme::Ridge {
                lambda_grid: lambda_grid.to_vec(),
            },
        };
        scheme.validate()?;
        Ok(scheme)
    }

    pub fn kind(&self) -> SchemeKind {
        match self {
            WeightScheme::Uniform => SchemeKind::Uniform,
            WeightScheme::Exponential { .. } => SchemeKind::Exponential,
            WeightScheme::Ridge { .. } => SchemeKind::Ridge,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WeightScheme::Uniform => Ok(()),
            WeightScheme::Exponential { eta } => {
                if *eta > 0.0 && eta.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidConfig(format!("eta must be positive, got {eta}")))
                }
            }
            WeightScheme::Ridge { lambda_grid } => {
                let sorted = lambda_grid.windows(2).all(|w| w[0] <= w[1]);
                let valid = lambda_grid.iter().all(|l| *l >= 0.0 && l.is_finite());
                if lambda_grid.is_empty() || !sorted || !valid {
                    Err(Error::InvalidConfig(
                        "lambda grid must be nonempty, non-negative and ascending".into(),
                    ))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Whether the scheme reads the validation blocks at all.
    pub fn needs_validation(&self) -> bool {
        !matches!(self, WeightScheme::Uniform)
    }
}

pub fn uniform_weights(p: usize) -> Result<Vec<f64>> {
    if p == 0 {
        return Err(Error::ZeroLearners);
    }
    Ok(vec![1.0 / p as f64; p])
}

/// `wᵢ = exp(-η εᵢ) / Z`
pub fn exponential_weights(errors: &[f64], eta: f64) -> Result<Vec<f64>> {
    if errors.is_empty() {
        return Err(Error::ZeroLearners);
    }
    if errors.iter().any(|e| !e.is_finite()) {
        return Err(Error::NonFinite("validation errors"));
    }
    // Shifting by the smallest error leaves the normalised weights unchanged.
    let floor = errors.iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = errors.iter().map(|e| (-eta * (e - floor)).exp()).collect();
    let z: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|r| r / z).collect())
}

fn design_matrix(blocks: &[DenseMatrix], target: &DenseMatrix) -> Result<DenseMatrix> {
    let len = target.len();
    let mut a = DenseMatrix::zeros(len, blocks.len());
    for (j, b) in blocks.iter().enumerate() {
        if b.shape() != target.shape() {
            return Err(Error::DimensionMismatch(b.len(), len));
        }
        a.column_mut(j).copy_from_slice(b.as_slice());
    }
    Ok(a)
}

/// Minimizes `‖Σ wᵢ Bᵢ − T‖²_F + λ‖w‖²`. Weights are not constrained.
pub fn ridge_weights(
    learner_blocks: &[DenseMatrix],
    target: &DenseMatrix,
    lambda: f64,
) -> Result<Vec<f64>> {
    if learner_blocks.is_empty() {
        return Err(Error::ZeroLearners);
    }
    let a = design_matrix(learner_blocks, target)?;
    let b = DVector::from_column_slice(target.as_slice());
    Ok(ridge_solve(&a, &b, lambda)?.iter().copied().collect())
}

fn combined_error(blocks: &[DenseMatrix], weights: &[f64], target: &DenseMatrix) -> f64 {
    let mut resid = -target.clone();
    for (b, w) in blocks.iter().zip(weights) {
        resid += b * *w;
    }
    frobenius_norm(&resid)
}

/// Grid point whose ridge fit on the first block set gives the smallest
/// error on the second; earlier grid points win ties.
pub fn tune_lambda(
    fit_blocks: &[DenseMatrix],
    fit_target: &DenseMatrix,
    tune_blocks: &[DenseMatrix],
    tune_target: &DenseMatrix,
    grid: &[f64],
) -> Result<f64> {
    if fit_blocks.is_empty() {
        return Err(Error::ZeroLearners);
    }
    let a = design_matrix(fit_blocks, fit_target)?;
    let b = DVector::from_column_slice(fit_target.as_slice());
    let normal = a.transpose() * &a;
    let rhs = a.transpose() * b;
    Ok(tune_on_normal(&normal, &rhs, tune_blocks, tune_target, grid)?.0)
}

/// Grid search over `λ` for a fit given by its normal equations; returns the
/// winning penalty and its weights.
fn tune_on_normal(
    normal: &DenseMatrix,
    rhs: &DVector<f64>,
    tune_blocks: &[DenseMatrix],
    tune_target: &DenseMatrix,
    grid: &[f64],
) -> Result<(f64, Vec<f64>)> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty lambda grid".into()));
    }
    if normal.nrows() != tune_blocks.len() {
        return Err(Error::DimensionMismatch(normal.nrows(), tune_blocks.len()));
    }
    for b in tune_blocks {
        if b.shape() != tune_target.shape() {
            return Err(Error::DimensionMismatch(b.len(), tune_target.len()));
        }
    }
    let mut best: Option<(f64, f64, Vec<f64>)> = None;
    let mut last_err = None;
    for &lambda in grid {
        match ridge_solve_normal(normal, rhs, lambda) {
            Ok(w) => {
                let w: Vec<f64> = w.iter().copied().collect();
                let err = combined_error(tune_blocks, &w, tune_target);
                if best.as_ref().is_none_or(|(e, _, _)| err < *e) {
                    best = Some((err, lambda, w));
                }
            }
            Err(e @ Error::SingularSystem) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    best.map(|(_, l, w)| (l, w))
        .ok_or_else(|| last_err.unwrap_or(Error::SingularSystem))
}

/// Learner predictions on the validation blocks, cached as learners are added.
#[derive(Debug, Clone)]
pub struct ValidationBlocks {
    v1: IndexSet,
    v2: IndexSet,
    target_v1: DenseMatrix,
    target_v2: DenseMatrix,
    learner_v1: Vec<DenseMatrix>,
    learner_v2: Vec<DenseMatrix>,
    /// `⟨Bᵢ, Bⱼ⟩` over V₁ for every learner pair, grown as learners arrive.
    inner_v1: Vec<Vec<f64>>,
    /// `⟨Bᵢ, G[V₁,V₁]⟩`
    target_inner_v1: Vec<f64>,
}

impl ValidationBlocks {
    pub fn new(v1: IndexSet, v2: IndexSet, target_v1: DenseMatrix, target_v2: DenseMatrix) -> Self {
        Self {
            v1,
            v2,
            target_v1,
            target_v2,
            learner_v1: Vec::new(),
            learner_v2: Vec::new(),
            inner_v1: Vec::new(),
            target_inner_v1: Vec::new(),
        }
    }

    pub fn v1(&self) -> &IndexSet {
        &self.v1
    }

    pub fn v2(&self) -> &IndexSet {
        &self.v2
    }

    pub fn push(&mut self, learner: &NystromFactor) -> Result<()> {
        let b1 = learner.evaluate_block(&self.v1, &self.v1)?;
        let b2 = learner.evaluate_block(&self.v2, &self.v2)?;
        let row: Vec<f64> = self
            .learner_v1
            .iter()
            .chain(std::iter::once(&b1))
            .map(|other| other.dot(&b1))
            .collect();
        self.target_inner_v1.push(b1.dot(&self.target_v1));
        self.inner_v1.push(row);
        self.learner_v1.push(b1);
        self.learner_v2.push(b2);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.learner_v1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.learner_v1.is_empty()
    }

    /// `εᵢ = ‖G^nys_i[V₁,V₁] − G[V₁,V₁]‖_F` for the first `count` learners.
    pub fn v1_errors(&self, count: usize) -> Vec<f64> {
        self.learner_v1[..count]
            .iter()
            .map(|b| frobenius_norm(&(b - &self.target_v1)))
            .collect()
    }

    /// Weights for the first `count` learners under `scheme`.
    pub fn fit(&self, scheme: &WeightScheme, count: usize) -> Result<Vec<f64>> {
        if count > self.len() {
            return Err(Error::DimensionMismatch(count, self.len()));
        }
        match scheme {
            WeightScheme::Uniform => uniform_weights(count),
            WeightScheme::Exponential { eta } => exponential_weights(&self.v1_errors(count), *eta),
            WeightScheme::Ridge { lambda_grid } => {
                if count == 0 {
                    return Err(Error::ZeroLearners);
                }
                let normal = DenseMatrix::from_fn(count, count, |i, j| {
                    if j <= i {
                        self.inner_v1[i][j]
                    } else {
                        self.inner_v1[j][i]
                    }
                });
                let rhs = DVector::from_column_slice(&self.target_inner_v1[..count]);
                let tune = &self.learner_v2[..count];
                Ok(tune_on_normal(&normal, &rhs, tune, &self.target_v2, lambda_grid)?.1)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng_from_seed;
    use rand::Rng;

    fn random_block(q: usize, rng: &mut crate::sampling::RngState) -> DenseMatrix {
        DenseMatrix::from_fn(q, q, |_, _| rng.random_range(-1.0..1.0))
    }

    fn objective(blocks: &[DenseMatrix], w: &[f64], target: &DenseMatrix, lambda: f64) -> f64 {
        combined_error(blocks, w, target).powi(2) + lambda * w.iter().map(|x| x * x).sum::<f64>()
    }

    #[test]
    fn uniform_examples() {
        assert_eq!(uniform_weights(1).unwrap(), vec![1.0]);
        assert_eq!(uniform_weights(4).unwrap(), vec![0.25; 4]);
        let w = uniform_weights(3).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-15);
        assert_eq!(uniform_weights(0), Err(Error::ZeroLearners));
    }

    #[test]
    fn exponential_examples() {
        let w = exponential_weights(&[0.7; 5], 3.0).unwrap();
        assert!(w.iter().all(|x| (x - 0.2).abs() < 1e-15));

        let w = exponential_weights(&[0.1, 5.0, 2.0], 1e-12).unwrap();
        assert!(w.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-10));

        let w = exponential_weights(&[0.0, 3f64.ln()], 1.0).unwrap();
        assert!((w[0] - 0.75).abs() < 1e-15);
        assert!((w[1] - 0.25).abs() < 1e-15);

        assert_eq!(exponential_weights(&[], 1.0), Err(Error::ZeroLearners));
    }

    #[test]
    fn exponential_properties() {
        let mut rng = rng_from_seed(3);
        for _ in 0..100 {
            let p = rng.random_range(1..10u64) as usize;
            let errs: Vec<f64> = (0..p).map(|_| rng.random_range(0.0..5.0)).collect();
            let eta = rng.random_range(0.001..2.0);
            let w = exponential_weights(&errs, eta).unwrap();
            assert!(w.iter().all(|x| *x >= 0.0));
            assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);

            let mut perm: Vec<usize> = (0..p).collect();
            perm.reverse();
            let permuted: Vec<f64> = perm.iter().map(|&i| errs[i]).collect();
            let wp = exponential_weights(&permuted, eta).unwrap();
            for (j, &i) in perm.iter().enumerate() {
                assert!((wp[j] - w[i]).abs() <= 1e-15);
            }

            if p >= 2 {
                let mut worse = errs.clone();
                worse[0] += 1.0;
                let ww = exponential_weights(&worse, eta).unwrap();
                assert!(ww[0] < w[0], "{errs:?} {eta} {ww:?} {w:?}");
            }
        }
    }

    #[test]
    fn ridge_examples() {
        let mut rng = rng_from_seed(5);
        let t = random_block(4, &mut rng);
        let w = ridge_weights(&[t.clone()], &t, 0.0).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-14);

        let w = ridge_weights(&[random_block(4, &mut rng), random_block(4, &mut rng)], &t, 1e9).unwrap();
        assert!(w.iter().all(|x| x.abs() < 1e-7));
    }

    #[test]
    fn ridge_orthogonal_blocks_decouple() {
        // disjoint supports give orthogonal vectorizations
        let mut rng = rng_from_seed(6);
        let mut a1 = DenseMatrix::zeros(3, 3);
        let mut a2 = DenseMatrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                let v = rng.random_range(-1.0..1.0);
                if (i + j) % 2 == 0 {
                    a1[(i, j)] = v;
                } else {
                    a2[(i, j)] = v;
                }
            }
        }
        let b = random_block(3, &mut rng);
        let w = ridge_weights(&[a1.clone(), a2.clone()], &b, 0.0).unwrap();
        let oracle1 = a1.dot(&b) / a1.dot(&a1);
        let oracle2 = a2.dot(&b) / a2.dot(&a2);
        assert!((w[0] - oracle1).abs() < 1e-12);
        assert!((w[1] - oracle2).abs() < 1e-12);
    }

    #[test]
    fn ridge_singular_when_dependent() {
        let mut rng = rng_from_seed(7);
        let a = random_block(3, &mut rng);
        let t = random_block(3, &mut rng);
        assert_eq!(
            ridge_weights(&[a.clone(), &a * 2.0], &t, 0.0),
            Err(Error::SingularSystem)
        );
    }

    #[test]
    fn ridge_local_optimality() {
        let mut rng = rng_from_seed(8);
        for _ in 0..10 {
            let blocks: Vec<DenseMatrix> = (0..3).map(|_| random_block(5, &mut rng)).collect();
            let t = random_block(5, &mut rng);
            let lambda = 0.3;
            let w = ridge_weights(&blocks, &t, lambda).unwrap();
            let f0 = objective(&blocks, &w, &t, lambda);
            for _ in 0..100 {
                let dir: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
                let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
                let moved: Vec<f64> = w.iter().zip(&dir).map(|(a, d)| a + 1e-4 * d / norm).collect();
                assert!(objective(&blocks, &moved, &t, lambda) >= f0);
            }
        }
    }

    #[test]
    fn ridge_monotone_in_target() {
        let mut rng = rng_from_seed(9);
        let a1 = random_block(4, &mut rng);
        let a2 = random_block(4, &mut rng);
        let b = random_block(4, &mut rng);
        let mut prev = f64::NEG_INFINITY;
        for step in 0..=10 {
            let t = step as f64 / 10.0;
            let target = &b * (1.0 - t) + &a1 * t;
            let w = ridge_weights(&[a1.clone(), a2.clone()], &target, 0.5).unwrap();
            assert!(w[0] > prev);
            prev = w[0];
        }
    }

    #[test]
    fn tune_lambda_examples() {
        let mut rng = rng_from_seed(10);
        let a = random_block(4, &mut rng);
        let b = random_block(4, &mut rng);
        assert_eq!(tune_lambda(&[a.clone()], &b, &[a.clone()], &b, &[0.3]).unwrap(), 0.3);

        // exact reproduction: λ only hurts, so smallest λ wins, and the
        // all-zero grid ties everywhere and keeps the first entry
        let grid = default_lambda_grid();
        assert_eq!(tune_lambda(&[a.clone()], &a, &[b.clone()], &b, &grid).unwrap(), 1e-6);
        assert_eq!(tune_lambda(&[a.clone()], &a, &[b.clone()], &b, &[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn tune_lambda_matches_rescan() {
        let mut rng = rng_from_seed(11);
        for _ in 0..20 {
            let truth = random_block(5, &mut rng);
            let noisy = |rng: &mut crate::sampling::RngState, s: f64| {
                &truth + DenseMatrix::from_fn(5, 5, |_, _| rng.random_range(-s..s))
            };
            let fit: Vec<DenseMatrix> = vec![noisy(&mut rng, 0.5), noisy(&mut rng, 0.5)];
            let tune: Vec<DenseMatrix> = vec![noisy(&mut rng, 0.5), noisy(&mut rng, 0.5)];
            let ft = noisy(&mut rng, 0.2);
            let tt = noisy(&mut rng, 0.2);
            let grid = default_lambda_grid();
            let got = tune_lambda(&fit, &ft, &tune, &tt, &grid).unwrap();

            let mut scores = Vec::new();
            for &l in &grid {
                let a = design_matrix(&fit, &ft).unwrap();
                let mut normal = a.transpose() * &a;
                for i in 0..2 {
                    normal[(i, i)] += l;
                }
                let rhs = a.transpose() * DVector::from_column_slice(ft.as_slice());
                let w = normal.try_inverse().unwrap() * rhs;
                let pred = &tune[0] * w[0] + &tune[1] * w[1];
                scores.push((frobenius_norm(&(pred - &tt)), l));
            }
            let best = scores
                .iter()
                .fold(scores[0], |acc, s| if s.0 < acc.0 { *s } else { acc });
            assert_eq!(got, best.1);
        }
    }

    #[test]
    fn tune_lambda_all_singular() {
        let mut rng = rng_from_seed(12);
        let a = random_block(3, &mut rng);
        let t = random_block(3, &mut rng);
        let blocks = [a.clone(), a.clone()];
        assert_eq!(
            tune_lambda(&blocks, &t, &blocks, &t, &[0.0]),
            Err(Error::SingularSystem)
        );
        assert!(tune_lambda(&blocks, &t, &blocks, &t, &[0.0, 1.0]).is_ok());
    }

    #[test]
    fn scheme_validation() {
        assert!(WeightScheme::from_kind(SchemeKind::Exponential, 0.0, &[]).is_err());
        assert!(WeightScheme::from_kind(SchemeKind::Ridge, 0.01, &[]).is_err());
        assert!(WeightScheme::from_kind(SchemeKind::Ridge, 0.01, &[1.0, 0.1]).is_err());
        assert!(WeightScheme::from_kind(SchemeKind::Ridge, 0.01, &default_lambda_grid()).is_ok());
        assert_eq!(default_lambda_grid().len(), 9);
    }
}
