//! Standard, ensemble and boosting Nyström drivers.
//!
//! Every driver returns the fitted [`MixtureModel`] together with an
//! [`ErrorTrace`] holding one point per learner count. Trace errors are
//! scored against a materialized Gram matrix when one is supplied; scoring
//! time is excluded from the recorded wall-clock.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::kernels::KernelAccess;
use crate::linalg::{frobenius_norm, DenseMatrix};
use crate::nystrom::{standard_nystrom, weighted_block, MixtureModel, NystromFactor};
use crate::sampling::{
    kmeans, kmedoids_pam, kmedoids_sf, nearest_columns, sample_uniform, Centers, IndexSet,
    RngState,
};
use crate::weighting::{uniform_weights, SchemeKind, ValidationBlocks, WeightScheme};

pub const DEFAULT_CLUSTER_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClusteringKind {
    KMeans,
    Pam,
    Sf,
}

impl ClusteringKind {
    pub fn suffix(self) -> &'static str {
        match self {
            ClusteringKind::KMeans => "mean",
            ClusteringKind::Pam => "med",
            ClusteringKind::Sf => "SF",
        }
    }
}

/// Parses `XYB-clustering` names such as `URB-mean` or `RRB-med`.
pub fn parse_method_name(name: &str) -> Result<(SchemeKind, SchemeKind, ClusteringKind)> {
    let malformed = || Error::MalformedName(name.to_string());
    let (head, tail) = name.split_once('-').ok_or_else(malformed)?;
    let mut letters = head.chars();
    let (Some(x), Some(y), Some('B'), None) =
        (letters.next(), letters.next(), letters.next(), letters.next())
    else {
        return Err(malformed());
    };
    let boost = SchemeKind::from_letter(x).ok_or_else(malformed)?;
    let strong = SchemeKind::from_letter(y).ok_or_else(malformed)?;
    let clustering = match tail {
        "mean" => ClusteringKind::KMeans,
        "med" => ClusteringKind::Pam,
        "SF" => ClusteringKind::Sf,
        _ => return Err(malformed()),
    };
    Ok((boost, strong, clustering))
}

/// A runnable method, named as in experiment files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Standard,
    Ensemble(SchemeKind),
    Boosting {
        boost: SchemeKind,
        strong: SchemeKind,
        clustering: ClusteringKind,
    },
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "standard" {
            return Ok(Method::Standard);
        }
        if let Some(letter) = s.strip_prefix("ensemble-") {
            let mut chars = letter.chars();
            if let (Some(c), None) = (chars.next(), chars.next()) {
                if let Some(kind) = SchemeKind::from_letter(c) {
                    return Ok(Method::Ensemble(kind));
                }
            }
            return Err(Error::MalformedName(s.to_string()));
        }
        let (boost, strong, clustering) = parse_method_name(s)?;
        Ok(Method::Boosting {
            boost,
            strong,
            clustering,
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Standard => write!(f, "standard"),
            Method::Ensemble(kind) => write!(f, "ensemble-{}", kind.letter()),
            Method::Boosting {
                boost,
                strong,
                clustering,
            } => write!(
                f,
                "{}{}B-{}",
                boost.letter(),
                strong.letter(),
                clustering.suffix()
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub learners: usize,
    /// Relative Frobenius error against the reference, when one was given.
    pub rel_error: Option<f64>,
    /// Driver wall-clock up to and including this learner.
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorTrace {
    pub points: Vec<TracePoint>,
}

impl ErrorTrace {
    pub fn last(&self) -> Option<&TracePoint> {
        self.points.last()
    }

    pub fn at(&self, learners: usize) -> Option<&TracePoint> {
        self.points.iter().find(|p| p.learners == learners)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub m: usize,
    pub k: usize,
    pub p: usize,
    pub v1: usize,
    pub v2: usize,
    pub scheme: WeightScheme,
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.m {
            return Err(Error::InvalidConfig(format!(
                "need m >= k >= 1, got m={} k={}",
                self.m, self.k
            )));
        }
        if self.p == 0 {
            return Err(Error::InvalidConfig("p must be at least 1".into()));
        }
        if self.scheme.needs_validation() && (self.v1 == 0 || self.v2 == 0) {
            return Err(Error::InvalidConfig("v1 and v2 must be at least 1".into()));
        }
        self.scheme.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoostConfig {
    pub m: usize,
    pub k: usize,
    pub p: usize,
    pub s: usize,
    pub v1: usize,
    pub v2: usize,
    pub boost_scheme: WeightScheme,
    pub strong_scheme: WeightScheme,
    pub clustering: ClusteringKind,
    pub cluster_max_iter: usize,
}

impl BoostConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.m {
            return Err(Error::InvalidConfig(format!(
                "need m >= k >= 1, got m={} k={}",
                self.m, self.k
            )));
        }
        if self.p == 0 {
            return Err(Error::InvalidConfig("p must be at least 1".into()));
        }
        if self.s < self.m {
            return Err(Error::InvalidConfig(format!(
                "s={} must be at least m={}",
                self.s, self.m
            )));
        }
        if self.v1 == 0 || self.v2 == 0 {
            return Err(Error::InvalidConfig("v1 and v2 must be at least 1".into()));
        }
        self.boost_scheme.validate()?;
        self.strong_scheme.validate()
    }

    /// Columns that must be available: every learner, V₁, V₂ and the last V.
    pub fn columns_needed(&self) -> usize {
        let last_v = if self.p > 1 { self.s } else { 0 };
        self.p * self.m + self.v1 + self.v2 + last_v - if self.p > 1 { self.m } else { 0 }
    }
}

/// Accumulates driver wall-clock while excluding scoring.
struct Stopwatch {
    total: Duration,
    since: Instant,
}

impl Stopwatch {
    fn start() -> Self {
        Self {
            total: Duration::ZERO,
            since: Instant::now(),
        }
    }

    fn pause(&mut self) -> f64 {
        self.total += self.since.elapsed();
        self.total.as_secs_f64()
    }

    fn resume(&mut self) {
        self.since = Instant::now();
    }
}

/// Bytes of cached learner reconstructions kept by the trace scorer.
const SCORER_CACHE_BYTES: usize = 256 << 20;

/// Relative error of weighted learner prefixes against a materialized `G`.
struct TraceScorer<'a> {
    reference: &'a DenseMatrix,
    norm: f64,
    cache: Vec<DenseMatrix>,
}

impl<'a> TraceScorer<'a> {
    fn new(reference: &'a DenseMatrix) -> Result<Self> {
        let norm = frobenius_norm(reference);
        if norm == 0.0 {
            return Err(Error::ZeroTarget);
        }
        Ok(Self {
            reference,
            norm,
            cache: Vec::new(),
        })
    }

    fn score(&mut self, learners: &[NystromFactor], weights: &[f64]) -> Result<f64> {
        let n = self.reference.nrows();
        let per = n * n * std::mem::size_of::<f64>();
        let mut diff = -self.reference.clone();
        for (i, (learner, &w)) in learners.iter().zip(weights).enumerate() {
            if learner.n() != n {
                return Err(Error::DimensionMismatch(learner.n(), n));
            }
            if i < self.cache.len() {
                diff += &self.cache[i] * w;
                continue;
            }
            let full = learner.reconstruct_full_limited(usize::MAX)?;
            diff += &full * w;
            if i == self.cache.len() && (i + 1) * per <= SCORER_CACHE_BYTES {
                self.cache.push(full);
            }
        }
        Ok(frobenius_norm(&diff) / self.norm)
    }
}

fn build_learner<K: KernelAccess + ?Sized>(
    kernel: &K,
    indices: IndexSet,
    k: usize,
) -> Result<NystromFactor> {
    let c = kernel.columns(&indices)?;
    standard_nystrom(c, indices, k)
}

fn require_columns(needed: usize, available: usize) -> Result<()> {
    if needed > available {
        return Err(Error::NotEnoughColumns { needed, available });
    }
    Ok(())
}

/// A single Nyström learner from `m` uniformly drawn columns.
pub fn standard_run<K: KernelAccess + ?Sized>(
    kernel: &K,
    m: usize,
    k: usize,
    rng: &mut RngState,
    reference: Option<&DenseMatrix>,
) -> Result<(MixtureModel, ErrorTrace)> {
    let n = kernel.size();
    require_columns(m, n)?;
    let mut scorer = reference.map(TraceScorer::new).transpose()?;
    let mut clock = Stopwatch::start();
    let indices = sample_uniform(n, m, &IndexSet::empty(), rng)?;
    let learner = build_learner(kernel, indices, k)?;
    let seconds = clock.pause();
    let rel_error = match scorer.as_mut() {
        Some(s) => Some(s.score(std::slice::from_ref(&learner), &[1.0])?),
        None => None,
    };
    let trace = ErrorTrace {
        points: vec![TracePoint {
            learners: 1,
            rel_error,
            seconds,
        }],
    };
    Ok((MixtureModel::new(vec![learner], vec![1.0])?, trace))
}

/// Ensemble Nyström: `p` independent learners from `m·p` uniform columns,
/// split in draw order, combined with weights from `cfg.scheme`.
///
/// The trace reports the re-weighted mixture of the first `j` learners for
/// every `j ≤ p`. Validation columns are drawn outside the `m·p` budget.
pub fn ensemble_nystrom<K: KernelAccess + ?Sized>(
    kernel: &K,
    cfg: &EnsembleConfig,
    rng: &mut RngState,
    reference: Option<&DenseMatrix>,
) -> Result<(MixtureModel, ErrorTrace)> {
    cfg.validate()?;
    let n = kernel.size();
    let validation_cols = if cfg.scheme.needs_validation() {
        cfg.v1 + cfg.v2
    } else {
        0
    };
    require_columns(cfg.m * cfg.p + validation_cols, n)?;
    let mut scorer = reference.map(TraceScorer::new).transpose()?;

    let mut clock = Stopwatch::start();
    let all = sample_uniform(n, cfg.m * cfg.p, &IndexSet::empty(), rng)?;
    let mut validation = if cfg.scheme.needs_validation() {
        Some(draw_validation(kernel, n, cfg.v1, cfg.v2, &all, rng)?)
    } else {
        None
    };

    let mut learners = Vec::with_capacity(cfg.p);
    let mut weights = Vec::new();
    let mut trace = ErrorTrace::default();
    for chunk in all.chunks(cfg.m) {
        let indices = IndexSet::new(chunk.to_vec(), n)?;
        let learner = build_learner(kernel, indices, cfg.k)?;
        if let Some(v) = validation.as_mut() {
            v.push(&learner)?;
        }
        learners.push(learner);
        weights = fit_weights(&cfg.scheme, validation.as_ref(), learners.len())?;
        let seconds = clock.pause();
        let rel_error = match scorer.as_mut() {
            Some(s) => Some(s.score(&learners, &weights)?),
            None => None,
        };
        trace.points.push(TracePoint {
            learners: learners.len(),
            rel_error,
            seconds,
        });
        clock.resume();
    }
    Ok((MixtureModel::new(learners, weights)?, trace))
}

fn fit_weights(
    scheme: &WeightScheme,
    validation: Option<&ValidationBlocks>,
    count: usize,
) -> Result<Vec<f64>> {
    match (scheme, validation) {
        (WeightScheme::Uniform, _) => uniform_weights(count),
        (_, Some(v)) => v.fit(scheme, count),
        (_, None) => Err(Error::InvalidConfig(
            "weight scheme requires validation columns".into(),
        )),
    }
}

fn draw_validation<K: KernelAccess + ?Sized>(
    kernel: &K,
    n: usize,
    v1: usize,
    v2: usize,
    exclude: &IndexSet,
    rng: &mut RngState,
) -> Result<ValidationBlocks> {
    let set1 = sample_uniform(n, v1, exclude, rng)?;
    let set2 = sample_uniform(n, v2, &exclude.union(&set1)?, rng)?;
    let t1 = kernel.block(&set1, &set1)?;
    let t2 = kernel.block(&set2, &set2)?;
    Ok(ValidationBlocks::new(set1, set2, t1, t2))
}

/// Picks `m` local column indices of the residual block.
pub fn select_columns(
    kind: ClusteringKind,
    residual: &DenseMatrix,
    m: usize,
    rng: &mut RngState,
    max_iter: usize,
) -> Result<Vec<usize>> {
    let clustering = match kind {
        ClusteringKind::KMeans => kmeans(residual, m, rng, max_iter)?,
        ClusteringKind::Pam => kmedoids_pam(residual, m, max_iter)?,
        ClusteringKind::Sf => kmedoids_sf(residual, m, max_iter)?,
    };
    match clustering.centers {
        Centers::Means(centers) => {
            Ok(nearest_columns(&centers, residual, &IndexSet::empty())?.into_vec())
        }
        Centers::Medoids(medoids) => Ok(medoids),
    }
}

/// Boosting Nyström.
///
/// Learner 1 comes from `m` uniform columns; `V₁` and `V₂` are then drawn
/// once from the remaining columns. Each later learner is built from the
/// columns selected by clustering the residual `G[V,V] − Ḡ[V,V]` of the
/// current intermediate mixture on a freshly drawn `V` of `s` columns
/// disjoint from all learner columns and `V₁ ∪ V₂`. The model holds exactly
/// `p` learners combined with the strong-step weights.
pub fn boosting_nystrom<K: KernelAccess + ?Sized>(
    kernel: &K,
    cfg: &BoostConfig,
    rng: &mut RngState,
    reference: Option<&DenseMatrix>,
) -> Result<(MixtureModel, ErrorTrace)> {
    cfg.validate()?;
    let n = kernel.size();
    require_columns(cfg.columns_needed(), n)?;
    let mut scorer = reference.map(TraceScorer::new).transpose()?;

    let mut clock = Stopwatch::start();
    let first = sample_uniform(n, cfg.m, &IndexSet::empty(), rng)?;
    let mut validation = draw_validation(kernel, n, cfg.v1, cfg.v2, &first, rng)?;
    let reserved = validation.v1().union(validation.v2())?;

    let mut used: Vec<usize> = first.to_vec();
    let learner = build_learner(kernel, first, cfg.k)?;
    validation.push(&learner)?;
    let mut learners = vec![learner];
    let mut trace = ErrorTrace::default();

    let mut strong = validation.fit(&cfg.strong_scheme, 1)?;
    let seconds = clock.pause();
    let rel_error = match scorer.as_mut() {
        Some(s) => Some(s.score(&learners, &strong)?),
        None => None,
    };
    trace.points.push(TracePoint {
        learners: 1,
        rel_error,
        seconds,
    });
    clock.resume();

    while learners.len() < cfg.p {
        // (a) intermediate weights over the learners built so far
        let mu = validation.fit(&cfg.boost_scheme, learners.len())?;
        // (b) fresh V outside learner columns and V₁ ∪ V₂
        let mut excluded = used.clone();
        excluded.extend_from_slice(&reserved);
        let v = sample_uniform(n, cfg.s, &IndexSet::new(excluded, n)?, rng)?;
        // (c) residual on the square block G[V, V]
        let residual = kernel.block(&v, &v)? - weighted_block(&learners, &mu, &v, &v)?;
        // (d) cluster the residual columns and map back to global indices
        let local = select_columns(
            cfg.clustering,
            &residual,
            cfg.m,
            rng,
            cfg.cluster_max_iter,
        )?;
        let chosen = v.pick(&local)?;
        // (e) next weak learner
        used.extend_from_slice(&chosen);
        let learner = build_learner(kernel, chosen, cfg.k)?;
        validation.push(&learner)?;
        learners.push(learner);

        strong = validation.fit(&cfg.strong_scheme, learners.len())?;
        let seconds = clock.pause();
        let rel_error = match scorer.as_mut() {
            Some(s) => Some(s.score(&learners, &strong)?),
            None => None,
        };
        trace.points.push(TracePoint {
            learners: learners.len(),
            rel_error,
            seconds,
        });
        clock.resume();
    }

    Ok((MixtureModel::new(learners, strong)?, trace))
}
