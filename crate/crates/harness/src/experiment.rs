//! Replicated experiments and their CSV/SVG outputs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use boostnys::kernels::{gram_full, standardize_columns};
use boostnys::methods::DEFAULT_CLUSTER_MAX_ITER;
use boostnys::sampling::{rng_from_seed, RngState};
use boostnys::{
    boosting_nystrom, ensemble_nystrom, standard_run, BoostConfig, ClusteringKind, Dataset,
    EnsembleConfig, ErrorTrace, GramMatrix, Method, SchemeKind, WeightScheme,
};
use rayon::prelude::*;

use crate::config::{DataSource, ExperimentSpec};
use crate::data::{generate_gaussian_points, load_csv};
use crate::error::{HarnessError, Result};
use crate::plot::{emit_plot, emit_runtime_plot};
use crate::stats::{mean, sample_std, welch_t_test};

/// Environment variable holding the replicate worker count (0 or unset: all cores).
pub const WORKERS_ENV: &str = "BOOSTNYS_WORKERS";

pub const TRACE_HEADER: &str = "method,replicate,learners,rel_error,seconds";
pub const SUMMARY_HEADER: &str = "method,learners,mean_error,std_error,mean_seconds";
pub const WELCH_HEADER: &str = "method,learners,mean_error,reference_mean_error,t,df,p_value";

/// File names written by [`run_experiment`].
pub const OUTPUT_FILES: [&str; 5] = ["trace.csv", "summary.csv", "welch.csv", "error.svg", "runtime.svg"];

/// Methods are compared against this one in the Welch table.
pub const REFERENCE_METHOD: Method = Method::Ensemble(SchemeKind::Ridge);

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub method: String,
    pub replicate: usize,
    pub learners: usize,
    pub rel_error: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub method: String,
    pub learners: usize,
    pub mean_error: f64,
    pub std_error: f64,
    pub mean_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WelchRow {
    pub method: String,
    pub learners: usize,
    pub mean_error: f64,
    pub reference_mean_error: f64,
    /// `None` when the samples are degenerate (e.g. both constant).
    pub test: Option<crate::stats::WelchTest>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub trace: Vec<TraceRow>,
    pub summary: Vec<SummaryRow>,
    pub welch: Vec<WelchRow>,
}

pub fn ensemble_config(spec: &ExperimentSpec, kind: SchemeKind) -> Result<EnsembleConfig> {
    let cfg = EnsembleConfig {
        m: spec.m,
        k: spec.k,
        p: spec.p_max,
        v1: spec.v1,
        v2: spec.v2,
        scheme: WeightScheme::from_kind(kind, spec.eta, &spec.lambda_grid)?,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn boost_config(
    spec: &ExperimentSpec,
    boost: SchemeKind,
    strong: SchemeKind,
    clustering: ClusteringKind,
) -> Result<BoostConfig> {
    let cfg = BoostConfig {
        m: spec.m,
        k: spec.k,
        p: spec.p_max,
        s: spec.s,
        v1: spec.v1,
        v2: spec.v2,
        boost_scheme: WeightScheme::from_kind(boost, spec.eta, &spec.lambda_grid)?,
        strong_scheme: WeightScheme::from_kind(strong, spec.eta, &spec.lambda_grid)?,
        clustering,
        cluster_max_iter: DEFAULT_CLUSTER_MAX_ITER,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Checks that the spec's shared sizes form a valid configuration for `method`.
pub fn check_method(spec: &ExperimentSpec, method: Method) -> Result<()> {
    match method {
        Method::Standard => {
            if spec.k == 0 || spec.k > spec.m {
                return Err(HarnessError::InvalidSpec(format!(
                    "need m >= k >= 1, got m={} k={}",
                    spec.m, spec.k
                )));
            }
        }
        Method::Ensemble(kind) => {
            ensemble_config(spec, kind)?;
        }
        Method::Boosting {
            boost,
            strong,
            clustering,
        } => {
            boost_config(spec, boost, strong, clustering)?;
        }
    }
    Ok(())
}

/// The generator for one method within one replicate.
///
/// Every method starts from the replicate seed but runs on its own ChaCha
/// stream, selected by an FNV-1a hash of the method name, so methods share
/// the dataset and nothing else.
pub fn method_rng(replicate_seed: u64, method: Method) -> RngState {
    let mut rng = rng_from_seed(replicate_seed);
    rng.set_stream(fnv1a(method.to_string().as_bytes()));
    rng
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Runs one method on a materialized Gram matrix, scoring against it.
pub fn run_method(
    spec: &ExperimentSpec,
    gram: &GramMatrix,
    method: Method,
    rng: &mut RngState,
) -> Result<ErrorTrace> {
    let reference = Some(gram.matrix());
    let trace = match method {
        Method::Standard => standard_run(gram, spec.m, spec.k, rng, reference)?.1,
        Method::Ensemble(kind) => ensemble_nystrom(gram, &ensemble_config(spec, kind)?, rng, reference)?.1,
        Method::Boosting {
            boost,
            strong,
            clustering,
        } => {
            let cfg = boost_config(spec, boost, strong, clustering)?;
            boosting_nystrom(gram, &cfg, rng, reference)?.1
        }
    };
    Ok(trace)
}

/// The dataset for replicate `r`, drawn with seed `spec.seed + r`.
pub fn replicate_data(spec: &ExperimentSpec, loaded: Option<&Dataset>, r: usize) -> Result<Dataset> {
    let mut rng = rng_from_seed(spec.seed.wrapping_add(r as u64));
    let data = match (&spec.data, loaded) {
        (DataSource::Synthetic { n, d }, _) => generate_gaussian_points(*n, *d, &mut rng)?,
        (DataSource::Csv { subsample: Some(count), .. }, Some(full)) => {
            let mut rows = boostnys::sampling::sample_uniform(
                full.n(),
                *count,
                &boostnys::IndexSet::empty(),
                &mut rng,
            )?
            .into_vec();
            rows.sort_unstable();
            full.subset(&rows)?
        }
        (DataSource::Csv { .. }, Some(full)) => full.clone(),
        (DataSource::Csv { path, .. }, None) => load_csv(path, None, &mut rng)?,
    };
    if spec.standardize {
        Ok(standardize_columns(&data)?)
    } else {
        Ok(data)
    }
}

/// Runs every method on every replicate; rows are ordered by method (as
/// listed in the spec), replicate and learner count.
pub fn run_replicates(spec: &ExperimentSpec) -> Result<Vec<TraceRow>> {
    spec.validate()?;
    let loaded = match &spec.data {
        DataSource::Csv { path, .. } => Some(load_csv(path, None, &mut rng_from_seed(spec.seed))?),
        DataSource::Synthetic { .. } => None,
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count()?)
        .build()
        .map_err(|e| HarnessError::InvalidSpec(format!("worker pool: {e}")))?;

    let per_replicate: Vec<Vec<Vec<TraceRow>>> = pool.install(|| {
        (0..spec.replicates)
            .into_par_iter()
            .map(|r| {
                let data = replicate_data(spec, loaded.as_ref(), r)?;
                let gram = GramMatrix::new(gram_full(&spec.kernel, &data))?;
                let seed = spec.seed.wrapping_add(r as u64);
                spec.methods
                    .iter()
                    .map(|&method| {
                        let trace = run_method(spec, &gram, method, &mut method_rng(seed, method))
                            .map_err(|e| match e {
                                HarnessError::Core(source) => HarnessError::Method {
                                    method: method.to_string(),
                                    replicate: r,
                                    source,
                                },
                                other => other,
                            })?;
                        Ok(trace_rows(method, r, &trace, spec.timing))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut rows = Vec::new();
    for m in 0..spec.methods.len() {
        for replicate in &per_replicate {
            rows.extend(replicate[m].iter().cloned());
        }
    }
    Ok(rows)
}

fn worker_count() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(0),
        Ok(v) => v.trim().parse().map_err(|_| {
            HarnessError::InvalidSpec(format!("{WORKERS_ENV} must be a non-negative integer, got {v:?}"))
        }),
    }
}

fn trace_rows(method: Method, replicate: usize, trace: &ErrorTrace, timing: bool) -> Vec<TraceRow> {
    trace
        .points
        .iter()
        .map(|p| TraceRow {
            method: method.to_string(),
            replicate,
            learners: p.learners,
            rel_error: p.rel_error.unwrap_or(f64::NAN),
            seconds: if timing { p.seconds } else { 0.0 },
        })
        .collect()
}

/// Mean and sample standard deviation over replicates per (method, learners),
/// in first-appearance order of methods and ascending learner count.
pub fn summarize(trace: &[TraceRow]) -> Vec<SummaryRow> {
    let mut groups: Vec<(String, usize, Vec<f64>, Vec<f64>)> = Vec::new();
    for row in trace {
        match groups
            .iter_mut()
            .find(|g| g.0 == row.method && g.1 == row.learners)
        {
            Some(g) => {
                g.2.push(row.rel_error);
                g.3.push(row.seconds);
            }
            None => groups.push((row.method.clone(), row.learners, vec![row.rel_error], vec![row.seconds])),
        }
    }
    let order: Vec<String> = groups.iter().fold(Vec::new(), |mut acc, g| {
        if !acc.contains(&g.0) {
            acc.push(g.0.clone());
        }
        acc
    });
    groups.sort_by_key(|g| (order.iter().position(|m| *m == g.0), g.1));
    groups
        .into_iter()
        .map(|(method, learners, errors, seconds)| SummaryRow {
            method,
            learners,
            mean_error: mean(&errors),
            std_error: sample_std(&errors),
            mean_seconds: mean(&seconds),
        })
        .collect()
}

/// One-sided Welch tests of each method's final error against the reference
/// method at `p_max`. Empty when the reference is absent or there is only
/// one replicate.
pub fn welch_table(spec: &ExperimentSpec, trace: &[TraceRow]) -> Vec<WelchRow> {
    let errors_at = |method: &str, learners: usize| -> Vec<f64> {
        trace
            .iter()
            .filter(|r| r.method == method && r.learners == learners)
            .map(|r| r.rel_error)
            .collect()
    };
    let reference_name = REFERENCE_METHOD.to_string();
    if spec.replicates < 2 || !spec.methods.contains(&REFERENCE_METHOD) {
        return Vec::new();
    }
    let reference = errors_at(&reference_name, spec.p_max);
    spec.methods
        .iter()
        .filter(|&&m| m != REFERENCE_METHOD)
        .map(|&m| {
            let learners = if m == Method::Standard { 1 } else { spec.p_max };
            let name = m.to_string();
            let errors = errors_at(&name, learners);
            WelchRow {
                method: name,
                learners,
                mean_error: mean(&errors),
                reference_mean_error: mean(&reference),
                test: welch_t_test(&errors, &reference).ok(),
            }
        })
        .collect()
}

pub fn trace_csv(rows: &[TraceRow]) -> String {
    let mut out = format!("{TRACE_HEADER}\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.method, r.replicate, r.learners, r.rel_error, r.seconds);
    }
    out
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.method, r.learners, r.mean_error, r.std_error, r.mean_seconds
        );
    }
    out
}

pub fn welch_csv(rows: &[WelchRow]) -> String {
    let mut out = format!("{WELCH_HEADER}\n");
    for r in rows {
        let _ = write!(out, "{},{},{},{},", r.method, r.learners, r.mean_error, r.reference_mean_error);
        let _ = match r.test {
            Some(t) => writeln!(out, "{},{},{}", t.t, t.df, t.p_value),
            None => writeln!(out, "NA,NA,NA"),
        };
    }
    out
}

/// Parses a trace CSV as written by [`trace_csv`].
pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(TRACE_HEADER) {
        return Err(HarnessError::SchemaMismatch("trace header".into()));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let bad = || HarnessError::SchemaMismatch(format!("trace line {}: {line:?}", i + 2));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(bad());
            }
            Ok(TraceRow {
                method: f[0].to_string(),
                replicate: f[1].parse().map_err(|_| bad())?,
                learners: f[2].parse().map_err(|_| bad())?,
                rel_error: f[3].parse().map_err(|_| bad())?,
                seconds: f[4].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

/// Runs the experiment and writes [`OUTPUT_FILES`] into `out_dir`.
///
/// Nothing is written unless every run succeeds; if a write fails, files
/// already written by this call are removed.
pub fn run_experiment(spec: &ExperimentSpec, out_dir: &Path) -> Result<ExperimentResult> {
    let trace = run_replicates(spec)?;
    let summary = summarize(&trace);
    let welch = welch_table(spec, &trace);

    let summary_text = summary_csv(&summary);
    let contents = [
        trace_csv(&trace),
        summary_text.clone(),
        welch_csv(&welch),
        emit_plot(&summary_text)?,
        emit_runtime_plot(&summary_text)?,
    ];
    std::fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let mut written: Vec<PathBuf> = Vec::new();
    for (name, text) in OUTPUT_FILES.iter().zip(&contents) {
        let path = out_dir.join(name);
        if let Err(e) = std::fs::write(&path, text) {
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            return Err(HarnessError::io(path, e));
        }
        written.push(path);
    }
    Ok(ExperimentResult { trace, summary, welch })
}
