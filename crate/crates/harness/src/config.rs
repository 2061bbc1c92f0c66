//! Experiment files: flat `key = value` lines, `#` starts a comment.
//!
//! ```text
//! data = synthetic        # or csv
//! n = 1000                # synthetic only
//! d = 2                   # synthetic only
//! path = mnist.csv        # csv only, relative to the experiment file
//! subsample = 4000        # csv only, optional
//! standardize = false
//! kernel = gaussian       # or linear
//! sigma = 1
//! methods = URB-mean, RRB-mean, ensemble-R
//! m = 10
//! k = 10
//! p_max = 10
//! s = 100
//! v1 = 20
//! v2 = 20
//! eta = 0.01
//! lambda_grid = 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1, 10, 100
//! replicates = 20
//! seed = 1
//! timing = true           # false writes zero seconds for byte-stable output
//! ```
//!
//! `data` and `methods` are required; the rest default to the values above.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use boostnys::weighting::{default_lambda_grid, DEFAULT_ETA};
use boostnys::{KernelSpec, Method};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Synthetic { n: usize, d: usize },
    Csv { path: PathBuf, subsample: Option<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub data: DataSource,
    pub standardize: bool,
    pub kernel: KernelSpec,
    pub methods: Vec<Method>,
    pub m: usize,
    pub k: usize,
    pub p_max: usize,
    pub s: usize,
    pub v1: usize,
    pub v2: usize,
    pub eta: f64,
    pub lambda_grid: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
    pub timing: bool,
}

impl ExperimentSpec {
    /// The synthetic setting of the accuracy study, with the given methods.
    pub fn synthetic(n: usize, d: usize, methods: Vec<Method>) -> Self {
        Self {
            data: DataSource::Synthetic { n, d },
            standardize: false,
            kernel: KernelSpec::Gaussian { sigma: 1.0 },
            methods,
            m: 10,
            k: 10,
            p_max: 10,
            s: 100,
            v1: 20,
            v2: 20,
            eta: DEFAULT_ETA,
            lambda_grid: default_lambda_grid(),
            replicates: 1,
            seed: 0,
            timing: true,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Parses an experiment file; relative CSV paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut entries: Vec<(usize, String, String)> = Vec::new();
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(config_err(line, format!("expected `key = value`, got {content:?}")));
            };
            let key = key.trim().to_string();
            if !seen.insert(key.clone()) {
                return Err(config_err(line, format!("duplicate key {key:?}")));
            }
            entries.push((line, key, value.trim().to_string()));
        }
        let get = |key: &str| entries.iter().find(|e| e.1 == key).map(|e| (e.0, e.2.as_str()));

        let mut spec = Self::synthetic(0, 0, Vec::new());
        let (data_line, data_kind) = get("data").ok_or_else(|| missing("data"))?;
        let allowed_for_data: &[&str] = match data_kind {
            "synthetic" => {
                spec.data = DataSource::Synthetic {
                    n: required(&get, "n")?,
                    d: required(&get, "d")?,
                };
                &["path", "subsample"]
            }
            "csv" => {
                let (_, p) = get("path").ok_or_else(|| missing("path"))?;
                spec.data = DataSource::Csv {
                    path: base.join(p),
                    subsample: optional(&get, "subsample")?,
                };
                &["n", "d"]
            }
            other => return Err(config_err(data_line, format!("unknown data source {other:?}"))),
        };
        if let Some(&(line, ref key, _)) = entries.iter().find(|e| allowed_for_data.contains(&e.1.as_str())) {
            return Err(config_err(line, format!("{key} does not apply to data = {data_kind}")));
        }

        let (methods_line, methods) = get("methods").ok_or_else(|| missing("methods"))?;
        spec.methods = methods
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| Method::from_str(s).map_err(|e| config_err(methods_line, e.to_string())))
            .collect::<Result<_>>()?;

        if let Some(v) = optional::<bool>(&get, "standardize")? {
            spec.standardize = v;
        }
        if let Some(v) = optional::<bool>(&get, "timing")? {
            spec.timing = v;
        }
        let sigma: Option<f64> = optional(&get, "sigma")?;
        spec.kernel = match get("kernel").map(|e| e.1).unwrap_or("gaussian") {
            "gaussian" => KernelSpec::gaussian(sigma.unwrap_or(1.0))?,
            "linear" if sigma.is_none() => KernelSpec::Linear,
            "linear" => return Err(config_err(get("sigma").unwrap().0, "sigma does not apply to the linear kernel".into())),
            other => return Err(config_err(get("kernel").unwrap().0, format!("unknown kernel {other:?}"))),
        };
        for (key, slot) in [
            ("m", &mut spec.m),
            ("k", &mut spec.k),
            ("p_max", &mut spec.p_max),
            ("s", &mut spec.s),
            ("v1", &mut spec.v1),
            ("v2", &mut spec.v2),
            ("replicates", &mut spec.replicates),
        ] {
            if let Some(v) = optional(&get, key)? {
                *slot = v;
            }
        }
        if let Some(v) = optional(&get, "eta")? {
            spec.eta = v;
        }
        if let Some(v) = optional(&get, "seed")? {
            spec.seed = v;
        }
        if let Some((line, grid)) = get("lambda_grid") {
            spec.lambda_grid = grid
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|e| config_err(line, format!("lambda_grid: {e}"))))
                .collect::<Result<_>>()?;
        }

        const KNOWN: &[&str] = &[
            "data", "n", "d", "path", "subsample", "standardize", "kernel", "sigma", "methods", "m",
            "k", "p_max", "s", "v1", "v2", "eta", "lambda_grid", "replicates", "seed", "timing",
        ];
        if let Some((line, key, _)) = entries.iter().find(|e| !KNOWN.contains(&e.1.as_str())) {
            return Err(config_err(*line, format!("unknown key {key:?}")));
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(HarnessError::InvalidSpec("no methods listed".into()));
        }
        if self.replicates == 0 {
            return Err(HarnessError::InvalidSpec("replicates must be at least 1".into()));
        }
        if let DataSource::Synthetic { n, d } = self.data {
            if n == 0 || d == 0 {
                return Err(HarnessError::InvalidSpec(format!("synthetic shape {n}x{d}")));
            }
        }
        for method in &self.methods {
            crate::experiment::check_method(self, *method)?;
        }
        Ok(())
    }
}

fn config_err(line: usize, message: String) -> HarnessError {
    HarnessError::Config { line, message }
}

fn missing(key: &str) -> HarnessError {
    HarnessError::InvalidSpec(format!("missing required key {key:?}"))
}

fn optional<'a, T: FromStr>(
    get: &impl Fn(&str) -> Option<(usize, &'a str)>,
    key: &str,
) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match get(key) {
        None => Ok(None),
        Some((line, v)) => v
            .parse::<T>()
            .map(Some)
            .map_err(|e| config_err(line, format!("{key}: {e}"))),
    }
}

fn required<'a, T: FromStr>(get: &impl Fn(&str) -> Option<(usize, &'a str)>, key: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    optional(get, key)?.ok_or_else(|| missing(key))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_synthetic_file() {
        let text = "\
# synthetic accuracy setting
data = synthetic
n = 1000
d = 2
kernel = gaussian
sigma = 1
methods = URB-mean, RRB-mean , ensemble-R
m = 10
k = 10
s = 100
v1 = 20
v2 = 20
eta = 0.01
replicates = 20
seed = 7
timing = false
";
        let spec = ExperimentSpec::parse(text, Path::new(".")).unwrap();
        assert_eq!(spec.data, DataSource::Synthetic { n: 1000, d: 2 });
        assert_eq!(spec.methods.len(), 3);
        assert_eq!(spec.methods[2].to_string(), "ensemble-R");
        assert_eq!((spec.replicates, spec.seed, spec.timing), (20, 7, false));
        assert_eq!(spec.lambda_grid, default_lambda_grid());
    }

    #[test]
    fn csv_paths_resolve_against_base() {
        let text = "data = csv\npath = data/x.csv\nsubsample = 40\nmethods = standard\nstandardize = true\nsigma = 5";
        let spec = ExperimentSpec::parse(text, Path::new("/tmp/exp")).unwrap();
        assert_eq!(
            spec.data,
            DataSource::Csv {
                path: PathBuf::from("/tmp/exp/data/x.csv"),
                subsample: Some(40)
            }
        );
        assert!(spec.standardize);
        assert_eq!(spec.kernel, KernelSpec::Gaussian { sigma: 5.0 });
    }

    #[test]
    fn rejects_bad_files() {
        let base = Path::new(".");
        let cases = [
            "methods = standard",
            "data = synthetic\nn = 10\nd = 1",
            "data = synthetic\nn = 10\nd = 1\nmethods = XZB-mean",
            "data = synthetic\nn = 10\nd = 1\nmethods = standard\nbogus = 1",
            "data = synthetic\nn = 10\nd = 1\nmethods = standard\nm = 3\nm = 4",
            "data = synthetic\nn = 10\nd = 1\nmethods = standard\nreplicates = 0",
            "data = synthetic\nn = 10\nd = 1\nmethods = standard\npath = x.csv",
            "data = synthetic\nn = 10\nd = 1\nmethods = standard\nsigma = -1",
            "data = synthetic\nn = 10\nd = 1\nmethods = standard\nkernel = linear\nsigma = 1",
            "data = synthetic\nn = ten\nd = 1\nmethods = standard",
            "data = synthetic\nn = 10\nd = 1\nmethods = URB-mean\nm = 10\nk = 11",
            "data = synthetic\nn = 10\nd = 1\nmethods = standard\njust text",
        ];
        for text in cases {
            assert!(ExperimentSpec::parse(text, base).is_err(), "{text}");
        }
    }
}
