//! Synthetic point clouds and CSV ingestion.

use std::path::Path;

use boostnys::sampling::{sample_uniform, IndexSet, RngState};
use boostnys::Dataset;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{HarnessError, Result};

/// `n` i.i.d. standard-normal points in `d` dimensions.
///
/// Draws come from `rand_distr::StandardNormal` (ziggurat), filled row by row.
pub fn generate_gaussian_points(n: usize, d: usize, rng: &mut RngState) -> Result<Dataset> {
    let values: Vec<f64> = (0..n * d).map(|_| rng.sample(StandardNormal)).collect();
    Ok(Dataset::from_rows(n, d, values)?)
}

/// Reads a comma-separated numeric table.
///
/// A first row containing any non-numeric cell is treated as a header and
/// skipped. With `subsample`, that many distinct rows are drawn uniformly
/// and returned in file order.
pub fn load_csv(path: &Path, subsample: Option<usize>, rng: &mut RngState) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let data = parse_csv(file, path)?;
    match subsample {
        None => Ok(data),
        Some(count) => {
            let mut rows = sample_uniform(data.n(), count, &IndexSet::empty(), rng)?.into_vec();
            rows.sort_unstable();
            Ok(data.subset(&rows)?)
        }
    }
}

fn parse_csv<R: std::io::Read>(source: R, path: &Path) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let mut width = None;
    let mut values = Vec::new();
    let mut n = 0;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line()) as usize;
        let parsed: Vec<Option<f64>> = record.iter().map(|c| c.parse::<f64>().ok()).collect();
        if i == 0 && parsed.iter().any(Option::is_none) {
            continue;
        }
        let expected = *width.get_or_insert(parsed.len());
        if parsed.len() != expected {
            return Err(HarnessError::RaggedRows {
                row: line,
                expected,
                found: parsed.len(),
            });
        }
        for (col, cell) in parsed.into_iter().enumerate() {
            match cell {
                Some(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(HarnessError::NonNumericCell {
                        row: line,
                        col: col + 1,
                        value: record[col].to_string(),
                    })
                }
            }
        }
        n += 1;
    }
    match width {
        Some(d) if n > 0 => Ok(Dataset::from_rows(n, d, values)?),
        _ => Err(HarnessError::EmptyData(path.to_path_buf())),
    }
}

fn csv_error(path: &Path, e: csv::Error) -> HarnessError {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => HarnessError::io(path, source),
        other => HarnessError::io(
            path,
            std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{other:?}")),
        ),
    }
}

/// Writes a dataset as headerless CSV with round-trip float formatting.
pub fn write_csv(data: &Dataset, path: &Path) -> Result<()> {
    let mut out = String::with_capacity(data.n() * data.d() * 20);
    for i in 0..data.n() {
        let row: Vec<String> = data.point(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| HarnessError::io(path, e))
}
