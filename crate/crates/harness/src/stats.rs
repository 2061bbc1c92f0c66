//! Replicate statistics.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{HarnessError, Result};

pub use boostnys::linalg::relative_error;

/// Welch's unequal-variance t-test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchTest {
    pub t: f64,
    /// Welch–Satterthwaite degrees of freedom.
    pub df: f64,
    /// One-sided p-value for the alternative `mean(a) < mean(b)`.
    pub p_value: f64,
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample standard deviation; zero for fewer than two values.
pub fn sample_std(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64).sqrt()
}

pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<WelchTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(HarnessError::DegenerateSamples(format!(
            "need at least two values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(HarnessError::DegenerateSamples("non-finite value".into()));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let va = sample_std(a).powi(2) / na;
    let vb = sample_std(b).powi(2) / nb;
    let se2 = va + vb;
    if se2 <= 0.0 {
        return Err(HarnessError::DegenerateSamples("both samples have zero variance".into()));
    }
    let diff = mean(a) - mean(b);
    let t = diff / se2.sqrt();
    let df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    let p_value = if diff == 0.0 {
        0.5
    } else {
        let dist = StudentsT::new(0.0, 1.0, df)
            .map_err(|e| HarnessError::DegenerateSamples(e.to_string()))?;
        dist.cdf(t)
    };
    Ok(WelchTest { t, df, p_value })
}
