//! Optimization-quality metrics: approximation ratio and optimal-subspace overlap.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub approx_ratio: f64,
    pub overlap: f64,
}

/// `(c_max - <H>) / (c_max - c_min)`: 1 at the ground energy, 0 at the top.
pub fn approximation_ratio(expectation: f64, c_min: f64, c_max: f64) -> Result<f64> {
    if !(c_max > c_min) {
        return Err(Error::DegenerateSpectrum(c_min));
    }
    Ok((c_max - expectation) / (c_max - c_min))
}

/// Total probability on the given basis indices.
pub fn overlap(amplitudes: &[Complex64], optimal_indices: &[u64]) -> Result<f64> {
    if optimal_indices.is_empty() {
        return Err(Error::Empty("optimal set"));
    }
    optimal_indices
        .iter()
        .map(|&i| {
            amplitudes
                .get(i as usize)
                .map(|a| a.norm_sqr())
                .ok_or(Error::Index { index: i as usize, len: amplitudes.len() })
        })
        .sum()
}

/// Least-squares slope of `values` against their index.
pub fn trend_slope(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    if values.len() < 2 {
        return 0.0;
    }
    let mean_x = (n - 1.0) / 2.0;
    let mean_y = values.iter().sum::<f64>() / n;
    let (num, den) = values.iter().enumerate().fold((0.0, 0.0), |(num, den), (i, &y)| {
        let dx = i as f64 - mean_x;
        (num + dx * (y - mean_y), den + dx * dx)
    });
    num / den
}
