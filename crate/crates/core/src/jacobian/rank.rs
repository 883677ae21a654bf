use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// Threshold below which a singular value counts as zero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RankTolerance {
    /// `max(rows, cols) * sigma_max * eps * 100`.
    #[default]
    Default,
    Absolute(f64),
}

impl RankTolerance {
    pub const DEFAULT_FACTOR: f64 = 100.0;

    pub fn threshold(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        match *self {
            RankTolerance::Default => {
                rows.max(cols) as f64 * sigma_max * f64::EPSILON * Self::DEFAULT_FACTOR
            }
            RankTolerance::Absolute(t) => t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankReport {
    pub rank: usize,
    pub threshold: f64,
    pub sigma_max: f64,
    /// Smallest singular value kept (0 when the rank is zero).
    pub sigma_min_kept: f64,
}

/// Numerical rank from the singular values.
pub fn numeric_rank(matrix: &DMatrix<f64>, policy: RankTolerance) -> Result<RankReport> {
    if matrix.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    if matrix.is_empty() {
        return Ok(RankReport {
            rank: 0,
            threshold: 0.0,
            sigma_max: 0.0,
            sigma_min_kept: 0.0,
        });
    }
    let sv = matrix.clone().singular_values();
    let sigma_max = sv.iter().copied().fold(0.0, f64::max);
    let threshold = policy.threshold(matrix.nrows(), matrix.ncols(), sigma_max);
    let kept: Vec<f64> = sv.iter().copied().filter(|&s| s > threshold).collect();
    Ok(RankReport {
        rank: kept.len(),
        threshold,
        sigma_max,
        sigma_min_kept: kept.iter().copied().fold(f64::INFINITY, f64::min).min(sigma_max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_zero() {
        let id = DMatrix::<f64>::identity(4, 4);
        assert_eq!(numeric_rank(&id, RankTolerance::Default).unwrap().rank, 4);
        let z = DMatrix::<f64>::zeros(5, 5);
        assert_eq!(numeric_rank(&z, RankTolerance::Default).unwrap().rank, 0);
        let empty = DMatrix::<f64>::zeros(0, 0);
        assert_eq!(numeric_rank(&empty, RankTolerance::Default).unwrap().rank, 0);
    }

    #[test]
    fn rank_deficient_product() {
        let a = DMatrix::from_fn(6, 2, |i, j| (i * 3 + j + 1) as f64);
        let b = DMatrix::from_fn(2, 5, |i, j| ((i + 2) * (j + 1)) as f64 - 3.0);
        assert_eq!(numeric_rank(&(a * b), RankTolerance::Default).unwrap().rank, 2);
    }

    #[test]
    fn rejects_nan() {
        let mut m = DMatrix::<f64>::identity(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(matches!(numeric_rank(&m, RankTolerance::Default), Err(Error::NonFinite)));
    }

    #[test]
    fn absolute_threshold_is_respected() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1e-3, 1e-9]));
        assert_eq!(numeric_rank(&m, RankTolerance::Default).unwrap().rank, 3);
        assert_eq!(numeric_rank(&m, RankTolerance::Absolute(1e-6)).unwrap().rank, 2);
    }
}
