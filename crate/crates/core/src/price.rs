//! The input-share matrix, its Perron eigenpair, and the uniform profit rate
//! with relative price coefficients.

use crate::economy::Validated;
use crate::error::{Error, Result};
use crate::numeric::{dominant_eigenpair, DenseMatrix, EIGEN_MAX_ITER, EIGEN_TOL};
use crate::quantity::augmented_matrix;
use crate::value::{LaborValues, UnitValueTable};

/// The price eigenproblem: shares matrix M, its Perron root, the uniform
/// profit rate, and the positive unit eigenvector of relative prices.
#[derive(Debug, Clone)]
pub struct PriceEigenSystem {
    /// M with `shares[(j, i)] = inputs[(i, j)] / value[j]`; row j collects
    /// branch j's input shares.
    pub shares: DenseMatrix,
    /// Perron root of `shares`.
    pub perron_root: f64,
    /// Uniform profit rate, `1 / perron_root - 1`.
    pub profit_rate: f64,
    /// Unit eigenvector (2-norm one, nonnegative) of relative prices.
    pub eigenvector: Vec<f64>,
}

/// Builds the input-share matrix `M[(j, i)] = inputs[(i, j)] / value[j]`.
///
/// The ratio is scale-free: per-unit and per-capital columns produce the
/// same matrix.
pub fn build_share_matrix(table: &UnitValueTable) -> Result<DenseMatrix> {
    let n = table.n;
    if let Some(j) = table.value.iter().position(|&w| w == 0.0) {
        return Err(Error::ZeroOutputValue(j + 1));
    }
    let mut shares = DenseMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            shares.set(j, i, table.inputs.get(i, j) / table.value[j]);
        }
    }
    Ok(shares)
}

/// Extracts the Perron eigenpair of the share matrix and derives the uniform
/// profit rate, using the default power-iteration settings.
pub fn profit_rate(shares: DenseMatrix) -> Result<PriceEigenSystem> {
    profit_rate_with(shares, EIGEN_TOL, EIGEN_MAX_ITER)
}

/// As `profit_rate` with explicit tolerance and iteration cap.
pub fn profit_rate_with(
    shares: DenseMatrix,
    tol: f64,
    max_iter: usize,
) -> Result<PriceEigenSystem> {
    let (perron_root, eigenvector) = dominant_eigenpair(&shares, tol, max_iter)?;
    Ok(PriceEigenSystem {
        shares,
        perron_root,
        profit_rate: 1.0 / perron_root - 1.0,
        eigenvector,
    })
}

/// Result of checking M against the augmented matrix A' = A + v*l.
///
/// M is similar to A' transposed by conjugation with the diagonal of labor
/// values, so both share the Perron root; `max_deviation` is the entrywise
/// gap between M and its reconstruction from A'.
#[derive(Debug, Clone)]
pub struct SimilarityReport {
    pub max_deviation: f64,
    pub share_root: f64,
    pub augmented_root: f64,
}

impl SimilarityReport {
    pub fn root_gap(&self) -> f64 {
        (self.share_root - self.augmented_root).abs()
    }
}

/// Verifies entrywise that `M = D^-1 (A + v*l)^T D` with D the diagonal of
/// labor values, and compares the Perron roots of both routes. A failed
/// check is reported in the result, not raised.
pub fn augmented_similarity_check(
    economy: &Validated,
    values: &LaborValues,
    shares: &DenseMatrix,
) -> Result<SimilarityReport> {
    let n = economy.branch_count();
    let augmented = augmented_matrix(economy);
    let lam = values.as_slice();
    let mut max_deviation = 0.0_f64;
    for j in 0..n {
        for i in 0..n {
            let expected = lam[i] * augmented.get(i, j) / lam[j];
            max_deviation = max_deviation.max((shares.get(j, i) - expected).abs());
        }
    }
    let (share_root, _) = dominant_eigenpair(shares, EIGEN_TOL, EIGEN_MAX_ITER)?;
    let (augmented_root, _) = dominant_eigenpair(&augmented, EIGEN_TOL, EIGEN_MAX_ITER)?;
    Ok(SimilarityReport {
        max_deviation,
        share_root,
        augmented_root,
    })
}
