//! Minimal dense linear algebra used by every solver: square linear-system
//! solving, matrix inversion, determinants, and the dominant eigenpair of a
//! nonnegative matrix by power iteration.
//!
//! Everything here targets small, well-scaled systems (n up to a few dozen);
//! elimination uses partial pivoting only.

use crate::error::{Error, Result};

/// Pivot threshold, relative to the largest initial entry, below which
/// elimination reports the system as singular.
pub const SINGULAR_PIVOT_RTOL: f64 = 1e-12;

/// Default Rayleigh-quotient tolerance for power iteration.
pub const EIGEN_TOL: f64 = 1e-12;

/// Default iteration cap for power iteration.
pub const EIGEN_MAX_ITER: usize = 100_000;

/// Row-major dense matrix of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(cols > 0, "matrix needs at least one column");
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        assert!(!rows.is_empty(), "matrix needs at least one row");
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let data = rows.iter().flatten().copied().collect();
        DenseMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mat_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "vector length must match columns");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &x| m.max(x.abs()))
    }

    /// Leading principal submatrix of order `k`.
    pub fn leading(&self, k: usize) -> DenseMatrix {
        assert!(k >= 1 && k <= self.rows.min(self.cols));
        let mut m = DenseMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                m.set(i, j, self.get(i, j));
            }
        }
        m
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&x| x >= 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
///
/// Reports `Singular` when a pivot falls below `SINGULAR_PIVOT_RTOL` times
/// the largest initial entry of `A`, which downstream signals a degenerate
/// allocation system.
pub fn solve_linear(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = square_dim(a)?;
    if b.len() != n {
        return Err(Error::Dimension(format!(
            "right-hand side has length {}, matrix is {n}x{n}",
            b.len()
        )));
    }
    let threshold = SINGULAR_PIVOT_RTOL * a.max_abs();
    // augmented working copy, row-major with n+1 columns
    let mut aug = vec![0.0; n * (n + 1)];
    for i in 0..n {
        aug[i * (n + 1)..i * (n + 1) + n].copy_from_slice(a.row(i));
        aug[i * (n + 1) + n] = b[i];
    }
    let width = n + 1;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&p, &q| {
                aug[p * width + col]
                    .abs()
                    .total_cmp(&aug[q * width + col].abs())
            })
            .unwrap();
        let pivot = aug[pivot_row * width + col];
        if pivot.abs() <= threshold {
            return Err(Error::Singular(format!(
                "pivot {:e} in column {} below threshold {:e}",
                pivot,
                col + 1,
                threshold
            )));
        }
        if pivot_row != col {
            for k in col..width {
                aug.swap(pivot_row * width + k, col * width + k);
            }
        }
        for r in col + 1..n {
            let factor = aug[r * width + col] / aug[col * width + col];
            if factor == 0.0 {
                continue;
            }
            for k in col..width {
                aug[r * width + k] -= factor * aug[col * width + k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = aug[r * width + n];
        for k in r + 1..n {
            acc -= aug[r * width + k] * x[k];
        }
        x[r] = acc / aug[r * width + r];
    }
    Ok(x)
}

/// Inverts a square matrix column by column via `solve_linear`.
pub fn invert(a: &DenseMatrix) -> Result<DenseMatrix> {
    let n = square_dim(a)?;
    let mut inv = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = solve_linear(a, &e)?;
        for i in 0..n {
            inv.set(i, j, col[i]);
        }
    }
    Ok(inv)
}

/// Determinant by LU elimination with partial pivoting (exact sign tracking).
pub fn determinant(a: &DenseMatrix) -> Result<f64> {
    let n = square_dim(a)?;
    let mut m = a.clone();
    let mut sign = 1.0;
    let mut det = 1.0;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&p, &q| m.get(p, col).abs().total_cmp(&m.get(q, col).abs()))
            .unwrap();
        let pivot = m.get(pivot_row, col);
        if pivot == 0.0 {
            return Ok(0.0);
        }
        if pivot_row != col {
            for k in 0..n {
                let a = m.get(pivot_row, k);
                let b = m.get(col, k);
                m.set(pivot_row, k, b);
                m.set(col, k, a);
            }
            sign = -sign;
        }
        det *= pivot;
        for r in col + 1..n {
            let factor = m.get(r, col) / pivot;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                m.set(r, k, m.get(r, k) - factor * m.get(col, k));
            }
        }
    }
    Ok(sign * det)
}

/// Dominant eigenpair of a nonnegative matrix by power iteration from the
/// all-ones vector.
///
/// Returns `(lambda, x)` with `x` nonnegative, unit 2-norm, and scaled so its
/// largest-magnitude entry is positive. Iteration stops once successive
/// Rayleigh quotients differ by less than `tol` and the residual
/// `max|Mx - lambda x|` is itself below `tol`.
pub fn dominant_eigenpair(m: &DenseMatrix, tol: f64, max_iter: usize) -> Result<(f64, Vec<f64>)> {
    let n = square_dim(m)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Structural(format!(
            "eigen tolerance must be positive, got {tol}"
        )));
    }
    if !m.is_nonnegative() {
        return Err(Error::Structural(
            "dominant_eigenpair requires a nonnegative matrix".into(),
        ));
    }
    if m.max_abs() == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut lambda_prev = f64::INFINITY;
    for iter in 0..max_iter {
        let y = m.mat_vec(&x);
        let norm = l2_norm(&y);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NoConvergence { iterations: iter });
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
        let mx = m.mat_vec(&x);
        let lambda: f64 = x.iter().zip(&mx).map(|(a, b)| a * b).sum();
        let residual = x
            .iter()
            .zip(&mx)
            .map(|(xi, mxi)| (mxi - lambda * xi).abs())
            .fold(0.0_f64, f64::max);
        if (lambda - lambda_prev).abs() < tol && residual <= tol {
            fix_sign(&mut x);
            return Ok((lambda, x));
        }
        lambda_prev = lambda;
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
    })
}

fn fix_sign(x: &mut [f64]) {
    let idx = x
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.abs().total_cmp(&b.abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    if x[idx] < 0.0 {
        for v in x.iter_mut() {
            *v = -*v;
        }
    }
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn square_dim(a: &DenseMatrix) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(a.rows())
}
