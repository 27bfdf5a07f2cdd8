//! Physical gross and net outputs reconstructed from the solved allocation
//! via the quantity-augmented matrix.

use crate::allocation::Allocation;
use crate::economy::Validated;
use crate::error::{Error, Result};
use crate::numeric::{dominant_eigenpair, solve_linear, DenseMatrix, EIGEN_MAX_ITER, EIGEN_TOL};
use crate::value::{LaborValues, UnitValueTable};

/// Physical quantities implied by an allocation.
#[derive(Debug, Clone)]
pub struct QuantitySystem {
    /// Augmented coefficients A' = A + v*l (wage consumption included).
    pub augmented: DenseMatrix,
    /// Augmented values l * (I - A')^-1; `None` at zero surplus, where
    /// I - A' is singular.
    pub augmented_values: Option<Vec<f64>>,
    /// Gross outputs in physical units, `g_i = W_i / value_i`.
    pub gross: Vec<f64>,
    /// Net outputs `y = g - A' g`; zero for fully consumed branches.
    pub net: Vec<f64>,
    /// Largest gap between the two net-output routes (through quantities and
    /// through the value accounts).
    pub formula_gap: f64,
}

impl QuantitySystem {
    /// Homothety: rescales the physical quantities by `factor`.
    pub fn scaled(&self, factor: f64) -> QuantitySystem {
        QuantitySystem {
            augmented: self.augmented.clone(),
            augmented_values: self.augmented_values.clone(),
            gross: self.gross.iter().map(|x| x * factor).collect(),
            net: self.net.iter().map(|x| x * factor).collect(),
            formula_gap: self.formula_gap * factor,
        }
    }
}

/// Builds A' = A + v*l. Branches with no wage share stay unchanged.
pub fn augmented_matrix(economy: &Validated) -> DenseMatrix {
    let n = economy.branch_count();
    let a = economy.technology();
    let l = economy.labor();
    let v = economy.wage_basket();
    let mut augmented = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            augmented.set(i, j, a.get(i, j) + v[i] * l[j]);
        }
    }
    augmented
}

/// Augmented values l * (I - A')^-1.
///
/// At zero surplus A' has unit spectral radius and I - A' is singular; the
/// radius is checked by power iteration first so the failure mode is
/// reported as `Singular` rather than as garbage values.
pub fn augmented_values(economy: &Validated, augmented: &DenseMatrix) -> Result<Vec<f64>> {
    let n = economy.branch_count();
    if let Ok((radius, _)) = dominant_eigenpair(augmented, EIGEN_TOL, EIGEN_MAX_ITER) {
        if radius >= 1.0 - 1e-9 {
            return Err(Error::Singular(format!(
                "I - A' is singular: the augmented matrix has spectral radius {radius}"
            )));
        }
    }
    let mut system = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            system.set(i, j, delta - augmented.get(j, i));
        }
    }
    solve_linear(&system, &economy.labor())
}

/// Gross and net outputs from a solved allocation.
///
/// `g_i = W_i / value_i` and `y = g - A' g`; the same net output is also
/// computed from the value accounts, `(W_j - sum_i K_i c_pc[(j, i)]) /
/// value_j`, and the largest gap between the two routes is returned third.
pub fn outputs(
    allocation: &Allocation,
    values: &LaborValues,
    table: &UnitValueTable,
    augmented: &DenseMatrix,
) -> (Vec<f64>, Vec<f64>, f64) {
    let n = values.len();
    let lam = values.as_slice();
    let gross: Vec<f64> = (0..n)
        .map(|i| allocation.output_values[i] / lam[i])
        .collect();
    let consumed = augmented.mat_vec(&gross);
    let net: Vec<f64> = (0..n).map(|i| gross[i] - consumed[i]).collect();
    let mut gap = 0.0_f64;
    for j in 0..n {
        let used: f64 = (0..n)
            .map(|i| allocation.capitals[i] * table.inputs_pc.get(j, i))
            .sum();
        let via_value = (allocation.output_values[j] - used) / lam[j];
        gap = gap.max((net[j] - via_value).abs());
    }
    (gross, net, gap)
}

/// Assembles the full quantity system for a solved scenario.
pub fn quantity_system(
    economy: &Validated,
    values: &LaborValues,
    table: &UnitValueTable,
    allocation: &Allocation,
) -> QuantitySystem {
    let augmented = augmented_matrix(economy);
    let augmented_vals = augmented_values(economy, &augmented).ok();
    let (gross, net, formula_gap) = outputs(allocation, values, table, &augmented);
    QuantitySystem {
        augmented,
        augmented_values: augmented_vals,
        gross,
        net,
        formula_gap,
    }
}
