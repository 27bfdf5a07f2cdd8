//! Labor values, the exploitation rate, and the per-unit value decomposition
//! into circulating capital, variable capital, and surplus value, in both
//! per-unit-of-commodity and per-unit-of-capital normalizations.

use crate::economy::Validated;
use crate::error::{Error, Result};
use crate::numeric::{solve_linear, DenseMatrix};

/// Hours of embodied labor per unit of each commodity (the row vector
/// solving value = value * A + l).
#[derive(Debug, Clone)]
pub struct LaborValues(pub Vec<f64>);

impl LaborValues {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Computes labor values as l * (I - A)^-1, solved without forming the
/// inverse. Every component is positive for a validated productive economy.
pub fn labor_values(economy: &Validated) -> Result<LaborValues> {
    let n = economy.branch_count();
    let a = economy.technology();
    // (I - A)^T lambda^T = l^T
    let mut system = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            system.set(i, j, delta - a.get(j, i));
        }
    }
    let values = solve_linear(&system, &economy.labor())
        .map_err(|e| Error::Singular(format!("labor value system unsolvable: {e}")))?;
    if let Some(i) = values.iter().position(|&x| x <= 0.0) {
        return Err(Error::Structural(format!(
            "labor value of branch {} is {} (not positive); the zero-labor chain feeding it carries no value",
            i + 1,
            values[i]
        )));
    }
    Ok(LaborValues(values))
}

/// Value of the hourly wage basket, the exploitation rate derived from it,
/// and the per-commodity value shares of the basket.
#[derive(Debug, Clone)]
pub struct WageStructure {
    /// Value of the basket obtained for one hour of labor, clamped to [0, 1].
    pub basket_value: f64,
    /// Exploitation rate (1 - basket_value) / basket_value; infinite when the
    /// basket is worthless.
    pub exploitation: f64,
    /// Value shares of each commodity in the basket; `None` when the basket
    /// value is zero.
    pub shares: Option<Vec<f64>>,
}

/// Derives the wage structure from labor values and a basket.
///
/// Rejects baskets worth more than one hour of labor (negative surplus value
/// is outside the model); values within 1e-9 above one are clamped to exactly
/// one and route to the zero-surplus solver downstream.
pub fn wage_structure(values: &LaborValues, basket: &[f64]) -> Result<WageStructure> {
    if basket.len() != values.len() {
        return Err(Error::Dimension(format!(
            "wage basket has length {}, labor values have {}",
            basket.len(),
            values.len()
        )));
    }
    let raw: f64 = values
        .as_slice()
        .iter()
        .zip(basket)
        .map(|(l, v)| l * v)
        .sum();
    if raw > 1.0 + 1e-9 {
        return Err(Error::WageExceedsValue(raw));
    }
    let basket_value = raw.min(1.0);
    let (exploitation, shares) = if basket_value == 0.0 {
        (f64::INFINITY, None)
    } else {
        let shares = values
            .as_slice()
            .iter()
            .zip(basket)
            .map(|(l, v)| l * v / basket_value)
            .collect();
        ((1.0 - basket_value) / basket_value, Some(shares))
    };
    Ok(WageStructure {
        basket_value,
        exploitation,
        shares,
    })
}

/// Per-unit value decomposition.
///
/// `inputs[(i, j)]` is the total value of commodity i consumed per unit of
/// commodity j, including both the circulating-capital part `a_ij * value_i`
/// and the variable-capital part `value_i * basket_i * labor_j`. The `_pc`
/// fields are the same columns divided by the committed capital `capital[j]`,
/// so each normalized branch commits exactly one unit of capital and its
/// internal profit rate is `value_pc[j] - 1`.
#[derive(Debug, Clone)]
pub struct UnitValueTable {
    pub n: usize,
    /// c: value of commodity i per unit of commodity j (n x n).
    pub inputs: DenseMatrix,
    /// pl: surplus value per unit of each commodity.
    pub surplus: Vec<f64>,
    /// w: total unit value (equals the labor values).
    pub value: Vec<f64>,
    /// k: committed capital per unit, the column sums of `inputs`.
    pub capital: Vec<f64>,
    /// Total committed capital for one unit of each commodity.
    pub unit_total_capital: f64,
    /// Per-unit-of-capital input matrix; every column sums to one.
    pub inputs_pc: DenseMatrix,
    /// Surplus value per unit of capital (the internal profit rate).
    pub surplus_pc: Vec<f64>,
    /// Output value per unit of capital; `value_pc[j] = 1 + surplus_pc[j]`.
    pub value_pc: Vec<f64>,
    /// Direct labor per unit, carried along for reporting.
    pub labor: Vec<f64>,
    /// Basket value, carried along for reporting.
    pub basket_value: f64,
}

impl UnitValueTable {
    /// Assembles a table from raw per-unit columns; used by solvers' tests
    /// and by the pipeline. Fails when a branch commits no capital at all
    /// (its per-capital normalization is undefined).
    pub fn from_columns(
        inputs: DenseMatrix,
        surplus: Vec<f64>,
        value: Vec<f64>,
        labor: Vec<f64>,
        basket_value: f64,
    ) -> Result<UnitValueTable> {
        let n = value.len();
        if inputs.rows() != n || inputs.cols() != n || surplus.len() != n || labor.len() != n {
            return Err(Error::Dimension(
                "unit value table columns must all have length n".into(),
            ));
        }
        let capital: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|i| inputs.get(i, j)).sum())
            .collect();
        if let Some(j) = capital.iter().position(|&k| k <= 0.0) {
            return Err(Error::Structural(format!(
                "branch {} commits no capital (k = {}); per-capital normalization is undefined",
                j + 1,
                capital[j]
            )));
        }
        let (inputs_pc, surplus_pc, value_pc) =
            per_capital_columns(&inputs, &surplus, &value, &capital);
        let unit_total_capital = capital.iter().sum();
        Ok(UnitValueTable {
            n,
            inputs,
            surplus,
            value,
            capital,
            unit_total_capital,
            inputs_pc,
            surplus_pc,
            value_pc,
            labor,
            basket_value,
        })
    }

    /// Variable capital per unit of commodity j (the wage share of inputs).
    pub fn variable_capital(&self, j: usize) -> f64 {
        self.labor[j] * self.basket_value
    }
}

/// Divides each column by its committed capital.
fn per_capital_columns(
    inputs: &DenseMatrix,
    surplus: &[f64],
    value: &[f64],
    capital: &[f64],
) -> (DenseMatrix, Vec<f64>, Vec<f64>) {
    let n = value.len();
    let mut inputs_pc = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inputs_pc.set(i, j, inputs.get(i, j) / capital[j]);
        }
    }
    let surplus_pc = surplus.iter().zip(capital).map(|(p, k)| p / k).collect();
    let value_pc = value.iter().zip(capital).map(|(w, k)| w / k).collect();
    (inputs_pc, surplus_pc, value_pc)
}

/// Builds the unit value table for a validated economy.
///
/// `inputs[(i, j)] = a_ij * value_i + value_i * basket_i * labor_j`,
/// `surplus[j] = labor_j * (1 - basket_value)`, `value[j] = labor value j`.
/// When the basket is worthless the variable-capital part vanishes and the
/// whole direct labor appears as surplus.
pub fn unit_value_table(
    economy: &Validated,
    values: &LaborValues,
    wage: &WageStructure,
) -> Result<UnitValueTable> {
    let n = economy.branch_count();
    let a = economy.technology();
    let l = economy.labor();
    let v = economy.wage_basket();
    let lam = values.as_slice();
    let mut inputs = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inputs.set(i, j, a.get(i, j) * lam[i] + lam[i] * v[i] * l[j]);
        }
    }
    let surplus: Vec<f64> = l.iter().map(|lj| lj * (1.0 - wage.basket_value)).collect();
    UnitValueTable::from_columns(inputs, surplus, lam.to_vec(), l, wage.basket_value)
}
