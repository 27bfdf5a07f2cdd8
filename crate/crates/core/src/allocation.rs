//! Determines the branch capital allocation and the absolute price scale
//! that jointly satisfy both aggregate invariants and the simple-reproduction
//! constraints, by direct linear resolution and by the iterative q-scan on
//! the z function.
//!
//! All operations work on the per-capital columns of the unit value table:
//! a branch holding capital `K_i` produces output value `K_i * value_pc[i]`
//! and consumes `K_i * inputs_pc[(j, i)]` of commodity j.

use crate::error::{Error, Result};
use crate::numeric::{solve_linear, DenseMatrix, EIGEN_MAX_ITER, EIGEN_TOL};
use crate::price::PriceEigenSystem;
use crate::value::UnitValueTable;

/// Default number of zoom refinements for the iterative solver; each zoom
/// divides the scan step by ten.
pub const DEFAULT_ZOOMS: usize = 6;

/// Relative share of the a-priori scale estimate used as the default scan
/// step (the scan reaches the root in about a hundred steps).
pub const DEFAULT_STEP_FRACTION: f64 = 1e-2;

/// Zero-surplus routing threshold: total per-capital surplus below this
/// fraction of total per-capital value routes to the zero-surplus solver.
pub const ZERO_SURPLUS_RTOL: f64 = 1e-12;

/// Default residual tolerance (relative to total capital) enforced on every
/// returned allocation.
pub const ALLOCATION_RTOL: f64 = 1e-8;

/// A solved capital allocation with its derived value and price aggregates.
#[derive(Debug, Clone)]
pub struct Allocation {
    /// Branch capitals in value units; sums to the scenario's total capital.
    pub capitals: Vec<f64>,
    /// Absolute price scale applied to the unit eigenvector.
    pub q_star: f64,
    /// Absolute transformation coefficients from value to price per branch.
    pub coefficients: Vec<f64>,
    /// Branch output values `W_i = K_i * value_pc[i]`.
    pub output_values: Vec<f64>,
    /// Branch output prices `P_i = x_i * W_i`.
    pub prices: Vec<f64>,
    /// Branch surplus values `PL_i = K_i * surplus_pc[i]`.
    pub surplus_values: Vec<f64>,
    /// Branch profits in price, output price minus priced inputs.
    pub profits: Vec<f64>,
    /// Branch capitals in price, the priced input bill.
    pub price_capitals: Vec<f64>,
    /// Residual between total profit and total surplus value.
    pub z: f64,
}

impl Allocation {
    pub fn total_capital(&self) -> f64 {
        self.capitals.iter().sum()
    }

    pub fn total_profit(&self) -> f64 {
        self.profits.iter().sum()
    }

    pub fn total_surplus(&self) -> f64 {
        self.surplus_values.iter().sum()
    }

    pub fn total_price_capital(&self) -> f64 {
        self.price_capitals.iter().sum()
    }

    /// Rescales every extensive quantity by `factor` (homothety); the scale
    /// `q_star` and the coefficients stay put.
    pub fn scaled(&self, factor: f64) -> Allocation {
        let scale = |v: &[f64]| v.iter().map(|x| x * factor).collect();
        Allocation {
            capitals: scale(&self.capitals),
            q_star: self.q_star,
            coefficients: self.coefficients.clone(),
            output_values: scale(&self.output_values),
            prices: scale(&self.prices),
            surplus_values: scale(&self.surplus_values),
            profits: scale(&self.profits),
            price_capitals: scale(&self.price_capitals),
            z: self.z * factor,
        }
    }
}

/// Residuals of the allocation invariants, all reported as absolute values.
#[derive(Debug, Clone)]
pub struct AllocationResiduals {
    /// |sum K_i - K_T|
    pub capital_conservation: f64,
    /// |sum S_i - sum PL_i| (equality between profit and surplus totals)
    pub equality_profit_surplus: f64,
    /// |sum K_p,i - sum K_i| (equality between price and value capitals)
    pub equality_capital: f64,
    /// `max_k |sum_i K_i c_pc[(k, i)] - K_k w_pc[k]|` over fully consumed k
    pub reproduction: f64,
}

impl AllocationResiduals {
    pub fn max(&self) -> f64 {
        self.capital_conservation
            .max(self.equality_profit_surplus)
            .max(self.equality_capital)
            .max(self.reproduction)
    }
}

/// Computes the invariant residuals of an allocation against its table.
pub fn residuals(
    table: &UnitValueTable,
    allocation: &Allocation,
    total_capital: f64,
    fully_consumed: &[usize],
) -> AllocationResiduals {
    let n = table.n;
    let k = &allocation.capitals;
    let mut reproduction = 0.0_f64;
    for &branch in fully_consumed {
        let used: f64 = (0..n).map(|i| k[i] * table.inputs_pc.get(branch, i)).sum();
        let produced = k[branch] * table.value_pc[branch];
        reproduction = reproduction.max((used - produced).abs());
    }
    AllocationResiduals {
        capital_conservation: (allocation.total_capital() - total_capital).abs(),
        equality_profit_surplus: (allocation.total_profit() - allocation.total_surplus()).abs(),
        equality_capital: (allocation.total_price_capital() - allocation.total_capital()).abs(),
        reproduction,
    }
}

/// True when the table carries no surplus value (within `ZERO_SURPLUS_RTOL`),
/// in which case the eigen route degenerates and `solve_zero_surplus`
/// applies.
pub fn is_zero_surplus(table: &UnitValueTable) -> bool {
    let surplus: f64 = table.surplus_pc.iter().sum();
    let value: f64 = table.value_pc.iter().sum();
    surplus < ZERO_SURPLUS_RTOL * value
}

/// One constraint row per fully consumed commodity k: the economy's use of
/// commodity k equals branch k's output in value, with coefficients
/// `inputs_pc[(k, j)]` for j != k and `inputs_pc[(k, k)] - value_pc[k]` at
/// position k; the right-hand side is zero.
pub fn reproduction_rows(table: &UnitValueTable, fully_consumed: &[usize]) -> DenseMatrix {
    let n = table.n;
    let mut rows = DenseMatrix::zeros(fully_consumed.len(), n);
    for (r, &k) in fully_consumed.iter().enumerate() {
        for j in 0..n {
            let coeff = if j == k {
                table.inputs_pc.get(k, k) - table.value_pc[k]
            } else {
                table.inputs_pc.get(k, j)
            };
            rows.set(r, j, coeff);
        }
    }
    rows
}

/// Assembles the n x n allocation system shared by the direct solver and the
/// q-scan: a capital-conservation row, one caller-supplied aggregate row,
/// and the reproduction rows.
fn allocation_system(
    table: &UnitValueTable,
    fully_consumed: &[usize],
    aggregate_row: Vec<f64>,
    aggregate_rhs: f64,
    total_capital: f64,
) -> Result<(DenseMatrix, Vec<f64>)> {
    let n = table.n;
    if fully_consumed.len() + 2 != n {
        return Err(Error::Structural(format!(
            "allocation system needs {} reproduction rows, got {}",
            n.saturating_sub(2),
            fully_consumed.len()
        )));
    }
    let mut rows = Vec::with_capacity(n);
    rows.push(vec![1.0; n]);
    rows.push(aggregate_row);
    let repro = reproduction_rows(table, fully_consumed);
    for r in 0..repro.rows() {
        rows.push(repro.row(r).to_vec());
    }
    let mut rhs = vec![0.0; n];
    rhs[0] = total_capital;
    rhs[1] = aggregate_rhs;
    Ok((DenseMatrix::from_rows(&rows), rhs))
}

fn check_positive(capitals: &[f64]) -> Result<()> {
    for (i, &k) in capitals.iter().enumerate() {
        if k <= 0.0 {
            return Err(Error::NegativeCapital {
                branch: i + 1,
                value: k,
            });
        }
    }
    Ok(())
}

/// Fills every allocation field from solved capitals and absolute
/// coefficients.
fn build_allocation(
    table: &UnitValueTable,
    capitals: Vec<f64>,
    q_star: f64,
    coefficients: Vec<f64>,
) -> Allocation {
    let n = table.n;
    let output_values: Vec<f64> = (0..n).map(|i| capitals[i] * table.value_pc[i]).collect();
    let prices: Vec<f64> = (0..n).map(|i| coefficients[i] * output_values[i]).collect();
    let surplus_values: Vec<f64> = (0..n).map(|i| capitals[i] * table.surplus_pc[i]).collect();
    let price_capitals: Vec<f64> = (0..n)
        .map(|i| {
            capitals[i]
                * (0..n)
                    .map(|j| coefficients[j] * table.inputs_pc.get(j, i))
                    .sum::<f64>()
        })
        .collect();
    let profits: Vec<f64> = (0..n).map(|i| prices[i] - price_capitals[i]).collect();
    let z = profits.iter().sum::<f64>() - surplus_values.iter().sum::<f64>();
    Allocation {
        capitals,
        q_star,
        coefficients,
        output_values,
        prices,
        surplus_values,
        profits,
        price_capitals,
        z,
    }
}

fn verify(
    table: &UnitValueTable,
    allocation: &Allocation,
    total_capital: f64,
    fully_consumed: &[usize],
    rtol: f64,
) -> Result<()> {
    let res = residuals(table, allocation, total_capital, fully_consumed);
    let scale = total_capital.abs().max(1e-300);
    if res.max() > rtol * scale {
        return Err(Error::Structural(format!(
            "allocation invariants violated: max residual {:e} above {:e}",
            res.max(),
            rtol * scale
        )));
    }
    Ok(())
}

/// Direct resolution for zero fixed capital: solves the linear system
/// {sum K_i = K_T; sum K_i r_i = K_T r; reproduction rows} with the internal
/// rates `r_i = value_pc[i] - 1`, then fixes the absolute scale from the
/// capital equality, `q* = sum K_i w_i / sum x*_i K_i w_i`.
pub fn solve_direct(
    table: &UnitValueTable,
    eigen: &PriceEigenSystem,
    total_capital: f64,
    fully_consumed: &[usize],
) -> Result<Allocation> {
    if is_zero_surplus(table) {
        return Err(Error::ZeroSurplus);
    }
    let n = table.n;
    let internal_rates: Vec<f64> = table.value_pc.iter().map(|w| w - 1.0).collect();
    let (system, rhs) = allocation_system(
        table,
        fully_consumed,
        internal_rates,
        total_capital * eigen.profit_rate,
        total_capital,
    )?;
    let capitals = solve_linear(&system, &rhs)?;
    check_positive(&capitals)?;
    let weighted: f64 = (0..n).map(|i| capitals[i] * table.value_pc[i]).sum();
    let priced: f64 = (0..n)
        .map(|i| eigen.eigenvector[i] * capitals[i] * table.value_pc[i])
        .sum();
    let q_star = weighted / priced;
    let coefficients: Vec<f64> = eigen.eigenvector.iter().map(|x| q_star * x).collect();
    let allocation = build_allocation(table, capitals, q_star, coefficients);
    verify(
        table,
        &allocation,
        total_capital,
        fully_consumed,
        ALLOCATION_RTOL,
    )?;
    Ok(allocation)
}

/// Degenerate solver for zero-surplus economies (basket value one).
///
/// With no surplus every branch's output exactly covers the economy's use of
/// its commodity, so the capitals form the eigenvector of the per-capital
/// input flow at eigenvalue one, scaled to the total; prices equal values
/// (`q* = 1`, unit coefficients).
pub fn solve_zero_surplus(
    table: &UnitValueTable,
    total_capital: f64,
    fully_consumed: &[usize],
) -> Result<Allocation> {
    if !is_zero_surplus(table) {
        return Err(Error::Structural(
            "economy carries surplus value; use the direct or iterative solver".into(),
        ));
    }
    let n = table.n;
    // Power-iterate on (C + I) / 2: same eigenvectors, spectrum mapped to
    // (lambda + 1) / 2, which makes the Perron direction strictly dominant
    // even when the flow matrix is periodic.
    let mut shifted = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            shifted.set(i, j, 0.5 * (table.inputs_pc.get(i, j) + delta));
        }
    }
    let (half_root, direction) =
        crate::numeric::dominant_eigenpair(&shifted, EIGEN_TOL, EIGEN_MAX_ITER)?;
    let flow_root = 2.0 * half_root - 1.0;
    if (flow_root - 1.0).abs() > 1e-6 {
        return Err(Error::Structural(format!(
            "zero-surplus input flow should have unit spectral radius, found {flow_root}"
        )));
    }
    let total: f64 = direction.iter().sum();
    let capitals: Vec<f64> = direction
        .iter()
        .map(|x| x * total_capital / total)
        .collect();
    check_positive(&capitals)?;
    let allocation = build_allocation(table, capitals, 1.0, vec![1.0; n]);
    verify(
        table,
        &allocation,
        total_capital,
        fully_consumed,
        ALLOCATION_RTOL,
    )?;
    Ok(allocation)
}

/// The z function: total profit minus total surplus for given capitals at
/// absolute scale `q`, with relative prices `q * eigenvector`.
pub fn z_value(table: &UnitValueTable, capitals: &[f64], q: f64, eigenvector: &[f64]) -> f64 {
    let n = table.n;
    let mut total = 0.0;
    for i in 0..n {
        let own = eigenvector[i] * (table.value_pc[i] - table.inputs_pc.get(i, i));
        let others: f64 = (0..n)
            .filter(|&j| j != i)
            .map(|j| eigenvector[j] * table.inputs_pc.get(j, i))
            .sum();
        total += capitals[i] * (q * (own - others) - table.surplus_pc[i]);
    }
    total
}

/// The capital step of the scan: solves {sum K_i = K_T;
/// sum K_i w_i (1 - q x*_i) = 0; reproduction rows}. Components of the
/// solution may be negative; the final allocation re-checks positivity.
pub fn step_capitals(
    table: &UnitValueTable,
    q: f64,
    eigenvector: &[f64],
    total_capital: f64,
    fully_consumed: &[usize],
) -> Result<Vec<f64>> {
    let n = table.n;
    let aggregate: Vec<f64> = (0..n)
        .map(|i| table.value_pc[i] * (1.0 - q * eigenvector[i]))
        .collect();
    let (system, rhs) = allocation_system(table, fully_consumed, aggregate, 0.0, total_capital)?;
    solve_linear(&system, &rhs)
}

/// A-priori scale estimate for the scan step: the q that would satisfy the
/// capital equality under a uniform capital split (the capital level cancels
/// out of the ratio), divided by 100.
pub fn default_scan_step(table: &UnitValueTable, eigenvector: &[f64]) -> f64 {
    let weighted: f64 = table.value_pc.iter().sum();
    let priced: f64 = eigenvector
        .iter()
        .zip(&table.value_pc)
        .map(|(x, w)| x * w)
        .sum();
    DEFAULT_STEP_FRACTION * weighted / priced
}

/// Iterative resolution: scans q = 0, dq, 2dq, ... alternating the capital
/// step and the z evaluation; at the first descending sign change of z the
/// root is bracketed, refined by `zooms` rescans at a tenth of the step
/// each, and fixed by linear interpolation.
pub fn solve_iterative(
    table: &UnitValueTable,
    eigen: &PriceEigenSystem,
    total_capital: f64,
    fully_consumed: &[usize],
    dq: f64,
    zooms: usize,
) -> Result<Allocation> {
    if is_zero_surplus(table) {
        return Err(Error::ZeroSurplus);
    }
    if dq.is_nan() || dq <= 0.0 || zooms == 0 {
        return Err(Error::Structural(format!(
            "scan needs dq > 0 and zooms >= 1, got dq = {dq}, zooms = {zooms}"
        )));
    }
    let eigenvector = &eigen.eigenvector;
    let min_component = eigenvector.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_component <= 0.0 {
        return Err(Error::Structural(
            "price eigenvector has a non-positive component; the scan bound is undefined".into(),
        ));
    }
    let q_max = 10.0 * table.value_pc.iter().sum::<f64>() / min_component;

    let evaluate = |q: f64| -> Result<f64> {
        let capitals = step_capitals(table, q, eigenvector, total_capital, fully_consumed)?;
        Ok(z_value(table, &capitals, q, eigenvector))
    };

    // outer scan until the first positive-to-negative crossing
    let mut prev_q = 0.0;
    let mut prev_z = evaluate(0.0)?;
    let (mut lo, mut z_lo, mut hi, mut z_hi);
    let mut step_count = 1_usize;
    loop {
        let q = step_count as f64 * dq;
        if q > q_max {
            return Err(Error::NoRoot { q_max });
        }
        let z = evaluate(q)?;
        if prev_z > 0.0 && z <= 0.0 {
            lo = prev_q;
            z_lo = prev_z;
            hi = q;
            z_hi = z;
            break;
        }
        prev_q = q;
        prev_z = z;
        step_count += 1;
    }

    // zoom: rescan the bracket at a tenth of the step per level
    let mut step = dq;
    for _ in 0..zooms {
        step /= 10.0;
        let mut q = lo;
        loop {
            q = (q + step).min(hi);
            let z = evaluate(q)?;
            if z <= 0.0 {
                hi = q;
                z_hi = z;
                break;
            }
            lo = q;
            z_lo = z;
            if q >= hi {
                break;
            }
        }
    }

    let q_star = if z_lo == z_hi {
        hi
    } else {
        lo + z_lo * (hi - lo) / (z_lo - z_hi)
    };
    let capitals = step_capitals(table, q_star, eigenvector, total_capital, fully_consumed)?;
    check_positive(&capitals)?;
    let coefficients: Vec<f64> = eigenvector.iter().map(|x| q_star * x).collect();
    let allocation = build_allocation(table, capitals, q_star, coefficients);
    // the achievable residual is set by the final bracket width
    let rtol = ALLOCATION_RTOL.max(10.0 * step / q_star);
    verify(table, &allocation, total_capital, fully_consumed, rtol)?;
    Ok(allocation)
}

/// As `solve_iterative`, with the default scan step and zoom count.
pub fn solve_iterative_default(
    table: &UnitValueTable,
    eigen: &PriceEigenSystem,
    total_capital: f64,
    fully_consumed: &[usize],
) -> Result<Allocation> {
    let dq = default_scan_step(table, &eigen.eigenvector);
    solve_iterative(
        table,
        eigen,
        total_capital,
        fully_consumed,
        dq,
        DEFAULT_ZOOMS,
    )
}
