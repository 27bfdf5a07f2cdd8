//! Python bindings: scenario parsing, the solve pipeline, residual checks,
//! and wage-basket sweeps, mirroring the `transforma` CLI surface.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use transforma::report::{
    check_scenario, solve_scenario, OutputFormat, SolveOptions, SolverChoice, DEFAULT_TOLERANCE,
};
use transforma::sweep::{parse_sweep_spec, run_sweep, sweep_csv};
use transforma::{validate, Error, SolveReport};

fn to_py_err(err: Error) -> PyErr {
    match err {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn solver_from_str(name: &str) -> PyResult<SolverChoice> {
    match name {
        "direct" => Ok(SolverChoice::Direct),
        "iterative" => Ok(SolverChoice::Iterative),
        "both" => Ok(SolverChoice::Both),
        other => Err(PyValueError::new_err(format!(
            "unknown solver {other:?}; expected \"direct\", \"iterative\", or \"both\""
        ))),
    }
}

/// An n-branch economy parsed from a scenario document.
#[pyclass(name = "Economy", frozen)]
struct PyEconomy {
    inner: transforma::Economy,
}

#[pymethods]
impl PyEconomy {
    #[getter]
    fn branch_count(&self) -> usize {
        self.inner.branch_count()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        (0..self.inner.branch_count())
            .map(|i| self.inner.branch_name(i))
            .collect()
    }

    #[getter]
    fn labor(&self) -> Vec<f64> {
        self.inner.labor()
    }

    #[getter]
    fn wage_basket(&self) -> Vec<f64> {
        self.inner.wage_basket()
    }

    /// 1-based indices of the fully consumed branches, as in scenario files.
    #[getter]
    fn fully_consumed(&self) -> Vec<usize> {
        self.inner.fully_consumed().iter().map(|k| k + 1).collect()
    }

    /// Technology matrix as a list of rows.
    fn technology(&self) -> Vec<Vec<f64>> {
        let a = self.inner.technology();
        (0..a.rows()).map(|i| a.row(i).to_vec()).collect()
    }

    /// Renders the economy back into scenario text.
    fn render(&self) -> String {
        transforma::render_scenario(&self.inner)
    }

    /// Same economy with a replacement wage basket.
    fn with_wage_basket(&self, basket: Vec<f64>) -> PyResult<PyEconomy> {
        Ok(PyEconomy {
            inner: self.inner.with_wage_basket(basket).map_err(to_py_err)?,
        })
    }

    /// Runs the full pipeline and returns the solution. Raises ValueError
    /// when validation or any solver step fails.
    #[pyo3(signature = (solver = "direct", normalize_to = None, tolerance = None))]
    fn solve(
        &self,
        solver: &str,
        normalize_to: Option<f64>,
        tolerance: Option<f64>,
    ) -> PyResult<PySolution> {
        let validated = validate(self.inner.clone()).map_err(to_py_err)?;
        let options = SolveOptions {
            solver: solver_from_str(solver)?,
            normalize_to,
            tolerance: tolerance.unwrap_or(DEFAULT_TOLERANCE),
            ..SolveOptions::default()
        };
        let report = solve_scenario(&validated, &options).map_err(to_py_err)?;
        Ok(PySolution { report })
    }

    /// Runs every applicable solver and the cross-checks; returns a list of
    /// (name, residual, tolerance, passed) tuples.
    #[pyo3(signature = (tolerance = None))]
    fn check(&self, tolerance: Option<f64>) -> PyResult<Vec<(String, f64, f64, bool)>> {
        let validated = validate(self.inner.clone()).map_err(to_py_err)?;
        let report = check_scenario(&validated, tolerance.unwrap_or(DEFAULT_TOLERANCE))
            .map_err(to_py_err)?;
        Ok(report
            .lines
            .iter()
            .map(|l| (l.name.clone(), l.residual, l.tolerance, l.passes()))
            .collect())
    }

    /// Runs a wage-basket sweep from a sweep-spec document and returns the
    /// CSV text.
    fn sweep_csv(&self, spec_text: &str) -> PyResult<String> {
        let validated = validate(self.inner.clone()).map_err(to_py_err)?;
        let spec = parse_sweep_spec(spec_text).map_err(to_py_err)?;
        let rows = run_sweep(&validated, &spec).map_err(to_py_err)?;
        Ok(sweep_csv(&rows, validated.branch_count()))
    }

    fn __repr__(&self) -> String {
        format!(
            "Economy(n={}, labels={:?})",
            self.inner.branch_count(),
            self.labels()
        )
    }
}

/// A solved scenario: labor values, the price eigensystem, the capital
/// allocation, and the physical quantities.
#[pyclass(name = "Solution", frozen)]
struct PySolution {
    report: SolveReport,
}

#[pymethods]
impl PySolution {
    #[getter]
    fn labor_values(&self) -> Vec<f64> {
        self.report.labor_values.clone()
    }

    #[getter]
    fn basket_value(&self) -> f64 {
        self.report.wage.basket_value
    }

    #[getter]
    fn exploitation(&self) -> f64 {
        self.report.wage.exploitation
    }

    #[getter]
    fn profit_rate(&self) -> f64 {
        self.report.eigen.profit_rate
    }

    #[getter]
    fn perron_root(&self) -> f64 {
        self.report.eigen.perron_root
    }

    #[getter]
    fn q_star(&self) -> f64 {
        self.report.allocation.q_star
    }

    /// Absolute value-to-price transformation coefficients per branch.
    #[getter]
    fn coefficients(&self) -> Vec<f64> {
        self.report.allocation.coefficients.clone()
    }

    #[getter]
    fn capitals(&self) -> Vec<f64> {
        self.report.allocation.capitals.clone()
    }

    #[getter]
    fn price_capitals(&self) -> Vec<f64> {
        self.report.allocation.price_capitals.clone()
    }

    #[getter]
    fn output_values(&self) -> Vec<f64> {
        self.report.allocation.output_values.clone()
    }

    #[getter]
    fn prices(&self) -> Vec<f64> {
        self.report.allocation.prices.clone()
    }

    #[getter]
    fn profits(&self) -> Vec<f64> {
        self.report.allocation.profits.clone()
    }

    #[getter]
    fn surplus_values(&self) -> Vec<f64> {
        self.report.allocation.surplus_values.clone()
    }

    /// Unit production prices, coefficient times unit value.
    #[getter]
    fn unit_prices(&self) -> Vec<f64> {
        self.report
            .allocation
            .coefficients
            .iter()
            .zip(&self.report.labor_values)
            .map(|(x, w)| x * w)
            .collect()
    }

    #[getter]
    fn total_capital(&self) -> f64 {
        self.report.total_capital
    }

    #[getter]
    fn gross_output(&self) -> Vec<f64> {
        self.report.quantities.gross.clone()
    }

    #[getter]
    fn net_output(&self) -> Vec<f64> {
        self.report.quantities.net.clone()
    }

    /// Augmented values, or None for zero-surplus economies.
    #[getter]
    fn augmented_values(&self) -> Option<Vec<f64>> {
        self.report.quantities.augmented_values.clone()
    }

    #[getter]
    fn solver_used(&self) -> String {
        self.report.solver_used.clone()
    }

    /// Residual diagnostics as (name, residual, tolerance, passed) tuples.
    fn diagnostics(&self) -> Vec<(String, f64, f64, bool)> {
        self.report
            .diagnostics
            .iter()
            .map(|l| (l.name.clone(), l.residual, l.tolerance, l.passes()))
            .collect()
    }

    /// The report rendered as aligned text tables.
    #[pyo3(signature = (digits = 9))]
    fn render(&self, digits: usize) -> String {
        let options = SolveOptions {
            digits,
            format: OutputFormat::Text,
            ..SolveOptions::default()
        };
        self.report.render(&options)
    }

    fn __repr__(&self) -> String {
        format!(
            "Solution(r={:.9}, q_star={:.9}, total_capital={:.9}, solver={:?})",
            self.report.eigen.profit_rate,
            self.report.allocation.q_star,
            self.report.total_capital,
            self.report.solver_used,
        )
    }
}

/// Parses a scenario document.
#[pyfunction]
fn parse_scenario(text: &str) -> PyResult<PyEconomy> {
    Ok(PyEconomy {
        inner: transforma::parse_scenario(text).map_err(to_py_err)?,
    })
}

/// Reads and parses a scenario file.
#[pyfunction]
fn load_scenario(path: &str) -> PyResult<PyEconomy> {
    let text = std::fs::read_to_string(path).map_err(|e| PyIOError::new_err(e.to_string()))?;
    parse_scenario(&text)
}

#[pymodule]
fn transforma_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEconomy>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(parse_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(load_scenario, m)?)?;
    Ok(())
}
