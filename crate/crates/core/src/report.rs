//! Pipeline orchestration and rendering: runs validate -> labor values ->
//! wage structure -> unit table -> share matrix -> profit rate -> allocation
//! -> quantities, renders the result as aligned tables or CSV, and computes
//! the cross-validation diagnostics behind the `check` subcommand.

use std::fmt::Write as _;

use crate::allocation::{
    is_zero_surplus, residuals, solve_direct, solve_iterative_default, solve_zero_surplus,
    Allocation,
};
use crate::economy::{TotalCapital, Validated};
use crate::error::{Error, Result};
use crate::price::{
    augmented_similarity_check, build_share_matrix, profit_rate, PriceEigenSystem, SimilarityReport,
};
use crate::quantity::{quantity_system, QuantitySystem};
use crate::value::{
    labor_values, unit_value_table, wage_structure, LaborValues, UnitValueTable, WageStructure,
};

/// Global residual tolerance; overridable per run (the CLI reads
/// TRANSFORMA_TOL).
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// Default significant digits in rendered reports.
pub const DEFAULT_DIGITS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Direct,
    Iterative,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Csv,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub solver: SolverChoice,
    pub digits: usize,
    pub format: OutputFormat,
    /// Rescale the report to this total capital (homothety).
    pub normalize_to: Option<f64>,
    pub tolerance: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            solver: SolverChoice::Direct,
            digits: DEFAULT_DIGITS,
            format: OutputFormat::Text,
            normalize_to: None,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

/// One diagnostic line: a named residual against its tolerance.
#[derive(Debug, Clone)]
pub struct CheckLine {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl CheckLine {
    pub fn passes(&self) -> bool {
        self.residual.is_finite() && self.residual <= self.tolerance
    }
}

/// Everything the solve pipeline produces for one scenario.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub labels: Vec<String>,
    pub warnings: Vec<String>,
    pub labor_values: Vec<f64>,
    pub wage: WageStructure,
    pub table: UnitValueTable,
    pub eigen: PriceEigenSystem,
    pub allocation: Allocation,
    pub quantities: QuantitySystem,
    pub similarity: SimilarityReport,
    pub total_capital: f64,
    pub solver_used: String,
    /// Largest relative deviation between the direct and iterative routes,
    /// when both ran.
    pub cross_solver_gap: Option<f64>,
    pub diagnostics: Vec<CheckLine>,
}

/// Runs the full pipeline on a validated economy.
///
/// Zero-surplus economies reroute to the degenerate solver regardless of the
/// requested route; the rerouting is noted in `solver_used`.
pub fn solve_scenario(economy: &Validated, options: &SolveOptions) -> Result<SolveReport> {
    let lv = labor_values(economy)?;
    let ws = wage_structure(&lv, &economy.wage_basket())?;
    let table = unit_value_table(economy, &lv, &ws)?;
    let shares = build_share_matrix(&table)?;
    let eigen = profit_rate(shares)?;
    let total_capital = resolved_capital(economy, &table);
    let fully_consumed = economy.fully_consumed();

    let (allocation, solver_used, cross_solver_gap) = if is_zero_surplus(&table) {
        let allocation = solve_zero_surplus(&table, total_capital, fully_consumed)?;
        (allocation, "zero-surplus (rerouted)".to_string(), None)
    } else {
        match options.solver {
            SolverChoice::Direct => (
                solve_direct(&table, &eigen, total_capital, fully_consumed)?,
                "direct".to_string(),
                None,
            ),
            SolverChoice::Iterative => (
                solve_iterative_default(&table, &eigen, total_capital, fully_consumed)?,
                "iterative".to_string(),
                None,
            ),
            SolverChoice::Both => {
                let direct = solve_direct(&table, &eigen, total_capital, fully_consumed)?;
                let iterative =
                    solve_iterative_default(&table, &eigen, total_capital, fully_consumed)?;
                let gap = cross_solver_deviation(&direct, &iterative);
                (direct, "both (direct reported)".to_string(), Some(gap))
            }
        }
    };

    let similarity = augmented_similarity_check(economy, &lv, &eigen.shares)?;
    let quantities = quantity_system(economy, &lv, &table, &allocation);

    let (allocation, quantities, total_capital) = match options.normalize_to {
        Some(target) if target > 0.0 => {
            let factor = target / total_capital;
            (allocation.scaled(factor), quantities.scaled(factor), target)
        }
        Some(target) => {
            return Err(Error::Structural(format!(
                "normalize-to target must be positive, got {target}"
            )));
        }
        None => (allocation, quantities, total_capital),
    };

    let labels: Vec<String> = (0..economy.branch_count())
        .map(|i| economy.branch_name(i))
        .collect();
    let diagnostics = diagnostics(
        economy,
        &lv,
        &table,
        &eigen,
        &allocation,
        &quantities,
        &similarity,
        total_capital,
        options.tolerance,
    );

    Ok(SolveReport {
        labels,
        warnings: economy.warnings().to_vec(),
        labor_values: lv.as_slice().to_vec(),
        wage: ws,
        table,
        eigen,
        allocation,
        quantities,
        similarity,
        total_capital,
        solver_used,
        cross_solver_gap,
        diagnostics,
    })
}

/// The scenario's total capital: the given value, or the per-unit committed
/// total when the scenario says `auto`.
pub fn resolved_capital(economy: &Validated, table: &UnitValueTable) -> f64 {
    match economy.total_capital() {
        TotalCapital::Given(s) => s.to_f64(),
        TotalCapital::Auto => table.unit_total_capital,
    }
}

/// Largest relative deviation between two allocations over the scale, the
/// capitals, and the coefficients.
pub fn cross_solver_deviation(a: &Allocation, b: &Allocation) -> f64 {
    let mut gap = (a.q_star - b.q_star).abs() / a.q_star.abs().max(1e-300);
    for (x, y) in a.capitals.iter().zip(&b.capitals) {
        gap = gap.max((x - y).abs() / x.abs().max(1e-300));
    }
    for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
        gap = gap.max((x - y).abs() / x.abs().max(1e-300));
    }
    gap
}

/// Residual diagnostics shared by the solve report and the check command.
///
/// Tolerances derive from the global one: eigen-agreement lines use a tenth
/// of it, the absolute floor for zero-surplus profit equality a hundredth.
#[allow(clippy::too_many_arguments)]
fn diagnostics(
    economy: &Validated,
    values: &LaborValues,
    table: &UnitValueTable,
    eigen: &PriceEigenSystem,
    allocation: &Allocation,
    quantities: &QuantitySystem,
    similarity: &SimilarityReport,
    total_capital: f64,
    tol: f64,
) -> Vec<CheckLine> {
    let n = table.n;
    let mut lines = Vec::new();
    let res = residuals(table, allocation, total_capital, economy.fully_consumed());
    lines.push(CheckLine {
        name: "capital conservation |sum K - K_T|".into(),
        residual: res.capital_conservation,
        tolerance: tol * total_capital,
    });
    let surplus_total = allocation.total_surplus();
    lines.push(CheckLine {
        name: "equality I |sum S - sum PL|".into(),
        residual: res.equality_profit_surplus,
        tolerance: if surplus_total > 0.0 {
            tol * surplus_total
        } else {
            tol / 100.0
        },
    });
    lines.push(CheckLine {
        name: "equality II |sum K_p - sum K|".into(),
        residual: res.equality_capital,
        tolerance: tol * total_capital,
    });
    if !economy.fully_consumed().is_empty() {
        lines.push(CheckLine {
            name: "reproduction rows".into(),
            residual: res.reproduction,
            tolerance: tol * total_capital.max(1.0),
        });
    }
    let mx = eigen.shares.mat_vec(&eigen.eigenvector);
    let eigen_residual = mx
        .iter()
        .zip(&eigen.eigenvector)
        .map(|(a, b)| (a - eigen.perron_root * b).abs())
        .fold(0.0_f64, f64::max);
    lines.push(CheckLine {
        name: "eigen residual |M x - lambda x|".into(),
        residual: eigen_residual,
        tolerance: tol,
    });
    lines.push(CheckLine {
        name: "share matrix vs augmented matrix (entrywise)".into(),
        residual: similarity.max_deviation,
        tolerance: tol / 10.0,
    });
    lines.push(CheckLine {
        name: "Perron roots of both routes".into(),
        residual: similarity.root_gap(),
        tolerance: tol / 10.0,
    });
    lines.push(CheckLine {
        name: "net-output formula agreement".into(),
        residual: quantities.formula_gap,
        tolerance: tol * total_capital.max(1.0),
    });
    for &k in economy.fully_consumed() {
        lines.push(CheckLine {
            name: format!("net output of fully consumed branch {}", k + 1),
            residual: quantities.net[k].abs(),
            tolerance: tol * total_capital.max(1.0),
        });
    }
    let min_net = quantities.net.iter().cloned().fold(f64::INFINITY, f64::min);
    lines.push(CheckLine {
        name: "net-output nonnegativity (negative part)".into(),
        residual: (-min_net).max(0.0),
        tolerance: tol * total_capital.max(1.0),
    });
    let value_identity = (0..n)
        .map(|i| (values.as_slice()[i] * quantities.gross[i] - allocation.output_values[i]).abs())
        .fold(0.0_f64, f64::max);
    lines.push(CheckLine {
        name: "value identity |w_i g_i - W_i|".into(),
        residual: value_identity,
        tolerance: tol * total_capital.max(1.0),
    });
    lines
}

/// Check command: runs every applicable solver and collects all residual
/// lines; `all_pass` decides the exit status.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub notes: Vec<String>,
    pub lines: Vec<CheckLine>,
}

impl CheckReport {
    pub fn all_pass(&self) -> bool {
        self.lines.iter().all(CheckLine::passes)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        let width = self.lines.iter().map(|l| l.name.len()).max().unwrap_or(0);
        for line in &self.lines {
            let _ = writeln!(
                out,
                "{:<width$}  {:>13.6e}  (tol {:>9.3e})  {}",
                line.name,
                line.residual,
                line.tolerance,
                if line.passes() { "pass" } else { "FAIL" },
            );
        }
        let _ = writeln!(
            out,
            "{}",
            if self.all_pass() {
                "all checks passed"
            } else {
                "CHECKS FAILED"
            }
        );
        out
    }
}

/// Runs both solvers (when applicable) plus the similarity and quantity
/// cross-checks, returning every residual.
pub fn check_scenario(economy: &Validated, tolerance: f64) -> Result<CheckReport> {
    let mut notes: Vec<String> = economy
        .warnings()
        .iter()
        .map(|w| format!("warning: {w}"))
        .collect();
    let options = SolveOptions {
        tolerance,
        ..SolveOptions::default()
    };
    let report = solve_scenario(economy, &options)?;
    let mut lines = report.diagnostics.clone();
    notes.push(format!("solver route: {}", report.solver_used));

    if is_zero_surplus(&report.table) {
        // prices equal values on the degenerate route
        let gap = report
            .allocation
            .prices
            .iter()
            .zip(&report.allocation.output_values)
            .map(|(p, w)| (p - w).abs())
            .fold(0.0_f64, f64::max);
        lines.push(CheckLine {
            name: "prices equal values (zero surplus)".into(),
            residual: gap,
            tolerance: tolerance * report.total_capital.max(1.0),
        });
    } else {
        let iterative = solve_iterative_default(
            &report.table,
            &report.eigen,
            report.total_capital,
            economy.fully_consumed(),
        )?;
        lines.push(CheckLine {
            name: "cross-solver deviation (direct vs iterative)".into(),
            residual: cross_solver_deviation(&report.allocation, &iterative),
            tolerance: 1e-6,
        });
    }
    Ok(CheckReport { notes, lines })
}

/// Formats a value to `digits` significant digits (at least one).
pub fn sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "infinite".to_string()
        } else {
            "-infinite".to_string()
        };
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if magnitude < -(digits as i32 + 3) {
        return format!("{x:.*e}", digits - 1);
    }
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn render_text(&self, out: &mut String) {
        let cols = self.header.len();
        let mut widths: Vec<usize> = self.header.iter().map(String::len).collect();
        for row in &self.rows {
            for (c, cell) in row.iter().enumerate() {
                widths[c] = widths[c].max(cell.len());
            }
        }
        for (c, cell) in self.header.iter().enumerate() {
            if c == 0 {
                let _ = write!(out, "{:<width$}", cell, width = widths[c]);
            } else {
                let _ = write!(out, "  {:>width$}", cell, width = widths[c]);
            }
        }
        let _ = writeln!(out);
        for row in &self.rows {
            for c in 0..cols {
                let cell = row.get(c).map(String::as_str).unwrap_or("");
                if c == 0 {
                    let _ = write!(out, "{:<width$}", cell, width = widths[c]);
                } else {
                    let _ = write!(out, "  {:>width$}", cell, width = widths[c]);
                }
            }
            let _ = writeln!(out);
        }
    }

    fn render_csv(&self, out: &mut String) {
        let escape = |s: &str| {
            if s.contains(',') || s.contains('"') {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.to_string()
            }
        };
        let _ = writeln!(
            out,
            "{}",
            self.header
                .iter()
                .map(|c| escape(c))
                .collect::<Vec<_>>()
                .join(",")
        );
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{}",
                row.iter().map(|c| escape(c)).collect::<Vec<_>>().join(",")
            );
        }
    }
}

impl SolveReport {
    /// Renders the report in the requested format with `digits` significant
    /// digits. Totals rows are re-added at full precision before rounding.
    pub fn render(&self, options: &SolveOptions) -> String {
        match options.format {
            OutputFormat::Text => self.render_text(options.digits),
            OutputFormat::Csv => self.render_csv(options.digits),
        }
    }

    fn sections(&self, digits: usize) -> Vec<(String, Table)> {
        let n = self.table.n;
        let f = |x: f64| sig(x, digits);
        let mut sections = Vec::new();

        // per-unit value table: rows are branches, columns input commodities
        let mut header = vec!["".to_string()];
        header.extend(self.labels.iter().cloned());
        header.push("pl".into());
        header.push("w".into());
        let mut rows = Vec::new();
        for j in 0..n {
            let mut row = vec![self.labels[j].clone()];
            for i in 0..n {
                row.push(f(self.table.inputs.get(i, j)));
            }
            row.push(f(self.table.surplus[j]));
            row.push(f(self.table.value[j]));
            rows.push(row);
        }
        let mut totals = vec!["Total".to_string()];
        for i in 0..n {
            totals.push(f((0..n).map(|j| self.table.inputs.get(i, j)).sum()));
        }
        totals.push(f(self.table.surplus.iter().sum()));
        totals.push(f(self.table.value.iter().sum()));
        rows.push(totals);
        sections.push((
            "Value table for the production of one unit of each commodity".to_string(),
            Table {
                header: header.clone(),
                rows,
            },
        ));

        // distribution table: branch i consumes K_i * inputs_pc[(j, i)]
        let alloc = &self.allocation;
        let labor_employed: Vec<f64> = (0..n)
            .map(|i| alloc.capitals[i] * self.table.labor[i] / self.table.capital[i])
            .collect();
        let mut header2 = vec!["".to_string()];
        header2.extend(self.labels.iter().cloned());
        header2.extend(["pl".into(), "W".into(), "Wages".into()]);
        let mut rows = Vec::new();
        for i in 0..n {
            let mut row = vec![self.labels[i].clone()];
            for j in 0..n {
                row.push(f(alloc.capitals[i] * self.table.inputs_pc.get(j, i)));
            }
            row.push(f(alloc.surplus_values[i]));
            row.push(f(alloc.output_values[i]));
            row.push(f(labor_employed[i] * self.table.basket_value));
            rows.push(row);
        }
        let mut totals = vec!["Total".to_string()];
        for j in 0..n {
            totals.push(f((0..n)
                .map(|i| alloc.capitals[i] * self.table.inputs_pc.get(j, i))
                .sum()));
        }
        totals.push(f(alloc.total_surplus()));
        totals.push(f(alloc.output_values.iter().sum()));
        totals.push(f(labor_employed
            .iter()
            .map(|l| l * self.table.basket_value)
            .sum()));
        rows.push(totals);
        sections.push((
            "Distribution consistent with social need (simple reproduction)".to_string(),
            Table {
                header: header2,
                rows,
            },
        ));

        // price table
        let hourly_basket_price: f64 = (0..n)
            .map(|j| alloc.coefficients[j] * self.labor_values[j] * self.economy_basket(j))
            .sum();
        let mut header3 = vec!["".to_string()];
        header3.extend(self.labels.iter().cloned());
        header3.extend(["S".into(), "W".into(), "Wages".into()]);
        let mut rows = Vec::new();
        for i in 0..n {
            let mut row = vec![self.labels[i].clone()];
            for j in 0..n {
                row.push(f(alloc.coefficients[j]
                    * alloc.capitals[i]
                    * self.table.inputs_pc.get(j, i)));
            }
            row.push(f(alloc.profits[i]));
            row.push(f(alloc.prices[i]));
            row.push(f(labor_employed[i] * hourly_basket_price));
            rows.push(row);
        }
        let mut totals = vec!["Total".to_string()];
        for j in 0..n {
            totals.push(f((0..n)
                .map(|i| alloc.coefficients[j] * alloc.capitals[i] * self.table.inputs_pc.get(j, i))
                .sum()));
        }
        totals.push(f(alloc.total_profit()));
        totals.push(f(alloc.prices.iter().sum()));
        totals.push(f(labor_employed
            .iter()
            .map(|l| l * hourly_basket_price)
            .sum()));
        rows.push(totals);
        sections.push((
            "Prices".to_string(),
            Table {
                header: header3,
                rows,
            },
        ));

        // summary block
        let header4 = vec![
            "".to_string(),
            "r".into(),
            "x_i".into(),
            "K".into(),
            "K_p".into(),
            "Unit price".into(),
        ];
        let mut rows = Vec::new();
        for i in 0..n {
            rows.push(vec![
                self.labels[i].clone(),
                f(self.eigen.profit_rate),
                f(alloc.coefficients[i]),
                f(alloc.capitals[i]),
                f(alloc.price_capitals[i]),
                f(alloc.coefficients[i] * self.labor_values[i]),
            ]);
        }
        rows.push(vec![
            "TOTAL".to_string(),
            String::new(),
            String::new(),
            f(alloc.total_capital()),
            f(alloc.total_price_capital()),
            String::new(),
        ]);
        sections.push((
            "Summary".to_string(),
            Table {
                header: header4,
                rows,
            },
        ));

        // quantities block
        let header5 = vec!["".to_string()]
            .into_iter()
            .chain(self.labels.iter().cloned())
            .collect::<Vec<_>>();
        let mut rows = Vec::new();
        match &self.quantities.augmented_values {
            Some(lp) => {
                let mut row = vec!["Lambda'".to_string()];
                row.extend(lp.iter().map(|x| f(*x)));
                rows.push(row);
            }
            None => {
                let mut row = vec!["Lambda'".to_string()];
                row.extend((0..n).map(|_| "undefined".to_string()));
                rows.push(row);
            }
        }
        let mut g_row = vec!["g".to_string()];
        g_row.extend(self.quantities.gross.iter().map(|x| f(*x)));
        rows.push(g_row);
        let mut y_row = vec!["y".to_string()];
        y_row.extend(self.quantities.net.iter().map(|x| f(*x)));
        rows.push(y_row);
        sections.push((
            "Quantities".to_string(),
            Table {
                header: header5,
                rows,
            },
        ));

        // diagnostics block
        let header6 = vec![
            "check".to_string(),
            "residual".into(),
            "tolerance".into(),
            "status".into(),
        ];
        let rows = self
            .diagnostics
            .iter()
            .map(|line| {
                vec![
                    line.name.clone(),
                    format!("{:.3e}", line.residual),
                    format!("{:.3e}", line.tolerance),
                    if line.passes() {
                        "pass".into()
                    } else {
                        "FAIL".to_string()
                    },
                ]
            })
            .collect();
        sections.push((
            "Diagnostics".to_string(),
            Table {
                header: header6,
                rows,
            },
        ));

        sections
    }

    // the report keeps no Economy reference; the basket column used for the
    // priced wage is reconstructed from the table
    fn economy_basket(&self, j: usize) -> f64 {
        // value share of commodity j in the basket times basket value, per
        // unit of labor value: v_j = (share_j * basket_value) / value_j
        match &self.wage.shares {
            Some(shares) => shares[j] * self.wage.basket_value / self.labor_values[j],
            None => 0.0,
        }
    }

    fn render_text(&self, digits: usize) -> String {
        let mut out = String::new();
        for warning in &self.warnings {
            let _ = writeln!(out, "warning: {warning}");
        }
        let _ = writeln!(out, "Solver: {}", self.solver_used);
        if let Some(gap) = self.cross_solver_gap {
            let _ = writeln!(out, "Cross-solver deviation: {:.3e}", gap);
        }
        let f = |x: f64| sig(x, digits);
        let _ = writeln!(
            out,
            "Labor values: {}",
            self.labor_values
                .iter()
                .map(|x| f(*x))
                .collect::<Vec<_>>()
                .join("  ")
        );
        let _ = writeln!(
            out,
            "Basket value (Lambda v): {}",
            f(self.wage.basket_value)
        );
        let _ = writeln!(out, "Exploitation rate e: {}", f(self.wage.exploitation));
        let _ = writeln!(out, "Uniform profit rate r: {}", f(self.eigen.profit_rate));
        let _ = writeln!(out, "Price scale q*: {}", f(self.allocation.q_star));
        let _ = writeln!(out, "Total capital: {}", f(self.total_capital));
        let _ = writeln!(
            out,
            "Total surplus value = total profit: {}",
            f(self.allocation.total_surplus())
        );
        for (title, table) in self.sections(digits) {
            let _ = writeln!(out);
            let _ = writeln!(out, "{title}");
            table.render_text(&mut out);
        }
        out
    }

    fn render_csv(&self, digits: usize) -> String {
        let mut out = String::new();
        let f = |x: f64| sig(x, digits);
        let _ = writeln!(out, "# scalars");
        let _ = writeln!(out, "name,value");
        let _ = writeln!(out, "solver,{}", self.solver_used);
        let _ = writeln!(out, "basket_value,{}", f(self.wage.basket_value));
        let _ = writeln!(out, "exploitation,{}", f(self.wage.exploitation));
        let _ = writeln!(out, "profit_rate,{}", f(self.eigen.profit_rate));
        let _ = writeln!(out, "q_star,{}", f(self.allocation.q_star));
        let _ = writeln!(out, "total_capital,{}", f(self.total_capital));
        let _ = writeln!(out, "total_surplus,{}", f(self.allocation.total_surplus()));
        for (title, table) in self.sections(digits) {
            let _ = writeln!(out, "# {title}");
            table.render_csv(&mut out);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::economy::{parse_scenario, validate};

    fn first_case() -> Validated {
        validate(
            parse_scenario(
                r#"
n = 3
labels = ["Wheat", "Iron", "Meat"]
A = [
  ["186/450", "54/21", "30/60"],
  ["12/450", "6/21", "3/60"],
  ["9/450", "6/21", "15/60"],
]
l = ["18/450", "12/21", "30/60"]
v = [2, 0, "1/6"]
K_T = 2.37022
fully_consumed = [2]
"#,
            )
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn solve_report_carries_reference_numbers() {
        let economy = first_case();
        let report = solve_scenario(&economy, &SolveOptions::default()).unwrap();
        assert!((report.eigen.profit_rate - 0.185374125).abs() <= 1e-8);
        assert!((report.total_capital - 2.37022).abs() <= 1e-12);
        assert!((report.allocation.total_surplus() - 0.43938).abs() <= 1e-3);
        assert!(report.diagnostics.iter().all(CheckLine::passes));
        assert_eq!(report.solver_used, "direct");
    }

    #[test]
    fn rendered_output_is_deterministic() {
        let economy = first_case();
        let options = SolveOptions::default();
        let a = solve_scenario(&economy, &options).unwrap().render(&options);
        let b = solve_scenario(&economy, &options).unwrap().render(&options);
        assert_eq!(a, b);
        assert!(a.contains("0.185374125"));
        assert!(a.contains("Wheat"));
    }

    #[test]
    fn rendered_tables_match_frozen_oracle_rows() {
        // first rows of the distribution and price tables, frozen from an
        // independent recomputation of the whole pipeline
        let economy = first_case();
        let options = SolveOptions::default();
        let text = solve_scenario(&economy, &options).unwrap().render(&options);
        for cell in [
            // distribution: inputs, pl, W, wages of the wheat branch
            "0.727431718",
            "0.393206334",
            "0.196603167",
            "0.157282534",
            "1.47452375",
            "0.167112692",
            // prices: priced inputs, profit, price, priced wages
            "0.784548612",
            "0.393806517",
            "0.163247667",
            "0.248698444",
            "1.59030124",
            "0.168036016",
        ] {
            assert!(text.contains(cell), "missing {cell} in rendered report");
        }
    }

    #[test]
    fn csv_format_contains_sections() {
        let economy = first_case();
        let options = SolveOptions {
            format: OutputFormat::Csv,
            ..SolveOptions::default()
        };
        let csv = solve_scenario(&economy, &options).unwrap().render(&options);
        assert!(csv.contains("# scalars"));
        assert!(csv.contains("profit_rate,0.185374125"));
        assert!(csv.contains("# Summary"));
    }

    #[test]
    fn csv_quotes_labels_containing_commas() {
        let economy = validate(
            parse_scenario(
                r#"
n = 2
labels = ["Grain, winter", "Tools"]
A = [["1/5", "1/2"], ["1/10", "1/5"]]
l = ["1/2", 1]
v = ["1/2", "1/10"]
"#,
            )
            .unwrap(),
        )
        .unwrap();
        let options = SolveOptions {
            format: OutputFormat::Csv,
            ..SolveOptions::default()
        };
        let csv = solve_scenario(&economy, &options).unwrap().render(&options);
        assert!(csv.contains("\"Grain, winter\""));
    }

    #[test]
    fn both_solvers_agree_through_the_pipeline() {
        let economy = first_case();
        let options = SolveOptions {
            solver: SolverChoice::Both,
            ..SolveOptions::default()
        };
        let report = solve_scenario(&economy, &options).unwrap();
        assert!(report.cross_solver_gap.unwrap() <= 1e-6);
    }

    #[test]
    fn normalize_to_rescales_extensives() {
        let economy = first_case();
        let base = solve_scenario(&economy, &SolveOptions::default()).unwrap();
        let options = SolveOptions {
            normalize_to: Some(10.0),
            ..SolveOptions::default()
        };
        let scaled = solve_scenario(&economy, &options).unwrap();
        let factor = 10.0 / 2.37022;
        assert!((scaled.total_capital - 10.0).abs() <= 1e-12);
        assert!(
            (scaled.allocation.capitals[0] - factor * base.allocation.capitals[0]).abs() <= 1e-9
        );
        assert!((scaled.allocation.q_star - base.allocation.q_star).abs() <= 1e-12);
        assert!((scaled.quantities.gross[0] - factor * base.quantities.gross[0]).abs() <= 1e-8);
    }

    #[test]
    fn check_passes_on_reference_scenario() {
        let economy = first_case();
        let report = check_scenario(&economy, DEFAULT_TOLERANCE).unwrap();
        assert!(report.all_pass(), "{}", report.render());
    }

    #[test]
    fn zero_surplus_scenario_reroutes_and_reports() {
        let economy = validate(
            parse_scenario(
                r#"
n = 3
A = [
  ["186/450", "54/21", "30/60"],
  ["12/450", "6/21", "3/60"],
  ["9/450", "6/21", "15/60"],
]
l = ["18/450", "12/21", "30/60"]
v = [2, 0, 0.7]
K_T = 2.90909
fully_consumed = [2]
"#,
            )
            .unwrap(),
        )
        .unwrap();
        let report = solve_scenario(&economy, &SolveOptions::default()).unwrap();
        assert_eq!(report.solver_used, "zero-surplus (rerouted)");
        assert!(report.eigen.profit_rate.abs() <= 1e-10);
        assert_eq!(report.allocation.coefficients, vec![1.0; 3]);
        let check = check_scenario(&economy, DEFAULT_TOLERANCE).unwrap();
        assert!(check.all_pass(), "{}", check.render());
        assert!(check
            .lines
            .iter()
            .any(|l| l.name.contains("prices equal values")));
    }

    #[test]
    fn pipeline_types_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<crate::economy::Validated>();
        assert_send_sync::<crate::value::UnitValueTable>();
        assert_send_sync::<crate::price::PriceEigenSystem>();
        assert_send_sync::<crate::allocation::Allocation>();
        assert_send_sync::<SolveReport>();
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(sig(0.185374125, 9), "0.185374125");
        assert_eq!(sig(2.370216450, 9), "2.37021645");
        assert_eq!(sig(0.0, 9), "0");
        assert_eq!(sig(f64::INFINITY, 9), "infinite");
        assert_eq!(sig(1.5, 3), "1.50");
    }
}
