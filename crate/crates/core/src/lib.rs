//! Transforms labor values into market production prices for an n-branch
//! simple-reproduction economy.
//!
//! Given a technology matrix, direct labor inputs, and a wage basket, the
//! pipeline computes labor values and the exploitation rate, the uniform
//! profit rate from the Perron root of the input-share matrix, the unique
//! capital allocation satisfying both aggregate invariants (total profit =
//! total surplus value, total capital in prices = total capital in values),
//! and the implied physical gross and net outputs.
//!
//! The usual flow is `parse_scenario` -> `validate` -> `solve_scenario`,
//! driven from the `transforma` command line or from the library surface
//! directly.

pub mod allocation;
pub mod economy;
mod error;
pub mod numeric;
pub mod price;
pub mod quantity;
pub mod report;
pub mod sweep;
pub mod value;

pub use allocation::{
    reproduction_rows, solve_direct, solve_iterative, solve_zero_surplus, step_capitals, z_value,
    Allocation,
};
pub use economy::{
    parse_scenario, render_scenario, validate, Economy, Scalar, TotalCapital, Validated,
};
pub use error::{Error, Result};
pub use numeric::{dominant_eigenpair, invert, solve_linear, DenseMatrix};
pub use price::{augmented_similarity_check, build_share_matrix, profit_rate, PriceEigenSystem};
pub use quantity::{augmented_matrix, augmented_values, outputs, QuantitySystem};
pub use report::{solve_scenario, SolveOptions, SolveReport, SolverChoice};
pub use value::{
    labor_values, unit_value_table, wage_structure, LaborValues, UnitValueTable, WageStructure,
};
