//! Property tests for the spec-level invariants: conservation laws, scale
//! freedom, oracle agreement, and the Hawkins-Simon acceptance boundary.

mod common;

use common::det_cofactor;
use proptest::collection::vec;
use proptest::prelude::*;

use transforma::allocation::{residuals, solve_direct};
use transforma::economy::{parse_scenario, render_scenario, validate, Economy};
use transforma::numeric::{dominant_eigenpair, invert, solve_linear, DenseMatrix};
use transforma::price::{augmented_similarity_check, build_share_matrix, profit_rate};
use transforma::value::{labor_values, unit_value_table, wage_structure};
use transforma::Error;

/// Entries for a productive technology column: scaled to a column sum drawn
/// below one.
fn productive_technology(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    vec(vec(0.05..1.0_f64, n), n).prop_flat_map(move |raw| {
        vec(0.1..0.85_f64, n).prop_map(move |sums| {
            let mut a = vec![vec![0.0; n]; n];
            for j in 0..n {
                let total: f64 = (0..n).map(|i| raw[i][j]).sum();
                for i in 0..n {
                    a[i][j] = raw[i][j] / total * sums[j];
                }
            }
            a
        })
    })
}

#[derive(Debug, Clone)]
struct EconomyParts {
    technology: Vec<Vec<f64>>,
    labor: Vec<f64>,
    basket_raw: Vec<f64>,
    basket_value: f64,
}

fn economy_parts(n: usize) -> impl Strategy<Value = EconomyParts> {
    (
        productive_technology(n),
        vec(0.1..1.0_f64, n),
        vec(0.05..1.0_f64, n),
        0.2..0.95_f64,
    )
        .prop_map(
            |(technology, labor, basket_raw, basket_value)| EconomyParts {
                technology,
                labor,
                basket_raw,
                basket_value,
            },
        )
}

/// Materializes the parts into a validated economy with the basket scaled to
/// the drawn value.
fn build(parts: &EconomyParts) -> transforma::Validated {
    let n = parts.labor.len();
    let probe = Economy::from_parts(
        parts.technology.clone(),
        parts.labor.clone(),
        vec![0.0; n],
        None,
        (1..n.saturating_sub(1)).collect(),
    )
    .unwrap();
    let validated = validate(probe).unwrap();
    let lv = labor_values(&validated).unwrap();
    let raw_value: f64 = lv
        .as_slice()
        .iter()
        .zip(&parts.basket_raw)
        .map(|(a, b)| a * b)
        .sum();
    let basket: Vec<f64> = parts
        .basket_raw
        .iter()
        .map(|b| b * parts.basket_value / raw_value)
        .collect();
    validate(validated.economy().with_wage_basket(basket).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Value conservation: w_j = sum_i c_ij + pl_j for every branch, and the
    /// variable part of every column is labor_j times the basket value.
    #[test]
    fn value_conservation_and_wage_decomposition(parts in (2..=5_usize).prop_flat_map(economy_parts)) {
        let economy = build(&parts);
        let lv = labor_values(&economy).unwrap();
        let ws = wage_structure(&lv, &economy.wage_basket()).unwrap();
        let table = unit_value_table(&economy, &lv, &ws).unwrap();
        let n = table.n;
        let a = economy.technology();
        for j in 0..n {
            let inputs: f64 = (0..n).map(|i| table.inputs.get(i, j)).sum();
            prop_assert!((table.value[j] - inputs - table.surplus[j]).abs() <= 1e-9);
            let variable: f64 = (0..n)
                .map(|i| table.inputs.get(i, j) - a.get(i, j) * lv.as_slice()[i])
                .sum();
            prop_assert!((variable - table.labor[j] * table.basket_value).abs() <= 1e-12);
            let pc_sum: f64 = (0..n).map(|i| table.inputs_pc.get(i, j)).sum();
            prop_assert!((pc_sum - 1.0).abs() <= 1e-12);
            prop_assert!((table.value_pc[j] - 1.0 - table.surplus_pc[j]).abs() <= 1e-12);
        }
    }

    /// The share matrix, its Perron root, the profit rate, and the
    /// eigenvector are invariant under positive rescaling of any table
    /// column.
    #[test]
    fn share_matrix_is_scale_free(
        parts in (2..=4_usize).prop_flat_map(economy_parts),
        factor in 0.1..10.0_f64,
        column in 0..4_usize,
    ) {
        let economy = build(&parts);
        let n = economy.branch_count();
        let column = column % n;
        let lv = labor_values(&economy).unwrap();
        let ws = wage_structure(&lv, &economy.wage_basket()).unwrap();
        let table = unit_value_table(&economy, &lv, &ws).unwrap();
        let mut inputs = table.inputs.clone();
        for i in 0..n {
            inputs.set(i, column, inputs.get(i, column) * factor);
        }
        let mut surplus = table.surplus.clone();
        surplus[column] *= factor;
        let mut value = table.value.clone();
        value[column] *= factor;
        let mut labor = table.labor.clone();
        labor[column] *= factor;
        let scaled = transforma::UnitValueTable::from_columns(
            inputs, surplus, value, labor, table.basket_value,
        ).unwrap();
        let m = build_share_matrix(&table).unwrap();
        let m2 = build_share_matrix(&scaled).unwrap();
        for j in 0..n {
            for i in 0..n {
                prop_assert!((m.get(j, i) - m2.get(j, i)).abs() <= 1e-12);
            }
        }
        let ps = profit_rate(m).unwrap();
        let ps2 = profit_rate(m2).unwrap();
        prop_assert!((ps.perron_root - ps2.perron_root).abs() <= 1e-12);
        prop_assert!((ps.profit_rate - ps2.profit_rate).abs() <= 1e-12);
        for (x, y) in ps.eigenvector.iter().zip(&ps2.eigenvector) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    /// Eigenvector positivity for strictly positive technologies, and the
    /// Perron root agreement between the share and augmented routes.
    #[test]
    fn eigenvector_positive_and_roots_agree(parts in (2..=5_usize).prop_flat_map(economy_parts)) {
        let economy = build(&parts);
        let lv = labor_values(&economy).unwrap();
        let ws = wage_structure(&lv, &economy.wage_basket()).unwrap();
        let table = unit_value_table(&economy, &lv, &ws).unwrap();
        let shares = build_share_matrix(&table).unwrap();
        let ps = profit_rate(shares).unwrap();
        prop_assert!(economy.warnings().is_empty(), "positive technology is irreducible");
        for x in &ps.eigenvector {
            prop_assert!(*x > 0.0);
        }
        prop_assert!(ps.profit_rate >= -1e-12);
        prop_assert!(ps.perron_root > 0.0 && ps.perron_root <= 1.0 + 1e-12);
        let report = augmented_similarity_check(&economy, &lv, &ps.shares).unwrap();
        prop_assert!(report.max_deviation <= 1e-9);
        prop_assert!(report.root_gap() <= 1e-9);
    }

    /// Two baskets of equal value produce the same exploitation rate and the
    /// same surplus column.
    #[test]
    fn iso_value_baskets_share_exploitation(
        parts in (3..=5_usize).prop_flat_map(economy_parts),
        shift in 0.0..1.0_f64,
    ) {
        let economy = build(&parts);
        let lv = labor_values(&economy).unwrap();
        let lam = lv.as_slice();
        let base = economy.wage_basket();
        // move a fraction of branch 1's basket value onto branch 2
        let moved = shift * lam[0] * base[0];
        let mut basket = base.clone();
        basket[0] -= moved / lam[0];
        basket[1] += moved / lam[1];
        let ws_a = wage_structure(&lv, &base).unwrap();
        let ws_b = wage_structure(&lv, &basket).unwrap();
        prop_assert!((ws_a.exploitation - ws_b.exploitation).abs() <= 1e-12);
        let shifted = validate(economy.economy().with_wage_basket(basket).unwrap()).unwrap();
        let ta = unit_value_table(&economy, &lv, &ws_a).unwrap();
        let tb = unit_value_table(&shifted, &lv, &ws_b).unwrap();
        for j in 0..ta.n {
            prop_assert!((ta.surplus[j] - tb.surplus[j]).abs() <= 1e-12);
        }
    }

    /// Feasible random economies satisfy both aggregate equalities and the
    /// reproduction constraints at the solver's tolerance.
    #[test]
    fn solved_allocations_satisfy_invariants(
        parts in (2..=5_usize).prop_flat_map(economy_parts),
        total in 0.5..20.0_f64,
    ) {
        let economy = build(&parts);
        let lv = labor_values(&economy).unwrap();
        let ws = wage_structure(&lv, &economy.wage_basket()).unwrap();
        let table = unit_value_table(&economy, &lv, &ws).unwrap();
        let eigen = profit_rate(build_share_matrix(&table).unwrap()).unwrap();
        match solve_direct(&table, &eigen, total, economy.fully_consumed()) {
            Err(Error::NegativeCapital { .. }) => {} // infeasible draw
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
            Ok(allocation) => {
                let res = residuals(&table, &allocation, total, economy.fully_consumed());
                prop_assert!(res.capital_conservation <= 1e-9 * total);
                prop_assert!(res.equality_profit_surplus <= 1e-8 * total);
                prop_assert!(res.equality_capital <= 1e-8 * total);
                prop_assert!(res.reproduction <= 1e-8);
                for k in &allocation.capitals {
                    prop_assert!(*k > 0.0);
                }
            }
        }
    }

    /// solve_linear and invert agree, and elimination residuals stay small.
    #[test]
    fn solve_and_invert_agree_on_random_systems(
        entries in vec(-10.0..10.0_f64, 16),
        rhs in vec(-10.0..10.0_f64, 4),
    ) {
        let mut m = DenseMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                m.set(i, j, entries[i * 4 + j]);
            }
            // diagonal boost keeps the draws comfortably nonsingular
            m.set(i, i, m.get(i, i) + 25.0);
        }
        let x = solve_linear(&m, &rhs).unwrap();
        let back = m.mat_vec(&x);
        let b_norm = rhs.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        for (lhs, want) in back.iter().zip(&rhs) {
            prop_assert!((lhs - want).abs() <= 1e-10 * (1.0 + b_norm));
        }
        let inv = invert(&m).unwrap();
        let via_inverse = inv.mat_vec(&rhs);
        for (a, b) in x.iter().zip(&via_inverse) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
    }

    /// Perron bounds: the dominant eigenvalue of a nonnegative matrix lies
    /// between the smallest and largest row sums.
    #[test]
    fn perron_root_within_row_sum_bounds(entries in vec(0.0..1.0_f64, 9)) {
        let mut m = DenseMatrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                m.set(i, j, entries[i * 3 + j] + 0.01);
            }
        }
        let (root, x) = dominant_eigenpair(&m, 1e-12, 200_000).unwrap();
        let sums: Vec<f64> = (0..3).map(|i| m.row(i).iter().sum()).collect();
        let lo = sums.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = sums.iter().cloned().fold(0.0_f64, f64::max);
        prop_assert!(root >= lo - 1e-9 && root <= hi + 1e-9);
        let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() <= 1e-12);
    }

    /// The validation boundary matches the brute-force Hawkins-Simon check:
    /// accepted iff every leading principal minor of I - A is positive.
    #[test]
    fn hawkins_simon_boundary_matches_brute_force(
        entries in vec(0.0..0.9_f64, 9),
        scale in 0.5..2.2_f64,
    ) {
        let a: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..3).map(|j| entries[i * 3 + j] * scale).collect())
            .collect();
        let economy = Economy::from_parts(
            a.clone(),
            vec![1.0, 1.0, 1.0],
            vec![0.0, 0.0, 0.0],
            None,
            vec![1],
        ).unwrap();
        let mut i_minus_a = DenseMatrix::identity(3);
        for i in 0..3 {
            for j in 0..3 {
                i_minus_a.set(i, j, i_minus_a.get(i, j) - a[i][j]);
            }
        }
        let minors_positive = (1..=3).all(|k| det_cofactor(&i_minus_a.leading(k)) > 0.0);
        match validate(economy) {
            Ok(_) => prop_assert!(minors_positive),
            Err(Error::NonProductive { .. }) => prop_assert!(!minors_positive),
            Err(e) => return Err(TestCaseError::fail(format!("unexpected: {e}"))),
        }
    }

    /// The parser returns errors, never panics, on arbitrary input.
    #[test]
    fn parser_never_panics(text in "[ -~\n]{0,300}") {
        let _ = parse_scenario(&text);
        let _ = transforma::sweep::parse_sweep_spec(&text);
    }

    /// Rational literals at the integer boundary are rejected, not panicked
    /// on.
    #[test]
    fn extreme_rational_literals_are_handled(numer in any::<i64>(), denom in any::<i64>()) {
        let text = format!(
            "n = 2\nA = [[\"{numer}/{denom}\", 0], [0, 0]]\nl = [1, 1]\nv = [0, 0]\n"
        );
        let _ = parse_scenario(&text);
    }

    /// Scenario round trip: parse(render(e)) reproduces the economy exactly,
    /// for mixed rational and decimal entries.
    #[test]
    fn scenario_round_trip(
        numerators in vec(0..400_i64, 4),
        denominators in vec(1..60_i64, 4),
        decimals in vec(0.0..3.0_f64, 2),
        total in 0.5..10.0_f64,
    ) {
        let text = format!(
            "n = 2\nA = [[\"{}/{}\", {}], [\"{}/{}\", \"{}/{}\"]]\nl = [{}, \"{}/{}\"]\nv = [0, 0]\nK_T = {total}\n",
            numerators[0], denominators[0] + 400, decimals[0],
            numerators[1], denominators[1] + 400,
            numerators[2], denominators[2] + 400,
            decimals[1] + 0.1,
            numerators[3] + 1, denominators[3],
        );
        let parsed = parse_scenario(&text).unwrap();
        let rendered = render_scenario(&parsed);
        let again = parse_scenario(&rendered).unwrap();
        let rendered_twice = render_scenario(&again);
        prop_assert_eq!(rendered, rendered_twice);
        prop_assert_eq!(parsed.technology(), again.technology());
        prop_assert_eq!(parsed.labor(), again.labor());
        prop_assert_eq!(parsed.total_capital(), again.total_capital());
    }
}
