//! Wage-basket sweeps: parameterized families of baskets solved sample by
//! sample and emitted as CSV. Iso-value families hold the basket value fixed
//! while shifting weight between two branches, so the exploitation rate stays
//! put while the profit rate moves; scaling families multiply the whole
//! basket by a factor.

use std::fmt::Write as _;

use crate::allocation::{is_zero_surplus, solve_direct, solve_zero_surplus};
use crate::economy::Validated;
use crate::error::{Error, Result};
use crate::price::{build_share_matrix, profit_rate};
use crate::report::resolved_capital;
use crate::value::{labor_values, unit_value_table, wage_structure};

/// A parameterized family of wage baskets. Branch indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepSpec {
    /// Shift basket value between two branches, keeping the total basket
    /// value constant; the parameter runs over [0, 1] where 0 puts the
    /// combined value of the pair entirely on `branch_a`.
    IsoValue {
        branch_a: usize,
        branch_b: usize,
        samples: usize,
    },
    /// Scale the whole basket by t over [t_min, t_max].
    Scale {
        t_min: f64,
        t_max: f64,
        samples: usize,
    },
}

/// Parses a sweep specification document (TOML): `kind = "iso-value"` with
/// `branch_a`, `branch_b` (1-based), `samples`; or `kind = "scale"` with
/// `t_min`, `t_max`, `samples`.
pub fn parse_sweep_spec(text: &str) -> Result<SweepSpec> {
    let table: toml::Table = text
        .parse()
        .map_err(|e| Error::Parse(format!("malformed sweep spec: {e}")))?;
    let kind = table
        .get("kind")
        .and_then(|v| v.as_str())
        .ok_or_else(|| Error::Parse("sweep spec needs a `kind` string".into()))?;
    let get_int = |key: &str| -> Result<i64> {
        table
            .get(key)
            .and_then(|v| v.as_integer())
            .ok_or_else(|| Error::Parse(format!("sweep spec needs integer `{key}`")))
    };
    let get_num = |key: &str| -> Result<f64> {
        table
            .get(key)
            .and_then(|v| match v {
                toml::Value::Integer(i) => Some(*i as f64),
                toml::Value::Float(f) => Some(*f),
                _ => None,
            })
            .ok_or_else(|| Error::Parse(format!("sweep spec needs number `{key}`")))
    };
    let samples = get_int("samples")?;
    if samples < 1 {
        return Err(Error::Parse("samples must be at least 1".into()));
    }
    match kind {
        "iso-value" => {
            let a = get_int("branch_a")?;
            let b = get_int("branch_b")?;
            if a < 1 || b < 1 {
                return Err(Error::Parse("branch indices are 1-based".into()));
            }
            if a == b {
                return Err(Error::Parse(
                    "iso-value sweep needs two distinct branches".into(),
                ));
            }
            Ok(SweepSpec::IsoValue {
                branch_a: a as usize - 1,
                branch_b: b as usize - 1,
                samples: samples as usize,
            })
        }
        "scale" => Ok(SweepSpec::Scale {
            t_min: get_num("t_min")?,
            t_max: get_num("t_max")?,
            samples: samples as usize,
        }),
        other => Err(Error::Parse(format!(
            "unknown sweep kind {other:?}; expected \"iso-value\" or \"scale\""
        ))),
    }
}

/// Outcome of one sweep sample.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub param: f64,
    pub basket: Vec<f64>,
    pub basket_value: f64,
    /// None for infeasible baskets (value above one hour of labor).
    pub solved: Option<SweepSolution>,
}

#[derive(Debug, Clone)]
pub struct SweepSolution {
    pub exploitation: f64,
    pub rate: f64,
    pub q_star: f64,
    pub coefficients: Vec<f64>,
    pub capitals: Vec<f64>,
}

/// Runs the sweep. Infeasible samples are kept in the output with an
/// `infeasible` status rather than dropped. Iso-value runs additionally
/// assert that the exploitation rate is constant across feasible rows.
pub fn run_sweep(economy: &Validated, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    let n = economy.branch_count();
    let lv = labor_values(economy)?;
    let lam = lv.as_slice();
    let base = economy.wage_basket();

    let baskets: Vec<(f64, Vec<f64>)> = match *spec {
        SweepSpec::IsoValue {
            branch_a,
            branch_b,
            samples,
        } => {
            if branch_a >= n || branch_b >= n {
                return Err(Error::Structural(format!(
                    "sweep branch index out of range 1..={n}"
                )));
            }
            let pair_value = lam[branch_a] * base[branch_a] + lam[branch_b] * base[branch_b];
            if pair_value <= 0.0 {
                return Err(Error::Structural(
                    "iso-value sweep needs positive basket value on the chosen branch pair".into(),
                ));
            }
            (0..samples)
                .map(|k| {
                    let s = if samples == 1 {
                        0.5
                    } else {
                        k as f64 / (samples - 1) as f64
                    };
                    let mut basket = base.clone();
                    basket[branch_a] = (1.0 - s) * pair_value / lam[branch_a];
                    basket[branch_b] = s * pair_value / lam[branch_b];
                    (s, basket)
                })
                .collect()
        }
        SweepSpec::Scale {
            t_min,
            t_max,
            samples,
        } => (0..samples)
            .map(|k| {
                let t = if samples == 1 {
                    t_min
                } else {
                    t_min + (t_max - t_min) * k as f64 / (samples - 1) as f64
                };
                (t, base.iter().map(|v| t * v).collect())
            })
            .collect(),
    };

    let mut rows = Vec::with_capacity(baskets.len());
    for (param, basket) in baskets {
        let raw_value: f64 = lam.iter().zip(&basket).map(|(l, v)| l * v).sum();
        let ws = match wage_structure(&lv, &basket) {
            Ok(ws) => ws,
            Err(Error::WageExceedsValue(_)) => {
                rows.push(SweepRow {
                    param,
                    basket,
                    basket_value: raw_value,
                    solved: None,
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let shifted =
            crate::economy::validate(economy.economy().with_wage_basket(basket.clone())?)?;
        let table = unit_value_table(&shifted, &lv, &ws)?;
        let eigen = profit_rate(build_share_matrix(&table)?)?;
        let total = resolved_capital(&shifted, &table);
        let allocation = if is_zero_surplus(&table) {
            solve_zero_surplus(&table, total, shifted.fully_consumed())?
        } else {
            solve_direct(&table, &eigen, total, shifted.fully_consumed())?
        };
        rows.push(SweepRow {
            param,
            basket,
            basket_value: ws.basket_value,
            solved: Some(SweepSolution {
                exploitation: ws.exploitation,
                rate: eigen.profit_rate,
                q_star: allocation.q_star,
                coefficients: allocation.coefficients,
                capitals: allocation.capitals,
            }),
        });
    }

    if matches!(spec, SweepSpec::IsoValue { .. }) {
        let rates: Vec<f64> = rows
            .iter()
            .filter_map(|r| r.solved.as_ref().map(|s| s.exploitation))
            .filter(|e| e.is_finite())
            .collect();
        if let (Some(min), Some(max)) = (
            rates.iter().cloned().reduce(f64::min),
            rates.iter().cloned().reduce(f64::max),
        ) {
            if max - min > 1e-9 {
                return Err(Error::Structural(format!(
                    "iso-value sweep drifted: exploitation rate varies by {:e}",
                    max - min
                )));
            }
        }
    }
    Ok(rows)
}

/// CSV for a sweep: comma separated, header row, `.` decimal separator, LF
/// endings. Infeasible rows keep their parameters and basket and leave the
/// solution columns empty, with `status = infeasible`.
pub fn sweep_csv(rows: &[SweepRow], n: usize) -> String {
    let mut out = String::new();
    let mut header: Vec<String> = vec!["param".into()];
    header.extend((1..=n).map(|i| format!("v_{i}")));
    header.push("lambda_v".into());
    header.push("e".into());
    header.push("r".into());
    header.push("q_star".into());
    header.extend((1..=n).map(|i| format!("x_{i}")));
    header.extend((1..=n).map(|i| format!("K_{i}")));
    header.push("status".into());
    let _ = writeln!(out, "{}", header.join(","));
    let num = |x: f64| {
        if x.is_finite() {
            format!("{x}")
        } else {
            "inf".to_string()
        }
    };
    for row in rows {
        let mut cells: Vec<String> = vec![num(row.param)];
        cells.extend(row.basket.iter().map(|v| num(*v)));
        cells.push(num(row.basket_value));
        match &row.solved {
            Some(s) => {
                cells.push(num(s.exploitation));
                cells.push(num(s.rate));
                cells.push(num(s.q_star));
                cells.extend(s.coefficients.iter().map(|x| num(*x)));
                cells.extend(s.capitals.iter().map(|x| num(*x)));
                cells.push("ok".into());
            }
            None => {
                cells.extend(std::iter::repeat_n(String::new(), 3 + 2 * n));
                cells.push("infeasible".into());
            }
        }
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}
