//! Helpers shared by the integration suites: a deterministic random-economy
//! generator and the independent numeric oracles used to cross-check the
//! library (cofactor determinants, characteristic-polynomial root search,
//! fixed-point labor values).

// each test target compiles this module and uses its own subset
#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use transforma::economy::{validate, Economy, Validated};
use transforma::numeric::DenseMatrix;

/// A randomized productive economy: column sums of A stay below one, the
/// basket is scaled to a target value below one, branches 2..n-1 are the
/// fully consumed ones.
pub struct RandomEconomy {
    pub economy: Validated,
    pub total_capital: f64,
}

/// Deterministic economy from a seed; `None` when the draw is structurally
/// unusable (never happens with these ranges, kept for clarity).
pub fn random_economy(seed: u64) -> RandomEconomy {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 2 + (rng.random_range(0..4_usize));
    let mut technology = vec![vec![0.0; n]; n];
    for j in 0..n {
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let column_sum = rng.random_range(0.15..0.8);
        for i in 0..n {
            technology[i][j] = raw[i] / total * column_sum;
        }
    }
    let labor: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();

    // labor values by fixed point, to scale the basket without touching the
    // code under test
    let values = fixed_point_labor_values(&technology, &labor, 500);
    let raw_basket: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let raw_value: f64 = values.iter().zip(&raw_basket).map(|(a, b)| a * b).sum();
    let target = rng.random_range(0.2..0.95);
    let basket: Vec<f64> = raw_basket.iter().map(|b| b * target / raw_value).collect();

    let total_capital = rng.random_range(0.5..20.0);
    let fully_consumed: Vec<usize> = (1..n.saturating_sub(1)).collect();
    let economy = Economy::from_parts(
        technology,
        labor,
        basket,
        Some(total_capital),
        fully_consumed,
    )
    .expect("generated dimensions are consistent");
    RandomEconomy {
        economy: validate(economy).expect("column sums below one are productive"),
        total_capital,
    }
}

/// Labor values by the fixed point value <- value * A + l.
pub fn fixed_point_labor_values(a: &[Vec<f64>], l: &[f64], steps: usize) -> Vec<f64> {
    let n = l.len();
    let mut values = l.to_vec();
    for _ in 0..steps {
        let prev = values.clone();
        for i in 0..n {
            values[i] = l[i] + (0..n).map(|j| prev[j] * a[j][i]).sum::<f64>();
        }
    }
    values
}

/// Determinant by cofactor expansion (independent of the library's LU).
pub fn det_cofactor(m: &DenseMatrix) -> f64 {
    fn go(m: &DenseMatrix, active: &[usize], row: usize) -> f64 {
        if active.is_empty() {
            return 1.0;
        }
        let mut acc = 0.0;
        let mut sign = 1.0;
        for &col in active {
            let rest: Vec<usize> = active.iter().copied().filter(|&c| c != col).collect();
            acc += sign * m.get(row, col) * go(m, &rest, row + 1);
            sign = -sign;
        }
        acc
    }
    let all: Vec<usize> = (0..m.rows()).collect();
    go(m, &all, 0)
}

/// Largest real root of det(M - t I), located by sign scan from above the
/// row-sum bound plus bisection; the Perron root of a nonnegative matrix.
pub fn perron_root_char_poly(m: &DenseMatrix) -> f64 {
    let n = m.rows();
    let poly = |t: f64| -> f64 {
        let mut shifted = m.clone();
        for i in 0..n {
            shifted.set(i, i, shifted.get(i, i) - t);
        }
        det_cofactor(&shifted)
    };
    let upper = (0..n)
        .map(|i| m.row(i).iter().sum::<f64>())
        .fold(0.0_f64, f64::max)
        + 1.0;
    let steps = 20_000;
    let mut hi = upper;
    let mut f_hi = poly(hi);
    let mut lo = hi;
    let mut f_lo = f_hi;
    let mut bracketed = false;
    for k in 1..=steps {
        let t = upper * (1.0 - k as f64 / steps as f64);
        let f_t = poly(t);
        if f_t == 0.0 {
            return t;
        }
        if f_t.signum() != f_hi.signum() {
            lo = t;
            f_lo = f_t;
            bracketed = true;
            break;
        }
        hi = t;
        f_hi = f_t;
    }
    assert!(bracketed, "characteristic polynomial never changed sign");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = poly(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn max_rel_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / y.abs().max(1e-300))
        .fold(0.0, f64::max)
}
