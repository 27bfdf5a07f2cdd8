//! Scenario input: the economy's technology matrix, labor and wage vectors,
//! total capital, and the set of fully consumed branches, together with
//! parsing, rendering, and validation of the productivity preconditions.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::ops::Deref;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::numeric::{determinant, DenseMatrix};

/// A scenario number: either an exact rational kept for round-tripping, or a
/// plain floating-point value. Internal computation always works on the `f64`
/// projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scalar {
    Rational(Ratio<i64>),
    Real(f64),
}

impl Scalar {
    pub fn to_f64(self) -> f64 {
        match self {
            Scalar::Rational(r) => *r.numer() as f64 / *r.denom() as f64,
            Scalar::Real(x) => x,
        }
    }

    pub fn is_negative(self) -> bool {
        match self {
            Scalar::Rational(r) => r < Ratio::from_integer(0),
            Scalar::Real(x) => x < 0.0,
        }
    }

    /// Parses `"p/q"` or `"p"` (integers, reduced on construction).
    pub fn parse_rational(s: &str) -> Result<Scalar> {
        let s = s.trim();
        let (num_str, den_str) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let numer: i64 = num_str
            .parse()
            .map_err(|_| Error::Parse(format!("invalid rational literal {s:?}")))?;
        let denom: i64 = den_str
            .parse()
            .map_err(|_| Error::Parse(format!("invalid rational literal {s:?}")))?;
        if denom == 0 {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        // i64::MIN cannot be negated during reduction
        if numer == i64::MIN || denom == i64::MIN {
            return Err(Error::Parse(format!("rational literal {s:?} out of range")));
        }
        Ok(Scalar::Rational(Ratio::new(numer, denom)))
    }

    /// TOML literal for this value; rationals with denominator 1 render as
    /// integers, other rationals as quoted `"p/q"` strings.
    fn render(&self) -> String {
        match self {
            Scalar::Rational(r) => {
                if *r.denom() == 1 {
                    format!("{}", r.numer())
                } else {
                    format!("\"{}/{}\"", r.numer(), r.denom())
                }
            }
            Scalar::Real(x) => {
                let mut s = format!("{x}");
                if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("nan")
                {
                    s.push_str(".0");
                }
                s
            }
        }
    }
}

/// Total invested capital: an explicit value, or `auto` meaning the per-unit
/// committed capital total computed from the unit value table downstream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TotalCapital {
    Auto,
    Given(Scalar),
}

/// An n-branch economy as read from a scenario document.
///
/// `fully_consumed` holds 0-based branch indices internally; scenario files
/// use 1-based indices.
#[derive(Debug, Clone)]
pub struct Economy {
    n: usize,
    technology: Vec<Scalar>, // row-major n*n
    labor: Vec<Scalar>,
    wage_basket: Vec<Scalar>,
    total_capital: TotalCapital,
    fully_consumed: Vec<usize>,
    labels: Option<Vec<String>>,
    allow_zero_labor: bool,
}

impl Economy {
    /// Builds an economy from plain floating-point data. `fully_consumed`
    /// takes 0-based indices. Performs the same structural checks as
    /// `parse_scenario`.
    pub fn from_parts(
        technology: Vec<Vec<f64>>,
        labor: Vec<f64>,
        wage_basket: Vec<f64>,
        total_capital: Option<f64>,
        fully_consumed: Vec<usize>,
    ) -> Result<Economy> {
        let n = labor.len();
        if n == 0 {
            return Err(Error::Dimension("economy needs at least one branch".into()));
        }
        if technology.len() != n || technology.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!(
                "technology matrix must be {n}x{n} to match the labor vector"
            )));
        }
        if wage_basket.len() != n {
            return Err(Error::Dimension(format!(
                "wage basket has length {}, expected {n}",
                wage_basket.len()
            )));
        }
        let economy = Economy {
            n,
            technology: technology.into_iter().flatten().map(Scalar::Real).collect(),
            labor: labor.into_iter().map(Scalar::Real).collect(),
            wage_basket: wage_basket.into_iter().map(Scalar::Real).collect(),
            total_capital: match total_capital {
                Some(x) => TotalCapital::Given(Scalar::Real(x)),
                None => TotalCapital::Auto,
            },
            fully_consumed,
            labels: None,
            allow_zero_labor: false,
        };
        economy.check_structure()?;
        Ok(economy)
    }

    pub fn branch_count(&self) -> usize {
        self.n
    }

    /// Technology matrix A as floating point.
    pub fn technology(&self) -> DenseMatrix {
        let rows: Vec<Vec<f64>> = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.technology[i * self.n + j].to_f64())
                    .collect()
            })
            .collect();
        DenseMatrix::from_rows(&rows)
    }

    /// Direct labor inputs per unit, as floating point.
    pub fn labor(&self) -> Vec<f64> {
        self.labor.iter().map(|s| s.to_f64()).collect()
    }

    /// Wage basket per hour of labor, as floating point.
    pub fn wage_basket(&self) -> Vec<f64> {
        self.wage_basket.iter().map(|s| s.to_f64()).collect()
    }

    pub fn total_capital(&self) -> TotalCapital {
        self.total_capital
    }

    /// 0-based indices of the branches whose net output is zero.
    pub fn fully_consumed(&self) -> &[usize] {
        &self.fully_consumed
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Branch name for reports: the scenario label or `Branch <i>`.
    pub fn branch_name(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => format!("Branch {}", i + 1),
        }
    }

    pub fn allows_zero_labor(&self) -> bool {
        self.allow_zero_labor
    }

    /// Same economy with a replacement wage basket; used by sweeps. The
    /// result must be validated again before solving.
    pub fn with_wage_basket(&self, basket: Vec<f64>) -> Result<Economy> {
        if basket.len() != self.n {
            return Err(Error::Dimension(format!(
                "wage basket has length {}, expected {}",
                basket.len(),
                self.n
            )));
        }
        let mut e = self.clone();
        e.wage_basket = basket.into_iter().map(Scalar::Real).collect();
        Ok(e)
    }

    /// Structural checks shared by parsing and validation: entry signs and
    /// finiteness, the fully-consumed cardinality rule, capital positivity.
    fn check_structure(&self) -> Result<()> {
        let n = self.n;
        for (idx, s) in self.technology.iter().enumerate() {
            let v = s.to_f64();
            if !v.is_finite() {
                return Err(Error::Parse(format!(
                    "A[{}][{}] is not finite",
                    idx / n + 1,
                    idx % n + 1
                )));
            }
            if s.is_negative() {
                return Err(Error::NegativeEntry(format!(
                    "A[{}][{}] = {v}",
                    idx / n + 1,
                    idx % n + 1
                )));
            }
        }
        for (name, vec) in [("l", &self.labor), ("v", &self.wage_basket)] {
            for (i, s) in vec.iter().enumerate() {
                let v = s.to_f64();
                if !v.is_finite() {
                    return Err(Error::Parse(format!("{name}[{}] is not finite", i + 1)));
                }
                if s.is_negative() {
                    return Err(Error::NegativeEntry(format!("{name}[{}] = {v}", i + 1)));
                }
            }
        }
        if let TotalCapital::Given(s) = self.total_capital {
            let v = s.to_f64();
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Parse(format!(
                    "K_T must be strictly positive and finite, got {v}"
                )));
            }
        }
        let expected = n.saturating_sub(2);
        if self.fully_consumed.len() != expected {
            return Err(Error::Structural(format!(
                "fully_consumed has {} entries, expected {expected} for n = {n}",
                self.fully_consumed.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for &k in &self.fully_consumed {
            if k >= n {
                return Err(Error::Structural(format!(
                    "fully_consumed index {} out of range 1..={n}",
                    k + 1
                )));
            }
            if !seen.insert(k) {
                return Err(Error::Structural(format!(
                    "fully_consumed index {} repeated",
                    k + 1
                )));
            }
        }
        if let Some(labels) = &self.labels {
            if labels.len() != n {
                return Err(Error::Dimension(format!(
                    "labels has {} entries, expected {n}",
                    labels.len()
                )));
            }
        }
        Ok(())
    }
}

/// An economy that passed `validate`; all solver entry points require this.
/// Dereferences to the underlying `Economy`.
#[derive(Debug, Clone)]
pub struct Validated {
    economy: Economy,
    warnings: Vec<String>,
}

impl Deref for Validated {
    type Target = Economy;

    fn deref(&self) -> &Economy {
        &self.economy
    }
}

impl Validated {
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn economy(&self) -> &Economy {
        &self.economy
    }
}

fn scalar_from_toml(value: &toml::Value, context: &str) -> Result<Scalar> {
    match value {
        toml::Value::Integer(i) => Ok(Scalar::Rational(Ratio::from_integer(*i))),
        toml::Value::Float(f) => Ok(Scalar::Real(*f)),
        toml::Value::String(s) => Scalar::parse_rational(s),
        other => Err(Error::Parse(format!(
            "{context}: expected a number or rational string, got {other}"
        ))),
    }
}

fn scalar_array(value: &toml::Value, context: &str) -> Result<Vec<Scalar>> {
    let arr = value
        .as_array()
        .ok_or_else(|| Error::Parse(format!("{context}: expected an array")))?;
    arr.iter()
        .enumerate()
        .map(|(i, v)| scalar_from_toml(v, &format!("{context}[{}]", i + 1)))
        .collect()
}

/// Parses a scenario document into an `Economy`.
///
/// The document is TOML with top-level fields `n`, `A`, `l`, `v`, `K_T`
/// (number or `"auto"`, optional), `fully_consumed` (1-based indices,
/// mandatory for n >= 3), `labels`, and `allow_zero_labor`.
pub fn parse_scenario(text: &str) -> Result<Economy> {
    let table: toml::Table = text
        .parse()
        .map_err(|e| Error::Parse(format!("malformed document: {e}")))?;

    const KNOWN: [&str; 8] = [
        "n",
        "A",
        "l",
        "v",
        "K_T",
        "fully_consumed",
        "labels",
        "allow_zero_labor",
    ];
    for key in table.keys() {
        if !KNOWN.contains(&key.as_str()) {
            return Err(Error::Parse(format!("unknown field {key:?}")));
        }
    }

    let n = table
        .get("n")
        .and_then(|v| v.as_integer())
        .ok_or_else(|| Error::Parse("missing or non-integer field `n`".into()))?;
    if n < 1 {
        return Err(Error::Parse(format!("n must be at least 1, got {n}")));
    }
    let n = n as usize;

    let a_rows = table
        .get("A")
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::Parse("missing field `A` (array of rows)".into()))?;
    if a_rows.len() != n {
        return Err(Error::Dimension(format!(
            "A has {} rows, expected {n}",
            a_rows.len()
        )));
    }
    let mut technology = Vec::with_capacity(n * n);
    for (i, row) in a_rows.iter().enumerate() {
        let row = scalar_array(row, &format!("A[{}]", i + 1))?;
        if row.len() != n {
            return Err(Error::Dimension(format!(
                "A[{}] has {} entries, expected {n}",
                i + 1,
                row.len()
            )));
        }
        technology.extend(row);
    }

    let labor = scalar_array(
        table
            .get("l")
            .ok_or_else(|| Error::Parse("missing field `l`".into()))?,
        "l",
    )?;
    if labor.len() != n {
        return Err(Error::Dimension(format!(
            "l has {} entries, expected {n}",
            labor.len()
        )));
    }
    let wage_basket = scalar_array(
        table
            .get("v")
            .ok_or_else(|| Error::Parse("missing field `v`".into()))?,
        "v",
    )?;
    if wage_basket.len() != n {
        return Err(Error::Dimension(format!(
            "v has {} entries, expected {n}",
            wage_basket.len()
        )));
    }

    let total_capital = match table.get("K_T") {
        None => TotalCapital::Auto,
        Some(toml::Value::String(s)) if s == "auto" => TotalCapital::Auto,
        Some(v) => TotalCapital::Given(scalar_from_toml(v, "K_T")?),
    };

    let fully_consumed = match table.get("fully_consumed") {
        None if n >= 3 => {
            return Err(Error::Parse(
                "fully_consumed is mandatory for n >= 3".into(),
            ));
        }
        None => Vec::new(),
        Some(v) => {
            let arr = v
                .as_array()
                .ok_or_else(|| Error::Parse("fully_consumed: expected an array".into()))?;
            let mut out = Vec::with_capacity(arr.len());
            for item in arr {
                let idx = item.as_integer().ok_or_else(|| {
                    Error::Parse("fully_consumed entries must be integers".into())
                })?;
                if idx < 1 || idx as usize > n {
                    return Err(Error::Structural(format!(
                        "fully_consumed index {idx} out of range 1..={n}"
                    )));
                }
                out.push(idx as usize - 1);
            }
            out.sort_unstable();
            out
        }
    };

    let labels = match table.get("labels") {
        None => None,
        Some(v) => {
            let arr = v
                .as_array()
                .ok_or_else(|| Error::Parse("labels: expected an array of strings".into()))?;
            let mut out = Vec::with_capacity(arr.len());
            for item in arr {
                out.push(
                    item.as_str()
                        .ok_or_else(|| Error::Parse("labels entries must be strings".into()))?
                        .to_string(),
                );
            }
            Some(out)
        }
    };

    let allow_zero_labor = match table.get("allow_zero_labor") {
        None => false,
        Some(v) => v
            .as_bool()
            .ok_or_else(|| Error::Parse("allow_zero_labor must be a boolean".into()))?,
    };

    let economy = Economy {
        n,
        technology,
        labor,
        wage_basket,
        total_capital,
        fully_consumed,
        labels,
        allow_zero_labor,
    };
    economy.check_structure()?;
    Ok(economy)
}

/// Renders an economy back into scenario text. Rational inputs round-trip to
/// exact rational equality; floating-point inputs round-trip bit-exactly.
pub fn render_scenario(e: &Economy) -> String {
    let n = e.n;
    let mut out = String::new();
    let _ = writeln!(out, "n = {n}");
    let _ = writeln!(out, "A = [");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| e.technology[i * n + j].render()).collect();
        let _ = writeln!(out, "  [{}],", row.join(", "));
    }
    let _ = writeln!(out, "]");
    let l: Vec<String> = e.labor.iter().map(Scalar::render).collect();
    let _ = writeln!(out, "l = [{}]", l.join(", "));
    let v: Vec<String> = e.wage_basket.iter().map(Scalar::render).collect();
    let _ = writeln!(out, "v = [{}]", v.join(", "));
    match e.total_capital {
        TotalCapital::Auto => {
            let _ = writeln!(out, "K_T = \"auto\"");
        }
        TotalCapital::Given(s) => {
            let _ = writeln!(out, "K_T = {}", s.render());
        }
    }
    let fc: Vec<String> = e
        .fully_consumed
        .iter()
        .map(|k| (k + 1).to_string())
        .collect();
    let _ = writeln!(out, "fully_consumed = [{}]", fc.join(", "));
    if let Some(labels) = &e.labels {
        let quoted: Vec<String> = labels.iter().map(|s| format!("{s:?}")).collect();
        let _ = writeln!(out, "labels = [{}]", quoted.join(", "));
    }
    if e.allow_zero_labor {
        let _ = writeln!(out, "allow_zero_labor = true");
    }
    out
}

/// Validates productivity and structural preconditions.
///
/// Confirms the Hawkins-Simon condition (all leading principal minors of
/// I - A strictly positive), rejects one-branch economies and unflagged zero
/// labor entries, and warns when the augmented matrix A + v*l is reducible
/// (the eigenvector positivity argument then loses its footing).
pub fn validate(economy: Economy) -> Result<Validated> {
    economy.check_structure()?;
    let n = economy.n;
    if n < 2 {
        return Err(Error::Structural(
            "a one-branch economy is rejected; the allocation system needs n >= 2".into(),
        ));
    }
    if !economy.allow_zero_labor {
        for (i, l) in economy.labor().iter().enumerate() {
            if *l == 0.0 {
                return Err(Error::Structural(format!(
                    "l[{}] = 0; a branch without direct labor needs allow_zero_labor = true",
                    i + 1
                )));
            }
        }
    }

    let a = economy.technology();
    let mut i_minus_a = DenseMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            i_minus_a.set(i, j, i_minus_a.get(i, j) - a.get(i, j));
        }
    }
    for k in 1..=n {
        let minor = determinant(&i_minus_a.leading(k))?;
        if minor <= 0.0 {
            return Err(Error::NonProductive {
                index: k,
                value: minor,
            });
        }
    }

    let mut warnings = Vec::new();
    if !augmented_is_irreducible(&economy) {
        warnings.push(
            "A + v*l is reducible; the price eigenvector may have zero components".to_string(),
        );
    }
    Ok(Validated { economy, warnings })
}

/// Strong connectivity of the positive-entry digraph of A + v*l.
fn augmented_is_irreducible(e: &Economy) -> bool {
    let n = e.n;
    let a = e.technology();
    let l = e.labor();
    let v = e.wage_basket();
    let edge = |i: usize, j: usize| a.get(i, j) + v[i] * l[j] > 0.0;
    let reach = |forward: bool| -> Vec<bool> {
        let mut seen = vec![false; n];
        let mut stack = vec![0_usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let connected = if forward { edge(i, j) } else { edge(j, i) };
                if connected && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen
    };
    reach(true).iter().all(|&b| b) && reach(false).iter().all(|&b| b)
}
