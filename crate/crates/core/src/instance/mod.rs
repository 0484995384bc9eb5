//! Metric ATSP instances: the cost matrix, triangle-inequality validation,
//! metric closure, seeded generators and the text formats.

mod generate;
mod io;

pub use generate::{cycle_heavy, euclidean_perturbed_raw, generate, InstanceKind};
pub use io::{parse_instance, parse_tsplib, serialize_instance};

use std::fmt;

use thiserror::Error;

/// Absolute slack allowed on the triangle inequality.
pub const TRIANGLE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("instance needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("cost c[{i}][{j}] = {value} is not finite")]
    NonFinite { i: usize, j: usize, value: f64 },
    #[error("negative cost c[{i}][{j}] = {value}")]
    NegativeEntry { i: usize, j: usize, value: f64 },
    #[error("unsupported instance kind `{0}`")]
    UnsupportedKind(String),
    #[error("instance does not satisfy the metric assumptions: {0}")]
    Invalid(ValidationReport),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Square matrix of arc costs. Shape is enforced at construction; the metric
/// properties are checked separately by [`validate`] so that a bad input can
/// be reported in full rather than rejected at the first offending entry.
#[derive(Clone, PartialEq)]
pub struct CostMatrix {
    n: usize,
    c: Vec<f64>,
}

impl CostMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, InstanceError> {
        let n = rows.len();
        if n < 3 {
            return Err(InstanceError::TooFewVertices(n));
        }
        let mut c = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(InstanceError::NotSquare {
                    row: i,
                    len: row.len(),
                    expected: n,
                });
            }
            for (j, &value) in row.iter().enumerate() {
                if !value.is_finite() {
                    return Err(InstanceError::NonFinite { i, j, value });
                }
            }
            c.extend(row);
        }
        Ok(Self { n, c })
    }

    pub fn from_fn(
        n: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, InstanceError> {
        Self::from_rows(
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { 0.0 } else { f(i, j) }).collect())
                .collect(),
        )
    }

    /// All off-diagonal costs equal to `value`.
    pub fn uniform(n: usize, value: f64) -> Result<Self, InstanceError> {
        Self::from_fn(n, |_, _| value)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.c[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.c[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.c.chunks(self.n)
    }

    /// Cost of the closed walk given as a cyclic vertex sequence.
    pub fn cycle_cost(&self, order: &[usize]) -> f64 {
        let k = order.len();
        (0..k).map(|i| self.get(order[i], order[(i + 1) % k])).sum()
    }

    /// Cost of an open or closed sequence of arcs.
    pub fn walk_cost(&self, arcs: &[(usize, usize)]) -> f64 {
        arcs.iter()
            .map(|&(v, w)| self.get(v, w))
            .fold(0.0, |acc, c| acc + c)
    }

    /// Validates and returns `self`, or the full report as an error.
    pub fn into_validated(self) -> Result<Self, InstanceError> {
        let report = validate(&self);
        if report.is_empty() {
            Ok(self)
        } else {
            Err(InstanceError::Invalid(report))
        }
    }
}

impl fmt::Debug for CostMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// `c[i][j] > c[i][k] + c[k][j]` by `slack`.
    Triangle {
        i: usize,
        k: usize,
        j: usize,
        slack: f64,
    },
    Negative {
        i: usize,
        j: usize,
        value: f64,
    },
    NonzeroDiagonal {
        i: usize,
        value: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::Triangle { i, k, j, slack } => {
                write!(f, "triangle ({i},{k},{j}) violated by {slack}")
            }
            Violation::Negative { i, j, value } => write!(f, "c[{i}][{j}] = {value} < 0"),
            Violation::NonzeroDiagonal { i, value } => write!(f, "c[{i}][{i}] = {value} != 0"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn triangles(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| matches!(v, Violation::Triangle { .. }))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        write!(f, "{} violation(s)", self.violations.len())?;
        for v in self.violations.iter().take(5) {
            write!(f, "; {v}")?;
        }
        if self.violations.len() > 5 {
            write!(f, "; ...")?;
        }
        Ok(())
    }
}

/// Reports every negative entry, nonzero diagonal entry and violated
/// triangle `(i, k, j)` with its slack `c[i][j] - c[i][k] - c[k][j]`.
pub fn validate(m: &CostMatrix) -> ValidationReport {
    let n = m.n();
    let mut violations = Vec::new();
    for i in 0..n {
        if m.get(i, i) != 0.0 {
            violations.push(Violation::NonzeroDiagonal {
                i,
                value: m.get(i, i),
            });
        }
        for j in 0..n {
            if m.get(i, j) < 0.0 {
                violations.push(Violation::Negative {
                    i,
                    j,
                    value: m.get(i, j),
                });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let slack = m.get(i, j) - m.get(i, k) - m.get(k, j);
                if slack > TRIANGLE_TOL {
                    violations.push(Violation::Triangle { i, k, j, slack });
                }
            }
        }
    }
    ValidationReport { violations }
}

/// All-pairs shortest paths (Floyd-Warshall) of a nonnegative raw matrix.
/// The diagonal of the result is zero.
pub fn metric_closure(raw: &CostMatrix) -> Result<CostMatrix, InstanceError> {
    let n = raw.n();
    for i in 0..n {
        for j in 0..n {
            let value = raw.get(i, j);
            if value < 0.0 {
                return Err(InstanceError::NegativeEntry { i, j, value });
            }
        }
    }
    let mut d = raw.c.clone();
    for i in 0..n {
        d[i * n + i] = 0.0;
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            for j in 0..n {
                let via = dik + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    Ok(CostMatrix { n, c: d })
}
