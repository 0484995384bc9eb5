//! Held-Karp relaxation by cutting planes.
//!
//! The master LP carries the vertex balance rows, the out-degree-one rows and
//! every subtour cut found so far. After each solve the separation oracle
//! looks for a set `U` with `x(delta+(U)) < 1`; the loop stops when none is
//! violated by more than the tolerance. With out-degree fixed at one the
//! bounds `x <= 1` are implied, so only `x >= 0` is stated explicitly.

use std::collections::HashSet;
use std::fmt::Write;

use thiserror::Error;

use crate::cut::{ArcWeights, CutRecord};
use crate::flows::max_flow;
use crate::instance::{validate, ValidationReport};
use crate::simplex::{LinearProgram, Relation, SimplexError};
use crate::CostMatrix;

/// Vertex balance and degree tolerance.
pub const FEASIBILITY_TOL: f64 = 1e-7;
/// Default subtour separation tolerance.
pub const SEPARATION_TOL: f64 = 1e-6;
/// Weights at or below this are omitted from the text output.
pub const SUPPORT_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeldKarpError {
    #[error("instance is not metric: {0}")]
    InvalidInstance(ValidationReport),
    #[error("master LP infeasible")]
    Infeasible,
    #[error("cutting-plane loop exceeded {rounds} rounds")]
    IterationLimit { rounds: usize },
    #[error("simplex failure: {0}")]
    Simplex(SimplexError),
    #[error("separation returned cut already in the pool: {0}")]
    DuplicateCut(CutRecord),
    #[error("LP solution violates an invariant: {0}")]
    Numerical(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl From<SimplexError> for HeldKarpError {
    fn from(e: SimplexError) -> Self {
        match e {
            SimplexError::Infeasible(_) => HeldKarpError::Infeasible,
            other => HeldKarpError::Simplex(other),
        }
    }
}

/// A point of the Held-Karp polytope: balanced, out-degree one at every
/// vertex, and (when produced by [`solve_lp`]) satisfying every subtour cut.
#[derive(Clone, Debug, PartialEq)]
pub struct FractionalCirculation {
    weights: ArcWeights,
    objective: f64,
}

impl FractionalCirculation {
    pub fn new(weights: ArcWeights, costs: &CostMatrix) -> Self {
        let objective = weights.dot(costs);
        Self { weights, objective }
    }

    pub fn n(&self) -> usize {
        self.weights.n()
    }

    pub fn weights(&self) -> &ArcWeights {
        &self.weights
    }

    pub fn get(&self, v: usize, w: usize) -> f64 {
        self.weights.get(v, w)
    }

    pub fn objective(&self) -> f64 {
        self.objective
    }

    pub fn num_fractional(&self, eps: f64) -> usize {
        self.weights
            .support(eps)
            .filter(|&(_, _, x)| x < 1.0 - eps)
            .count()
    }

    /// Bound, balance and degree violations (not subtour cuts).
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.n();
        for v in 0..n {
            for w in 0..n {
                let x = self.get(v, w);
                if v != w && !(0.0..=1.0 + 1e-9).contains(&x) {
                    out.push(format!("x[{v}][{w}] = {x} outside [0, 1]"));
                }
            }
            let (o, i) = (self.weights.out_weight(v), self.weights.in_weight(v));
            if (o - i).abs() > FEASIBILITY_TOL {
                out.push(format!("vertex {v} unbalanced: out {o}, in {i}"));
            }
            if (o - 1.0).abs() > FEASIBILITY_TOL {
                out.push(format!("vertex {v} out-degree {o}"));
            }
        }
        out
    }

    /// Header `n objective`, then `v w x` for every arc above 1e-9, sorted.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n(), self.objective);
        for (v, w, x) in self.weights.support(SUPPORT_EPS) {
            writeln!(out, "{v} {w} {x}").unwrap();
        }
        out
    }

    /// Reads [`to_text`](Self::to_text) output. The objective is taken from
    /// the header as written.
    pub fn parse_text(text: &str) -> Result<Self, HeldKarpError> {
        let err = |line: usize, msg: &str| HeldKarpError::Parse {
            line,
            msg: msg.to_string(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or_else(|| err(1, "empty input"))?;
        let mut toks = header.split_whitespace();
        let n: usize = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(hl, "bad vertex count"))?;
        let objective: f64 = toks
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(hl, "bad objective"))?;
        let mut weights = ArcWeights::zeros(n);
        for (line, content) in lines {
            let t: Vec<&str> = content.split_whitespace().collect();
            let [v, w, x] = t[..] else {
                return Err(err(line, "expected `v w x`"));
            };
            let v: usize = v.parse().map_err(|_| err(line, "bad tail"))?;
            let w: usize = w.parse().map_err(|_| err(line, "bad head"))?;
            let x: f64 = x.parse().map_err(|_| err(line, "bad weight"))?;
            if v >= n || w >= n || v == w {
                return Err(err(line, "arc out of range"));
            }
            weights.set(v, w, x);
        }
        Ok(Self { weights, objective })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct HeldKarpConfig {
    pub tol: f64,
    /// Cap on cutting-plane rounds is `rounds_per_vertex * n`.
    pub rounds_per_vertex: usize,
}

impl Default for HeldKarpConfig {
    fn default() -> Self {
        Self {
            tol: SEPARATION_TOL,
            rounds_per_vertex: 50,
        }
    }
}

/// Result of the cutting-plane loop with its history.
#[derive(Clone, Debug)]
pub struct HeldKarpSolution {
    pub circulation: FractionalCirculation,
    /// Cuts added to the master, in order.
    pub cuts: Vec<CutRecord>,
    /// Master objective after each solve; non-decreasing up to float noise.
    pub objective_history: Vec<f64>,
    pub pivots: usize,
}

fn arc_index(n: usize, v: usize, w: usize) -> usize {
    v * (n - 1) + if w < v { w } else { w - 1 }
}

fn arc_of(n: usize, j: usize) -> (usize, usize) {
    let v = j / (n - 1);
    let r = j % (n - 1);
    (v, if r < v { r } else { r + 1 })
}

fn build_master(m: &CostMatrix, cuts: &[CutRecord]) -> LinearProgram {
    let n = m.n();
    let objective = (0..n * (n - 1))
        .map(|j| {
            let (v, w) = arc_of(n, j);
            m.get(v, w)
        })
        .collect();
    let mut lp = LinearProgram::new(objective);
    for v in 0..n {
        let mut balance = Vec::with_capacity(2 * (n - 1));
        for u in (0..n).filter(|&u| u != v) {
            balance.push((arc_index(n, u, v), 1.0));
            balance.push((arc_index(n, v, u), -1.0));
        }
        lp.add_constraint(balance, Relation::Eq, 0.0);
        let out = (0..n)
            .filter(|&u| u != v)
            .map(|u| (arc_index(n, v, u), 1.0))
            .collect();
        lp.add_constraint(out, Relation::Eq, 1.0);
    }
    for cut in cuts {
        let member = cut.membership(n);
        let mut coeffs = Vec::new();
        for &v in &cut.vertices {
            for u in (0..n).filter(|&u| !member[u]) {
                coeffs.push((arc_index(n, v, u), 1.0));
            }
        }
        lp.add_constraint(coeffs, Relation::Ge, 1.0);
    }
    lp
}

/// Finds a cut with `x(delta+(U)) < 1 - tol`, or `None`.
///
/// Every proper nonempty `U` either contains vertex 0 or misses it, so the
/// minimum over the `0 -> t` and `t -> 0` minimum cuts for all `t != 0` is
/// the global minimum directed cut. Among cuts of equal weight (within
/// 1e-12) the lexicographically smallest vertex list wins.
pub fn separate(x: &ArcWeights, tol: f64) -> Option<CutRecord> {
    let best = min_directed_cut(x)?;
    (best.out_weight < 1.0 - tol).then_some(best)
}

/// Global minimum of `x(delta+(U))` over proper nonempty `U`.
pub fn min_directed_cut(x: &ArcWeights) -> Option<CutRecord> {
    let n = x.n();
    let mut best: Option<CutRecord> = None;
    for t in 1..n {
        for (s, sink) in [(0, t), (t, 0)] {
            let cut = max_flow(x, s, sink).min_cut;
            let better = match &best {
                None => true,
                Some(b) => {
                    cut.out_weight < b.out_weight - 1e-12
                        || (cut.out_weight <= b.out_weight + 1e-12 && cut.vertices < b.vertices)
                }
            };
            if better {
                best = Some(cut);
            }
        }
    }
    best
}

/// Solves the Held-Karp LP and returns the optimal circulation.
pub fn solve_lp(m: &CostMatrix, tol: f64) -> Result<FractionalCirculation, HeldKarpError> {
    let cfg = HeldKarpConfig {
        tol,
        ..HeldKarpConfig::default()
    };
    Ok(solve_lp_traced(m, &cfg)?.circulation)
}

/// LP optimum; a lower bound on the cost of every tour.
pub fn lp_lower_bound(m: &CostMatrix) -> Result<f64, HeldKarpError> {
    Ok(solve_lp(m, SEPARATION_TOL)?.objective())
}

pub fn solve_lp_traced(
    m: &CostMatrix,
    cfg: &HeldKarpConfig,
) -> Result<HeldKarpSolution, HeldKarpError> {
    let report = validate(m);
    if !report.is_empty() {
        return Err(HeldKarpError::InvalidInstance(report));
    }
    let n = m.n();
    let max_rounds = cfg.rounds_per_vertex * n;
    let mut cuts: Vec<CutRecord> = Vec::new();
    let mut pool: HashSet<Vec<usize>> = HashSet::new();
    let mut history = Vec::new();
    let mut pivots = 0;
    for _ in 0..=max_rounds {
        let solution = build_master(m, &cuts).solve()?;
        pivots += solution.pivots;
        history.push(solution.objective);
        let mut weights = ArcWeights::zeros(n);
        for (j, &x) in solution.x.iter().enumerate() {
            if x > 0.0 {
                let (v, w) = arc_of(n, j);
                weights.set(v, w, x);
            }
        }
        match separate(&weights, cfg.tol) {
            None => {
                let circulation = FractionalCirculation::new(weights, m);
                let problems = circulation.invariant_violations();
                if !problems.is_empty() {
                    return Err(HeldKarpError::Numerical(problems.join("; ")));
                }
                return Ok(HeldKarpSolution {
                    circulation,
                    cuts,
                    objective_history: history,
                    pivots,
                });
            }
            Some(cut) => {
                if !pool.insert(cut.vertices.clone()) {
                    return Err(HeldKarpError::DuplicateCut(cut));
                }
                cuts.push(cut);
            }
        }
    }
    Err(HeldKarpError::IterationLimit { rounds: max_rounds })
}
