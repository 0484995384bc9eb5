//! Graph algorithms: integer multigraphs, max-flow/min-cut, min-cost
//! transshipment, Euler circuits, weak connectivity and the symmetrization of
//! a balanced arc vector into undirected edge weights.

mod euler;
mod maxflow;
mod mcf;
mod symmetrize;

pub use euler::euler_circuit;
pub use maxflow::{max_flow, MaxFlow};
pub use mcf::{min_cost_flow, transshipment_feasibility, Transshipment};
pub use symmetrize::{symmetrize, SymmetrizedWeights};

use std::collections::VecDeque;
use std::fmt::{self, Write};

use thiserror::Error;

use crate::cut::{ArcWeights, CutRecord};
use crate::CostMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("vertex imbalances sum to {0}, expected 0")]
    ImbalanceSumNonzero(i64),
    #[error("no feasible transshipment; violated cut {cut}")]
    Infeasible { cut: CutRecord },
    #[error("vertex {vertex} is unbalanced (out {out_degree}, in {in_degree})")]
    NotEulerian {
        vertex: usize,
        out_degree: u64,
        in_degree: u64,
    },
    #[error("graph support is not weakly connected (component of {component:?})")]
    Disconnected { component: Vec<usize> },
    #[error("weights are not balanced at vertex {vertex} (gap {gap})")]
    NotBalanced { vertex: usize, gap: f64 },
    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Directed multigraph on `0..n` stored as a dense multiplicity matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerMultiDigraph {
    n: usize,
    mult: Vec<u32>,
}

impl IntegerMultiDigraph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            mult: vec![0; n * n],
        }
    }

    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (usize, usize, u32)>) -> Self {
        let mut g = Self::empty(n);
        for (v, w, k) in arcs {
            g.add(v, w, k);
        }
        g
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, tail: usize, head: usize) -> u32 {
        self.mult[tail * self.n + head]
    }

    pub fn set(&mut self, tail: usize, head: usize, k: u32) {
        assert!(tail != head, "self-loop at {tail}");
        self.mult[tail * self.n + head] = k;
    }

    pub fn add(&mut self, tail: usize, head: usize, k: u32) {
        assert!(tail != head, "self-loop at {tail}");
        self.mult[tail * self.n + head] += k;
    }

    /// Arcs with positive multiplicity, lexicographically ordered.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        let n = self.n;
        self.mult
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(move |(i, &k)| (i / n, i % n, k))
    }

    pub fn num_distinct_arcs(&self) -> usize {
        self.mult.iter().filter(|&&k| k > 0).count()
    }

    pub fn total_multiplicity(&self) -> u64 {
        self.mult.iter().map(|&k| k as u64).sum()
    }

    pub fn out_degree(&self, v: usize) -> u64 {
        self.mult[v * self.n..(v + 1) * self.n]
            .iter()
            .map(|&k| k as u64)
            .sum()
    }

    pub fn in_degree(&self, v: usize) -> u64 {
        (0..self.n).map(|u| self.get(u, v) as u64).sum()
    }

    /// `out(v) - in(v)` for every vertex.
    pub fn imbalance(&self) -> Vec<i64> {
        (0..self.n)
            .map(|v| self.out_degree(v) as i64 - self.in_degree(v) as i64)
            .collect()
    }

    pub fn first_unbalanced(&self) -> Option<usize> {
        (0..self.n).find(|&v| self.out_degree(v) != self.in_degree(v))
    }

    pub fn is_balanced(&self) -> bool {
        self.first_unbalanced().is_none()
    }

    pub fn cost(&self, costs: &CostMatrix) -> f64 {
        self.arcs()
            .map(|(v, w, k)| costs.get(v, w) * k as f64)
            .fold(0.0, |acc, c| acc + c)
    }

    /// Arcwise `self <= other`.
    pub fn is_submultigraph_of(&self, other: &Self) -> bool {
        self.n == other.n && self.mult.iter().zip(&other.mult).all(|(a, b)| a <= b)
    }

    pub fn sum(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            mult: self
                .mult
                .iter()
                .zip(&other.mult)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Exact conversion; integer sums stay exact in `f64` far beyond any
    /// multiplicity reachable here.
    pub fn to_weights(&self) -> ArcWeights {
        ArcWeights::from_fn(self.n, |v, w| self.get(v, w) as f64)
    }

    pub fn degree(&self, v: usize) -> u64 {
        self.out_degree(v) + self.in_degree(v)
    }

    /// Text form: header `n m`, then one `v w mult` line per arc.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.num_distinct_arcs());
        for (v, w, k) in self.arcs() {
            writeln!(out, "{v} {w} {k}").unwrap();
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, FlowError> {
        let err = |line: usize, msg: &str| FlowError::Parse {
            line,
            msg: msg.to_string(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or_else(|| err(1, "empty input"))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(hl, "bad header")))
            .collect::<Result<_, _>>()?;
        let [n, m] = nums[..] else {
            return Err(err(hl, "header must be `n m`"));
        };
        let mut g = Self::empty(n);
        let mut seen = 0;
        for (line, content) in lines {
            let toks: Vec<&str> = content.split_whitespace().collect();
            let [v, w, k] = toks[..] else {
                return Err(err(line, "expected `v w mult`"));
            };
            let v: usize = v.parse().map_err(|_| err(line, "bad tail"))?;
            let w: usize = w.parse().map_err(|_| err(line, "bad head"))?;
            let k: u32 = k.parse().map_err(|_| err(line, "bad multiplicity"))?;
            if v >= n || w >= n || v == w {
                return Err(err(line, "arc out of range or self-loop"));
            }
            g.add(v, w, k);
            seen += 1;
        }
        if seen != m {
            return Err(FlowError::LengthMismatch {
                expected: m,
                found: seen,
            });
        }
        Ok(g)
    }
}

impl fmt::Debug for IntegerMultiDigraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntegerMultiDigraph")
            .field("n", &self.n)
            .field("arcs", &self.arcs().collect::<Vec<_>>())
            .finish()
    }
}

/// Vertices reachable from `start` ignoring arc directions, ascending.
#[allow(clippy::needless_range_loop)]
pub(crate) fn weak_component(g: &IntegerMultiDigraph, start: usize) -> Vec<usize> {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(v) = queue.pop_front() {
        for u in 0..n {
            if !seen[u] && (g.get(v, u) > 0 || g.get(u, v) > 0) {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    crate::cut::members(&seen)
}

/// True iff all `n` vertices lie in one weakly connected component of the
/// support. An isolated vertex makes this false.
pub fn is_weakly_connected(g: &IntegerMultiDigraph) -> bool {
    g.n() == 0 || weak_component(g, 0).len() == g.n()
}
