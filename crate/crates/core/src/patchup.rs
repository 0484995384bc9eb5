//! Patch-up and tour extraction: route the rounded graph's vertex
//! imbalances through a cheapest sub-multigraph of itself, then shortcut an
//! Euler circuit of the now-balanced union into a Hamiltonian tour.

use std::fmt::{self, Write};

use thiserror::Error;

use crate::cut::CutRecord;
use crate::flows::{
    euler_circuit, is_weakly_connected, min_cost_flow, weak_component, FlowError,
    IntegerMultiDigraph,
};
use crate::heldkarp::{solve_lp, FractionalCirculation, HeldKarpError};
use crate::instance::{validate, InstanceError};
use crate::rounding::{round_with_retry, RoundingConfig, RoundingError, RNG_NAME};
use crate::CostMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PatchError {
    #[error("patch-up infeasible: cut {cut} has in-capacity below its demand")]
    Infeasible { cut: CutRecord },
    #[error("z + w is not Eulerian at vertex {0}")]
    NotEulerian(usize),
    #[error("z + w does not reach every vertex (component of 0: {0:?})")]
    Disconnected(Vec<usize>),
    #[error(transparent)]
    Flow(FlowError),
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Lp(#[from] HeldKarpError),
    #[error(transparent)]
    Rounding(#[from] RoundingError),
    #[error(transparent)]
    Patch(#[from] PatchError),
    #[error("pipeline invariant violated: {0}")]
    Invariant(String),
}

/// Per-vertex surplus `b(v) = z(delta+(v)) - z(delta-(v))`; sums to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Demands(pub Vec<i64>);

impl Demands {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }

    /// `sum_{v in U} b(v)` for the listed vertices.
    pub fn of_set(&self, vertices: &[usize]) -> i64 {
        vertices.iter().map(|&v| self.0[v]).sum()
    }
}

pub fn demands(z: &IntegerMultiDigraph) -> Demands {
    Demands(z.imbalance())
}

/// Cheapest integral `w <= z` such that `z + w` is balanced at every vertex.
/// Its net inflow at `v` equals `b(v)`.
pub fn patch(z: &IntegerMultiDigraph, m: &CostMatrix) -> Result<IntegerMultiDigraph, PatchError> {
    match min_cost_flow(z, m, &demands(z).0) {
        Ok(t) => Ok(t.flow),
        Err(FlowError::Infeasible { cut }) => Err(PatchError::Infeasible { cut }),
        Err(e) => Err(PatchError::Flow(e)),
    }
}

/// Hamiltonian cycle given as a vertex order starting at 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Tour {
    pub order: Vec<usize>,
    pub cost: f64,
}

impl Tour {
    /// `None` unless `order` is a permutation of `0..m.n()`.
    pub fn from_order(mut order: Vec<usize>, m: &CostMatrix) -> Option<Self> {
        let n = m.n();
        if order.len() != n {
            return None;
        }
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return None;
            }
        }
        let zero = order.iter().position(|&v| v == 0)?;
        order.rotate_left(zero);
        let cost = m.cycle_cost(&order);
        Some(Self { order, cost })
    }

    /// Line one `n cost`, line two the vertex order.
    pub fn to_text(&self) -> String {
        let order: Vec<String> = self.order.iter().map(ToString::to_string).collect();
        format!("{} {}\n{}\n", self.order.len(), self.cost, order.join(" "))
    }
}

impl fmt::Display for Tour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} (cost {})", self.order, self.cost)
    }
}

/// Tour obtained by shortcutting, with the Euler walk it came from.
#[derive(Clone, Debug)]
pub struct ShortcutTour {
    pub tour: Tour,
    pub walk: Vec<(usize, usize)>,
    pub walk_cost: f64,
}

/// Euler circuit of `z + w`, keeping the first occurrence of each vertex.
/// Under the triangle inequality each skip costs no more than the arcs it
/// replaces.
pub fn eulerian_tour(
    z: &IntegerMultiDigraph,
    w: &IntegerMultiDigraph,
    m: &CostMatrix,
) -> Result<ShortcutTour, PatchError> {
    let union = z.sum(w);
    if let Some(v) = union.first_unbalanced() {
        return Err(PatchError::NotEulerian(v));
    }
    if !is_weakly_connected(&union) {
        return Err(PatchError::Disconnected(weak_component(&union, 0)));
    }
    let walk = euler_circuit(&union).map_err(PatchError::Flow)?;
    let n = m.n();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for v in std::iter::once(walk[0].0).chain(walk.iter().map(|a| a.1)) {
        if !std::mem::replace(&mut seen[v], true) {
            order.push(v);
        }
    }
    let tour = Tour::from_order(order, m).expect("connected walk visits every vertex");
    Ok(ShortcutTour {
        walk_cost: m.walk_cost(&walk),
        tour,
        walk,
    })
}

/// Everything the pipeline measured on one run.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineReport {
    pub n: usize,
    pub seed: u64,
    pub k_constant: f64,
    pub epsilon: f64,
    pub k: u32,
    pub attempts: u32,
    pub accepted_seed: u64,
    pub lp_objective: f64,
    pub cost_z: f64,
    pub cost_w: f64,
    pub euler_walk_cost: f64,
    pub tour_cost: f64,
}

impl PipelineReport {
    pub fn ratio(&self) -> f64 {
        self.tour_cost / self.lp_objective
    }

    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        for (key, value) in [
            ("n", self.n.to_string()),
            ("seed", self.seed.to_string()),
            ("rng", RNG_NAME.to_string()),
            ("k_constant", self.k_constant.to_string()),
            ("epsilon", self.epsilon.to_string()),
            ("K", self.k.to_string()),
            ("attempts", self.attempts.to_string()),
            ("accepted_seed", self.accepted_seed.to_string()),
            ("lp_objective", self.lp_objective.to_string()),
            ("cost_z", self.cost_z.to_string()),
            ("cost_w", self.cost_w.to_string()),
            ("euler_walk_cost", self.euler_walk_cost.to_string()),
            ("tour_cost", self.tour_cost.to_string()),
            ("ratio", self.ratio().to_string()),
        ] {
            writeln!(out, "{key}={value}").unwrap();
        }
        out
    }
}

/// Full output of one pipeline run, including the intermediate graphs.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub tour: Tour,
    pub report: PipelineReport,
    pub lp: FractionalCirculation,
    pub z: IntegerMultiDigraph,
    pub w: IntegerMultiDigraph,
    pub walk: Vec<(usize, usize)>,
}

/// LP, rounding with retries, patch-up and shortcutting.
pub fn solve(
    m: &CostMatrix,
    cfg: &RoundingConfig,
    tol: f64,
) -> Result<(Tour, PipelineReport), PipelineError> {
    let run = solve_detailed(m, cfg, tol)?;
    Ok((run.tour, run.report))
}

pub fn solve_detailed(
    m: &CostMatrix,
    cfg: &RoundingConfig,
    tol: f64,
) -> Result<PipelineRun, PipelineError> {
    let report = validate(m);
    if !report.is_empty() {
        return Err(InstanceError::Invalid(report).into());
    }
    let lp = solve_lp(m, tol)?;
    solve_from_lp(m, lp, cfg)
}

/// Runs everything after the LP on a given optimal (or merely feasible)
/// circulation. Checks the cost sandwich at the end and reports a violation
/// as [`PipelineError::Invariant`].
pub fn solve_from_lp(
    m: &CostMatrix,
    lp: FractionalCirculation,
    cfg: &RoundingConfig,
) -> Result<PipelineRun, PipelineError> {
    let rounded = round_with_retry(lp.weights(), cfg)?;
    let z = rounded.z;
    let w = patch(&z, m)?;
    let shortcut = eulerian_tour(&z, &w, m)?;
    let report = PipelineReport {
        n: m.n(),
        seed: cfg.seed,
        k_constant: cfg.k_constant,
        epsilon: cfg.epsilon,
        k: rounded.k,
        attempts: rounded.attempts,
        accepted_seed: rounded.seed,
        lp_objective: lp.objective(),
        cost_z: z.cost(m),
        cost_w: w.cost(m),
        euler_walk_cost: shortcut.walk_cost,
        tour_cost: shortcut.tour.cost,
    };
    check_report(&report, &z, &w)?;
    Ok(PipelineRun {
        tour: shortcut.tour,
        report,
        lp,
        z,
        w,
        walk: shortcut.walk,
    })
}

fn check_report(
    r: &PipelineReport,
    z: &IntegerMultiDigraph,
    w: &IntegerMultiDigraph,
) -> Result<(), PipelineError> {
    let slack = 1e-9 * (1.0 + r.euler_walk_cost);
    let mut problems = Vec::new();
    if !w.is_submultigraph_of(z) {
        problems.push("w is not a sub-multigraph of z".to_string());
    }
    if !z.sum(w).is_balanced() {
        problems.push("z + w is unbalanced".to_string());
    }
    if r.tour_cost > r.euler_walk_cost + slack {
        problems.push(format!(
            "tour {} above walk {}",
            r.tour_cost, r.euler_walk_cost
        ));
    }
    if (r.euler_walk_cost - r.cost_z - r.cost_w).abs() > slack {
        problems.push(format!(
            "walk {} != c(z) + c(w) = {}",
            r.euler_walk_cost,
            r.cost_z + r.cost_w
        ));
    }
    if r.cost_w > r.cost_z + slack {
        problems.push(format!("c(w) {} above c(z) {}", r.cost_w, r.cost_z));
    }
    if r.tour_cost > 2.0 * r.cost_z + slack {
        problems.push(format!(
            "tour {} above 2 c(z) = {}",
            r.tour_cost,
            2.0 * r.cost_z
        ));
    }
    if r.tour_cost < r.lp_objective - 1e-6 {
        problems.push(format!(
            "tour {} below LP bound {}",
            r.tour_cost, r.lp_objective
        ));
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(PipelineError::Invariant(problems.join("; ")))
    }
}
