use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{max_flow, FlowError, IntegerMultiDigraph};
use crate::cut::{ArcWeights, CutRecord};
use crate::CostMatrix;

/// Slack allowed on reduced costs when checking optimality.
const REDUCED_COST_TOL: f64 = 1e-9;

/// Optimal integral transshipment together with the node potentials that
/// certify it.
#[derive(Clone, Debug)]
pub struct Transshipment {
    pub flow: IntegerMultiDigraph,
    pub cost: f64,
    pub potentials: Vec<f64>,
}

impl Transshipment {
    /// Complementary slackness on the original arcs: an arc with spare
    /// capacity has reduced cost `>= 0`, an arc carrying flow has reduced cost
    /// `<= 0`, where reduced cost is `c(u,v) + p(u) - p(v)`.
    pub fn satisfies_complementary_slackness(
        &self,
        capacities: &IntegerMultiDigraph,
        costs: &CostMatrix,
    ) -> bool {
        let n = capacities.n();
        (0..n).all(|u| {
            (0..n).filter(|&v| v != u).all(|v| {
                let cap = capacities.get(u, v);
                if cap == 0 {
                    return true;
                }
                let f = self.flow.get(u, v);
                let rc = costs.get(u, v) + self.potentials[u] - self.potentials[v];
                (f >= cap || rc >= -REDUCED_COST_TOL) && (f == 0 || rc <= REDUCED_COST_TOL)
            })
        })
    }
}

fn check_imbalances(n: usize, b: &[i64]) -> Result<(), FlowError> {
    if b.len() != n {
        return Err(FlowError::LengthMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let sum: i64 = b.iter().sum();
    if sum != 0 {
        return Err(FlowError::ImbalanceSumNonzero(sum));
    }
    Ok(())
}

/// Decides whether some `w <= capacities` has net inflow `b(v)` at every
/// vertex. On failure returns `Infeasible` carrying a cut `U` with
/// `sum_{v in U} b(v) > capacities(delta-(U))`, i.e. a violated Hoffman
/// condition. Uses a super-source/super-sink max-flow.
pub fn transshipment_feasibility(
    capacities: &IntegerMultiDigraph,
    b: &[i64],
) -> Result<(), FlowError> {
    let n = capacities.n();
    check_imbalances(n, b)?;
    let (source, sink) = (n, n + 1);
    let mut net = ArcWeights::zeros(n + 2);
    for (v, w, k) in capacities.arcs() {
        net.set(v, w, k as f64);
    }
    let mut required = 0i64;
    for (v, &bv) in b.iter().enumerate() {
        match bv.cmp(&0) {
            Ordering::Less => net.set(source, v, (-bv) as f64),
            Ordering::Greater => {
                net.set(v, sink, bv as f64);
                required += bv;
            }
            Ordering::Equal => {}
        }
    }
    if required == 0 {
        return Ok(());
    }
    let flow = max_flow(&net, source, sink);
    if flow.value + 0.5 >= required as f64 {
        return Ok(());
    }
    // Vertices the super-source cannot reach form the violated set.
    let member: Vec<bool> = (0..n).map(|v| !flow.min_cut.contains(v)).collect();
    Err(FlowError::Infeasible {
        cut: CutRecord::from_membership(&capacities.to_weights(), &member),
    })
}

#[derive(Clone, Copy)]
struct ResidualArc {
    to: usize,
    cap: i64,
    cost: f64,
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Residual {
    arcs: Vec<ResidualArc>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn add(&mut self, from: usize, to: usize, cap: i64, cost: f64) -> usize {
        let id = self.arcs.len();
        self.adj[from].push(id);
        self.arcs.push(ResidualArc { to, cap, cost });
        self.adj[to].push(id + 1);
        self.arcs.push(ResidualArc {
            to: from,
            cap: 0,
            cost: -cost,
        });
        id
    }

    /// Dijkstra on reduced costs; returns distances and the arc used to
    /// enter each vertex.
    fn shortest_paths(&self, source: usize, potential: &[f64]) -> (Vec<f64>, Vec<Option<usize>>) {
        let n = self.adj.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut via = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::from([Entry(0.0, source)]);
        dist[source] = 0.0;
        while let Some(Entry(d, v)) = heap.pop() {
            if done[v] {
                continue;
            }
            done[v] = true;
            for &id in &self.adj[v] {
                let arc = self.arcs[id];
                if arc.cap <= 0 || done[arc.to] {
                    continue;
                }
                let reduced = (arc.cost + potential[v] - potential[arc.to]).max(0.0);
                let nd = d + reduced;
                if nd < dist[arc.to] {
                    dist[arc.to] = nd;
                    via[arc.to] = Some(id);
                    heap.push(Entry(nd, arc.to));
                }
            }
        }
        (dist, via)
    }
}

/// Minimum-cost integral `w` with `0 <= w <= capacities` arcwise and net
/// inflow `w(delta-(v)) - w(delta+(v)) = b(v)` at every vertex.
///
/// Successive shortest augmenting paths with Dijkstra on reduced costs. All
/// costs are nonnegative, so zero initial potentials are valid.
pub fn min_cost_flow(
    capacities: &IntegerMultiDigraph,
    costs: &CostMatrix,
    b: &[i64],
) -> Result<Transshipment, FlowError> {
    let n = capacities.n();
    assert_eq!(costs.n(), n);
    transshipment_feasibility(capacities, b)?;

    let (source, sink) = (n, n + 1);
    let mut res = Residual {
        arcs: Vec::new(),
        adj: vec![Vec::new(); n + 2],
    };
    let mut original = Vec::new();
    for (v, w, k) in capacities.arcs() {
        original.push((v, w, res.add(v, w, k as i64, costs.get(v, w))));
    }
    let mut required = 0;
    for (v, &bv) in b.iter().enumerate() {
        if bv < 0 {
            res.add(source, v, -bv, 0.0);
        } else if bv > 0 {
            res.add(v, sink, bv, 0.0);
            required += bv;
        }
    }

    let mut potential = vec![0.0; n + 2];
    let mut shipped = 0;
    while shipped < required {
        let (dist, via) = res.shortest_paths(source, &potential);
        assert!(
            dist[sink].is_finite(),
            "feasible transshipment ran out of augmenting paths"
        );
        let reach_max = dist
            .iter()
            .copied()
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max);
        for (p, d) in potential.iter_mut().zip(&dist) {
            *p += if d.is_finite() { *d } else { reach_max };
        }
        let mut bottleneck = required - shipped;
        let mut v = sink;
        while let Some(id) = via[v] {
            bottleneck = bottleneck.min(res.arcs[id].cap);
            v = res.arcs[id ^ 1].to;
        }
        let mut v = sink;
        while let Some(id) = via[v] {
            res.arcs[id].cap -= bottleneck;
            res.arcs[id ^ 1].cap += bottleneck;
            v = res.arcs[id ^ 1].to;
        }
        shipped += bottleneck;
    }

    let mut flow = IntegerMultiDigraph::empty(n);
    for (v, w, id) in original {
        let used = res.arcs[id ^ 1].cap;
        if used > 0 {
            flow.set(v, w, used as u32);
        }
    }
    let cost = flow.cost(costs);
    potential.truncate(n);
    let result = Transshipment {
        flow,
        cost,
        potentials: potential,
    };
    debug_assert!(result.satisfies_complementary_slackness(capacities, costs));
    Ok(result)
}
