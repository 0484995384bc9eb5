use std::collections::VecDeque;

use crate::cut::{ArcWeights, CutRecord};

/// Residual capacities at or below this are treated as saturated.
const RESIDUAL_EPS: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct MaxFlow {
    pub value: f64,
    /// Source side of a minimum cut: everything reachable from `s` in the
    /// final residual graph. `out_weight` is recomputed from the input
    /// capacities, not from the flow.
    pub min_cut: CutRecord,
}

struct Edge {
    to: usize,
    cap: f64,
}

struct Dinic {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    next: Vec<usize>,
}

impl Dinic {
    fn new(g: &ArcWeights) -> Self {
        let n = g.n();
        let mut d = Dinic {
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
            level: vec![0; n],
            next: vec![0; n],
        };
        for (v, w, cap) in g.support(0.0) {
            d.adj[v].push(d.edges.len());
            d.edges.push(Edge { to: w, cap });
            d.adj[w].push(d.edges.len());
            d.edges.push(Edge { to: v, cap: 0.0 });
        }
        d
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                let Edge { to, cap } = self.edges[e];
                if cap > RESIDUAL_EPS && self.level[to] < 0 {
                    self.level[to] = self.level[v] + 1;
                    queue.push_back(to);
                }
            }
        }
    }

    fn dfs(&mut self, v: usize, t: usize, limit: f64) -> f64 {
        if v == t {
            return limit;
        }
        while self.next[v] < self.adj[v].len() {
            let e = self.adj[v][self.next[v]];
            let Edge { to, cap } = self.edges[e];
            if cap > RESIDUAL_EPS && self.level[to] == self.level[v] + 1 {
                let pushed = self.dfs(to, t, limit.min(cap));
                if pushed > 0.0 {
                    self.edges[e].cap -= pushed;
                    self.edges[e ^ 1].cap += pushed;
                    return pushed;
                }
            }
            self.next[v] += 1;
        }
        0.0
    }

    fn run(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return total;
            }
            self.next.iter_mut().for_each(|i| *i = 0);
            loop {
                let pushed = self.dfs(s, t, f64::INFINITY);
                if pushed <= 0.0 {
                    break;
                }
                total += pushed;
            }
        }
    }
}

/// Maximum `s -> t` flow under capacities `g` (Dinic's algorithm) with the
/// minimal source-side minimum cut.
pub fn max_flow(g: &ArcWeights, s: usize, t: usize) -> MaxFlow {
    assert!(s != t, "source equals sink");
    let mut dinic = Dinic::new(g);
    let value = dinic.run(s, t);
    dinic.bfs(s);
    let member: Vec<bool> = dinic.level.iter().map(|&l| l >= 0).collect();
    MaxFlow {
        value,
        min_cut: CutRecord::from_membership(g, &member),
    }
}
