use super::FlowError;
use crate::cut::ArcWeights;

const BALANCE_TOL: f64 = 1e-6;

/// Undirected edge weights `y{v,w} = (x[v][w] + x[w][v]) / 2`.
#[derive(Clone, Debug)]
pub struct SymmetrizedWeights {
    n: usize,
    /// Row-major upper triangle, `y[v][w]` for `v < w`.
    y: Vec<f64>,
}

impl SymmetrizedWeights {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, v: usize, w: usize) -> f64 {
        let (a, b) = if v < w { (v, w) } else { (w, v) };
        assert!(a != b);
        self.y[a * self.n + b]
    }

    /// `y(delta(U))`: total weight of edges with exactly one end in `U`.
    pub fn cut_weight_mask(&self, mask: u64) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for v in 0..n {
            for w in v + 1..n {
                if (mask >> v & 1) != (mask >> w & 1) {
                    acc += self.y[v * n + w];
                }
            }
        }
        acc
    }
}

/// Symmetrizes a balanced arc vector. Because in-weight equals out-weight at
/// every vertex, `y(delta(U)) = x(delta+(U))` for every `U`.
pub fn symmetrize(x: &ArcWeights) -> Result<SymmetrizedWeights, FlowError> {
    let n = x.n();
    for vertex in 0..n {
        let gap = x.in_weight(vertex) - x.out_weight(vertex);
        if gap.abs() > BALANCE_TOL {
            return Err(FlowError::NotBalanced { vertex, gap });
        }
    }
    let mut y = vec![0.0; n * n];
    for v in 0..n {
        for w in v + 1..n {
            y[v * n + w] = (x.get(v, w) + x.get(w, v)) / 2.0;
        }
    }
    Ok(SymmetrizedWeights { n, y })
}
