//! Dense arc-weight storage and cut records shared by every module.

use std::fmt;

/// Dense `n x n` matrix of nonnegative arc weights with an implicit zero
/// diagonal. Used for fractional LP points, flow capacities and, after
/// conversion, integer multiplicities.
#[derive(Clone, PartialEq)]
pub struct ArcWeights {
    n: usize,
    w: Vec<f64>,
}

impl ArcWeights {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            w: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut out = Self::zeros(n);
        for v in 0..n {
            for u in 0..n {
                if u != v {
                    out.w[v * n + u] = f(v, u);
                }
            }
        }
        out
    }

    /// Builds weights from `(tail, head, weight)` triples; repeated arcs add up.
    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (usize, usize, f64)>) -> Self {
        let mut out = Self::zeros(n);
        for (v, u, x) in arcs {
            assert!(v != u, "self-loop ({v},{v})");
            out.w[v * n + u] += x;
        }
        out
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, tail: usize, head: usize) -> f64 {
        self.w[tail * self.n + head]
    }

    #[inline]
    pub fn set(&mut self, tail: usize, head: usize, value: f64) {
        assert!(tail != head, "self-loop ({tail},{tail})");
        self.w[tail * self.n + head] = value;
    }

    pub fn row(&self, tail: usize) -> &[f64] {
        &self.w[tail * self.n..(tail + 1) * self.n]
    }

    /// Arcs with weight strictly above `threshold`, in lexicographic order.
    pub fn support(&self, threshold: f64) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n;
        (0..n * n).filter_map(move |i| {
            let x = self.w[i];
            (x > threshold).then_some((i / n, i % n, x))
        })
    }

    pub fn out_weight(&self, v: usize) -> f64 {
        self.row(v).iter().sum()
    }

    pub fn in_weight(&self, v: usize) -> f64 {
        (0..self.n).map(|u| self.get(u, v)).sum()
    }

    pub fn total(&self) -> f64 {
        self.w.iter().sum()
    }

    /// `sum c[v][w] * x[v][w]` over all arcs.
    pub fn dot(&self, costs: &crate::CostMatrix) -> f64 {
        assert_eq!(self.n, costs.n());
        let mut acc = 0.0;
        for v in 0..self.n {
            for u in 0..self.n {
                let x = self.get(v, u);
                if x != 0.0 {
                    acc += costs.get(v, u) * x;
                }
            }
        }
        acc
    }

    /// `(x(delta+(U)), x(delta-(U)))` for the vertex set marked in `member`.
    pub fn cut_weights(&self, member: &[bool]) -> (f64, f64) {
        assert_eq!(member.len(), self.n);
        let (mut out, mut inw) = (0.0, 0.0);
        for v in (0..self.n).filter(|&v| member[v]) {
            for u in (0..self.n).filter(|&u| !member[u]) {
                out += self.get(v, u);
                inw += self.get(u, v);
            }
        }
        (out, inw)
    }

    /// Same as [`cut_weights`](Self::cut_weights) for a bitmask (`n <= 64`).
    pub fn cut_weights_mask(&self, mask: u64) -> (f64, f64) {
        let n = self.n;
        let (mut out, mut inw) = (0.0, 0.0);
        let mut inside = mask;
        while inside != 0 {
            let v = inside.trailing_zeros() as usize;
            inside &= inside - 1;
            let row = self.row(v);
            let mut outside = !mask & low_bits(n);
            while outside != 0 {
                let u = outside.trailing_zeros() as usize;
                outside &= outside - 1;
                out += row[u];
                inw += self.w[u * n + v];
            }
        }
        (out, inw)
    }
}

impl fmt::Debug for ArcWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ArcWeights")
            .field("n", &self.n)
            .field("support", &self.support(0.0).collect::<Vec<_>>())
            .finish()
    }
}

#[inline]
pub(crate) fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// A nonempty proper vertex subset `U` with the weight leaving and entering it.
#[derive(Clone, Debug, PartialEq)]
pub struct CutRecord {
    /// Members of `U`, ascending.
    pub vertices: Vec<usize>,
    pub out_weight: f64,
    pub in_weight: f64,
}

impl CutRecord {
    pub fn from_membership(weights: &ArcWeights, member: &[bool]) -> Self {
        let (out_weight, in_weight) = weights.cut_weights(member);
        Self {
            vertices: members(member),
            out_weight,
            in_weight,
        }
    }

    pub fn from_mask(weights: &ArcWeights, mask: u64) -> Self {
        let (out_weight, in_weight) = weights.cut_weights_mask(mask);
        Self {
            vertices: mask_members(mask),
            out_weight,
            in_weight,
        }
    }

    pub fn membership(&self, n: usize) -> Vec<bool> {
        let mut member = vec![false; n];
        for &v in &self.vertices {
            member[v] = true;
        }
        member
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }
}

impl fmt::Display for CutRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "U={:?} out={} in={}",
            self.vertices, self.out_weight, self.in_weight
        )
    }
}

pub(crate) fn members(member: &[bool]) -> Vec<usize> {
    member
        .iter()
        .enumerate()
        .filter_map(|(v, &m)| m.then_some(v))
        .collect()
}

pub(crate) fn mask_members(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        out.push(mask.trailing_zeros() as usize);
        mask &= mask - 1;
    }
    out
}
