//! Dense two-phase primal simplex with Bland's rule.
//!
//! Sized for the Held-Karp masters built in [`crate::heldkarp`]: a few hundred
//! columns and at most a couple of hundred rows. Every solve starts from an
//! all-artificial basis; there is no warm start.

use thiserror::Error;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const PHASE1_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Ge,
    Le,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `minimize objective . x` subject to the constraints and `x >= 0`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimplexError {
    #[error("linear program is infeasible (phase one residual {0})")]
    Infeasible(f64),
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex pivot limit of {0} reached")]
    PivotLimit(usize),
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        debug_assert!(coeffs.iter().all(|&(j, _)| j < self.objective.len()));
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn solve(&self) -> Result<LpSolution, SimplexError> {
        let limit = 200 * (self.num_vars() + self.num_constraints()) + 10_000;
        Tableau::build(self).run(&self.objective, limit)
    }
}

/// Row-major dense tableau. Columns are laid out as
/// `[structural | slack/surplus | artificial]` followed by the right-hand side.
struct Tableau {
    rows: usize,
    cols: usize,
    num_structural: usize,
    first_artificial: usize,
    a: Vec<f64>,
    basis: Vec<usize>,
    /// Reduced costs for the active objective, one per column.
    reduced: Vec<f64>,
    objective_value: f64,
    pivots: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.constraints.len();
        let num_structural = lp.num_vars();
        let num_slack = lp
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let first_artificial = num_structural + num_slack;
        let cols = first_artificial + m;
        let width = cols + 1;
        let mut a = vec![0.0; m * width];
        let mut basis = Vec::with_capacity(m);
        let mut slack = num_structural;
        for (i, con) in lp.constraints.iter().enumerate() {
            let sign = if con.rhs < 0.0 { -1.0 } else { 1.0 };
            let row = &mut a[i * width..(i + 1) * width];
            for &(j, v) in &con.coeffs {
                row[j] += sign * v;
            }
            match con.relation {
                Relation::Eq => {}
                Relation::Ge => {
                    row[slack] = -sign;
                    slack += 1;
                }
                Relation::Le => {
                    row[slack] = sign;
                    slack += 1;
                }
            }
            row[first_artificial + i] = 1.0;
            row[cols] = sign * con.rhs;
            basis.push(first_artificial + i);
        }
        Self {
            rows: m,
            cols,
            num_structural,
            first_artificial,
            a,
            basis,
            reduced: vec![0.0; cols],
            objective_value: 0.0,
            pivots: 0,
        }
    }

    #[inline]
    fn width(&self) -> usize {
        self.cols + 1
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.width() + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.a[i * self.width() + self.cols]
    }

    /// Recomputes reduced costs of `costs` (indexed by column, missing = 0)
    /// against the current basis.
    fn price(&mut self, costs: &[f64]) {
        let cost = |j: usize| costs.get(j).copied().unwrap_or(0.0);
        self.reduced = (0..self.cols).map(cost).collect();
        self.objective_value = 0.0;
        for i in 0..self.rows {
            let cb = cost(self.basis[i]);
            if cb == 0.0 {
                continue;
            }
            let w = self.width();
            let row = &self.a[i * w..(i + 1) * w];
            for (r, &v) in self.reduced.iter_mut().zip(row) {
                *r -= cb * v;
            }
            self.objective_value += cb * row[self.cols];
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width();
        let p = self.at(r, c);
        for v in &mut self.a[r * w..(r + 1) * w] {
            *v /= p;
        }
        let (before, rest) = self.a.split_at_mut(r * w);
        let (pivot_row, after) = rest.split_at_mut(w);
        for row in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            let f = row[c];
            if f != 0.0 {
                for (v, &pv) in row.iter_mut().zip(pivot_row.iter()) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        let f = self.reduced[c];
        if f != 0.0 {
            for (rc, &pv) in self.reduced.iter_mut().zip(pivot_row.iter()) {
                *rc -= f * pv;
            }
            self.reduced[c] = 0.0;
            self.objective_value += f * pivot_row[self.cols];
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Bland's rule iterations over columns `< allowed`.
    fn iterate(&mut self, allowed: usize, limit: usize) -> Result<(), SimplexError> {
        loop {
            if self.pivots >= limit {
                return Err(SimplexError::PivotLimit(limit));
            }
            let Some(c) = (0..allowed).find(|&j| self.reduced[j] < -COST_TOL) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let aic = self.at(i, c);
                if aic <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / aic;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br - 1e-12
                            || (ratio <= br + 1e-12 && self.basis[i] < self.basis[bi])
                        {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                return Err(SimplexError::Unbounded);
            };
            self.pivot(r, c);
        }
    }

    /// Pivots zero-valued artificials out of the basis; rows where that is
    /// impossible are linearly dependent and are dropped.
    fn expel_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows {
            if self.basis[i] < self.first_artificial {
                i += 1;
                continue;
            }
            let replacement = (0..self.first_artificial).find(|&j| self.at(i, j).abs() > PIVOT_TOL);
            match replacement {
                Some(j) => {
                    self.pivot(i, j);
                    i += 1;
                }
                None => {
                    let w = self.width();
                    self.a.drain(i * w..(i + 1) * w);
                    self.basis.remove(i);
                    self.rows -= 1;
                }
            }
        }
    }

    fn run(mut self, objective: &[f64], limit: usize) -> Result<LpSolution, SimplexError> {
        let phase_one: Vec<f64> = (0..self.cols)
            .map(|j| if j >= self.first_artificial { 1.0 } else { 0.0 })
            .collect();
        self.price(&phase_one);
        self.iterate(self.cols, limit)?;
        if self.objective_value > PHASE1_TOL {
            return Err(SimplexError::Infeasible(self.objective_value));
        }
        self.expel_artificials();
        self.price(objective);
        self.iterate(self.first_artificial, limit)?;

        let mut x = vec![0.0; self.num_structural];
        for i in 0..self.rows {
            let j = self.basis[i];
            if j < self.num_structural {
                let v = self.rhs(i);
                x[j] = if v.abs() < 1e-12 { 0.0 } else { v };
            }
        }
        let objective_value = x.iter().zip(objective).map(|(a, b)| a * b).sum();
        Ok(LpSolution {
            x,
            objective: objective_value,
            pivots: self.pivots,
        })
    }
}
