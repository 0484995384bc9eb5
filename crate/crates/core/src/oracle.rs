//! Exact and brute-force references used to check the solver: the subset
//! dynamic program for ATSP, exhaustive cut enumeration, small-cut counting
//! and the connectivity sweep over the scaling constant.

use std::fmt::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use thiserror::Error;

use crate::cut::{low_bits, ArcWeights, CutRecord};
use crate::flows::{is_weakly_connected, transshipment_feasibility};
use crate::heldkarp::{solve_lp, FractionalCirculation, HeldKarpError, SEPARATION_TOL};
use crate::patchup::Tour;
use crate::rounding::{round_once, scale_k, RoundingConfig};
use crate::CostMatrix;

pub const MAX_EXACT_N: usize = 15;
pub const MAX_CUT_N: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("n = {n} exceeds the oracle limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error(transparent)]
    Lp(#[from] HeldKarpError),
}

fn check_size(n: usize, limit: usize) -> Result<(), OracleError> {
    if n > limit {
        Err(OracleError::TooLarge { n, limit })
    } else {
        Ok(())
    }
}

/// Optimal tour by the Bellman-Held-Karp subset recursion, `n <= 15`.
pub fn exact_atsp(m: &CostMatrix) -> Result<Tour, OracleError> {
    let n = m.n();
    check_size(n, MAX_EXACT_N)?;
    // Paths start at vertex 0; `mask` ranges over subsets of 1..n, stored
    // shifted down by one bit.
    let k = n - 1;
    let full = 1usize << k;
    let mut best = vec![f64::INFINITY; full * k];
    let mut parent = vec![usize::MAX; full * k];
    for v in 0..k {
        best[(1 << v) * k + v] = m.get(0, v + 1);
    }
    for mask in 1..full {
        for last in 0..k {
            let cur = best[mask * k + last];
            if mask >> last & 1 == 0 || !cur.is_finite() {
                continue;
            }
            for next in 0..k {
                if mask >> next & 1 == 1 {
                    continue;
                }
                let to = mask | 1 << next;
                let cand = cur + m.get(last + 1, next + 1);
                if cand < best[to * k + next] {
                    best[to * k + next] = cand;
                    parent[to * k + next] = last;
                }
            }
        }
    }
    let (mut last, mut cost) = (0, f64::INFINITY);
    for v in 0..k {
        let c = best[(full - 1) * k + v] + m.get(v + 1, 0);
        if c < cost {
            cost = c;
            last = v;
        }
    }
    let mut rev = Vec::with_capacity(n);
    let mut mask = full - 1;
    loop {
        rev.push(last + 1);
        let p = parent[mask * k + last];
        mask &= !(1 << last);
        if p == usize::MAX {
            break;
        }
        last = p;
    }
    rev.push(0);
    rev.reverse();
    Ok(Tour::from_order(rev, m).expect("dynamic program produced a permutation"))
}

/// Calls `f(mask, out, in)` for every proper nonempty subset, masks ascending.
pub fn for_each_cut(
    weights: &ArcWeights,
    mut f: impl FnMut(u64, f64, f64),
) -> Result<(), OracleError> {
    let n = weights.n();
    check_size(n, MAX_CUT_N)?;
    for mask in 1..low_bits(n) {
        let (out, inw) = weights.cut_weights_mask(mask);
        f(mask, out, inw);
    }
    Ok(())
}

/// All `2^n - 2` cuts with their weights, in ascending bitmask order.
pub fn enumerate_cuts(weights: &ArcWeights) -> Result<Vec<CutRecord>, OracleError> {
    let mut out = Vec::new();
    for_each_cut(weights, |mask, out_weight, in_weight| {
        out.push(CutRecord {
            vertices: crate::cut::mask_members(mask),
            out_weight,
            in_weight,
        })
    })?;
    Ok(out)
}

/// Exhaustive minimum of `x(delta+(U))`; ties keep the smallest mask.
pub fn min_cut_exhaustive(weights: &ArcWeights) -> Result<CutRecord, OracleError> {
    let mut best: Option<(u64, f64)> = None;
    for_each_cut(weights, |mask, out, _| {
        if best.is_none_or(|(_, b)| out < b) {
            best = Some((mask, out));
        }
    })?;
    let (mask, _) = best.expect("n >= 2 has at least one cut");
    Ok(CutRecord::from_mask(weights, mask))
}

/// Number of cuts with `x(delta+(U)) <= alpha` (plus 1e-9 slack).
pub fn count_small_cuts(x: &ArcWeights, alpha: f64) -> Result<usize, OracleError> {
    let mut count = 0;
    for_each_cut(x, |_, out, _| {
        if out <= alpha + 1e-9 {
            count += 1;
        }
    })?;
    Ok(count)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub k_constant: f64,
    pub k: u32,
    pub trials: usize,
    pub fraction_connected: f64,
    /// Fraction of samples whose patch-up transshipment is feasible.
    pub fraction_balanced: f64,
    pub mean_cost_z: f64,
}

/// Trial `t` of every sweep row uses rounding seed `seed + t`.
pub fn sweep_circulation(
    x: &FractionalCirculation,
    costs: &CostMatrix,
    k_constants: &[f64],
    trials: usize,
    seed: u64,
) -> Vec<SweepRow> {
    let n = x.n();
    k_constants
        .iter()
        .map(|&k_constant| {
            let cfg = RoundingConfig {
                k_constant,
                ..RoundingConfig::default()
            };
            let k = scale_k(n, &cfg);
            let (mut connected, mut balanced, mut cost) = (0usize, 0usize, 0.0);
            for t in 0..trials {
                let z = round_once(x.weights(), k, seed.wrapping_add(t as u64))
                    .expect("LP weights lie in [0, 1]");
                if is_weakly_connected(&z) {
                    connected += 1;
                }
                if transshipment_feasibility(&z, &crate::patchup::demands(&z).0).is_ok() {
                    balanced += 1;
                }
                cost += z.cost(costs);
            }
            let denom = trials.max(1) as f64;
            SweepRow {
                k_constant,
                k,
                trials,
                fraction_connected: connected as f64 / denom,
                fraction_balanced: balanced as f64 / denom,
                mean_cost_z: cost / denom,
            }
        })
        .collect()
}

/// Solves the LP of `m`, then runs [`sweep_circulation`].
pub fn connectivity_sweep(
    m: &CostMatrix,
    k_constants: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<SweepRow>, OracleError> {
    let x = solve_lp(m, SEPARATION_TOL)?;
    Ok(sweep_circulation(&x, m, k_constants, trials, seed))
}

pub const SWEEP_CSV_HEADER: &str =
    "kConstant,K,trials,fractionConnected,fractionBalanced,meanCostZ";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_CSV_HEADER}\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.k_constant, r.k, r.trials, r.fraction_connected, r.fraction_balanced, r.mean_cost_z
        )
        .unwrap();
    }
    out
}

/// Empirical probability that vertex `v` has no incident arc after rounding
/// with `k` copies. Only arcs touching `v` are sampled, so the trials are
/// cheap and independent of the rest of the graph.
pub fn isolation_frequency(x: &ArcWeights, v: usize, k: u32, trials: usize, seed: u64) -> f64 {
    let n = x.n();
    let incident: Vec<f64> = (0..n)
        .filter(|&u| u != v)
        .flat_map(|u| [x.get(v, u), x.get(u, v)])
        .filter(|&p| p > 0.0)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dists: Vec<Binomial> = incident
        .iter()
        .map(|&p| Binomial::new(k as u64, p.min(1.0)).expect("probability in [0, 1]"))
        .collect();
    let isolated = (0..trials)
        .filter(|_| dists.iter().all(|d| d.sample(&mut rng) == 0))
        .count();
    isolated as f64 / trials as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate, metric_closure, InstanceKind};
    use rand::seq::SliceRandom;

    #[test]
    fn exact_all_ones() {
        let m = CostMatrix::uniform(3, 1.0).unwrap();
        assert_eq!(exact_atsp(&m).unwrap().cost, 3.0);
    }

    #[test]
    fn exact_planted_four_cycle() {
        let raw = CostMatrix::from_fn(4, |v, w| if w == (v + 1) % 4 { 1.0 } else { 10.0 }).unwrap();
        let m = metric_closure(&raw).unwrap();
        let tour = exact_atsp(&m).unwrap();
        assert_eq!(tour.cost, 4.0);
        assert_eq!(tour.order, vec![0, 1, 2, 3]);
    }

    #[test]
    fn exact_beats_random_permutations() {
        let m = generate(InstanceKind::AsymmetricUniform, 10, 12).unwrap();
        let tour = exact_atsp(&m).unwrap();
        assert!((m.cycle_cost(&tour.order) - tour.cost).abs() < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut perm: Vec<usize> = (0..10).collect();
        let mut best = f64::INFINITY;
        for _ in 0..10_000 {
            perm.shuffle(&mut rng);
            best = best.min(m.cycle_cost(&perm));
        }
        assert!(tour.cost <= best + 1e-9);
    }

    #[test]
    fn exact_matches_permutation_enumeration() {
        // 7! / 7 cyclic orders is small enough to enumerate outright.
        fn permute(rest: &mut Vec<usize>, prefix: &mut Vec<usize>, m: &CostMatrix, best: &mut f64) {
            if rest.is_empty() {
                *best = best.min(m.cycle_cost(prefix));
                return;
            }
            for i in 0..rest.len() {
                let v = rest.remove(i);
                prefix.push(v);
                permute(rest, prefix, m, best);
                prefix.pop();
                rest.insert(i, v);
            }
        }
        for seed in 0..5 {
            let m = generate(InstanceKind::EuclideanPerturbed, 7, seed).unwrap();
            let mut best = f64::INFINITY;
            permute(&mut (1..7).collect(), &mut vec![0], &m, &mut best);
            assert!((exact_atsp(&m).unwrap().cost - best).abs() < 1e-9);
        }
    }

    #[test]
    fn exact_rejects_large() {
        let m = CostMatrix::uniform(16, 1.0).unwrap();
        assert_eq!(
            exact_atsp(&m).unwrap_err(),
            OracleError::TooLarge { n: 16, limit: 15 }
        );
    }

    #[test]
    fn cut_enumeration_counts_and_order() {
        let x = ArcWeights::from_arcs(3, [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]);
        let cuts = enumerate_cuts(&x).unwrap();
        assert_eq!(cuts.len(), 6);
        assert_eq!(cuts[0].vertices, vec![0]);
        assert_eq!(cuts[2].vertices, vec![0, 1]);
        assert!(cuts
            .iter()
            .all(|c| c.out_weight == 1.0 && c.in_weight == 1.0));
        assert!(enumerate_cuts(&ArcWeights::zeros(25)).is_err());
    }

    #[test]
    fn singleton_out_weights_sum_to_total() {
        let m = generate(InstanceKind::AsymmetricUniform, 7, 3).unwrap();
        let x = solve_lp(&m, SEPARATION_TOL).unwrap();
        let total: f64 = enumerate_cuts(x.weights())
            .unwrap()
            .iter()
            .filter(|c| c.vertices.len() == 1)
            .map(|c| c.out_weight)
            .sum();
        assert!((total - x.weights().total()).abs() < 1e-9);
    }

    #[test]
    fn small_cuts_of_directed_cycle() {
        let n = 6;
        let x = ArcWeights::from_arcs(n, (0..n).map(|v| (v, (v + 1) % n, 1.0)));
        // Independent count: U has out-weight equal to its number of maximal
        // cyclic runs, so out-weight 1 means U is one run.
        let mut runs_one = 0;
        for mask in 1u32..(1 << n) - 1 {
            let starts = (0..n)
                .filter(|&v| mask >> v & 1 == 1 && mask >> ((v + n - 1) % n) & 1 == 0)
                .count();
            if starts == 1 {
                runs_one += 1;
            }
        }
        assert_eq!(runs_one, 30);
        assert_eq!(count_small_cuts(&x, 1.0).unwrap(), 30);
        assert!(30 <= n * n);
        let five = ArcWeights::from_arcs(5, (0..5).map(|v| (v, (v + 1) % 5, 1.0)));
        assert_eq!(count_small_cuts(&five, 10.0).unwrap(), 30);
    }

    #[test]
    fn small_cut_count_monotone_in_alpha() {
        let m = generate(InstanceKind::CycleHeavy, 9, 5).unwrap();
        let x = solve_lp(&m, SEPARATION_TOL).unwrap();
        let mut prev = 0;
        for alpha in [1.0, 1.25, 1.5, 2.0, 3.0] {
            let c = count_small_cuts(x.weights(), alpha).unwrap();
            assert!(c >= prev);
            assert!((c as f64) <= 9f64.powf(2.0 * alpha));
            prev = c;
        }
    }

    #[test]
    fn integral_lp_is_always_connected() {
        // A 5-cycle with everything else very expensive has an integral LP.
        let raw = CostMatrix::from_fn(5, |v, w| if w == (v + 1) % 5 { 1.0 } else { 50.0 }).unwrap();
        let m = metric_closure(&raw).unwrap();
        let rows = connectivity_sweep(&m, &[0.01, 1.0, 5.0], 20, 3).unwrap();
        for r in &rows {
            assert_eq!(r.fraction_connected, 1.0);
            assert_eq!(r.fraction_balanced, 1.0);
        }
        assert_eq!(rows[0].k, 1);
        let csv = sweep_csv(&rows);
        assert!(csv.starts_with(SWEEP_CSV_HEADER));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn sweep_is_deterministic() {
        let m = generate(InstanceKind::CycleHeavy, 8, 1).unwrap();
        let a = connectivity_sweep(&m, &[0.01, 1.0], 30, 9).unwrap();
        let b = connectivity_sweep(&m, &[0.01, 1.0], 30, 9).unwrap();
        assert_eq!(a, b);
    }
}
