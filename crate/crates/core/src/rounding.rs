//! Randomized rounding of a Held-Karp point: `K` parallel copies of every
//! arc, each kept independently with probability equal to its LP weight, so
//! `z_e ~ Binomial(K, x_e)` and every cut's expected count is `K` times its
//! LP weight.

use std::fmt::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use thiserror::Error;

use crate::cut::{ArcWeights, CutRecord};
use crate::flows::{
    is_weakly_connected, transshipment_feasibility, weak_component, FlowError, IntegerMultiDigraph,
};
use crate::oracle::{for_each_cut, OracleError};
use crate::patchup::demands;
use crate::CostMatrix;

/// Generator behind every sample; recorded in reports.
pub const RNG_NAME: &str = "ChaCha8Rng";

/// Nearly-balanced threshold on `max(out/in, in/out)` over all cuts.
pub const BALANCE_RATIO: f64 = 2.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoundingError {
    #[error("invalid rounding configuration: {0}")]
    InvalidConfig(String),
    #[error("arc ({tail},{head}) has weight {weight} outside [0, 1]")]
    WeightOutOfRange {
        tail: usize,
        head: usize,
        weight: f64,
    },
    #[error("no acceptable sample in {attempts} attempts; last rejection: {last}")]
    RetriesExhausted { attempts: u32, last: Rejection },
}

/// Why a rounded sample was rejected.
#[derive(Debug, Clone, PartialEq)]
pub enum Rejection {
    /// Some vertex set is cut off from the rest; carries the component of 0.
    Disconnected(Vec<usize>),
    /// Patch-up transshipment infeasible; carries the violated cut.
    Unpatchable(CutRecord),
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::Disconnected(c) => write!(f, "disconnected, component of 0 is {c:?}"),
            Rejection::Unpatchable(cut) => write!(f, "patch-up infeasible at {cut}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundingConfig {
    /// `K = ceil(k_constant * ln n)`.
    pub k_constant: f64,
    pub epsilon: f64,
    pub max_retries: u32,
    pub seed: u64,
}

impl Default for RoundingConfig {
    fn default() -> Self {
        Self {
            k_constant: 100.0,
            epsilon: 0.1f64.sqrt(),
            max_retries: 20,
            seed: 0,
        }
    }
}

impl RoundingConfig {
    pub fn validate(&self) -> Result<(), RoundingError> {
        if !(self.k_constant > 0.0 && self.k_constant.is_finite()) {
            return Err(RoundingError::InvalidConfig(format!(
                "k_constant must be positive, got {}",
                self.k_constant
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0 / 3.0) {
            return Err(RoundingError::InvalidConfig(format!(
                "epsilon must lie in (0, 1/3), got {}",
                self.epsilon
            )));
        }
        if self.max_retries < 1 {
            return Err(RoundingError::InvalidConfig(
                "max_retries must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Number of parallel copies, `ceil(k_constant * ln n)`, at least 1.
pub fn scale_k(n: usize, cfg: &RoundingConfig) -> u32 {
    let k = (cfg.k_constant * (n as f64).ln()).ceil();
    if k.is_finite() && k >= 1.0 {
        k as u32
    } else {
        1
    }
}

/// One rounded sample. Arcs are visited in lexicographic order, drawing
/// from a `ChaCha8Rng` seeded with `seed`; arcs of weight exactly 0 or 1 do
/// not consume randomness.
pub fn round_once(x: &ArcWeights, k: u32, seed: u64) -> Result<IntegerMultiDigraph, RoundingError> {
    let n = x.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = IntegerMultiDigraph::empty(n);
    for v in 0..n {
        for w in 0..n {
            if v == w {
                continue;
            }
            let weight = x.get(v, w);
            if !(-1e-9..=1.0 + 1e-9).contains(&weight) {
                return Err(RoundingError::WeightOutOfRange {
                    tail: v,
                    head: w,
                    weight,
                });
            }
            let p = weight.clamp(0.0, 1.0);
            let copies = if p == 0.0 {
                0
            } else if p == 1.0 {
                k
            } else {
                Binomial::new(k as u64, p)
                    .expect("probability in (0, 1)")
                    .sample(&mut rng) as u32
            };
            if copies > 0 {
                z.set(v, w, copies);
            }
        }
    }
    Ok(z)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BalanceCheck {
    /// `max(out/in, in/out)` over all cuts; infinite when some cut has a
    /// zero side.
    pub worst_ratio: f64,
    pub worst_cut: CutRecord,
}

impl BalanceCheck {
    pub fn is_balanced(&self) -> bool {
        self.worst_ratio <= BALANCE_RATIO
    }
}

fn cut_ratio(out: f64, inw: f64) -> f64 {
    if out == 0.0 || inw == 0.0 {
        f64::INFINITY
    } else {
        (out / inw).max(inw / out)
    }
}

/// Exhaustive near-balance certificate over all `2^n - 2` cuts (`n <= 24`).
/// Ties keep the smallest bitmask.
pub fn check_near_balance(z: &IntegerMultiDigraph) -> Result<BalanceCheck, OracleError> {
    let w = z.to_weights();
    let mut worst: Option<(u64, f64)> = None;
    for_each_cut(&w, |mask, out, inw| {
        let r = cut_ratio(out, inw);
        if worst.is_none_or(|(_, best)| r > best) {
            worst = Some((mask, r));
        }
    })?;
    let (mask, worst_ratio) = worst.expect("n >= 2 has cuts");
    Ok(BalanceCheck {
        worst_ratio,
        worst_cut: CutRecord::from_mask(&w, mask),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Divergence {
    /// `max_U |z(delta+(U)) - K x(delta+(U))| / (K x(delta+(U)))`.
    pub max_relative: f64,
    pub cut: Vec<usize>,
    pub expected: f64,
    pub actual: f64,
}

/// Largest relative deviation of a sampled cut count from its expectation,
/// over every cut (exhaustive, `n <= 24`). Every `delta-(U)` is the
/// `delta+` of the complement, so both directions are covered.
pub fn cut_divergence(
    x: &ArcWeights,
    z: &IntegerMultiDigraph,
    k: u32,
) -> Result<Divergence, OracleError> {
    let zw = z.to_weights();
    let mut worst = Divergence {
        max_relative: -1.0,
        cut: Vec::new(),
        expected: 0.0,
        actual: 0.0,
    };
    let mut worst_mask = 0;
    for_each_cut(x, |mask, out, _| {
        let expected = k as f64 * out;
        let actual = zw.cut_weights_mask(mask).0;
        let rel = if expected > 0.0 {
            (actual - expected).abs() / expected
        } else if actual > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if rel > worst.max_relative {
            worst.max_relative = rel;
            worst.expected = expected;
            worst.actual = actual;
            worst_mask = mask;
        }
    })?;
    worst.cut = crate::cut::mask_members(worst_mask);
    Ok(worst)
}

/// Acceptance test used by [`round_with_retry`]: weakly connected over all
/// vertices, and the patch-up transshipment is feasible.
pub fn accept(z: &IntegerMultiDigraph) -> Result<(), Rejection> {
    if !is_weakly_connected(z) {
        return Err(Rejection::Disconnected(weak_component(z, 0)));
    }
    match transshipment_feasibility(z, &demands(z).0) {
        Ok(()) => Ok(()),
        Err(FlowError::Infeasible { cut }) => Err(Rejection::Unpatchable(cut)),
        Err(e) => unreachable!("demands always sum to zero: {e}"),
    }
}

#[derive(Clone, Debug)]
pub struct RoundingOutcome {
    pub z: IntegerMultiDigraph,
    pub k: u32,
    pub attempts: u32,
    /// Seed of the accepted sample.
    pub seed: u64,
}

/// Samples with seeds `cfg.seed, cfg.seed + 1, ...` until one passes
/// [`accept`] or `cfg.max_retries` samples have been rejected.
pub fn round_with_retry(
    x: &ArcWeights,
    cfg: &RoundingConfig,
) -> Result<RoundingOutcome, RoundingError> {
    cfg.validate()?;
    let k = scale_k(x.n(), cfg);
    let mut last = None;
    for attempt in 0..cfg.max_retries {
        let seed = cfg.seed.wrapping_add(attempt as u64);
        let z = round_once(x, k, seed)?;
        match accept(&z) {
            Ok(()) => {
                return Ok(RoundingOutcome {
                    z,
                    k,
                    attempts: attempt + 1,
                    seed,
                })
            }
            Err(r) => last = Some(r),
        }
    }
    Err(RoundingError::RetriesExhausted {
        attempts: cfg.max_retries,
        last: last.expect("max_retries >= 1"),
    })
}

/// Spacing between the base seeds of consecutive logged trials, so that
/// retry seeds of one trial never collide with another's.
pub const TRIAL_SEED_STRIDE: u64 = 1 << 20;

/// One row of the trial log. `cost_z`, `connected`, `balanced` and
/// `worst_ratio` describe the first sample of the trial; `attempts` is the
/// retry loop's count (`None` when retries were exhausted).
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub seed: u64,
    pub k: u32,
    pub attempts: Option<u32>,
    pub cost_z: f64,
    pub balanced: Option<bool>,
    pub connected: bool,
    pub worst_ratio: Option<f64>,
}

pub const TRIAL_CSV_HEADER: &str = "seed,K,attempts,costZ,balanced,connected,worstCutRatio";

/// Runs `trials` retry loops with base seeds `cfg.seed + t * TRIAL_SEED_STRIDE`.
/// The exhaustive balance check runs only when `n <= 24`.
pub fn run_trials(
    x: &ArcWeights,
    costs: &CostMatrix,
    cfg: &RoundingConfig,
    trials: usize,
) -> Result<Vec<TrialRecord>, RoundingError> {
    cfg.validate()?;
    let k = scale_k(x.n(), cfg);
    let exhaustive = x.n() <= crate::oracle::MAX_CUT_N;
    (0..trials)
        .map(|t| {
            let seed = cfg.seed.wrapping_add(t as u64 * TRIAL_SEED_STRIDE);
            let first = round_once(x, k, seed)?;
            let check = exhaustive.then(|| check_near_balance(&first).expect("size checked"));
            let attempts = match round_with_retry(x, &RoundingConfig { seed, ..*cfg }) {
                Ok(o) => Some(o.attempts),
                Err(RoundingError::RetriesExhausted { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(TrialRecord {
                seed,
                k,
                attempts,
                cost_z: first.cost(costs),
                balanced: check.as_ref().map(BalanceCheck::is_balanced),
                connected: is_weakly_connected(&first),
                worst_ratio: check.map(|c| c.worst_ratio),
            })
        })
        .collect()
}

pub fn trials_csv(records: &[TrialRecord]) -> String {
    let opt = |v: Option<String>| v.unwrap_or_default();
    let mut out = format!("{TRIAL_CSV_HEADER}\n");
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.seed,
            r.k,
            opt(r.attempts.map(|a| a.to_string())),
            r.cost_z,
            opt(r.balanced.map(|b| b.to_string())),
            r.connected,
            opt(r.worst_ratio.map(|w| w.to_string())),
        )
        .unwrap();
    }
    out
}
