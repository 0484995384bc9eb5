use std::fmt;

use atsp_core::flows::{euler_circuit, is_weakly_connected, symmetrize, transshipment_feasibility};
use atsp_core::heldkarp::SEPARATION_TOL;
use atsp_core::oracle::{count_small_cuts, enumerate_cuts, exact_atsp, MAX_EXACT_N};
use atsp_core::patchup::{demands, solve_from_lp, PipelineRun};
use atsp_core::rounding::check_near_balance;
use atsp_core::{
    round_once, scale_k, separate, solve_lp, CostMatrix, IntegerMultiDigraph, RoundingConfig,
};

/// Largest n for which the suite enumerates all `2^n - 2` cuts.
pub const EXHAUSTIVE_LIMIT: usize = 20;

/// Raw samples (beyond the accepted one) compared against the Hoffman test.
const EXTRA_SAMPLES: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skip => "SKIP",
        };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

struct Suite(Vec<CheckOutcome>);

impl Suite {
    fn check(&mut self, name: &'static str, ok: bool, detail: impl Into<String>) {
        let status = if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        self.0.push(CheckOutcome {
            name,
            status,
            detail: detail.into(),
        });
    }

    fn skip(&mut self, name: &'static str, why: impl Into<String>) {
        self.0.push(CheckOutcome {
            name,
            status: CheckStatus::Skip,
            detail: why.into(),
        });
    }
}

/// Runs every invariant that is affordable at this instance's size. Cut
/// enumeration runs for `n <= 20`, the exact optimum for `n <= 15`; larger
/// instances get a skip notice and only the flow-based checks.
pub fn verify_instance(m: &CostMatrix, cfg: &RoundingConfig) -> Vec<CheckOutcome> {
    let n = m.n();
    let mut s = Suite(Vec::new());
    let exhaustive = n <= EXHAUSTIVE_LIMIT;
    let too_big = format!("n = {n} > {EXHAUSTIVE_LIMIT}, exhaustive cut enumeration skipped");

    let x = match solve_lp(m, SEPARATION_TOL) {
        Ok(x) => x,
        Err(e) => {
            s.check("lp.solve", false, e.to_string());
            return s.0;
        }
    };
    s.check("lp.solve", true, format!("objective {}", x.objective()));
    let violations = x.invariant_violations();
    s.check(
        "lp.feasible",
        violations.is_empty(),
        if violations.is_empty() {
            "balanced, out-degree one, bounds hold".into()
        } else {
            violations.join("; ")
        },
    );
    let sep = separate(x.weights(), SEPARATION_TOL);
    s.check(
        "lp.separation",
        sep.is_none(),
        sep.map_or("no violated subtour cut".into(), |c| c.to_string()),
    );

    if exhaustive {
        let cuts = enumerate_cuts(x.weights()).expect("size checked");
        let min = cuts
            .iter()
            .map(|c| c.out_weight)
            .fold(f64::INFINITY, f64::min);
        s.check(
            "lp.subtour_exhaustive",
            min >= 1.0 - 1e-6,
            format!("min cut {min}"),
        );

        let singles: f64 = cuts
            .iter()
            .filter(|c| c.vertices.len() == 1)
            .map(|c| c.out_weight)
            .sum();
        let total = x.weights().total();
        s.check(
            "cuts.singleton_total",
            (singles - total).abs() <= 1e-9 * (1.0 + total),
            format!("{singles} vs {total}"),
        );

        match symmetrize(x.weights()) {
            Ok(y) => {
                let worst = cuts
                    .iter()
                    .map(|c| {
                        let mask = c.vertices.iter().fold(0u64, |m, &v| m | 1 << v);
                        (y.cut_weight_mask(mask) - c.out_weight).abs()
                    })
                    .fold(0.0, f64::max);
                s.check(
                    "symmetrize.cuts",
                    worst <= 1e-9,
                    format!("max gap {worst:e}"),
                );
            }
            Err(e) => s.check("symmetrize.cuts", false, e.to_string()),
        }

        let mut detail = Vec::new();
        let mut ok = true;
        for alpha in [1.0, 1.5, 2.0] {
            let count = count_small_cuts(x.weights(), alpha).expect("size checked");
            let bound = (n as f64).powf(2.0 * alpha);
            ok &= count as f64 <= bound;
            detail.push(format!("alpha {alpha}: {count} <= {bound}"));
        }
        s.check("cuts.small_count", ok, detail.join(", "));
    } else {
        for name in [
            "lp.subtour_exhaustive",
            "cuts.singleton_total",
            "symmetrize.cuts",
            "cuts.small_count",
        ] {
            s.skip(name, too_big.clone());
        }
    }

    let opt = if n <= MAX_EXACT_N {
        let opt = exact_atsp(m).expect("size checked");
        let recomputed = m.cycle_cost(&opt.order);
        s.check(
            "exact.relaxation",
            x.objective() <= opt.cost + 1e-6 && (recomputed - opt.cost).abs() <= 1e-9,
            format!("lp {} <= opt {}", x.objective(), opt.cost),
        );
        Some(opt.cost)
    } else {
        s.skip(
            "exact.relaxation",
            format!("n = {n} > {MAX_EXACT_N}, exact optimum skipped"),
        );
        None
    };

    let run = match solve_from_lp(m, x.clone(), cfg) {
        Ok(run) => run,
        Err(e) => {
            s.check("pipeline.run", false, e.to_string());
            return s.0;
        }
    };
    s.check(
        "pipeline.run",
        true,
        format!(
            "K {} attempts {} tour {}",
            run.report.k, run.report.attempts, run.tour.cost
        ),
    );
    pipeline_checks(&mut s, m, &run);

    match opt {
        Some(opt) => {
            let ratio = run.tour.cost / opt;
            s.check(
                "tour.vs_optimum",
                ratio.is_finite() && ratio >= 1.0 - 1e-9,
                format!("ratio {ratio}"),
            );
        }
        None => s.skip(
            "tour.vs_optimum",
            format!("n = {n} > {MAX_EXACT_N}, exact optimum skipped"),
        ),
    }

    if exhaustive {
        let k = scale_k(n, cfg);
        let mut samples = vec![run.z.clone()];
        for t in 0..EXTRA_SAMPLES {
            samples.push(
                round_once(x.weights(), k, cfg.seed.wrapping_add(1000 + t))
                    .expect("LP weights in [0, 1]"),
            );
        }
        let disagree = samples.iter().filter(|z| !hoffman_agrees(z)).count();
        s.check(
            "balance.hoffman",
            disagree == 0,
            format!("{} samples, {disagree} disagreements", samples.len()),
        );
    } else {
        s.skip("balance.hoffman", too_big);
    }
    s.0
}

/// Exhaustive near-balance holds exactly when the sample is connected and
/// its patch-up transshipment is feasible.
fn hoffman_agrees(z: &IntegerMultiDigraph) -> bool {
    let exhaustive = check_near_balance(z).expect("size checked").is_balanced();
    let flow = is_weakly_connected(z) && transshipment_feasibility(z, &demands(z).0).is_ok();
    exhaustive == flow
}

fn pipeline_checks(s: &mut Suite, m: &CostMatrix, run: &PipelineRun) {
    let r = &run.report;
    let zw = run.z.sum(&run.w);
    s.check(
        "patch.within_sample",
        run.w.is_submultigraph_of(&run.z),
        "w <= z arcwise",
    );
    s.check(
        "patch.eulerian",
        zw.is_balanced(),
        zw.first_unbalanced().map_or("z + w balanced".into(), |v| {
            format!("vertex {v} unbalanced")
        }),
    );
    let cz = run.z.cost(m);
    let cw = run.w.cost(m);
    s.check(
        "patch.cost",
        cw <= cz + 1e-9,
        format!("c(w) {cw} <= c(z) {cz}"),
    );
    match euler_circuit(&zw) {
        Ok(walk) => {
            let recount =
                IntegerMultiDigraph::from_arcs(m.n(), walk.iter().map(|&(v, w)| (v, w, 1)));
            s.check("euler.walk", recount == zw, format!("{} arcs", walk.len()));
        }
        Err(e) => s.check("euler.walk", false, e.to_string()),
    }
    let tour = m.cycle_cost(&run.tour.order);
    let walk = m.walk_cost(&run.walk);
    let slack = 1e-9 * (1.0 + walk);
    s.check(
        "tour.shortcut",
        tour <= walk + slack && (walk - (cz + cw)).abs() <= slack,
        format!("tour {tour} <= walk {walk}"),
    );
    s.check(
        "tour.sandwich",
        r.lp_objective - 1e-6 <= tour && tour <= 2.0 * cz + slack,
        format!("{} <= {tour} <= {}", r.lp_objective, 2.0 * cz),
    );
}
