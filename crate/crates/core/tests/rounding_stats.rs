use atsp_core::heldkarp::SEPARATION_TOL;
use atsp_core::instance::cycle_heavy;
use atsp_core::oracle::{isolation_frequency, sweep_circulation};
use atsp_core::rounding::{check_near_balance, cut_divergence, RoundingError};
use atsp_core::*;

/// n = 10 instance whose LP optimum has many fractional arcs.
fn fractional_ten() -> (CostMatrix, FractionalCirculation) {
    let (m, _) = cycle_heavy(10, 7).unwrap();
    let x = solve_lp(&m, SEPARATION_TOL).unwrap();
    assert!(x.num_fractional(1e-6) >= 10);
    (m, x)
}

#[test]
fn per_arc_means_within_four_standard_errors() {
    let (_, x) = fractional_ten();
    let k = 231;
    let trials = 1000;
    let n = x.n();
    let mut sums = vec![0.0; n * n];
    for seed in 0..trials {
        let z = round_once(x.weights(), k, seed).unwrap();
        for (v, w, c) in z.arcs() {
            sums[v * n + w] += c as f64;
        }
    }
    for v in 0..n {
        for w in 0..n {
            let p = x.get(v, w);
            let mean = sums[v * n + w] / trials as f64;
            let se = (k as f64 * p * (1.0 - p) / trials as f64).sqrt();
            assert!(
                (mean - k as f64 * p).abs() <= 4.0 * se + 1e-12,
                "arc ({v},{w}): mean {mean} vs {}",
                k as f64 * p
            );
        }
    }
}

#[test]
fn mean_cost_within_five_percent() {
    let (m, x) = fractional_ten();
    let k = scale_k(10, &RoundingConfig::default());
    let mean: f64 = (0..1000)
        .map(|s| round_once(x.weights(), k, s).unwrap().cost(&m))
        .sum::<f64>()
        / 1000.0;
    let expected = k as f64 * x.objective();
    assert!((mean - expected).abs() <= 0.05 * expected);
}

#[test]
fn rounded_samples_are_nearly_balanced() {
    let (_, x) = fractional_ten();
    let k = 231;
    let balanced = (0..100)
        .filter(|&s| {
            check_near_balance(&round_once(x.weights(), k, s).unwrap())
                .unwrap()
                .is_balanced()
        })
        .count();
    assert!(balanced >= 95, "{balanced}/100 balanced");
}

#[test]
fn few_samples_have_a_divergent_cut() {
    let (_, x) = fractional_ten();
    let k = 231;
    let eps = RoundingConfig::default().epsilon;
    let divergent = (0..200)
        .filter(|&s| {
            let z = round_once(x.weights(), k, s).unwrap();
            cut_divergence(x.weights(), &z, k).unwrap().max_relative > eps
        })
        .count();
    assert!(divergent as f64 / 200.0 <= 0.1, "{divergent}/200 divergent");
}

#[test]
fn retry_usually_accepts_first_sample() {
    for (name, x) in [
        (
            "asymmetric",
            solve_lp(
                &generate(InstanceKind::AsymmetricUniform, 10, 3).unwrap(),
                SEPARATION_TOL,
            )
            .unwrap(),
        ),
        ("cycle-heavy", fractional_ten().1),
    ] {
        let first = (0..100)
            .filter(|&seed| {
                let cfg = RoundingConfig {
                    seed: seed * 1000,
                    ..RoundingConfig::default()
                };
                round_with_retry(x.weights(), &cfg).unwrap().attempts == 1
            })
            .count();
        assert!(first >= 95, "{name}: {first}/100 accepted on attempt 1");
    }
}

#[test]
fn tiny_k_exhausts_retries() {
    let (m, _) = cycle_heavy(20, 2).unwrap();
    let x = solve_lp(&m, SEPARATION_TOL).unwrap();
    let exhausted = (0..20)
        .filter(|&t| {
            let cfg = RoundingConfig {
                k_constant: 0.01,
                seed: t * 1000,
                ..RoundingConfig::default()
            };
            matches!(
                round_with_retry(x.weights(), &cfg),
                Err(RoundingError::RetriesExhausted { .. })
            )
        })
        .count();
    assert!(exhausted >= 1);
}

#[test]
fn isolation_at_one_copy_is_at_least_one_in_27() {
    // Vertex 0 of a uniform 1/3 circulation on K4: six incident arcs of
    // weight 1/3, total incident weight 2.
    let x = ArcWeights::from_fn(4, |_, _| 1.0 / 3.0);
    let trials = 20_000;
    let f = isolation_frequency(&x, 0, 1, trials, 11);
    let p = 1.0 / 27.0;
    let se = (p * (1.0 - p) / trials as f64).sqrt();
    assert!(f >= p - 3.0 * se, "isolation {f}");

    // Same check on every qualifying vertex of a fractional LP optimum.
    let (m, _) = cycle_heavy(20, 2).unwrap();
    let x = solve_lp(&m, SEPARATION_TOL).unwrap();
    let w = x.weights();
    let mut checked = 0;
    for v in 0..20 {
        let inc: Vec<f64> = (0..20)
            .filter(|&u| u != v)
            .flat_map(|u| [w.get(v, u), w.get(u, v)])
            .collect();
        if inc.iter().all(|&a| a <= 2.0 / 3.0 + 1e-9) {
            checked += 1;
            let f = isolation_frequency(w, v, 1, trials, 100 + v as u64);
            assert!(f >= p - 3.0 * se, "vertex {v}: isolation {f}");
        }
    }
    assert!(checked > 0);
}

#[test]
fn connectivity_grows_with_k() {
    let (m, _) = cycle_heavy(20, 2).unwrap();
    let x = solve_lp(&m, SEPARATION_TOL).unwrap();
    let trials = 200;
    let rows = sweep_circulation(&x, &m, &[0.01, 0.5, 1.0, 2.0, 5.0], trials, 0);
    assert_eq!(
        rows.iter().map(|r| r.k).collect::<Vec<_>>(),
        [1, 2, 3, 6, 15]
    );
    for pair in rows.windows(2) {
        let (a, b) = (pair[0].fraction_connected, pair[1].fraction_connected);
        let sigma = |p: f64| (p * (1.0 - p) / trials as f64).sqrt();
        let noise = 2.0 * (sigma(a).powi(2) + sigma(b).powi(2)).sqrt();
        assert!(
            b >= a - noise,
            "K {} -> {}: {a} -> {b}",
            pair[0].k,
            pair[1].k
        );
    }
}
