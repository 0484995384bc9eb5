use atsp_core::heldkarp::{min_directed_cut, SEPARATION_TOL};
use atsp_core::instance::cycle_heavy;
use atsp_core::oracle::{enumerate_cuts, exact_atsp, min_cut_exhaustive};
use atsp_core::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random derangement: a permutation with no fixed point.
fn derangement(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    loop {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(rng);
        if p.iter().enumerate().all(|(i, &j)| i != j) {
            return p;
        }
    }
}

/// Convex combination of a few derangement matrices: balanced, out-degree
/// one, and usually fractional. Subtours in the permutations make violated
/// cuts likely but not certain.
fn random_feasible_x(n: usize, rng: &mut impl Rng) -> ArcWeights {
    let parts = rng.random_range(1..=3);
    let lambdas: Vec<f64> = (0..parts).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = lambdas.iter().sum();
    let mut x = ArcWeights::zeros(n);
    for l in lambdas {
        let p = derangement(n, rng);
        for (v, &w) in p.iter().enumerate() {
            x.set(v, w, x.get(v, w) + l / total);
        }
    }
    x
}

#[test]
fn lp_below_exact_on_asymmetric_ten() {
    let m = generate(InstanceKind::AsymmetricUniform, 10, 3).unwrap();
    let lp = lp_lower_bound(&m).unwrap();
    let opt = exact_atsp(&m).unwrap();
    assert!(lp <= opt.cost + 1e-6, "lp {lp} > opt {}", opt.cost);
}

#[test]
fn separation_agrees_with_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut violated = 0;
    for _ in 0..200 {
        let x = random_feasible_x(8, &mut rng);
        let brute = min_cut_exhaustive(&x).unwrap();
        let found = separate(&x, SEPARATION_TOL);
        assert_eq!(found.is_some(), brute.out_weight < 1.0 - SEPARATION_TOL);
        let flow_min = min_directed_cut(&x).unwrap();
        assert!((flow_min.out_weight - brute.out_weight).abs() <= 1e-9);
        if let Some(cut) = found {
            violated += 1;
            assert!(cut.out_weight < 1.0 - SEPARATION_TOL);
            let (out, _) = x.cut_weights(&cut.membership(8));
            assert!((out - cut.out_weight).abs() <= 1e-9);
        }
    }
    assert!(
        violated > 20 && violated < 200,
        "degenerate sample: {violated} violated"
    );
}

#[test]
fn lp_solution_is_subtour_feasible_on_cycle_heavy() {
    for seed in 0..4 {
        let (m, planted) = cycle_heavy(12, seed).unwrap();
        let x = solve_lp(&m, SEPARATION_TOL).unwrap();
        assert!(x.invariant_violations().is_empty());
        let min = enumerate_cuts(x.weights())
            .unwrap()
            .into_iter()
            .map(|c| c.out_weight)
            .fold(f64::INFINITY, f64::min);
        assert!(min >= 1.0 - 1e-6);
        assert!(x.objective() <= m.cycle_cost(&planted) + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lp_is_a_relaxation(kind in 0usize..3, n in 3usize..=11, seed in any::<u64>()) {
        let m = generate(InstanceKind::ALL[kind], n, seed).unwrap();
        let lp = lp_lower_bound(&m).unwrap();
        let opt = exact_atsp(&m).unwrap();
        prop_assert!(lp <= opt.cost + 1e-6);
        prop_assert!((m.cycle_cost(&opt.order) - opt.cost).abs() <= 1e-9);
    }
}
