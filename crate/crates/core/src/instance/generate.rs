use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{metric_closure, CostMatrix, InstanceError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InstanceKind {
    /// Independent uniform costs in `[1, 100)`, then metric closure.
    AsymmetricUniform,
    /// Planar points in `[0, 100)^2`; Euclidean distance times an arc factor
    /// in `[1, 1.5)`, then metric closure.
    EuclideanPerturbed,
    /// A planted Hamiltonian cycle (cost `[1.5, 2)` per arc) plus three random
    /// covers by short directed cycles that are cheaper still (`[1, 1.1)`),
    /// over a background of expensive arcs (`[20, 40)`), then metric closure.
    /// The short cycles are subtours, so the LP optimum mixes them
    /// fractionally.
    CycleHeavy,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 3] = [
        InstanceKind::AsymmetricUniform,
        InstanceKind::EuclideanPerturbed,
        InstanceKind::CycleHeavy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::AsymmetricUniform => "asymmetric-uniform",
            InstanceKind::EuclideanPerturbed => "euclidean-perturbed",
            InstanceKind::CycleHeavy => "cycle-heavy",
        }
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InstanceKind {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        InstanceKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| InstanceError::UnsupportedKind(s.to_string()))
    }
}

/// Deterministic metric instance for `(kind, n, seed)`.
pub fn generate(kind: InstanceKind, n: usize, seed: u64) -> Result<CostMatrix, InstanceError> {
    if n < 3 {
        return Err(InstanceError::TooFewVertices(n));
    }
    match kind {
        InstanceKind::AsymmetricUniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let raw = CostMatrix::from_fn(n, |_, _| rng.random_range(1.0..100.0))?;
            metric_closure(&raw)
        }
        InstanceKind::EuclideanPerturbed => {
            let (_, raw) = euclidean_perturbed_raw(n, seed);
            metric_closure(&CostMatrix::from_rows(raw)?)
        }
        InstanceKind::CycleHeavy => Ok(cycle_heavy(n, seed)?.0),
    }
}

/// Points and pre-closure matrix used by [`InstanceKind::EuclideanPerturbed`].
pub fn euclidean_perturbed_raw(n: usize, seed: u64) -> (Vec<(f64, f64)>, Vec<Vec<f64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)))
        .collect();
    let raw = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let factor: f64 = rng.random_range(1.0..1.5);
                    if i == j {
                        0.0
                    } else {
                        let (dx, dy) = (points[i].0 - points[j].0, points[i].1 - points[j].1);
                        dx.hypot(dy) * factor
                    }
                })
                .collect()
        })
        .collect();
    (points, raw)
}

/// Cycle-heavy instance together with its planted Hamiltonian cycle.
pub fn cycle_heavy(n: usize, seed: u64) -> Result<(CostMatrix, Vec<usize>), InstanceError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..n).map(|_| rng.random_range(20.0..40.0)).collect())
        .collect();
    let mut planted: Vec<usize> = (0..n).collect();
    planted.shuffle(&mut rng);
    for i in 0..n {
        raw[planted[i]][planted[(i + 1) % n]] = rng.random_range(1.5..2.0);
    }
    for _ in 0..3 {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let mut start = 0;
        while start < n {
            let rest = n - start;
            let mut len = rng.random_range(2..=4usize).min(rest);
            if rest - len == 1 {
                len += 1;
            }
            let block = &perm[start..start + len];
            for j in 0..len {
                let (v, w) = (block[j], block[(j + 1) % len]);
                let cost: f64 = rng.random_range(1.0..1.1);
                raw[v][w] = raw[v][w].min(cost);
            }
            start += len;
        }
    }
    for (i, row) in raw.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    let m = metric_closure(&CostMatrix::from_rows(raw)?)?;
    if let Some(first) = planted.iter().position(|&v| v == 0) {
        planted.rotate_left(first);
    }
    Ok((m, planted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::validate;

    #[test]
    fn deterministic() {
        let a = generate(InstanceKind::AsymmetricUniform, 8, 42).unwrap();
        let b = generate(InstanceKind::AsymmetricUniform, 8, 42).unwrap();
        assert_eq!(a, b);
        let c = generate(InstanceKind::AsymmetricUniform, 8, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn every_kind_validates() {
        for kind in InstanceKind::ALL {
            for (n, seed) in [(3, 0), (6, 1), (10, 7), (15, 99)] {
                let m = generate(kind, n, seed).unwrap();
                assert!(validate(&m).is_empty(), "{kind} n={n} seed={seed}");
            }
        }
    }

    #[test]
    fn cycle_heavy_ten_validates_by_triple_loop() {
        let m = generate(InstanceKind::CycleHeavy, 10, 7).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                for k in 0..10 {
                    assert!(m.get(i, j) <= m.get(i, k) + m.get(k, j) + 1e-9);
                }
            }
        }
    }

    #[test]
    fn euclidean_asymmetry_bounded_before_closure() {
        let (points, raw) = euclidean_perturbed_raw(6, 1);
        for i in 0..6 {
            for j in 0..6 {
                if i == j {
                    continue;
                }
                let d = (points[i].0 - points[j].0).hypot(points[i].1 - points[j].1);
                let f_ij = raw[i][j] / d;
                assert!((1.0..=1.5).contains(&f_ij), "factor {f_ij}");
                assert!(raw[i][j] / raw[j][i] <= 1.5 + 1e-12);
            }
        }
    }

    #[test]
    fn planted_cycle_is_a_permutation() {
        let (m, cycle) = cycle_heavy(12, 3).unwrap();
        let mut sorted = cycle.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..12).collect::<Vec<_>>());
        assert_eq!(cycle[0], 0);
        assert!(m.cycle_cost(&cycle) < 2.0 * 12.0);
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in InstanceKind::ALL {
            assert_eq!(kind.name().parse::<InstanceKind>().unwrap(), kind);
        }
        assert_eq!(
            "geo".parse::<InstanceKind>(),
            Err(InstanceError::UnsupportedKind("geo".into()))
        );
        assert_eq!(
            generate(InstanceKind::CycleHeavy, 2, 0),
            Err(InstanceError::TooFewVertices(2))
        );
    }
}
