//! Fixtures shared by the benchmarks.

use atsp_core::heldkarp::SEPARATION_TOL;
use atsp_core::{generate, solve_lp, CostMatrix, FractionalCirculation, InstanceKind};

/// Sizes exercised by every group; the LP dominates beyond about 30.
pub const SIZES: [usize; 3] = [10, 20, 30];

pub fn instance(n: usize) -> CostMatrix {
    generate(InstanceKind::CycleHeavy, n, 1).expect("n >= 3")
}

pub fn instance_with_lp(n: usize) -> (CostMatrix, FractionalCirculation) {
    let m = instance(n);
    let x = solve_lp(&m, SEPARATION_TOL).expect("generated instances are metric");
    (m, x)
}
