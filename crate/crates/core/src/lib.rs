//! Randomized-rounding approximation for the asymmetric traveling salesman
//! problem under the triangle inequality.
//!
//! Pipeline: solve the Held-Karp LP by cutting planes ([`heldkarp`]), scale
//! it by `K = ceil(100 ln n)` and round every arc independently
//! ([`rounding`]), patch the nearly-balanced sample into an Eulerian graph by
//! a min-cost transshipment inside itself ([`patchup`]), and shortcut an Euler
//! circuit into a tour. [`oracle`] holds the exact references the tests
//! compare against.

pub mod cut;
pub mod flows;
pub mod heldkarp;
pub mod instance;
pub mod oracle;
pub mod patchup;
pub mod rounding;
pub mod simplex;

pub use cut::{ArcWeights, CutRecord};
pub use flows::{IntegerMultiDigraph, SymmetrizedWeights};
pub use heldkarp::{lp_lower_bound, separate, solve_lp, FractionalCirculation};
pub use instance::{
    generate, metric_closure, validate, CostMatrix, InstanceKind, ValidationReport,
};
pub use oracle::exact_atsp;
pub use patchup::{solve, PipelineReport, Tour};
pub use rounding::{round_once, round_with_retry, scale_k, RoundingConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
