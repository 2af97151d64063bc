//! Max-min covering: greedy under a p-system, the knapsack reduction to
//! partition matroids, and the combined p-system plus knapsack solver.

mod greedy;
mod knapsack;
mod reduction;
mod split;

pub use greedy::{greedy_scenario, maxmin_greedy, GreedyStep, MaxMinResult};
pub use knapsack::{maxmin_system_knapsack, KnapsackMaxMin, SplitMode};
pub use reduction::{
    Compositions, KnapsackReduction, MatroidDump, ReductionParams, DEFAULT_ENUMERATION_CAP,
};
pub use split::{split_part_bound, split_scenario};

/// Smallest δ tried by default for the max-min knapsack reduction (`ε = 1/2`).
pub fn maxmin_delta_floor() -> crate::cost::Rational {
    crate::cost::Rational::new(1, 12)
}
