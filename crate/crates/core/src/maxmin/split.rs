use num_traits::One;

use crate::cost::Rational;
use crate::error::{Error, Result};
use crate::knapsack::KnapsackSet;
use crate::scenario::Scenario;
use crate::system::DownwardClosed;

/// `⌊2(1+ε)q⌋ + 1`, the most parts [`split_scenario`] can return.
pub fn split_part_bound(q: usize, epsilon: Rational) -> usize {
    let bound = Rational::from_integer(2 * q as i128) * (Rational::one() + epsilon);
    bound.floor().to_integer() as usize + 1
}

/// Partitions `tau` into parts that each satisfy every knapsack of the
/// normalized `knapsack`.
///
/// Starts from singletons and repeatedly merges the first pair, in index
/// order, whose union is still feasible. Requires every singleton of `tau`
/// to be feasible and `Σ_e Σ_j w^j(e) ≤ (1+ε)q` over `tau`.
pub fn split_scenario(tau: &Scenario, knapsack: &KnapsackSet, epsilon: Rational) -> Result<Vec<Scenario>> {
    tau.validate(knapsack.ground_size())?;
    if !knapsack.capacities().iter().all(|b| b.is_one()) {
        return Err(Error::precondition("splitting expects unit capacities"));
    }
    let q = knapsack.q();
    let relaxed = Rational::from_integer(q as i128) * (Rational::one() + epsilon);
    if knapsack.combined_load(tau) > relaxed {
        return Err(Error::precondition(format!(
            "combined weight {} of {tau} exceeds (1+ε)q = {relaxed}",
            knapsack.combined_load(tau)
        )));
    }
    let mut parts: Vec<Scenario> = tau.iter().map(|e| Scenario::new([e])).collect();
    if let Some(bad) = parts.iter().find(|s| !knapsack.contains(s)) {
        return Err(Error::precondition(format!("singleton {bad} violates the knapsacks")));
    }
    'merge: loop {
        for a in 0..parts.len() {
            for b in a + 1..parts.len() {
                let merged = parts[a].union(&parts[b]);
                if knapsack.contains(&merged) {
                    parts[a] = merged;
                    parts.remove(b);
                    continue 'merge;
                }
            }
        }
        break;
    }
    debug_assert!(parts.len() <= split_part_bound(q, epsilon).max(1));
    Ok(parts)
}
