use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::greedy::{greedy_with_factor, MaxMinResult};
use super::reduction::{KnapsackReduction, ReductionParams};
use super::split::{split_part_bound, split_scenario};
use crate::cost::{Cost, Rational};
use crate::error::Result;
use crate::knapsack::KnapsackSet;
use crate::problem::CoveringProblem;
use crate::scenario::Scenario;
use crate::system::{Meet, PSystem};

/// How the final part is chosen among the split pieces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum SplitMode {
    /// Part with the largest offline augmentation cost, lowest index on ties.
    Deterministic,
    /// Uniformly random part.
    Randomized { seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KnapsackMaxMin {
    /// `ω*`, a member of the original uncertainty set.
    pub scenario: Scenario,
    pub parts: Vec<Scenario>,
    pub chosen_part: usize,
    /// Greedy result inside the winning `M ∩ P_j`.
    pub best: MaxMinResult,
    pub best_index: u64,
    pub best_composition: Vec<u64>,
    pub matroid_count: u64,
    #[serde(with = "crate::cost::rational_string")]
    pub delta: Rational,
    /// `⌊2(1+6δ)q⌋ + 1`
    pub part_bound: usize,
    /// Requirements whose singleton violates a knapsack.
    pub dropped: Scenario,
}

/// Max-min under a p-system `system` intersected with the knapsacks.
pub fn maxmin_system_knapsack<P: CoveringProblem + ?Sized>(
    problem: &P,
    system: &dyn PSystem,
    knapsack: &KnapsackSet,
    params: ReductionParams,
    mode: SplitMode,
) -> Result<KnapsackMaxMin> {
    let (normalized, dropped) = knapsack.normalize()?;
    let combined = normalized.combine()?;
    let reduction = KnapsackReduction::new(
        combined.weights()[0].clone(),
        combined.capacities()[0],
        &dropped,
        params,
    )?;
    let mut best: Option<(MaxMinResult, u64, Vec<u64>)> = None;
    let mut count = 0u64;
    for (index, (composition, matroid)) in reduction.matroids()?.enumerate() {
        count += 1;
        let sigma = Meet(system, &matroid);
        let result = greedy_with_factor(problem, &sigma, system.p_value() + 1)?;
        if best.as_ref().is_none_or(|(b, _, _)| result.online_cost > b.online_cost) {
            best = Some((result, index as u64, composition));
        }
    }
    let (best, best_index, best_composition) = best.expect("at least one matroid is emitted");
    let epsilon = params.epsilon();
    let parts = split_scenario(&best.scenario, &normalized, epsilon)?;
    let chosen_part = if parts.is_empty() {
        0
    } else {
        match mode {
            SplitMode::Deterministic => {
                let mut pick: Option<(Cost, usize)> = None;
                for (i, part) in parts.iter().enumerate() {
                    let aug = problem.offline_augment(part, &problem.empty_set())?;
                    let c = problem.set_cost(&aug);
                    if pick.is_none_or(|(b, _)| c > b) {
                        pick = Some((c, i));
                    }
                }
                pick.expect("nonempty parts").1
            }
            SplitMode::Randomized { seed } => ChaCha8Rng::seed_from_u64(seed).gen_range(0..parts.len()),
        }
    };
    Ok(KnapsackMaxMin {
        scenario: parts.get(chosen_part).cloned().unwrap_or_default(),
        parts,
        chosen_part,
        best,
        best_index,
        best_composition,
        matroid_count: count,
        delta: params.delta,
        part_bound: split_part_bound(knapsack.q(), epsilon),
        dropped,
    })
}
