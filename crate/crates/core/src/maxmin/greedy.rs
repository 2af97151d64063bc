use serde::Serialize;

use crate::cost::Cost;
use crate::error::Result;
use crate::problem::{CoveringProblem, OnlineRun};
use crate::scenario::Scenario;
use crate::system::{DownwardClosed, PSystem};

/// One greedy pick: the requirement and the online cost it added.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GreedyStep {
    pub requirement: usize,
    pub marginal: Cost,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaxMinResult {
    pub scenario: Scenario,
    pub trace: Vec<GreedyStep>,
    /// `c(a_on(σ))` for the greedy order σ.
    pub online_cost: Cost,
    /// `p + 1`: every `B ∈ Ω` has `Opt(B) ≤ (p+1)·online_cost`.
    pub lower_bound_factor: usize,
}

impl MaxMinResult {
    /// Requirements in the order they were picked.
    pub fn order(&self) -> Vec<usize> {
        self.trace.iter().map(|s| s.requirement).collect()
    }
}

/// Grows a maximal member of `omega` starting from the empty scenario, each
/// time feeding `run` the feasible requirement with the largest online
/// marginal cost (lowest index on ties). `run` is left at `σ ∘ a_1 ∘ … ∘ a_k`.
pub fn greedy_scenario<P: CoveringProblem + ?Sized>(
    run: &mut OnlineRun<'_, P>,
    omega: &dyn DownwardClosed,
) -> Result<(Scenario, Vec<GreedyStep>)> {
    let mut chosen = Scenario::empty();
    let mut trace = Vec::new();
    loop {
        let candidates = omega.feasible_extensions(&chosen);
        let mut best: Option<(Cost, usize)> = None;
        for e in candidates {
            let marginal = run.probe(e)?;
            if best.is_none_or(|(b, _)| marginal > b) {
                best = Some((marginal, e));
            }
        }
        let Some((_, e)) = best else { break };
        let (_, marginal) = run.feed(e)?;
        chosen.insert(e);
        trace.push(GreedyStep {
            requirement: e,
            marginal,
        });
    }
    Ok((chosen, trace))
}

/// Greedy max-min under a p-system, driven by online marginal costs.
pub fn maxmin_greedy<P: CoveringProblem + ?Sized>(
    problem: &P,
    omega: &dyn PSystem,
) -> Result<MaxMinResult> {
    greedy_with_factor(problem, omega, omega.p_value())
}

pub(crate) fn greedy_with_factor<P: CoveringProblem + ?Sized>(
    problem: &P,
    omega: &dyn DownwardClosed,
    p: usize,
) -> Result<MaxMinResult> {
    let mut run = OnlineRun::new(problem);
    let (scenario, trace) = greedy_scenario(&mut run, omega)?;
    Ok(MaxMinResult {
        scenario,
        trace,
        online_cost: run.cost(),
        lower_bound_factor: p + 1,
    })
}
