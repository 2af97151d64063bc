use serde::Serialize;

use crate::cost::{rational_string, Cost, Rational};
use crate::error::{Error, Result};
use crate::maxmin::greedy_scenario;
use crate::problem::{CoveringProblem, OnlineRun};
use crate::scenario::{ElementSet, Scenario};
use crate::system::{DownwardClosed, ExplicitFamily};

/// What the union builder commits after probing every system.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnionCommit {
    /// Probe each system on a snapshot and commit only the winner.
    #[default]
    WinnerOnly,
    /// Let every probe extend the live sequence in turn.
    AllProbes,
}

/// Guarantee parameters `(α1, α2, β)` of a discriminating run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GuaranteeTags {
    #[serde(with = "rational_string")]
    pub alpha1: Rational,
    #[serde(with = "rational_string")]
    pub alpha2: Rational,
    #[serde(with = "rational_string")]
    pub beta: Rational,
}

/// One pass of the repeat loop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Iteration {
    /// `E_t`
    pub scenario: Scenario,
    /// Requirements of `E_t` in the order they were fed.
    pub order: Vec<usize>,
    /// `F_{t-1}`
    pub prior: ElementSet,
    /// `F_t \ F_{t-1}`
    pub added: ElementSet,
    /// `c(F_t) - c(F_{t-1})`
    pub increase: Cost,
    /// Winning system for union builders.
    pub system: Option<usize>,
}

/// Output of a discriminating run at threshold `T`: the first stage and the
/// data needed to audit it. The second stage is
/// [`augment`](Self::augment), the offline algorithm relative to the first stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscriminatingOutput {
    pub kind: &'static str,
    pub threshold: Cost,
    pub first_stage: ElementSet,
    pub first_stage_cost: Cost,
    pub iterations: Vec<Iteration>,
    pub tags: GuaranteeTags,
    /// Factor applied to the final guarantee when the run used a relaxed
    /// uncertainty set (1 otherwise).
    pub relaxation_factor: usize,
}

impl DiscriminatingOutput {
    /// Second-stage elements for `scenario`.
    pub fn augment<P: CoveringProblem + ?Sized>(&self, problem: &P, scenario: &Scenario) -> Result<ElementSet> {
        problem.offline_augment(scenario, &self.first_stage)
    }

    /// `c(Φ) + λ·β·T`.
    pub fn upper_bound(&self, lambda: Rational) -> Rational {
        self.first_stage_cost.value() + lambda * self.tags.beta * self.threshold.value()
    }
}

/// A scenario returned by a builder, with the winning system if any.
pub struct Built {
    pub scenario: Scenario,
    pub order: Vec<usize>,
    pub system: Option<usize>,
}

/// Chooses the next scenario `E_t` and feeds it to the online run.
pub trait ScenarioBuilder {
    fn build<P: CoveringProblem + ?Sized>(&self, run: &mut OnlineRun<'_, P>) -> Result<Built>;
}

/// Greedy online-marginal scenario inside one family.
pub struct GreedyBuilder<S>(pub S);

impl<S: DownwardClosed> ScenarioBuilder for GreedyBuilder<S> {
    fn build<P: CoveringProblem + ?Sized>(&self, run: &mut OnlineRun<'_, P>) -> Result<Built> {
        let (scenario, trace) = greedy_scenario(run, &self.0)?;
        Ok(Built {
            scenario,
            order: trace.iter().map(|s| s.requirement).collect(),
            system: None,
        })
    }
}

/// Greedy scenario in each family; the one with the largest online increase
/// wins, lowest index on ties.
pub struct UnionBuilder<'s, S> {
    pub systems: &'s [S],
    pub commit: UnionCommit,
}

impl<S: DownwardClosed> ScenarioBuilder for UnionBuilder<'_, S> {
    fn build<P: CoveringProblem + ?Sized>(&self, run: &mut OnlineRun<'_, P>) -> Result<Built> {
        let mut best: Option<(Cost, usize, Built, OnlineRun<'_, P>)> = None;
        for (j, system) in self.systems.iter().enumerate() {
            let mut probe = run.clone();
            let start = probe.cost();
            let (scenario, trace) = greedy_scenario(&mut probe, system)?;
            let delta = probe.cost() - start;
            if self.commit == UnionCommit::AllProbes {
                *run = probe.clone();
            }
            if best.as_ref().is_none_or(|(b, ..)| delta > *b) {
                let built = Built {
                    scenario,
                    order: trace.iter().map(|s| s.requirement).collect(),
                    system: Some(j),
                };
                best = Some((delta, j, built, probe));
            }
        }
        match best {
            Some((_, _, built, probe)) => {
                if self.commit == UnionCommit::WinnerOnly {
                    *run = probe;
                }
                Ok(built)
            }
            None => Ok(Built {
                scenario: Scenario::empty(),
                order: Vec::new(),
                system: None,
            }),
        }
    }
}

/// Listed scenario with the costliest offline augmentation relative to the
/// current online solution, lowest index on ties.
pub struct ExplicitBuilder<'f>(pub &'f ExplicitFamily);

impl ScenarioBuilder for ExplicitBuilder<'_> {
    fn build<P: CoveringProblem + ?Sized>(&self, run: &mut OnlineRun<'_, P>) -> Result<Built> {
        let problem = run.problem();
        let mut best: Option<(Cost, &Scenario)> = None;
        for s in self.0.maximal_sets() {
            let aug = problem.offline_augment(s, run.owned())?;
            let c = problem.set_cost(&aug);
            if best.is_none_or(|(b, _)| c > b) {
                best = Some((c, s));
            }
        }
        let scenario = best.map(|(_, s)| s.clone()).unwrap_or_default();
        for i in scenario.iter() {
            run.feed(i)?;
        }
        Ok(Built {
            order: scenario.as_slice().to_vec(),
            scenario,
            system: None,
        })
    }
}

/// The threshold loop shared by every robust algorithm.
///
/// Repeatedly extends the online sequence by a scenario from `builder` until
/// the online cost rises by at most `2ρ_on·T`; the first stage is the online
/// solution before that last pass. Every earlier pass buys an element, hence
/// satisfies a new requirement, so at most `n + 1` passes run.
pub fn robust_generic<P, B>(
    problem: &P,
    builder: &B,
    threshold: Cost,
    online_ratio: Rational,
    kind: &'static str,
    tags: GuaranteeTags,
) -> Result<DiscriminatingOutput>
where
    P: CoveringProblem + ?Sized,
    B: ScenarioBuilder,
{
    let limit = Rational::from_integer(2) * online_ratio * threshold.value();
    let cap = problem.num_requirements() + 1;
    let mut run = OnlineRun::new(problem);
    let mut iterations = Vec::new();
    for _ in 0..cap {
        let prior = run.owned().clone();
        let before = run.cost();
        let built = builder.build(&mut run)?;
        let increase = run.cost() - before;
        iterations.push(Iteration {
            scenario: built.scenario,
            order: built.order,
            added: run.owned().difference(&prior),
            prior: prior.clone(),
            increase,
            system: built.system,
        });
        if increase.value() <= limit {
            return Ok(DiscriminatingOutput {
                kind,
                threshold,
                first_stage_cost: problem.set_cost(&prior),
                first_stage: prior,
                iterations,
                tags,
                relaxation_factor: 1,
            });
        }
    }
    Err(Error::NonTermination(cap))
}
