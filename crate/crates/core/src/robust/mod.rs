//! Two-stage robust covering.
//!
//! A discriminating algorithm takes a threshold `T` and returns a first stage
//! `Φ_T` with guarantee tags `(α1, α2, β)`:
//!
//! * for every scenario `D`, `Φ_T ∪ augment(D)` covers `D` and
//!   `c(augment(D)) ≤ β·T`;
//! * whenever `T ≥ T*`, `c(Φ_T) ≤ α1·Φ* + α2·T*`,
//!
//! where `Φ*` and `T*` are the first- and second-stage costs of an optimal
//! robust solution. [`threshold_search`] runs one over a geometric grid of
//! thresholds and keeps the smallest certified bound `c(Φ_T) + λ·β·T`.
//!
//! All algorithms here share [`robust_generic`], which differ only in how
//! the next scenario is built.

mod discriminating;
mod search;

use std::sync::Arc;

pub use discriminating::{
    robust_generic, Built, DiscriminatingOutput, ExplicitBuilder, GreedyBuilder, GuaranteeTags,
    Iteration, ScenarioBuilder, UnionBuilder, UnionCommit,
};
pub use search::{threshold_grid, threshold_search, GridPoint, RobustSolution, DEFAULT_SEARCH_EPSILON};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::cost::{rational_string, Cost, Rational};
use crate::error::{Error, Result};
use crate::knapsack::KnapsackSet;
use crate::maxmin::{split_part_bound, KnapsackReduction, ReductionParams, DEFAULT_ENUMERATION_CAP};
use crate::oracle::{ExactBudget, ExactOracle, MAX_ONLINE_RATIO_REQUIREMENTS};
use crate::problem::CoveringProblem;
use crate::system::{DownwardClosed, ExplicitFamily, Meet, PSystem, PartitionMatroid};
use crate::uncertainty::Uncertainty;

/// Smallest δ tried by default for the robust knapsack reduction (`ε = 1`).
pub fn robust_delta_floor() -> Rational {
    Rational::new(1, 6)
}

/// Ratios and switches shared by the robust solvers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RobustConfig {
    /// `ρ_on`, used by the stopping rule and the tags.
    #[serde(with = "rational_string")]
    pub online_ratio: Rational,
    /// `ρ_off`, used by the tags only.
    #[serde(with = "rational_string")]
    pub offline_ratio: Rational,
    pub union_commit: UnionCommit,
    /// Knapsack reduction parameters; chosen automatically when absent.
    pub reduction: Option<ReductionParams>,
}

impl RobustConfig {
    /// Worst-case ratios of the built-in offline and online rules.
    pub fn theoretical<P: CoveringProblem + ?Sized>(problem: &P) -> Self {
        RobustConfig {
            online_ratio: problem.online_ratio_bound(),
            offline_ratio: problem.offline_ratio(),
            union_commit: UnionCommit::WinnerOnly,
            reduction: None,
        }
    }

    /// Like [`theoretical`](Self::theoretical) but with the exact online
    /// ratio of the instance when it is small enough to enumerate.
    pub fn measured<P: CoveringProblem + ?Sized>(problem: &P, budget: ExactBudget) -> Self {
        let mut config = Self::theoretical(problem);
        if problem.num_requirements() <= MAX_ONLINE_RATIO_REQUIREMENTS {
            if let Ok(ratio) = ExactOracle::new(problem, budget).and_then(|o| o.online_ratio()) {
                config.online_ratio = ratio;
            }
        }
        config
    }

    fn two_on(&self) -> Rational {
        Rational::from_integer(2) * self.online_ratio
    }

    /// `α1 = 2ρ_on`, `α2 = 0`, `β = 2ρ_off·ρ_on·(p+2)`.
    pub fn p_system_tags(&self, p: usize) -> GuaranteeTags {
        GuaranteeTags {
            alpha1: self.two_on(),
            alpha2: Rational::zero(),
            beta: self.two_on() * self.offline_ratio * Rational::from_integer(p as i128 + 2),
        }
    }

    /// `α1 = 2ρ_on`, `α2 = 0`, `β = 2ρ_off·ρ_on`.
    pub fn explicit_tags(&self) -> GuaranteeTags {
        GuaranteeTags {
            alpha1: self.two_on(),
            alpha2: Rational::zero(),
            beta: self.two_on() * self.offline_ratio,
        }
    }
}

/// Discriminating algorithm for a p-system: the greedy max-min scenario is
/// rebuilt on top of the current online sequence in every pass.
pub fn robust_p_system<P: CoveringProblem + ?Sized>(
    problem: &P,
    omega: &dyn PSystem,
    threshold: Cost,
    config: &RobustConfig,
) -> Result<DiscriminatingOutput> {
    robust_generic(
        problem,
        &GreedyBuilder(omega),
        threshold,
        config.online_ratio,
        "p-system",
        config.p_system_tags(omega.p_value()),
    )
}

/// Discriminating algorithm for a union of p-systems; `p` is the largest
/// declared value among them.
pub fn robust_union_p_systems<P: CoveringProblem + ?Sized>(
    problem: &P,
    systems: &[Arc<dyn PSystem>],
    threshold: Cost,
    config: &RobustConfig,
) -> Result<DiscriminatingOutput> {
    let p = systems.iter().map(|s| s.p_value()).max().unwrap_or(1);
    robust_generic(
        problem,
        &UnionBuilder {
            systems,
            commit: config.union_commit,
        },
        threshold,
        config.online_ratio,
        "union",
        config.p_system_tags(p),
    )
}

/// Discriminating algorithm for listed scenarios.
pub fn robust_explicit<P: CoveringProblem + ?Sized>(
    problem: &P,
    family: &ExplicitFamily,
    threshold: Cost,
    config: &RobustConfig,
) -> Result<DiscriminatingOutput> {
    robust_generic(
        problem,
        &ExplicitBuilder(family),
        threshold,
        config.online_ratio,
        "explicit",
        config.explicit_tags(),
    )
}

/// The union `∪_j M ∩ P_j` replacing a p-system plus knapsacks, prepared once
/// so that many thresholds can reuse it.
#[derive(Debug)]
pub struct KnapsackUnion {
    systems: Vec<Meet<Arc<dyn PSystem>, PartitionMatroid>>,
    p: usize,
    part_bound: usize,
    params: ReductionParams,
}

impl KnapsackUnion {
    pub fn new(system: Arc<dyn PSystem>, knapsack: &KnapsackSet, params: ReductionParams) -> Result<Self> {
        let (normalized, dropped) = knapsack.normalize()?;
        let combined = normalized.combine()?;
        let reduction =
            KnapsackReduction::new(combined.weights()[0].clone(), combined.capacities()[0], &dropped, params)?;
        let systems = reduction
            .matroids()?
            .map(|(_, m)| Meet(system.clone(), m))
            .collect();
        Ok(KnapsackUnion {
            systems,
            p: system.p_value() + 1,
            part_bound: split_part_bound(knapsack.q(), params.epsilon()),
            params,
        })
    }

    pub fn len(&self) -> usize {
        self.systems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
    }

    pub fn params(&self) -> ReductionParams {
        self.params
    }

    /// Declared p of every member, `p + 1`.
    pub fn p_value(&self) -> usize {
        self.p
    }

    pub fn part_bound(&self) -> usize {
        self.part_bound
    }

    pub fn systems(&self) -> &[Meet<Arc<dyn PSystem>, PartitionMatroid>] {
        &self.systems
    }

    pub fn discriminate<P: CoveringProblem + ?Sized>(
        &self,
        problem: &P,
        threshold: Cost,
        config: &RobustConfig,
    ) -> Result<DiscriminatingOutput> {
        let mut out = robust_generic(
            problem,
            &UnionBuilder {
                systems: &self.systems,
                commit: config.union_commit,
            },
            threshold,
            config.online_ratio,
            "p-system+knapsack",
            config.p_system_tags(self.p),
        )?;
        out.relaxation_factor = self.part_bound;
        Ok(out)
    }
}

/// Discriminating algorithm for a p-system intersected with knapsacks.
pub fn robust_system_knapsack<P: CoveringProblem + ?Sized>(
    problem: &P,
    system: Arc<dyn PSystem>,
    knapsack: &KnapsackSet,
    threshold: Cost,
    config: &RobustConfig,
) -> Result<DiscriminatingOutput> {
    let n = knapsack.ground_size();
    let params = config
        .reduction
        .unwrap_or_else(|| ReductionParams::auto(n, robust_delta_floor(), DEFAULT_ENUMERATION_CAP));
    KnapsackUnion::new(system, knapsack, params)?.discriminate(problem, threshold, config)
}

enum Prepared<'u> {
    System(&'u dyn PSystem),
    Knapsack(KnapsackUnion),
    Explicit(&'u ExplicitFamily),
}

/// Robust solver for any [`Uncertainty`], dispatching on its shape.
pub struct RobustSolver<'a, 'u, P: ?Sized> {
    problem: &'a P,
    prepared: Prepared<'u>,
    config: RobustConfig,
}

impl<'a, 'u, P: CoveringProblem + ?Sized> RobustSolver<'a, 'u, P> {
    pub fn new(problem: &'a P, omega: &'u Uncertainty, config: RobustConfig) -> Result<Self> {
        let n = problem.num_requirements();
        let ground = omega.ground_size();
        if ground != n {
            return Err(Error::invalid(format!(
                "uncertainty set over {ground} requirements, problem has {n}"
            )));
        }
        let prepared = match omega {
            Uncertainty::System(s) => Prepared::System(s.as_ref()),
            Uncertainty::Explicit(f) => Prepared::Explicit(f),
            Uncertainty::SystemKnapsack { system, knapsack } => {
                let params = config
                    .reduction
                    .unwrap_or_else(|| ReductionParams::auto(n, robust_delta_floor(), DEFAULT_ENUMERATION_CAP));
                Prepared::Knapsack(KnapsackUnion::new(system.clone(), knapsack, params)?)
            }
        };
        Ok(RobustSolver {
            problem,
            prepared,
            config,
        })
    }

    pub fn config(&self) -> &RobustConfig {
        &self.config
    }

    /// Matroids in the knapsack union, if any.
    pub fn union_size(&self) -> Option<usize> {
        match &self.prepared {
            Prepared::Knapsack(u) => Some(u.len()),
            _ => None,
        }
    }

    pub fn discriminate(&self, threshold: Cost) -> Result<DiscriminatingOutput> {
        match &self.prepared {
            Prepared::System(s) => robust_p_system(self.problem, *s, threshold, &self.config),
            Prepared::Knapsack(u) => u.discriminate(self.problem, threshold, &self.config),
            Prepared::Explicit(f) => robust_explicit(self.problem, f, threshold, &self.config),
        }
    }

    /// [`threshold_search`] over this solver.
    pub fn search(&self, lambda: Rational, epsilon: Rational) -> Result<RobustSolution> {
        if lambda < Rational::one() {
            return Err(Error::invalid(format!("lambda = {lambda} is below 1")));
        }
        threshold_search(self.problem, lambda, epsilon, |t| self.discriminate(t))
    }
}
