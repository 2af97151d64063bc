//! The covering-problem contract shared by every algorithm, and the
//! deterministic online run built on top of it.
//!
//! A covering problem has a ground set `E = {0..m}` of elements with
//! nonnegative costs and requirements `0..n`, each an upward-closed family of
//! element sets. Two solvers are part of the contract:
//!
//! * the offline augmentation: given requirements `X` and a partial solution
//!   `S`, return `A` with `S ∪ A` satisfying all of `X`, at cost at most
//!   `offline_ratio() · OptAug(X | S)`, where
//!   `OptAug(X | S) = min { c(A) : S ∪ A satisfies every i ∈ X }`;
//! * a deterministic online rule that only ever adds elements. The online
//!   rule is a function of the requirement and the currently owned elements,
//!   so replaying the same sequence reproduces the same purchases.

use crate::cost::{Cost, Rational};
use crate::error::{Error, Result};
use crate::scenario::{ElementSet, Scenario};

pub trait CoveringProblem: Send + Sync {
    /// Short family name, e.g. `"setcover"`.
    fn kind(&self) -> &'static str;

    fn num_elements(&self) -> usize;

    fn num_requirements(&self) -> usize;

    fn cost(&self, element: usize) -> Cost;

    /// Whether `elements` lies in the upward-closed family of `requirement`.
    fn satisfies(&self, requirement: usize, elements: &ElementSet) -> bool;

    /// Offline approximate `OptAug(scenario | partial)`; returns only new elements.
    fn offline_augment(&self, scenario: &Scenario, partial: &ElementSet) -> Result<ElementSet>;

    /// Approximation ratio guaranteed by [`offline_augment`](Self::offline_augment).
    fn offline_ratio(&self) -> Rational;

    /// Elements the online rule buys when `requirement` arrives and `owned`
    /// is the current solution. Must be empty iff the requirement is already
    /// satisfied, and never contain owned elements.
    fn online_step(&self, requirement: usize, owned: &ElementSet) -> Vec<usize>;

    /// Worst-case competitive ratio of the online rule.
    ///
    /// Both built-in rules pay at most the optimum per arriving requirement
    /// (the cheapest single set / the root distance), so `n` is always valid.
    fn online_ratio_bound(&self) -> Rational {
        Rational::from_integer(self.num_requirements().max(1) as i128)
    }

    fn set_cost(&self, elements: &ElementSet) -> Cost {
        elements.cost(|e| self.cost(e))
    }

    fn total_cost(&self) -> Cost {
        (0..self.num_elements()).map(|e| self.cost(e)).sum()
    }

    fn empty_set(&self) -> ElementSet {
        ElementSet::empty(self.num_elements())
    }

    fn satisfies_all(&self, scenario: &Scenario, elements: &ElementSet) -> bool {
        scenario.iter().all(|i| self.satisfies(i, elements))
    }

    /// Checks the load-time invariant: the full ground set satisfies everything.
    fn validate_coverable(&self) -> Result<()> {
        let all = ElementSet::full(self.num_elements());
        match (0..self.num_requirements()).find(|&i| !self.satisfies(i, &all)) {
            Some(i) => Err(Error::InfeasibleRequirement(i)),
            None => Ok(()),
        }
    }
}

/// Checks the postcondition of an augmentation: `partial ∪ augmentation`
/// satisfies every requirement of `scenario`.
pub fn is_valid_augmentation<P: CoveringProblem + ?Sized>(
    problem: &P,
    scenario: &Scenario,
    partial: &ElementSet,
    augmentation: &ElementSet,
) -> bool {
    problem.satisfies_all(scenario, &partial.union(augmentation))
}

/// State of the deterministic online algorithm after serving a sequence σ:
/// the sequence itself, the owned elements `F = a_on(σ)` and `c(F)`.
///
/// Cloning a run is the snapshot mechanism used when probing hypothetical
/// extensions `σ ∘ e`.
#[derive(Debug)]
pub struct OnlineRun<'a, P: ?Sized> {
    problem: &'a P,
    sequence: Vec<usize>,
    owned: ElementSet,
    cost: Cost,
}

impl<P: ?Sized> Clone for OnlineRun<'_, P> {
    fn clone(&self) -> Self {
        OnlineRun {
            problem: self.problem,
            sequence: self.sequence.clone(),
            owned: self.owned.clone(),
            cost: self.cost,
        }
    }
}

impl<'a, P: CoveringProblem + ?Sized> OnlineRun<'a, P> {
    pub fn new(problem: &'a P) -> Self {
        OnlineRun {
            problem,
            sequence: Vec::new(),
            owned: problem.empty_set(),
            cost: Cost::ZERO,
        }
    }

    /// Rebuilds `a_on(σ)` from scratch.
    pub fn replay(problem: &'a P, sequence: &[usize]) -> Result<Self> {
        let mut run = OnlineRun::new(problem);
        for &i in sequence {
            run.feed(i)?;
        }
        Ok(run)
    }

    /// Serves one requirement; returns the newly bought elements and their cost.
    pub fn feed(&mut self, requirement: usize) -> Result<(Vec<usize>, Cost)> {
        let n = self.problem.num_requirements();
        if requirement >= n {
            return Err(Error::RequirementOutOfRange {
                index: requirement,
                n,
            });
        }
        let bought = self.problem.online_step(requirement, &self.owned);
        let mut marginal = Cost::ZERO;
        for &e in &bought {
            assert!(self.owned.insert(e), "online rule re-bought element {e}");
            marginal += self.problem.cost(e);
        }
        self.cost += marginal;
        self.sequence.push(requirement);
        assert!(
            self.problem.satisfies(requirement, &self.owned),
            "online rule left requirement {requirement} unsatisfied"
        );
        Ok((bought, marginal))
    }

    /// `c(a_on(σ ∘ i)) - c(a_on(σ))` without mutating the run.
    pub fn probe(&self, requirement: usize) -> Result<Cost> {
        let mut snapshot = self.clone();
        snapshot.feed(requirement).map(|(_, marginal)| marginal)
    }

    pub fn problem(&self) -> &'a P {
        self.problem
    }

    pub fn sequence(&self) -> &[usize] {
        &self.sequence
    }

    pub fn owned(&self) -> &ElementSet {
        &self.owned
    }

    pub fn cost(&self) -> Cost {
        self.cost
    }
}
