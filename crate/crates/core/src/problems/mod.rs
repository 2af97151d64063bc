//! Concrete covering problems: weighted set cover and rooted Steiner tree.

mod setcover;
mod steiner;

pub use setcover::SetCoverProblem;
pub use steiner::SteinerTreeProblem;

use crate::cost::{Cost, Rational};
use crate::error::Result;
use crate::problem::CoveringProblem;
use crate::scenario::{ElementSet, Scenario};

/// Any of the built-in problems, as loaded from an instance file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Problem {
    SetCover(SetCoverProblem),
    Steiner(SteinerTreeProblem),
}

macro_rules! delegate {
    ($self:ident, $p:ident => $e:expr) => {
        match $self {
            Problem::SetCover($p) => $e,
            Problem::Steiner($p) => $e,
        }
    };
}

impl CoveringProblem for Problem {
    fn kind(&self) -> &'static str {
        delegate!(self, p => p.kind())
    }

    fn num_elements(&self) -> usize {
        delegate!(self, p => p.num_elements())
    }

    fn num_requirements(&self) -> usize {
        delegate!(self, p => p.num_requirements())
    }

    fn cost(&self, element: usize) -> Cost {
        delegate!(self, p => p.cost(element))
    }

    fn satisfies(&self, requirement: usize, elements: &ElementSet) -> bool {
        delegate!(self, p => p.satisfies(requirement, elements))
    }

    fn satisfies_all(&self, scenario: &Scenario, elements: &ElementSet) -> bool {
        delegate!(self, p => p.satisfies_all(scenario, elements))
    }

    fn offline_augment(&self, scenario: &Scenario, partial: &ElementSet) -> Result<ElementSet> {
        delegate!(self, p => p.offline_augment(scenario, partial))
    }

    fn offline_ratio(&self) -> Rational {
        delegate!(self, p => p.offline_ratio())
    }

    fn online_step(&self, requirement: usize, owned: &ElementSet) -> Vec<usize> {
        delegate!(self, p => p.online_step(requirement, owned))
    }
}

impl From<SetCoverProblem> for Problem {
    fn from(p: SetCoverProblem) -> Self {
        Problem::SetCover(p)
    }
}

impl From<SteinerTreeProblem> for Problem {
    fn from(p: SteinerTreeProblem) -> Self {
        Problem::Steiner(p)
    }
}
