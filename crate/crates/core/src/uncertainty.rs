use std::sync::Arc;

use crate::knapsack::KnapsackSet;
use crate::scenario::Scenario;
use crate::system::{DownwardClosed, ExplicitFamily, PSystem, UniformMatroid};

/// An uncertainty set `Ω`, in one of the shapes the solvers understand.
#[derive(Clone, Debug)]
pub enum Uncertainty {
    /// A p-system (matroids, intersections, ...).
    System(Arc<dyn PSystem>),
    /// A p-system intersected with a q-knapsack. A bare knapsack uses the free
    /// matroid as its system.
    SystemKnapsack {
        system: Arc<dyn PSystem>,
        knapsack: KnapsackSet,
    },
    /// Explicitly listed scenarios (their downward closure).
    Explicit(ExplicitFamily),
}

impl Uncertainty {
    pub fn knapsack_only(knapsack: KnapsackSet) -> Self {
        let n = knapsack.ground_size();
        Uncertainty::SystemKnapsack {
            system: Arc::new(UniformMatroid::free(n)),
            knapsack,
        }
    }

    /// Declared p of the system part.
    pub fn p_value(&self) -> usize {
        match self {
            Uncertainty::System(s) => s.p_value(),
            Uncertainty::SystemKnapsack { system, .. } => system.p_value(),
            Uncertainty::Explicit(f) => f.p_value(),
        }
    }

    /// Number of knapsack constraints.
    pub fn q(&self) -> usize {
        match self {
            Uncertainty::SystemKnapsack { knapsack, .. } => knapsack.q(),
            _ => 0,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Uncertainty::System(_) => "p-system",
            Uncertainty::SystemKnapsack { .. } => "p-system+knapsack",
            Uncertainty::Explicit(_) => "explicit",
        }
    }
}

impl DownwardClosed for Uncertainty {
    fn ground_size(&self) -> usize {
        match self {
            Uncertainty::System(s) => s.ground_size(),
            Uncertainty::SystemKnapsack { system, .. } => system.ground_size(),
            Uncertainty::Explicit(f) => f.ground_size(),
        }
    }

    fn contains(&self, set: &Scenario) -> bool {
        match self {
            Uncertainty::System(s) => s.contains(set),
            Uncertainty::SystemKnapsack { system, knapsack } => {
                system.contains(set) && knapsack.contains(set)
            }
            Uncertainty::Explicit(f) => f.contains(set),
        }
    }
}
