//! Instance documents.
//!
//! An instance is a JSON object with keys `problem`, `uncertainty` and an
//! optional `lambda` (default 1). Indices are 0-based. Rationals are written
//! as `"p/q"` strings; decimal strings and plain numbers are also accepted.
//!
//! ```json
//! {
//!   "problem": {"type": "setcover", "items": 3,
//!               "sets": [{"cost": "1", "items": [0, 1]}, {"cost": "1/2", "items": [2]}]},
//!   "uncertainty": {"uniform": {"k": 2}},
//!   "lambda": "3/2"
//! }
//! ```
//!
//! `problem` is either `{"type": "setcover", items, sets: [{cost, items}]}` or
//! `{"type": "steiner", vertices, root, edges: [{u, v, cost}], terminals}`.
//!
//! `uncertainty` is one of
//! `{"uniform": {k}}`, `{"partition": {parts, bounds}}` (a `null` bound is
//! unbounded), `{"graphic": {vertices?, edges: [[u, v], …]}}` (edge `i` is
//! requirement `i`), `{"intersection": [ … ]}`,
//! `{"explicit": {maximalSets, p?}}`, `{"knapsack": {weights, capacities}}`
//! (one weight row per constraint) or `{"and": [ … ]}`, the intersection of
//! systems with knapsacks. Unknown keys are rejected.

use std::sync::Arc;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::cost::{Cost, Rational};
use crate::error::{Error, Result};
use crate::knapsack::KnapsackSet;
use crate::oracle::{p_system_ratio, ExactBudget};
use crate::problem::CoveringProblem;
use crate::problems::{Problem, SetCoverProblem, SteinerTreeProblem};
use crate::scenario::Scenario;
use crate::system::{
    ExplicitFamily, GraphicMatroid, Intersection, PSystem, PartitionMatroid, UniformMatroid,
};
use crate::uncertainty::Uncertainty;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetDoc {
    pub cost: Cost,
    pub items: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub u: usize,
    pub v: usize,
    pub cost: Cost,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProblemDoc {
    SetCover {
        items: usize,
        sets: Vec<SetDoc>,
    },
    Steiner {
        vertices: usize,
        root: usize,
        edges: Vec<EdgeDoc>,
        terminals: Vec<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum UncertaintyDoc {
    Uniform {
        k: usize,
    },
    Partition {
        parts: Vec<Vec<usize>>,
        bounds: Vec<Option<usize>>,
    },
    Graphic {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertices: Option<usize>,
        edges: Vec<(usize, usize)>,
    },
    Intersection(Vec<UncertaintyDoc>),
    Explicit {
        #[serde(rename = "maximalSets")]
        maximal_sets: Vec<Scenario>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<usize>,
    },
    Knapsack {
        weights: Vec<Vec<Cost>>,
        capacities: Vec<Cost>,
    },
    And(Vec<UncertaintyDoc>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub problem: ProblemDoc,
    pub uncertainty: UncertaintyDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Cost>,
}

/// A loaded, validated instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub problem: Problem,
    pub uncertainty: Uncertainty,
    pub lambda: Rational,
}

impl ProblemDoc {
    pub fn build(&self) -> Result<Problem> {
        let problem: Problem = match self {
            ProblemDoc::SetCover { items, sets } => SetCoverProblem::new(
                *items,
                sets.iter().map(|s| (s.cost, s.items.clone())).collect(),
            )?
            .into(),
            ProblemDoc::Steiner {
                vertices,
                root,
                edges,
                terminals,
            } => SteinerTreeProblem::new(
                *vertices,
                *root,
                edges.iter().map(|e| (e.u, e.v, e.cost)).collect(),
                terminals.clone(),
            )?
            .into(),
        };
        problem.validate_coverable()?;
        Ok(problem)
    }

    pub fn from_problem(problem: &Problem) -> Self {
        match problem {
            Problem::SetCover(p) => ProblemDoc::SetCover {
                items: p.num_requirements(),
                sets: p
                    .sets()
                    .iter()
                    .zip(p.costs())
                    .map(|(items, &cost)| SetDoc {
                        cost,
                        items: items.clone(),
                    })
                    .collect(),
            },
            Problem::Steiner(p) => ProblemDoc::Steiner {
                vertices: p.vertices(),
                root: p.root(),
                edges: p.edges().iter().map(|&(u, v, cost)| EdgeDoc { u, v, cost }).collect(),
                terminals: p.terminals().to_vec(),
            },
        }
    }
}

fn rationals(values: &[Cost]) -> Vec<Rational> {
    values.iter().map(|c| c.value()).collect()
}

impl UncertaintyDoc {
    /// Builds the uncertainty set over `n` requirements.
    pub fn build(&self, n: usize) -> Result<Uncertainty> {
        match self {
            UncertaintyDoc::Explicit { .. } => Ok(Uncertainty::Explicit(self.explicit(n)?)),
            UncertaintyDoc::Knapsack { .. } => Ok(Uncertainty::knapsack_only(self.knapsack(n)?)),
            UncertaintyDoc::And(members) => {
                let mut systems = Vec::new();
                let mut weights = Vec::new();
                let mut capacities = Vec::new();
                for m in members {
                    match m {
                        UncertaintyDoc::Knapsack { .. } => {
                            let k = m.knapsack(n)?;
                            weights.extend_from_slice(k.weights());
                            capacities.extend_from_slice(k.capacities());
                        }
                        UncertaintyDoc::And(_) => {
                            return Err(Error::invalid("nested \"and\" is not supported"));
                        }
                        other => systems.push(other.system(n)?),
                    }
                }
                let system: Arc<dyn PSystem> = match systems.len() {
                    0 => Arc::new(UniformMatroid::free(n)),
                    1 => systems.pop().expect("one system"),
                    _ => Arc::new(Intersection::new(systems)?),
                };
                if capacities.is_empty() {
                    return Ok(Uncertainty::System(system));
                }
                Ok(Uncertainty::SystemKnapsack {
                    system,
                    knapsack: KnapsackSet::new(n, weights, capacities)?,
                })
            }
            other => Ok(Uncertainty::System(other.system(n)?)),
        }
    }

    fn knapsack(&self, n: usize) -> Result<KnapsackSet> {
        let UncertaintyDoc::Knapsack { weights, capacities } = self else {
            unreachable!("called on a knapsack document")
        };
        KnapsackSet::new(n, weights.iter().map(|w| rationals(w)).collect(), rationals(capacities))
    }

    fn explicit(&self, n: usize) -> Result<ExplicitFamily> {
        let UncertaintyDoc::Explicit { maximal_sets, p } = self else {
            unreachable!("called on an explicit document")
        };
        match p {
            Some(p) => ExplicitFamily::new(n, maximal_sets.clone(), *p),
            None => {
                let family = ExplicitFamily::new(n, maximal_sets.clone(), n.max(1))?;
                let p = match p_system_ratio(&family, ExactBudget::default()) {
                    Ok(ratio) => ratio.ceil().to_integer().max(1) as usize,
                    Err(_) => n.max(1),
                };
                ExplicitFamily::new(n, maximal_sets.clone(), p)
            }
        }
    }

    fn system(&self, n: usize) -> Result<Arc<dyn PSystem>> {
        Ok(match self {
            UncertaintyDoc::Uniform { k } => Arc::new(UniformMatroid::new(n, *k)),
            UncertaintyDoc::Partition { parts, bounds } => {
                Arc::new(PartitionMatroid::new(n, parts, bounds.clone())?)
            }
            UncertaintyDoc::Graphic { vertices, edges } => {
                if edges.len() != n {
                    return Err(Error::invalid(format!(
                        "graphic matroid has {} edges but there are {n} requirements",
                        edges.len()
                    )));
                }
                let vertices = vertices.unwrap_or_else(|| {
                    edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0)
                });
                Arc::new(GraphicMatroid::new(vertices, edges.clone())?)
            }
            UncertaintyDoc::Intersection(members) => Arc::new(Intersection::new(
                members.iter().map(|m| m.system(n)).collect::<Result<_>>()?,
            )?),
            UncertaintyDoc::Explicit { .. } => Arc::new(self.explicit(n)?),
            UncertaintyDoc::Knapsack { .. } | UncertaintyDoc::And(_) => {
                return Err(Error::invalid("knapsack constraints may only appear at top level or in \"and\""));
            }
        })
    }
}

impl InstanceDoc {
    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn build(&self) -> Result<Instance> {
        let problem = self.problem.build()?;
        let uncertainty = self.uncertainty.build(problem.num_requirements())?;
        let lambda = self.lambda.map_or(Rational::one(), Cost::value);
        if lambda < Rational::one() {
            return Err(Error::invalid(format!("lambda = {lambda} is below 1")));
        }
        Ok(Instance {
            problem,
            uncertainty,
            lambda,
        })
    }
}
