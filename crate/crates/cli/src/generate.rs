//! Seeded random instances.
//!
//! An [`ExperimentSpec`] fixes a problem family, its size, a cost
//! distribution and an uncertainty shape; repetition `r` draws from the
//! ChaCha8 stream `r` of the spec seed, so the seed alone determines every
//! instance.

use std::str::FromStr;

use petgraph::unionfind::UnionFind;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robustcover::io::{EdgeDoc, InstanceDoc, ProblemDoc, SetDoc, UncertaintyDoc};
use robustcover::{Cost, Scenario};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `n` items, `m` random sets.
    #[value(name = "setcover")]
    SetCover,
    /// `n` terminals on an `m`-vertex graph rooted at vertex 0.
    Steiner,
}

/// Costs `k/d` with `k` uniform in `1..=max_numerator` and `d` uniform in
/// `denominators`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CostDist {
    pub max_numerator: u64,
    pub denominators: Vec<u64>,
}

impl Default for CostDist {
    fn default() -> Self {
        CostDist {
            max_numerator: 8,
            denominators: vec![1, 2, 3, 4],
        }
    }
}

impl CostDist {
    fn validate(&self) -> CliResult<()> {
        if self.max_numerator == 0 || self.denominators.is_empty() || self.denominators.contains(&0) {
            return Err(CliError::input("cost distribution needs maxNumerator >= 1 and nonzero denominators"));
        }
        Ok(())
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Cost {
        let k = rng.gen_range(1..=self.max_numerator);
        let d = self.denominators[rng.gen_range(0..self.denominators.len())];
        Cost::from_ratio(k, d)
    }
}

/// Uncertainty shape of generated instances. Random parts are drawn after
/// the problem, from the same stream.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum UncertaintySpec {
    /// At most `k` requirements.
    Uniform { k: usize },
    /// Requirements spread over `parts` random parts, each capped at `bound`.
    Partition { parts: usize, bound: usize },
    /// Two independent random partition matroids.
    Intersection { parts: usize, bound: usize },
    /// `q` knapsacks with weights in `{1/4, …, 1}` and capacity 1, optionally
    /// intersected with a uniform matroid of rank `k`.
    Knapsack {
        q: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
    },
    /// `sets` random maximal scenarios of `size` requirements each.
    Explicit { sets: usize, size: usize },
}

impl Default for UncertaintySpec {
    fn default() -> Self {
        UncertaintySpec::Uniform { k: 2 }
    }
}

/// Compact flag syntax: `uniform:K`, `partition:PARTS:BOUND`,
/// `intersection:PARTS:BOUND`, `knapsack:Q[:K]`, `explicit:SETS:SIZE`.
impl FromStr for UncertaintySpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut it = s.split(':');
        let kind = it.next().unwrap_or_default();
        let nums: Vec<usize> = it
            .map(|x| x.parse().map_err(|_| format!("`{x}` is not a count in `{s}`")))
            .collect::<Result<_, _>>()?;
        let spec = match (kind, nums.as_slice()) {
            ("uniform", &[k]) => UncertaintySpec::Uniform { k },
            ("partition", &[parts, bound]) => UncertaintySpec::Partition { parts, bound },
            ("intersection", &[parts, bound]) => UncertaintySpec::Intersection { parts, bound },
            ("knapsack", &[q]) => UncertaintySpec::Knapsack { q, k: None },
            ("knapsack", &[q, k]) => UncertaintySpec::Knapsack { q, k: Some(k) },
            ("explicit", &[sets, size]) => UncertaintySpec::Explicit { sets, size },
            _ => return Err(format!("cannot read uncertainty `{s}`")),
        };
        Ok(spec)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Maxmin,
    Robust,
}

fn default_density() -> Cost {
    Cost::from_ratio(7, 20)
}

fn default_lambdas() -> Vec<Cost> {
    vec![Cost::from_integer(1)]
}

fn default_solvers() -> Vec<Solver> {
    vec![Solver::Maxmin, Solver::Robust]
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub problem: Family,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    /// Set membership or edge probability.
    #[serde(default = "default_density")]
    pub density: Cost,
    #[serde(default)]
    pub costs: CostDist,
    #[serde(default)]
    pub uncertainty: UncertaintySpec,
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<Cost>,
    #[serde(default = "default_solvers")]
    pub solvers: Vec<Solver>,
    #[serde(default = "one")]
    pub repetitions: usize,
}

/// A benchmark file: a list of experiments, possibly empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    #[serde(default)]
    pub experiments: Vec<ExperimentSpec>,
}

impl ExperimentSpec {
    pub fn new(problem: Family, n: usize, m: usize, seed: u64) -> Self {
        ExperimentSpec {
            name: None,
            problem,
            n,
            m,
            seed,
            density: default_density(),
            costs: CostDist::default(),
            uncertainty: UncertaintySpec::default(),
            lambdas: default_lambdas(),
            solvers: default_solvers(),
            repetitions: 1,
        }
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            let family = match self.problem {
                Family::SetCover => "setcover",
                Family::Steiner => "steiner",
            };
            format!("{family}-n{}-m{}-s{}", self.n, self.m, self.seed)
        })
    }

    fn validate(&self) -> CliResult<()> {
        self.costs.validate()?;
        if self.density.value() > Cost::from_integer(1).value() {
            return Err(CliError::input(format!("density {} is above 1", self.density)));
        }
        if self.problem == Family::Steiner && self.m < self.n + 1 {
            return Err(CliError::input(format!(
                "steiner needs m >= n + 1 vertices, got n = {}, m = {}",
                self.n, self.m
            )));
        }
        if let UncertaintySpec::Explicit { size, .. } = self.uncertainty {
            if size > self.n {
                return Err(CliError::input(format!("explicit scenarios of size {size} exceed n = {}", self.n)));
            }
        }
        if let UncertaintySpec::Partition { parts: 0, .. } | UncertaintySpec::Intersection { parts: 0, .. } =
            self.uncertainty
        {
            return Err(CliError::input("a partition needs at least one part"));
        }
        Ok(())
    }

    /// The `rep`-th instance, named `label-rep`.
    pub fn instance(&self, rep: usize) -> CliResult<(String, InstanceDoc)> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(rep as u64);
        let problem = match self.problem {
            Family::SetCover => self.set_cover(&mut rng),
            Family::Steiner => self.steiner(&mut rng),
        };
        let uncertainty = self.draw_uncertainty(&mut rng);
        let lambda = self.lambdas.first().copied().filter(|l| *l != Cost::from_integer(1));
        let doc = InstanceDoc {
            problem,
            uncertainty,
            lambda,
        };
        doc.build()?;
        Ok((format!("{}-{rep}", self.label()), doc))
    }

    pub fn instances(&self) -> CliResult<Vec<(String, InstanceDoc)>> {
        (0..self.repetitions).map(|r| self.instance(r)).collect()
    }

    fn coin(&self, rng: &mut ChaCha8Rng) -> bool {
        let p = self.density.value();
        rng.gen_ratio(*p.numer() as u32, *p.denom() as u32)
    }

    fn set_cover(&self, rng: &mut ChaCha8Rng) -> ProblemDoc {
        let mut sets: Vec<SetDoc> = (0..self.m)
            .map(|_| {
                let cost = self.costs.draw(rng);
                let items = (0..self.n).filter(|_| self.coin(rng)).collect();
                SetDoc { cost, items }
            })
            .collect();
        for i in 0..self.n {
            if !sets.iter().any(|s| s.items.contains(&i)) {
                let cost = self.costs.draw(rng);
                sets.push(SetDoc { cost, items: vec![i] });
            }
        }
        ProblemDoc::SetCover { items: self.n, sets }
    }

    fn steiner(&self, rng: &mut ChaCha8Rng) -> ProblemDoc {
        let vertices = self.m;
        let mut edges = Vec::new();
        let mut uf = UnionFind::new(vertices);
        for u in 0..vertices {
            for v in u + 1..vertices {
                if self.coin(rng) {
                    edges.push(EdgeDoc { u, v, cost: self.costs.draw(rng) });
                    uf.union(u, v);
                }
            }
        }
        // every vertex joins the root's component through an earlier vertex
        for v in 1..vertices {
            if !uf.equiv(0, v) {
                let u = rng.gen_range(0..v);
                edges.push(EdgeDoc { u, v, cost: self.costs.draw(rng) });
                uf.union(u, v);
            }
        }
        ProblemDoc::Steiner {
            vertices,
            root: 0,
            edges,
            terminals: (1..=self.n).collect(),
        }
    }

    fn draw_uncertainty(&self, rng: &mut ChaCha8Rng) -> UncertaintyDoc {
        let n = self.n;
        let partition = |rng: &mut ChaCha8Rng, parts: usize, bound: usize| {
            let mut members = vec![Vec::new(); parts];
            for i in 0..n {
                members[rng.gen_range(0..parts)].push(i);
            }
            UncertaintyDoc::Partition {
                bounds: vec![Some(bound); parts],
                parts: members,
            }
        };
        match self.uncertainty {
            UncertaintySpec::Uniform { k } => UncertaintyDoc::Uniform { k },
            UncertaintySpec::Partition { parts, bound } => partition(rng, parts, bound),
            UncertaintySpec::Intersection { parts, bound } => {
                let a = partition(rng, parts, bound);
                let b = partition(rng, parts, bound);
                UncertaintyDoc::Intersection(vec![a, b])
            }
            UncertaintySpec::Knapsack { q, k } => {
                let weights = (0..q)
                    .map(|_| (0..n).map(|_| Cost::from_ratio(rng.gen_range(1..=4), 4)).collect())
                    .collect();
                let knapsack = UncertaintyDoc::Knapsack {
                    weights,
                    capacities: vec![Cost::from_integer(1); q],
                };
                match k {
                    Some(k) => UncertaintyDoc::And(vec![UncertaintyDoc::Uniform { k }, knapsack]),
                    None => knapsack,
                }
            }
            UncertaintySpec::Explicit { sets, size } => UncertaintyDoc::Explicit {
                maximal_sets: (0..sets).map(|_| Scenario::new(sample(rng, n, size))).collect(),
                p: None,
            },
        }
    }
}
