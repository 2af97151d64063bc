//! q-knapsack constrained families: `{X : Σ_{e∈X} w^j(e) ≤ b_j ∀ j}`.

use num_traits::{One, Signed};

use crate::cost::Rational;
use crate::error::{Error, Result};
use crate::scenario::Scenario;
use crate::system::DownwardClosed;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnapsackSet {
    n: usize,
    weights: Vec<Vec<Rational>>,
    capacities: Vec<Rational>,
}

impl KnapsackSet {
    pub fn new(n: usize, weights: Vec<Vec<Rational>>, capacities: Vec<Rational>) -> Result<Self> {
        if weights.len() != capacities.len() {
            return Err(Error::invalid(format!(
                "{} weight vectors but {} capacities",
                weights.len(),
                capacities.len()
            )));
        }
        if let Some(row) = weights.iter().find(|w| w.len() != n) {
            return Err(Error::invalid(format!(
                "weight vector of length {} over {n} requirements",
                row.len()
            )));
        }
        if weights.iter().flatten().chain(&capacities).any(|v| v.is_negative()) {
            return Err(Error::invalid("negative knapsack weight or capacity"));
        }
        Ok(KnapsackSet {
            n,
            weights,
            capacities,
        })
    }

    /// Number of knapsack constraints.
    pub fn q(&self) -> usize {
        self.capacities.len()
    }

    pub fn weights(&self) -> &[Vec<Rational>] {
        &self.weights
    }

    pub fn capacities(&self) -> &[Rational] {
        &self.capacities
    }

    pub fn load(&self, j: usize, set: &Scenario) -> Rational {
        set.iter().map(|e| self.weights[j][e]).sum()
    }

    /// `Σ_{e∈X} Σ_j w^j(e)`.
    pub fn combined_load(&self, set: &Scenario) -> Rational {
        (0..self.q()).map(|j| self.load(j, set)).sum()
    }

    pub fn is_normalized(&self) -> bool {
        self.capacities.iter().all(|b| b.is_one())
            && (0..self.n).all(|e| self.weights.iter().all(|w| w[e] <= Rational::one()))
    }

    /// Scales every constraint to capacity one and reports the requirements
    /// whose singleton is infeasible.
    ///
    /// Dropped requirements keep their scaled weight (> 1), so the returned
    /// family already excludes them.
    pub fn normalize(&self) -> Result<(KnapsackSet, Scenario)> {
        if let Some(b) = self.capacities.iter().find(|b| !b.is_positive()) {
            return Err(Error::precondition(format!("knapsack capacity {b} is not positive")));
        }
        let weights: Vec<Vec<Rational>> = self
            .weights
            .iter()
            .zip(&self.capacities)
            .map(|(w, b)| w.iter().map(|x| x / b).collect())
            .collect();
        let dropped = (0..self.n)
            .filter(|&e| weights.iter().any(|w| w[e] > Rational::one()))
            .collect();
        let normalized = KnapsackSet {
            n: self.n,
            weights,
            capacities: vec![Rational::one(); self.q()],
        };
        Ok((normalized, dropped))
    }

    /// Single knapsack with weights `Σ_j w^j` and capacity `q`; every set
    /// feasible for `self` is feasible for it.
    pub fn combine(&self) -> Result<KnapsackSet> {
        if !self.capacities.iter().all(|b| b.is_one()) {
            return Err(Error::precondition("combine expects normalized knapsacks"));
        }
        let combined = (0..self.n)
            .map(|e| self.weights.iter().map(|w| w[e]).sum())
            .collect();
        Ok(KnapsackSet {
            n: self.n,
            weights: vec![combined],
            capacities: vec![Rational::from_integer(self.q() as i128)],
        })
    }
}

impl DownwardClosed for KnapsackSet {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn contains(&self, set: &Scenario) -> bool {
        if set.iter().any(|e| e >= self.n) {
            return false;
        }
        (0..self.q()).all(|j| self.load(j, set) <= self.capacities[j])
    }
}
