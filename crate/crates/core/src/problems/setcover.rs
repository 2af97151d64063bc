use std::cmp::Ordering;

use crate::cost::{harmonic, Cost, Rational};
use crate::error::{Error, Result};
use crate::problem::CoveringProblem;
use crate::scenario::{ElementSet, Scenario};

/// Weighted set cover: requirements are the items `0..n`, elements are the
/// sets of the family, and item `i` is satisfied by `S` iff some set in `S`
/// contains it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetCoverProblem {
    items: usize,
    sets: Vec<Vec<usize>>,
    costs: Vec<Cost>,
    /// sets containing each item, ascending
    containing: Vec<Vec<usize>>,
}

impl SetCoverProblem {
    pub fn new(items: usize, sets: Vec<(Cost, Vec<usize>)>) -> Result<Self> {
        let mut containing = vec![Vec::new(); items];
        let mut costs = Vec::with_capacity(sets.len());
        let mut members = Vec::with_capacity(sets.len());
        for (j, (cost, mut set)) in sets.into_iter().enumerate() {
            set.sort_unstable();
            set.dedup();
            for &i in &set {
                if i >= items {
                    return Err(Error::invalid(format!("set {j} contains item {i} >= {items}")));
                }
                containing[i].push(j);
            }
            costs.push(cost);
            members.push(set);
        }
        if let Some(i) = containing.iter().position(Vec::is_empty) {
            return Err(Error::InfeasibleRequirement(i));
        }
        Ok(SetCoverProblem {
            items,
            sets: members,
            costs,
            containing,
        })
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn costs(&self) -> &[Cost] {
        &self.costs
    }

    fn covered(&self, item: usize, owned: &ElementSet) -> bool {
        self.containing[item].iter().any(|&j| owned.contains(j))
    }
}

impl CoveringProblem for SetCoverProblem {
    fn kind(&self) -> &'static str {
        "setcover"
    }

    fn num_elements(&self) -> usize {
        self.sets.len()
    }

    fn num_requirements(&self) -> usize {
        self.items
    }

    fn cost(&self, element: usize) -> Cost {
        self.costs[element]
    }

    fn satisfies(&self, requirement: usize, elements: &ElementSet) -> bool {
        self.covered(requirement, elements)
    }

    /// Greedy by cost per newly covered item; ties go to the lowest set index.
    fn offline_augment(&self, scenario: &Scenario, partial: &ElementSet) -> Result<ElementSet> {
        scenario.validate(self.items)?;
        let mut uncovered: Vec<bool> = vec![false; self.items];
        for i in scenario.iter().filter(|&i| !self.covered(i, partial)) {
            uncovered[i] = true;
        }
        let mut remaining = uncovered.iter().filter(|&&u| u).count();
        let mut chosen = ElementSet::empty(self.sets.len());
        while remaining > 0 {
            let mut best: Option<(usize, usize)> = None;
            for (j, set) in self.sets.iter().enumerate() {
                let fresh = set.iter().filter(|&&i| uncovered[i]).count();
                if fresh == 0 {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bj, bfresh)) => {
                        let lhs = self.costs[j].value() * Rational::from_integer(bfresh as i128);
                        let rhs = self.costs[bj].value() * Rational::from_integer(fresh as i128);
                        lhs.cmp(&rhs) == Ordering::Less
                    }
                };
                if better {
                    best = Some((j, fresh));
                }
            }
            let Some((j, fresh)) = best else {
                let i = uncovered.iter().position(|&u| u).unwrap_or(0);
                return Err(Error::InfeasibleRequirement(i));
            };
            chosen.insert(j);
            for &i in &self.sets[j] {
                uncovered[i] = false;
            }
            remaining -= fresh;
        }
        Ok(chosen)
    }

    /// `H_n`, the greedy guarantee.
    fn offline_ratio(&self) -> Rational {
        harmonic(self.items)
    }

    /// Buys the cheapest set containing an uncovered arriving item.
    fn online_step(&self, requirement: usize, owned: &ElementSet) -> Vec<usize> {
        if self.covered(requirement, owned) {
            return Vec::new();
        }
        // min_by_key keeps the first minimum, i.e. the lowest index
        self.containing[requirement]
            .iter()
            .copied()
            .min_by_key(|&j| self.costs[j])
            .into_iter()
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::OnlineRun;

    fn c(n: u64, d: u64) -> Cost {
        Cost::from_ratio(n, d)
    }

    /// A = {0,1} cost 1, B = {1} cost 2/5 (items 1,2 of the 1-based examples).
    fn small() -> SetCoverProblem {
        SetCoverProblem::new(2, vec![(c(1, 1), vec![0, 1]), (c(2, 5), vec![1])]).unwrap()
    }

    #[test]
    fn rejects_uncoverable_item() {
        assert_eq!(
            SetCoverProblem::new(3, vec![(c(1, 1), vec![0, 1])]),
            Err(Error::InfeasibleRequirement(2))
        );
        assert!(SetCoverProblem::new(1, vec![(c(1, 1), vec![4])]).is_err());
    }

    #[test]
    fn offline_picks_cheap_set() {
        let p = small();
        let a = p.offline_augment(&Scenario::new([1]), &p.empty_set()).unwrap();
        assert_eq!(a.to_vec(), vec![1]);
        assert_eq!(p.set_cost(&a), c(2, 5));
    }

    #[test]
    fn offline_empty_scenario_and_covered_partial() {
        let p = small();
        assert!(p.offline_augment(&Scenario::empty(), &p.empty_set()).unwrap().is_empty());
        let full = ElementSet::full(2);
        assert!(p.offline_augment(&Scenario::new([0, 1]), &full).unwrap().is_empty());
    }

    #[test]
    fn offline_ignores_items_covered_by_partial() {
        let p = SetCoverProblem::new(
            3,
            vec![(c(1, 1), vec![0, 1]), (c(1, 1), vec![2]), (c(3, 1), vec![0, 1, 2])],
        )
        .unwrap();
        let partial = ElementSet::from_elements(3, [1]);
        let a = p.offline_augment(&Scenario::new([0, 1, 2]), &partial).unwrap();
        assert_eq!(a.to_vec(), vec![0]);
    }

    #[test]
    fn online_buys_cheapest_containing_set() {
        let p = small();
        let mut run = OnlineRun::new(&p);
        let (bought, marginal) = run.feed(1).unwrap();
        assert_eq!(bought, vec![1]);
        assert_eq!(marginal, c(2, 5));
        let (bought, marginal) = run.feed(1).unwrap();
        assert!(bought.is_empty());
        assert_eq!(marginal, Cost::ZERO);
    }

    #[test]
    fn online_tie_breaks_low_index() {
        let p = SetCoverProblem::new(1, vec![(c(1, 1), vec![0]), (c(1, 1), vec![0])]).unwrap();
        assert_eq!(p.online_step(0, &p.empty_set()), vec![0]);
    }
}
