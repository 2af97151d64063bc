//! Exact brute-force solvers for desk-scale instances.
//!
//! [`ExactOracle`] tabulates, for every element subset `A ⊆ E`, the set of
//! requirements `A` satisfies. `OptAug(X | S)` is then a minimum over the
//! subsets of `E \ S`, and a superset-minimum transform over requirement masks
//! yields `OptAug(· | S)` for all `2^n` scenarios at once. Costs are scaled to
//! integers by the common denominator of the element costs.
//!
//! Every operation refuses inputs beyond its [`ExactBudget`] with
//! [`Error::BudgetExceeded`].

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use num_integer::Integer;
use num_traits::One;

use crate::cost::{Cost, Rational};
use crate::error::{Error, Result};
use crate::problem::{CoveringProblem, OnlineRun};
use crate::scenario::{ElementSet, Scenario};
use crate::system::DownwardClosed;

/// Hard limits beyond which the oracle refuses to work.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactBudget {
    pub max_elements: usize,
    pub max_requirements: usize,
    pub max_scenarios: usize,
}

impl Default for ExactBudget {
    fn default() -> Self {
        ExactBudget {
            max_elements: 16,
            max_requirements: 12,
            max_scenarios: 4096,
        }
    }
}

impl ExactBudget {
    fn check(&self, what: &'static str, value: usize, limit: usize) -> Result<()> {
        if value > limit {
            Err(Error::BudgetExceeded { what, value, limit })
        } else {
            Ok(())
        }
    }
}

/// Longest requirement set for which [`ExactOracle::online_ratio`] enumerates
/// every repetition-free request sequence.
pub const MAX_ONLINE_RATIO_REQUIREMENTS: usize = 9;

const INF: i128 = i128::MAX;
const CACHE_LIMIT: usize = 4096;

/// Optimal first-stage solution of the robust problem and its cost split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactRobust {
    /// `c(Φ*) + λ·T*`
    pub value: Rational,
    pub first_stage: ElementSet,
    /// `c(Φ*)`
    pub phi: Cost,
    /// `T* = max_ω OptAug(ω | Φ*)`
    pub second_stage: Cost,
}

/// `OptAug(X | S)` for every `X ⊆ [n]` and a fixed `S`.
#[derive(Clone, Debug)]
pub struct AugTable {
    scale: i128,
    values: Arc<Vec<i128>>,
}

impl AugTable {
    pub fn get(&self, scenario: &Scenario) -> Cost {
        self.get_mask(scenario.to_mask())
    }

    pub fn get_mask(&self, mask: u64) -> Cost {
        to_cost(self.values[mask as usize], self.scale)
    }
}

#[derive(Debug, Default)]
struct Audit {
    evaluations: AtomicUsize,
    violations: AtomicUsize,
}

/// Exact oracle over one covering problem.
#[derive(Debug)]
pub struct ExactOracle<'a, P: ?Sized> {
    problem: &'a P,
    m: usize,
    n: usize,
    budget: ExactBudget,
    scale: i128,
    /// requirements satisfied by each element mask
    coverage: Vec<u32>,
    /// scaled cost of each element mask
    subset_cost: Vec<i128>,
    cache: Mutex<HashMap<u64, Arc<Vec<i128>>>>,
    audit: Option<Audit>,
}

fn to_cost(scaled: i128, scale: i128) -> Cost {
    Cost::new(Rational::new(scaled, scale)).expect("nonnegative")
}

/// Iterates the subsets of `set` in increasing numeric order, starting at 0.
fn subsets_of(set: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == set { None } else { Some((cur.wrapping_sub(set)) & set) };
        Some(cur)
    })
}

impl<'a, P: CoveringProblem + ?Sized> ExactOracle<'a, P> {
    pub fn new(problem: &'a P, budget: ExactBudget) -> Result<Self> {
        let m = problem.num_elements();
        let n = problem.num_requirements();
        budget.check("number of elements", m, budget.max_elements)?;
        budget.check("number of requirements", n, budget.max_requirements)?;
        let scale = (0..m).fold(1i128, |acc, e| acc.lcm(problem.cost(e).value().denom()));
        let element_cost: Vec<i128> = (0..m)
            .map(|e| {
                let c = problem.cost(e).value();
                c.numer() * (scale / c.denom())
            })
            .collect();
        let size = 1usize << m;
        let mut subset_cost = vec![0i128; size];
        let mut coverage = vec![0u32; size];
        for mask in 1..size {
            let low = mask.trailing_zeros() as usize;
            subset_cost[mask] = subset_cost[mask & (mask - 1)] + element_cost[low];
        }
        for (mask, cov) in coverage.iter_mut().enumerate() {
            let set = ElementSet::from_mask(m, mask as u64);
            *cov = (0..n)
                .filter(|&i| problem.satisfies(i, &set))
                .fold(0u32, |acc, i| acc | 1 << i);
        }
        let all = ((1u64 << n) - 1) as u32;
        if coverage[size - 1] != all {
            let i = (!coverage[size - 1] & all).trailing_zeros() as usize;
            return Err(Error::InfeasibleRequirement(i));
        }
        Ok(ExactOracle {
            problem,
            m,
            n,
            budget,
            scale,
            coverage,
            subset_cost,
            cache: Mutex::new(HashMap::new()),
            audit: None,
        })
    }

    /// Enables self-checking of monotonicity and subadditivity on every
    /// evaluation; see [`audit_report`](Self::audit_report).
    pub fn with_audit(mut self) -> Self {
        self.audit = Some(Audit::default());
        self
    }

    /// `(evaluations checked, property violations found)`.
    pub fn audit_report(&self) -> Option<(usize, usize)> {
        self.audit.as_ref().map(|a| {
            (
                a.evaluations.load(Ordering::Relaxed),
                a.violations.load(Ordering::Relaxed),
            )
        })
    }

    pub fn problem(&self) -> &'a P {
        self.problem
    }

    pub fn budget(&self) -> ExactBudget {
        self.budget
    }

    fn full_elements(&self) -> u64 {
        (1u64 << self.m) - 1
    }

    fn scaled(&self, cost: Cost) -> i128 {
        let v = cost.value() * Rational::from_integer(self.scale);
        assert!(v.is_integer(), "cost outside the oracle's denominator");
        v.to_integer()
    }

    fn raw_table(&self, partial: u64) -> Vec<i128> {
        let reqs = 1usize << self.n;
        let mut best = vec![INF; reqs];
        let free = self.full_elements() & !partial;
        for sub in subsets_of(free) {
            let cov = self.coverage[(partial | sub) as usize] as usize;
            let c = self.subset_cost[sub as usize];
            if c < best[cov] {
                best[cov] = c;
            }
        }
        for bit in 0..self.n {
            let b = 1usize << bit;
            for mask in 0..reqs {
                if mask & b == 0 && best[mask | b] < best[mask] {
                    best[mask] = best[mask | b];
                }
            }
        }
        best
    }

    fn table_values(&self, partial: u64) -> Arc<Vec<i128>> {
        if let Some(t) = self.cache.lock().expect("cache lock").get(&partial) {
            return t.clone();
        }
        let table = Arc::new(self.raw_table(partial));
        if self.audit.is_some() {
            self.audit_table(partial, &table);
        }
        let mut cache = self.cache.lock().expect("cache lock");
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(partial, table.clone());
        table
    }

    /// `OptAug(X | partial)` for all `X`.
    pub fn aug_table(&self, partial: &ElementSet) -> AugTable {
        AugTable {
            scale: self.scale,
            values: self.table_values(partial.to_mask()),
        }
    }

    /// Exact `OptAug(X | S)` with a minimum-cost witness; among optimal
    /// witnesses the one with the smallest element bitmask is returned.
    pub fn opt_aug(&self, scenario: &Scenario, partial: &ElementSet) -> Result<(Cost, ElementSet)> {
        scenario.validate(self.n)?;
        let s = partial.to_mask();
        let x = scenario.to_mask() as u32;
        let free = self.full_elements() & !s;
        let mut best: Option<(i128, u64)> = None;
        for sub in subsets_of(free) {
            let c = self.subset_cost[sub as usize];
            if best.is_some_and(|(b, _)| c >= b) {
                continue;
            }
            if self.coverage[(s | sub) as usize] & x == x {
                best = Some((c, sub));
            }
        }
        let (value, witness) = best.ok_or_else(|| {
            Error::InfeasibleRequirement(scenario.iter().next().unwrap_or_default())
        })?;
        let witness = ElementSet::from_mask(self.m, witness);
        if let Some(audit) = &self.audit {
            audit.evaluations.fetch_add(1, Ordering::Relaxed);
            let table = self.table_values(s);
            let ok = table[x as usize] == value
                && self.problem.satisfies_all(scenario, &partial.union(&witness));
            if !ok {
                audit.violations.fetch_add(1, Ordering::Relaxed);
            }
        }
        Ok((to_cost(value, self.scale), witness))
    }

    /// `Opt(X) = OptAug(X | ∅)`.
    pub fn opt(&self, scenario: &Scenario) -> Result<Cost> {
        self.opt_aug(scenario, &ElementSet::empty(self.m)).map(|(c, _)| c)
    }

    /// All members of `Ω`, in increasing bitmask order.
    pub fn members(&self, omega: &dyn DownwardClosed) -> Result<Vec<Scenario>> {
        let n = omega.ground_size();
        if n != self.n {
            return Err(Error::invalid(format!(
                "uncertainty set over {n} requirements, problem has {}",
                self.n
            )));
        }
        enumerate_members(omega, self.budget)
    }

    /// Exact `max_{ω∈Ω} Opt(ω)`; ties go to the lexicographically smallest scenario.
    pub fn max_min(&self, omega: &dyn DownwardClosed) -> Result<(Cost, Scenario)> {
        let members = self.members(omega)?;
        let table = self.table_values(0);
        let mut best: Option<(i128, Scenario)> = None;
        for s in members {
            let v = table[s.to_mask() as usize];
            let better = match &best {
                None => true,
                Some((bv, bs)) => v > *bv || (v == *bv && s < *bs),
            };
            if better {
                best = Some((v, s));
            }
        }
        let (v, s) = best.expect("the empty scenario is always a member");
        Ok((to_cost(v, self.scale), s))
    }

    /// Exact two-stage robust optimum `min_{E_0} c(E_0) + λ·max_ω OptAug(ω | E_0)`.
    /// Ties go to the smallest first-stage bitmask.
    pub fn robust(&self, omega: &dyn DownwardClosed, lambda: Rational) -> Result<ExactRobust> {
        let members = self.members(omega)?;
        // OptAug is monotone in X, so maximal members suffice.
        let maximal: Vec<usize> = members
            .iter()
            .filter(|s| {
                (0..self.n).all(|e| s.contains(e) || !omega.contains(&s.with(e)))
            })
            .map(|s| s.to_mask() as usize)
            .collect();
        let scale = Rational::from_integer(self.scale);
        let mut best: Option<(Rational, u64, i128)> = None;
        for first in 0..=self.full_elements() {
            let table = self.raw_table(first);
            let worst = maximal.iter().map(|&w| table[w]).max().unwrap_or(0);
            let value = (Rational::from_integer(self.subset_cost[first as usize])
                + lambda * Rational::from_integer(worst))
                / scale;
            if best.as_ref().is_none_or(|(b, _, _)| value < *b) {
                best = Some((value, first, worst));
            }
        }
        let (value, first, worst) = best.expect("at least the empty first stage");
        Ok(ExactRobust {
            value,
            first_stage: ElementSet::from_mask(self.m, first),
            phi: to_cost(self.subset_cost[first as usize], self.scale),
            second_stage: to_cost(worst, self.scale),
        })
    }

    /// `max c(a_on(σ)) / Opt(σ)` over every repetition-free request sequence σ,
    /// i.e. the exact competitive ratio of the online rule on this instance
    /// (at least 1). Repeated requests never change the online state.
    pub fn online_ratio(&self) -> Result<Rational> {
        self.budget
            .check("requirements for online ratio", self.n, MAX_ONLINE_RATIO_REQUIREMENTS)?;
        let table = self.table_values(0);
        let mut worst = Rational::one();
        let mut stack = vec![(OnlineRun::new(self.problem), 0u64)];
        while let Some((run, used)) = stack.pop() {
            if used != 0 {
                let opt = table[used as usize];
                let paid = self.scaled(run.cost());
                if opt == 0 {
                    if paid > 0 {
                        return Err(Error::precondition(
                            "online rule pays on a sequence with zero optimum",
                        ));
                    }
                } else {
                    worst = worst.max(Rational::new(paid, opt));
                }
            }
            for i in (0..self.n).rev() {
                if used >> i & 1 == 0 {
                    let mut next = run.clone();
                    next.feed(i)?;
                    stack.push((next, used | 1 << i));
                }
            }
        }
        Ok(worst)
    }

    /// `max_prefix c(a_on(prefix)) / Opt(prefix)` for one sequence.
    pub fn sequence_ratio(&self, sequence: &[usize]) -> Result<Rational> {
        let table = self.table_values(0);
        let mut run = OnlineRun::new(self.problem);
        let mut used = 0u64;
        let mut worst = Rational::one();
        for &i in sequence {
            run.feed(i)?;
            used |= 1 << i;
            let opt = table[used as usize];
            if opt > 0 {
                worst = worst.max(Rational::new(self.scaled(run.cost()), opt));
            }
        }
        Ok(worst)
    }

    /// `c(offline_augment(X | S)) / OptAug(X | S)` (1 when the optimum is 0).
    pub fn offline_ratio_on(&self, scenario: &Scenario, partial: &ElementSet) -> Result<Rational> {
        let aug = self.problem.offline_augment(scenario, partial)?;
        let paid = self.scaled(self.problem.set_cost(&aug));
        let opt = self.table_values(partial.to_mask())[scenario.to_mask() as usize];
        if opt == 0 {
            if paid > 0 {
                return Err(Error::precondition("offline rule pays on a zero-cost optimum"));
            }
            return Ok(Rational::one());
        }
        Ok(Rational::new(paid, opt).max(Rational::one()))
    }

    fn violation(&self) {
        if let Some(a) = &self.audit {
            a.violations.fetch_add(1, Ordering::Relaxed);
        }
    }

    /// Checks monotonicity in `X` and in `S` and subadditivity over the whole
    /// table for `partial`.
    fn audit_table(&self, partial: u64, table: &[i128]) {
        let audit = self.audit.as_ref().expect("audit enabled");
        audit.evaluations.fetch_add(1, Ordering::Relaxed);
        let reqs = 1usize << self.n;
        for x in 0..reqs {
            for i in 0..self.n {
                if x >> i & 1 == 1 && table[x & !(1 << i)] > table[x] {
                    self.violation();
                }
            }
        }
        // disjoint splits plus monotonicity cover overlapping pairs
        for z in 0..reqs as u64 {
            for x in subsets_of(z) {
                let (a, b) = (table[x as usize], table[(z & !x) as usize]);
                if a.saturating_add(b) < table[z as usize] {
                    self.violation();
                }
            }
        }
        if partial != 0 {
            let smaller = self.table_values(partial & (partial - 1));
            if (0..reqs).any(|x| table[x] > smaller[x]) {
                self.violation();
            }
        }
    }
}

/// All members of a downward-closed family, by exhaustive membership queries.
pub fn enumerate_members(omega: &dyn DownwardClosed, budget: ExactBudget) -> Result<Vec<Scenario>> {
    let n = omega.ground_size();
    budget.check("number of requirements", n, budget.max_requirements)?;
    budget.check("candidate scenarios", 1usize << n, budget.max_scenarios)?;
    Ok((0u64..1 << n)
        .map(Scenario::from_mask)
        .filter(|s| omega.contains(s))
        .collect())
}

/// Exact `OptAug(X | S)`.
pub fn exact_opt_aug<P: CoveringProblem + ?Sized>(
    problem: &P,
    scenario: &Scenario,
    partial: &ElementSet,
    budget: ExactBudget,
) -> Result<(Cost, ElementSet)> {
    ExactOracle::new(problem, budget)?.opt_aug(scenario, partial)
}

pub fn exact_max_min<P: CoveringProblem + ?Sized>(
    problem: &P,
    omega: &dyn DownwardClosed,
    budget: ExactBudget,
) -> Result<(Cost, Scenario)> {
    ExactOracle::new(problem, budget)?.max_min(omega)
}

pub fn exact_robust<P: CoveringProblem + ?Sized>(
    problem: &P,
    omega: &dyn DownwardClosed,
    lambda: Rational,
    budget: ExactBudget,
) -> Result<ExactRobust> {
    ExactOracle::new(problem, budget)?.robust(omega, lambda)
}

/// Largest ratio `max|I| / min|J|` over ground subsets `A`, where `I`, `J`
/// range over the maximal members of `Ω` inside `A`.
pub fn p_system_ratio(omega: &dyn DownwardClosed, budget: ExactBudget) -> Result<Rational> {
    let n = omega.ground_size();
    budget.check("number of requirements", n, budget.max_requirements)?;
    let size = 1usize << n;
    let member: Vec<bool> = (0..size as u64)
        .map(|m| omega.contains(&Scenario::from_mask(m)))
        .collect();
    let mut worst = Rational::one();
    for a in 1..size as u64 {
        let mut largest = 0u32;
        let mut smallest = u32::MAX;
        for i in subsets_of(a) {
            if !member[i as usize] {
                continue;
            }
            let rest = a & !i;
            let maximal = (0..n).all(|e| rest >> e & 1 == 0 || !member[(i | 1 << e) as usize]);
            if maximal {
                largest = largest.max(i.count_ones());
                smallest = smallest.min(i.count_ones());
            }
        }
        if smallest > 0 {
            worst = worst.max(Rational::new(largest as i128, smallest as i128));
        } else if largest > 0 {
            // cannot happen for a downward-closed family
            return Err(Error::precondition("family is not downward-closed"));
        }
    }
    Ok(worst)
}

/// Checks the declared p against [`p_system_ratio`].
pub fn verify_p_system(omega: &dyn DownwardClosed, declared_p: usize, budget: ExactBudget) -> Result<bool> {
    let ratio = p_system_ratio(omega, budget)?;
    Ok(ratio <= Rational::from_integer(declared_p as i128))
}

