//! Knapsack to partition matroids.
//!
//! For a single knapsack `Σ_{i∈X} w_i ≤ B` over `[n]` and `δ ∈ (0, 1]`, let
//! `β = δB/n` and `G` the least integer with `(1+δ)^G ≥ n/δ`. Requirements are
//! grouped by weight into `S_0 = {w ≤ β}` and
//! `S_k = {β(1+δ)^{k-1} < w ≤ β(1+δ)^k}` for `k = 1..G`. Every composition
//! `τ = (U_1, …, U_G)` of `⌈G/δ⌉` into `G` nonnegative parts defines a
//! partition matroid `P_τ` with `S_0` free and
//! `N_k(τ) = ⌊n(U_k+1) / (G(1+δ)^{k-1})⌋` on `S_k`. Then
//!
//! 1. every `X ∈ P_τ` has `Σ w(X) ≤ (1+6δ)B`, and
//! 2. every `Y` with `Σ w(Y) ≤ B` lies in some `P_τ`.
//!
//! Requirements heavier than `B`, or explicitly excluded, form an extra part
//! with bound zero in every matroid.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::cost::Rational;
use crate::error::{Error, Result};
use crate::scenario::Scenario;
use crate::system::PartitionMatroid;

/// Default cap on the number of emitted matroids.
pub const DEFAULT_ENUMERATION_CAP: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionParams {
    #[serde(with = "crate::cost::rational_string")]
    pub delta: Rational,
    pub enumeration_cap: u64,
}

impl ReductionParams {
    pub fn new(delta: Rational, enumeration_cap: u64) -> Result<Self> {
        if delta <= Rational::zero() || delta > Rational::one() {
            return Err(Error::precondition(format!("delta = {delta} outside (0, 1]")));
        }
        Ok(ReductionParams {
            delta,
            enumeration_cap,
        })
    }

    /// The smallest `δ ∈ {1, 1/2, 1/3, …}` not below `floor` whose matroid
    /// count over `n` requirements stays within `cap`; `δ = 1` if none does.
    pub fn auto(n: usize, floor: Rational, cap: u64) -> Self {
        let mut delta = Rational::one();
        let mut k = 2i128;
        while Rational::new(1, k) >= floor {
            let candidate = Rational::new(1, k);
            let (g, total) = shape(n, candidate);
            if composition_count(g, total) > BigUint::from(cap) {
                break;
            }
            delta = candidate;
            k += 1;
        }
        ReductionParams {
            delta,
            enumeration_cap: cap,
        }
    }

    /// `ε = 6δ`, the relaxation of the knapsack in guarantee (1).
    pub fn epsilon(&self) -> Rational {
        self.delta * Rational::from_integer(6)
    }
}

fn big(r: Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn big_int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `(G, ⌈G/δ⌉)` for `n` requirements.
fn shape(n: usize, delta: Rational) -> (usize, u64) {
    let ratio = big_int(n as u64) / big(delta);
    let base = BigRational::one() + big(delta);
    let mut g = 0usize;
    let mut power = BigRational::one();
    while power < ratio {
        power *= &base;
        g += 1;
    }
    let total = (big_int(g as u64) / big(delta)).ceil().to_integer();
    (g, total.to_u64().expect("partition total fits in u64"))
}

/// `C(total+G-1, G-1)`, with one (empty) composition when `G = 0`.
fn composition_count(g: usize, total: u64) -> BigUint {
    if g == 0 {
        return BigUint::one();
    }
    let top = total + g as u64 - 1;
    let k = (g - 1) as u64;
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(top - i) / BigUint::from(i + 1);
    }
    acc
}

/// Diagnostic view of one emitted matroid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatroidDump {
    pub index: u64,
    pub composition: Vec<u64>,
    /// `N_1..N_G`; `S_0` is unbounded and excluded requirements are capped at 0.
    pub bounds: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct KnapsackReduction {
    n: usize,
    weights: Vec<Rational>,
    capacity: Rational,
    params: ReductionParams,
    g: usize,
    total: u64,
    count: BigUint,
    /// group label per requirement: 0..=G, or G+1 when excluded
    group: Vec<usize>,
    /// `(1+δ)^{k}` for `k = 0..G`
    powers: Vec<BigRational>,
}

impl KnapsackReduction {
    pub fn new(
        weights: Vec<Rational>,
        capacity: Rational,
        excluded: &Scenario,
        params: ReductionParams,
    ) -> Result<Self> {
        let n = weights.len();
        excluded.validate(n)?;
        if weights.iter().chain([&capacity]).any(|w| *w < Rational::zero()) {
            return Err(Error::invalid("negative knapsack weight or capacity"));
        }
        let delta = big(params.delta);
        let (g, total) = shape(n, params.delta);
        let base = BigRational::one() + &delta;
        let mut powers = vec![BigRational::one()];
        for k in 1..=g {
            let next = &powers[k - 1] * &base;
            powers.push(next);
        }
        let group = if n == 0 {
            Vec::new()
        } else {
            let beta = &delta * big(capacity) / big_int(n as u64);
            weights
                .iter()
                .enumerate()
                .map(|(i, &w)| {
                    if excluded.contains(i) || w > capacity {
                        return g + 1;
                    }
                    let w = big(w);
                    // w ≤ β(1+δ)^G since w ≤ B and (1+δ)^G ≥ n/δ
                    (0..=g)
                        .find(|&k| w <= &beta * &powers[k])
                        .expect("weight within capacity falls in a group")
                })
                .collect()
        };
        Ok(KnapsackReduction {
            n,
            weights,
            capacity,
            params,
            g,
            total,
            count: composition_count(g, total),
            group,
            powers,
        })
    }

    pub fn params(&self) -> ReductionParams {
        self.params
    }

    /// Number of weight classes `G`.
    pub fn classes(&self) -> usize {
        self.g
    }

    /// `⌈G/δ⌉`.
    pub fn partition_total(&self) -> u64 {
        self.total
    }

    /// Number of emitted matroids `T`.
    pub fn count(&self) -> &BigUint {
        &self.count
    }

    /// `1 + 6δ`.
    pub fn guarantee_factor(&self) -> Rational {
        Rational::one() + self.params.epsilon()
    }

    /// `S_0, …, S_G` followed by the excluded requirements.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.g + 2];
        for (i, &k) in self.group.iter().enumerate() {
            groups[k].push(i);
        }
        groups
    }

    /// `N_k(τ)` for `k = 1..G`.
    pub fn bounds(&self, composition: &[u64]) -> Vec<usize> {
        assert_eq!(composition.len(), self.g, "composition length");
        let n = big_int(self.n as u64);
        let g = big_int(self.g as u64);
        composition
            .iter()
            .enumerate()
            .map(|(k, &u)| {
                let bound = (&n * big_int(u + 1) / (&g * &self.powers[k])).floor().to_integer();
                // more than n is never binding
                bound.to_usize().unwrap_or(self.n).min(self.n)
            })
            .collect()
    }

    pub fn matroid(&self, composition: &[u64]) -> PartitionMatroid {
        let mut bounds = vec![None];
        bounds.extend(self.bounds(composition).into_iter().map(Some));
        bounds.push(Some(0));
        PartitionMatroid::from_labels(self.group.clone(), bounds)
    }

    /// All compositions in descending lexicographic order, refusing when
    /// their number exceeds the cap.
    pub fn compositions(&self) -> Result<Compositions> {
        if self.count > BigUint::from(self.params.enumeration_cap) {
            return Err(Error::EnumerationCapExceeded {
                count: self.count.to_string(),
                cap: self.params.enumeration_cap,
            });
        }
        let first = if self.g == 0 {
            Vec::new()
        } else {
            let mut v = vec![0; self.g];
            v[0] = self.total;
            v
        };
        Ok(Compositions { next: Some(first) })
    }

    /// Every emitted matroid with its composition, lazily.
    pub fn matroids(&self) -> Result<impl Iterator<Item = (Vec<u64>, PartitionMatroid)> + '_> {
        Ok(self.compositions()?.map(|c| {
            let m = self.matroid(&c);
            (c, m)
        }))
    }

    pub fn dump(&self) -> Result<Vec<MatroidDump>> {
        Ok(self
            .compositions()?
            .enumerate()
            .map(|(index, composition)| MatroidDump {
                index: index as u64,
                bounds: self.bounds(&composition),
                composition,
            })
            .collect())
    }

    fn load(&self, set: &Scenario) -> Rational {
        set.iter().map(|i| self.weights[i]).sum()
    }

    /// A composition whose matroid contains `y`: `U_k = ⌊Q_k·G/(δB)⌋` with
    /// `Q_k = w(Y ∩ S_k)`, and the slack poured into `U_1`.
    pub fn locate(&self, y: &Scenario) -> Result<Vec<u64>> {
        y.validate(self.n)?;
        if self.load(y) > self.capacity {
            return Err(Error::precondition(format!(
                "set {y} has weight {} above capacity {}",
                self.load(y),
                self.capacity
            )));
        }
        if y.iter().any(|i| self.group[i] == self.g + 1) {
            return Err(Error::precondition(format!("set {y} contains an excluded requirement")));
        }
        if self.g == 0 {
            return Ok(Vec::new());
        }
        let mut q = vec![Rational::zero(); self.g];
        for i in y.iter() {
            let k = self.group[i];
            if k > 0 {
                q[k - 1] += self.weights[i];
            }
        }
        let unit = self.params.delta * self.capacity / Rational::from_integer(self.g as i128);
        let mut u: Vec<u64> = q
            .iter()
            .map(|&qk| {
                if qk.is_zero() {
                    0
                } else {
                    (qk / unit).floor().to_integer() as u64
                }
            })
            .collect();
        let used: u64 = u.iter().sum();
        assert!(used <= self.total, "located composition exceeds the total");
        u[0] += self.total - used;
        Ok(u)
    }

    /// Whether some emitted matroid contains `x`, without enumerating them:
    /// the least `U_k` admitting `|X ∩ S_k|` must sum to at most `⌈G/δ⌉`.
    pub fn union_contains(&self, x: &Scenario) -> bool {
        if x.iter().any(|i| i >= self.n || self.group[i] == self.g + 1) {
            return false;
        }
        let mut counts = vec![0u64; self.g + 1];
        for i in x.iter() {
            counts[self.group[i]] += 1;
        }
        let n = big_int(self.n as u64);
        let g = big_int(self.g as u64);
        let mut needed = 0u64;
        for (k, &count) in counts.iter().enumerate().take(self.g + 1).skip(1) {
            if count == 0 {
                continue;
            }
            let min_u: BigInt = (big_int(count) * &g * &self.powers[k - 1] / &n).ceil().to_integer() - 1;
            needed += min_u.to_u64().unwrap_or(0);
            if needed > self.total {
                return false;
            }
        }
        true
    }
}

/// Compositions of a fixed total into `G` parts, descending lexicographically.
#[derive(Clone, Debug)]
pub struct Compositions {
    next: Option<Vec<u64>>,
}

impl Iterator for Compositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let current = self.next.take()?;
        let g = current.len();
        if g > 1 {
            if let Some(i) = (0..g - 1).rev().find(|&i| current[i] > 0) {
                let mut succ = current.clone();
                let tail: u64 = succ[i + 1..].iter().sum();
                succ[i] -= 1;
                succ[i + 1] = tail + 1;
                for v in &mut succ[i + 2..] {
                    *v = 0;
                }
                self.next = Some(succ);
            }
        }
        Some(current)
    }
}
