//! Requirement sets (scenarios) and element sets (partial solutions).

use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cost::Cost;
use crate::error::{Error, Result};

/// A set of requirement indices, kept sorted and deduplicated.
///
/// Ordering is lexicographic on the sorted index list, which is the tie-break
/// used by the exact oracles.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scenario(Vec<usize>);

impl Scenario {
    pub fn empty() -> Self {
        Scenario(Vec::new())
    }

    pub fn new(items: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Scenario(v)
    }

    pub fn from_mask(mask: u64) -> Self {
        Scenario((0..64).filter(|i| mask >> i & 1 == 1).collect())
    }

    pub fn to_mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &i| m | 1 << i)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    /// Returns `false` if `i` was already present.
    pub fn insert(&mut self, i: usize) -> bool {
        match self.0.binary_search(&i) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, i);
                true
            }
        }
    }

    pub fn with(&self, i: usize) -> Scenario {
        let mut s = self.clone();
        s.insert(i);
        s
    }

    pub fn union(&self, other: &Scenario) -> Scenario {
        Scenario::new(self.iter().chain(other.iter()))
    }

    pub fn is_subset(&self, other: &Scenario) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&last) if last >= n => Err(Error::RequirementOutOfRange { index: last, n }),
            _ => Ok(()),
        }
    }
}

impl FromIterator<usize> for Scenario {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Scenario::new(iter)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Scenario {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Scenario {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Vec::<usize>::deserialize(deserializer).map(Scenario::new)
    }
}

/// A subset of the ground set `E`, stored as a bitset of fixed width `m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ElementSet(FixedBitSet);

impl ElementSet {
    pub fn empty(m: usize) -> Self {
        ElementSet(FixedBitSet::with_capacity(m))
    }

    pub fn full(m: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(m);
        bits.insert_range(..);
        ElementSet(bits)
    }

    pub fn from_elements(m: usize, elements: impl IntoIterator<Item = usize>) -> Self {
        let mut s = ElementSet::empty(m);
        for e in elements {
            s.insert(e);
        }
        s
    }

    pub fn from_mask(m: usize, mask: u64) -> Self {
        ElementSet::from_elements(m, (0..m).filter(|e| mask >> e & 1 == 1))
    }

    pub fn to_mask(&self) -> u64 {
        self.iter().fold(0u64, |m, e| m | 1 << e)
    }

    /// Width of the ground set.
    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, e: usize) -> bool {
        let fresh = !self.0.contains(e);
        self.0.insert(e);
        fresh
    }

    pub fn contains(&self, e: usize) -> bool {
        self.0.contains(e)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn union_with(&mut self, other: &ElementSet) {
        self.0.union_with(&other.0);
    }

    pub fn union(&self, other: &ElementSet) -> ElementSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn difference(&self, other: &ElementSet) -> ElementSet {
        let mut s = self.clone();
        s.0.difference_with(&other.0);
        s
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn cost(&self, cost: impl Fn(usize) -> Cost) -> Cost {
        self.iter().map(cost).sum()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl Serialize for ElementSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vec().serialize(serializer)
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Scenario(self.to_vec()))
    }
}
