//! Downward-closed families over the requirement set `[n]` and the built-in
//! p-systems: uniform, partition and graphic matroids, intersections, and
//! explicitly listed families.

use std::fmt::Debug;
use std::sync::Arc;

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// A downward-closed family `Ω ⊆ 2^[n]` given by a membership oracle.
///
/// Implementations must satisfy `contains(∅)` and
/// `contains(X) ∧ Y ⊆ X ⇒ contains(Y)`.
pub trait DownwardClosed: Send + Sync + Debug {
    fn ground_size(&self) -> usize;

    fn contains(&self, set: &Scenario) -> bool;

    /// Elements `e ∉ base` with `base ∪ {e}` in the family, ascending.
    fn feasible_extensions(&self, base: &Scenario) -> Vec<usize> {
        (0..self.ground_size())
            .filter(|&e| !base.contains(e) && self.contains(&base.with(e)))
            .collect()
    }
}

/// A downward-closed family with a declared p-system parameter.
///
/// `p_value` is declared, never computed; see
/// [`crate::oracle::verify_p_system`] for an exhaustive check on tiny ground sets.
pub trait PSystem: DownwardClosed {
    fn p_value(&self) -> usize;
}

/// `{X : |X| ≤ k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformMatroid {
    n: usize,
    k: usize,
}

impl UniformMatroid {
    pub fn new(n: usize, k: usize) -> Self {
        UniformMatroid { n, k }
    }

    /// The free matroid: every subset is independent.
    pub fn free(n: usize) -> Self {
        UniformMatroid { n, k: n }
    }

    pub fn rank(&self) -> usize {
        self.k
    }
}

impl DownwardClosed for UniformMatroid {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn contains(&self, set: &Scenario) -> bool {
        set.len() <= self.k && set.iter().all(|i| i < self.n)
    }
}

impl PSystem for UniformMatroid {
    fn p_value(&self) -> usize {
        1
    }
}

/// Per-part cardinality caps over a fixed partition of `[n]`.
///
/// A bound of `None` means the part is unconstrained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionMatroid {
    part_of: Vec<usize>,
    bounds: Vec<Option<usize>>,
}

impl PartitionMatroid {
    /// `parts` must be disjoint and cover `[n]`; empty parts are allowed.
    pub fn new(n: usize, parts: &[Vec<usize>], bounds: Vec<Option<usize>>) -> Result<Self> {
        if parts.len() != bounds.len() {
            return Err(Error::invalid(format!(
                "partition matroid has {} parts but {} bounds",
                parts.len(),
                bounds.len()
            )));
        }
        let mut part_of = vec![usize::MAX; n];
        for (k, part) in parts.iter().enumerate() {
            for &i in part {
                if i >= n {
                    return Err(Error::RequirementOutOfRange { index: i, n });
                }
                if part_of[i] != usize::MAX {
                    return Err(Error::invalid(format!("requirement {i} is in two parts")));
                }
                part_of[i] = k;
            }
        }
        if let Some(i) = part_of.iter().position(|&k| k == usize::MAX) {
            return Err(Error::invalid(format!("requirement {i} is in no part")));
        }
        Ok(PartitionMatroid { part_of, bounds })
    }

    /// Builds directly from a part label per requirement.
    pub fn from_labels(part_of: Vec<usize>, bounds: Vec<Option<usize>>) -> Self {
        assert!(part_of.iter().all(|&k| k < bounds.len()), "label without a bound");
        PartitionMatroid { part_of, bounds }
    }

    pub fn part_of(&self, i: usize) -> usize {
        self.part_of[i]
    }

    pub fn bounds(&self) -> &[Option<usize>] {
        &self.bounds
    }

    pub fn parts(&self) -> Vec<Vec<usize>> {
        let mut parts = vec![Vec::new(); self.bounds.len()];
        for (i, &k) in self.part_of.iter().enumerate() {
            parts[k].push(i);
        }
        parts
    }

    /// `|X ∩ S_k|` for every part `k`.
    pub fn part_counts(&self, set: &Scenario) -> Vec<usize> {
        let mut counts = vec![0; self.bounds.len()];
        for i in set.iter() {
            counts[self.part_of[i]] += 1;
        }
        counts
    }
}

impl DownwardClosed for PartitionMatroid {
    fn ground_size(&self) -> usize {
        self.part_of.len()
    }

    fn contains(&self, set: &Scenario) -> bool {
        if set.iter().any(|i| i >= self.part_of.len()) {
            return false;
        }
        self.part_counts(set)
            .iter()
            .zip(&self.bounds)
            .all(|(&c, b)| b.is_none_or(|b| c <= b))
    }
}

impl PSystem for PartitionMatroid {
    fn p_value(&self) -> usize {
        1
    }
}

/// Forests of a graph whose edges are indexed by requirements: requirement `i`
/// is edge `edges[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphicMatroid {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl GraphicMatroid {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= vertices || v >= vertices) {
            return Err(Error::invalid(format!(
                "graphic matroid edge ({u},{v}) outside {vertices} vertices"
            )));
        }
        Ok(GraphicMatroid { vertices, edges })
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }
}

impl DownwardClosed for GraphicMatroid {
    fn ground_size(&self) -> usize {
        self.edges.len()
    }

    fn contains(&self, set: &Scenario) -> bool {
        let mut uf = UnionFind::new(self.vertices);
        set.iter().all(|i| match self.edges.get(i) {
            Some(&(u, v)) => uf.union(u, v),
            None => false,
        })
    }
}

impl PSystem for GraphicMatroid {
    fn p_value(&self) -> usize {
        1
    }
}

/// Intersection of p-systems over a common ground set.
///
/// The declared p is the sum of the members' p values, so an intersection of
/// `k` matroids is declared a `k`-system.
#[derive(Clone, Debug)]
pub struct Intersection {
    n: usize,
    members: Vec<Arc<dyn PSystem>>,
}

impl Intersection {
    pub fn new(members: Vec<Arc<dyn PSystem>>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::invalid("intersection of zero systems"));
        };
        let n = first.ground_size();
        if members.iter().any(|m| m.ground_size() != n) {
            return Err(Error::invalid("intersection members have different ground sets"));
        }
        Ok(Intersection { n, members })
    }

    pub fn members(&self) -> &[Arc<dyn PSystem>] {
        &self.members
    }
}

impl DownwardClosed for Intersection {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn contains(&self, set: &Scenario) -> bool {
        self.members.iter().all(|m| m.contains(set))
    }
}

impl PSystem for Intersection {
    fn p_value(&self) -> usize {
        self.members.iter().map(|m| m.p_value()).sum()
    }
}

/// A family given by its maximal sets; membership is a subset test against
/// each listed set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitFamily {
    n: usize,
    maximal: Vec<Scenario>,
    p: usize,
}

impl ExplicitFamily {
    pub fn new(n: usize, maximal: Vec<Scenario>, p: usize) -> Result<Self> {
        for s in &maximal {
            s.validate(n)?;
        }
        if p == 0 {
            return Err(Error::invalid("declared p must be positive"));
        }
        Ok(ExplicitFamily { n, maximal, p })
    }

    pub fn maximal_sets(&self) -> &[Scenario] {
        &self.maximal
    }
}

impl DownwardClosed for ExplicitFamily {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn contains(&self, set: &Scenario) -> bool {
        set.is_empty() || self.maximal.iter().any(|m| set.is_subset(m))
    }
}

impl PSystem for ExplicitFamily {
    fn p_value(&self) -> usize {
        self.p
    }
}

/// `A ∩ B` over borrowed or owned families.
#[derive(Clone, Copy, Debug)]
pub struct Meet<A, B>(pub A, pub B);

impl<A: DownwardClosed, B: DownwardClosed> DownwardClosed for Meet<A, B> {
    fn ground_size(&self) -> usize {
        self.0.ground_size()
    }

    fn contains(&self, set: &Scenario) -> bool {
        self.0.contains(set) && self.1.contains(set)
    }
}

impl<T: DownwardClosed + ?Sized> DownwardClosed for &T {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }

    fn contains(&self, set: &Scenario) -> bool {
        (**self).contains(set)
    }
}

impl<T: DownwardClosed + ?Sized> DownwardClosed for Arc<T> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }

    fn contains(&self, set: &Scenario) -> bool {
        (**self).contains(set)
    }
}

/// Restricts a family to sets avoiding `excluded`.
#[derive(Clone, Debug)]
pub struct Avoiding<F> {
    pub inner: F,
    pub excluded: Scenario,
}

impl<F: DownwardClosed> DownwardClosed for Avoiding<F> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn contains(&self, set: &Scenario) -> bool {
        !set.iter().any(|i| self.excluded.contains(i)) && self.inner.contains(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_subsets(n: usize) -> impl Iterator<Item = Scenario> {
        (0u64..1 << n).map(Scenario::from_mask)
    }

    fn assert_downward_closed(f: &dyn DownwardClosed) {
        let n = f.ground_size();
        assert!(f.contains(&Scenario::empty()));
        for x in all_subsets(n).filter(|x| f.contains(x)) {
            for i in x.iter() {
                let y = Scenario::new(x.iter().filter(|&j| j != i));
                assert!(f.contains(&y), "{x} in family but {y} is not");
            }
        }
    }

    #[test]
    fn uniform_matches_cardinality() {
        for n in 0..=10 {
            for k in 0..=n.min(4) {
                let u = UniformMatroid::new(n, k);
                for x in all_subsets(n) {
                    assert_eq!(u.contains(&x), x.len() <= k);
                }
                assert_downward_closed(&u);
            }
        }
    }

    #[test]
    fn partition_caps() {
        let pm = PartitionMatroid::new(5, &[vec![0, 1, 2], vec![3, 4]], vec![Some(1), None]).unwrap();
        assert!(pm.contains(&Scenario::new([0, 3, 4])));
        assert!(!pm.contains(&Scenario::new([0, 1])));
        assert_eq!(pm.parts(), vec![vec![0, 1, 2], vec![3, 4]]);
        assert_downward_closed(&pm);
    }

    #[test]
    fn partition_rejects_bad_parts() {
        assert!(PartitionMatroid::new(3, &[vec![0, 1]], vec![Some(1)]).is_err());
        assert!(PartitionMatroid::new(3, &[vec![0, 1], vec![1, 2]], vec![None, None]).is_err());
        assert!(PartitionMatroid::new(3, &[vec![0, 1, 2]], vec![]).is_err());
    }

    #[test]
    fn graphic_detects_cycles() {
        // triangle plus pendant edge
        let g = GraphicMatroid::new(4, vec![(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        assert!(g.contains(&Scenario::new([0, 1, 3])));
        assert!(!g.contains(&Scenario::new([0, 1, 2])));
        assert_downward_closed(&g);
        let loopy = GraphicMatroid::new(2, vec![(1, 1)]).unwrap();
        assert!(!loopy.contains(&Scenario::new([0])));
    }

    #[test]
    fn intersection_is_conjunction() {
        let a: Arc<dyn PSystem> = Arc::new(UniformMatroid::new(6, 3));
        let b: Arc<dyn PSystem> =
            Arc::new(PartitionMatroid::new(6, &[vec![0, 1, 2], vec![3, 4, 5]], vec![Some(1), Some(2)]).unwrap());
        let both = Intersection::new(vec![a.clone(), b.clone()]).unwrap();
        assert_eq!(both.p_value(), 2);
        for x in all_subsets(6) {
            assert_eq!(both.contains(&x), a.contains(&x) && b.contains(&x));
        }
        assert_downward_closed(&both);
    }

    #[test]
    fn explicit_family_subset_test() {
        let f = ExplicitFamily::new(4, vec![Scenario::new([0, 1]), Scenario::new([2, 3])], 1).unwrap();
        assert!(f.contains(&Scenario::new([1])));
        assert!(!f.contains(&Scenario::new([1, 2])));
        assert_downward_closed(&f);
        let empty = ExplicitFamily::new(4, vec![], 1).unwrap();
        assert!(empty.contains(&Scenario::empty()));
        assert!(!empty.contains(&Scenario::new([0])));
    }

    #[test]
    fn feasible_extensions_ascending() {
        let u = UniformMatroid::new(4, 2);
        assert_eq!(u.feasible_extensions(&Scenario::new([1])), vec![0, 2, 3]);
        assert!(u.feasible_extensions(&Scenario::new([1, 2])).is_empty());
    }
}
