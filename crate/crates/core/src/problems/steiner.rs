use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use crate::cost::{Cost, Rational};
use crate::error::{Error, Result};
use crate::problem::CoveringProblem;
use crate::scenario::{ElementSet, Scenario};

/// Rooted Steiner tree: elements are the edges of an undirected graph and
/// requirement `i` asks for a path from `terminals[i]` to the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinerTreeProblem {
    vertices: usize,
    root: usize,
    edges: Vec<(usize, usize, Cost)>,
    terminals: Vec<usize>,
    /// (neighbor, edge index) in edge order
    adjacency: Vec<Vec<(usize, usize)>>,
}

struct ShortestPaths {
    dist: Vec<Option<Cost>>,
    pred: Vec<Option<usize>>,
}

impl SteinerTreeProblem {
    pub fn new(
        vertices: usize,
        root: usize,
        edges: Vec<(usize, usize, Cost)>,
        terminals: Vec<usize>,
    ) -> Result<Self> {
        if root >= vertices {
            return Err(Error::invalid(format!("root {root} outside {vertices} vertices")));
        }
        let mut adjacency = vec![Vec::new(); vertices];
        for (k, &(u, v, _)) in edges.iter().enumerate() {
            if u >= vertices || v >= vertices {
                return Err(Error::invalid(format!("edge {k} = ({u},{v}) outside {vertices} vertices")));
            }
            adjacency[u].push((v, k));
            if u != v {
                adjacency[v].push((u, k));
            }
        }
        if let Some(&t) = terminals.iter().find(|&&t| t >= vertices) {
            return Err(Error::invalid(format!("terminal {t} outside {vertices} vertices")));
        }
        let problem = SteinerTreeProblem {
            vertices,
            root,
            edges,
            terminals,
            adjacency,
        };
        let reach = problem.root_component(&ElementSet::full(problem.edges.len()));
        if let Some(v) = reach.iter().position(|&r| !r) {
            return Err(Error::invalid(format!("graph is disconnected: vertex {v} unreachable from root")));
        }
        Ok(problem)
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn edges(&self) -> &[(usize, usize, Cost)] {
        &self.edges
    }

    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    /// Vertices joined to the root by edges of `owned`.
    fn root_component(&self, owned: &ElementSet) -> Vec<bool> {
        let mut seen = vec![false; self.vertices];
        seen[self.root] = true;
        let mut queue = VecDeque::from([self.root]);
        while let Some(u) = queue.pop_front() {
            for &(v, k) in &self.adjacency[u] {
                if owned.contains(k) && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Dijkstra from `source` with owned edges at cost zero. Vertices are
    /// settled in (distance, index) order and predecessors only change on a
    /// strict improvement, so ties resolve toward lower vertex and edge
    /// indices. Stops early at the first settled vertex satisfying `stop`.
    fn shortest_paths(
        &self,
        source: usize,
        owned: &ElementSet,
        stop: impl Fn(usize) -> bool,
    ) -> (ShortestPaths, Option<usize>) {
        let mut dist: Vec<Option<Cost>> = vec![None; self.vertices];
        let mut pred = vec![None; self.vertices];
        let mut done = vec![false; self.vertices];
        let mut heap = BinaryHeap::new();
        dist[source] = Some(Cost::ZERO);
        heap.push(Reverse((Cost::ZERO, source)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            if stop(u) {
                return (ShortestPaths { dist, pred }, Some(u));
            }
            for &(v, k) in &self.adjacency[u] {
                let w = if owned.contains(k) { Cost::ZERO } else { self.edges[k].2 };
                let nd = d + w;
                if !done[v] && dist[v].is_none_or(|old| nd < old) {
                    dist[v] = Some(nd);
                    pred[v] = Some(k);
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        (ShortestPaths { dist, pred }, None)
    }

    /// Edges on the predecessor path from `target` back to the search source.
    fn path_edges(&self, paths: &ShortestPaths, source: usize, target: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut v = target;
        while v != source {
            let k = paths.pred[v].expect("target reached by the search");
            out.push(k);
            let (a, b, _) = self.edges[k];
            v = if a == v { b } else { a };
        }
        out
    }
}

impl CoveringProblem for SteinerTreeProblem {
    fn kind(&self) -> &'static str {
        "steiner"
    }

    fn num_elements(&self) -> usize {
        self.edges.len()
    }

    fn num_requirements(&self) -> usize {
        self.terminals.len()
    }

    fn cost(&self, element: usize) -> Cost {
        self.edges[element].2
    }

    fn satisfies(&self, requirement: usize, elements: &ElementSet) -> bool {
        self.root_component(elements)[self.terminals[requirement]]
    }

    fn satisfies_all(&self, scenario: &Scenario, elements: &ElementSet) -> bool {
        let reach = self.root_component(elements);
        scenario.iter().all(|i| reach[self.terminals[i]])
    }

    /// Minimum spanning tree of the metric closure over the root and the
    /// unsatisfied terminals, with `partial` contracted to zero cost, expanded
    /// back into graph edges.
    fn offline_augment(&self, scenario: &Scenario, partial: &ElementSet) -> Result<ElementSet> {
        scenario.validate(self.terminals.len())?;
        let reach = self.root_component(partial);
        let mut nodes = vec![self.root];
        for i in scenario.iter() {
            let t = self.terminals[i];
            if !reach[t] && !nodes.contains(&t) {
                nodes.push(t);
            }
        }
        let mut chosen = ElementSet::empty(self.edges.len());
        if nodes.len() == 1 {
            return Ok(chosen);
        }
        let trees: Vec<ShortestPaths> = nodes
            .iter()
            .map(|&s| self.shortest_paths(s, partial, |_| false).0)
            .collect();
        // Prim over the closure; lowest node index wins ties.
        let k = nodes.len();
        let mut in_tree = vec![false; k];
        let mut best: Vec<Option<(Cost, usize)>> = vec![None; k];
        in_tree[0] = true;
        for b in 1..k {
            best[b] = trees[0].dist[nodes[b]].map(|d| (d, 0));
        }
        for _ in 1..k {
            let next = (0..k)
                .filter(|&b| !in_tree[b])
                .filter_map(|b| best[b].map(|(d, _)| (d, b)))
                .min();
            let (_, b) = next.expect("graph is connected");
            in_tree[b] = true;
            let (_, a) = best[b].expect("candidate has a distance");
            for e in self.path_edges(&trees[a], nodes[a], nodes[b]) {
                if !partial.contains(e) {
                    chosen.insert(e);
                }
            }
            for c in 0..k {
                if in_tree[c] {
                    continue;
                }
                if let Some(d) = trees[b].dist[nodes[c]] {
                    if best[c].is_none_or(|(old, _)| d < old) {
                        best[c] = Some((d, b));
                    }
                }
            }
        }
        Ok(chosen)
    }

    /// Metric-closure MST guarantee.
    fn offline_ratio(&self) -> Rational {
        Rational::from_integer(2)
    }

    /// Buys a shortest path from the arriving terminal to the root's current
    /// component, with owned edges free.
    fn online_step(&self, requirement: usize, owned: &ElementSet) -> Vec<usize> {
        let reach = self.root_component(owned);
        let t = self.terminals[requirement];
        if reach[t] {
            return Vec::new();
        }
        let (paths, hit) = self.shortest_paths(t, owned, |v| reach[v]);
        let target = hit.expect("graph is connected");
        self.path_edges(&paths, t, target)
            .into_iter()
            .filter(|&e| !owned.contains(e))
            .collect()
    }
}
