#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robustcover::{
    Cost, Intersection, PSystem, PartitionMatroid, Rational, SetCoverProblem, SteinerTreeProblem,
    UniformMatroid,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cost(rng: &mut ChaCha8Rng) -> Cost {
    let den = *[1u64, 2, 3, 4].choose(rng).unwrap();
    Cost::from_ratio(rng.gen_range(1..=8), den)
}

pub fn set_cover(rng: &mut ChaCha8Rng, items: usize, sets: usize) -> SetCoverProblem {
    let mut family: Vec<(Cost, Vec<usize>)> = (0..sets)
        .map(|_| {
            let members = (0..items).filter(|_| rng.gen_bool(0.35)).collect();
            (cost(rng), members)
        })
        .collect();
    for i in 0..items {
        if !family.iter().any(|(_, s)| s.contains(&i)) {
            let j = rng.gen_range(0..sets);
            family[j].1.push(i);
        }
    }
    SetCoverProblem::new(items, family).unwrap()
}

/// Random connected graph with at most `max_edges` edges and `terminals`
/// terminals on non-root vertices.
pub fn steiner(rng: &mut ChaCha8Rng, vertices: usize, max_edges: usize, terminals: usize) -> SteinerTreeProblem {
    let mut edges = Vec::new();
    for v in 1..vertices {
        let u = rng.gen_range(0..v);
        edges.push((u, v, cost(rng)));
    }
    while edges.len() < max_edges {
        let u = rng.gen_range(0..vertices);
        let v = rng.gen_range(0..vertices);
        if u != v {
            edges.push((u, v, cost(rng)));
        }
    }
    let ts = (0..terminals).map(|_| rng.gen_range(1..vertices)).collect();
    SteinerTreeProblem::new(vertices, 0, edges, ts).unwrap()
}

pub fn partition(rng: &mut ChaCha8Rng, n: usize) -> PartitionMatroid {
    let parts = rng.gen_range(1..=3);
    let labels = (0..n).map(|_| rng.gen_range(0..parts)).collect();
    let bounds = (0..parts).map(|_| Some(rng.gen_range(1..=2))).collect();
    PartitionMatroid::from_labels(labels, bounds)
}

/// Uniform, partition or a two-partition intersection, in rotation.
pub fn system(rng: &mut ChaCha8Rng, n: usize, which: usize) -> Arc<dyn PSystem> {
    match which % 3 {
        0 => Arc::new(UniformMatroid::new(n, rng.gen_range(1..=4))),
        1 => Arc::new(partition(rng, n)),
        _ => Arc::new(Intersection::new(vec![Arc::new(partition(rng, n)), Arc::new(partition(rng, n))]).unwrap()),
    }
}

pub fn r(n: i128, d: i128) -> Rational {
    Rational::new(n, d)
}
