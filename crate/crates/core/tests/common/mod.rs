#![allow(dead_code)]

use hofj_core::opinion_gen::{generate_innate, generate_resistance, GenSpec, OpinionDistribution};
use hofj_core::rng;
use hofj_core::{OpinionState, WeightedGraph};
use rand::Rng;

/// Connected simple random graph: a random recursive tree plus extra edges
/// with probability `p`. Weights are 1 unless `weighted`, else uniform in [0.5, 2).
pub fn random_graph(n: usize, p: f64, weighted: bool, seed: u64) -> WeightedGraph {
    let mut r = rng::stream(seed, 99);
    let mut edges = Vec::new();
    let weight = |r: &mut rng::StreamRng| if weighted { 0.5 + 1.5 * r.random::<f64>() } else { 1.0 };
    let mut tree = std::collections::HashSet::new();
    for v in 1..n {
        let u = r.random_range(0..v);
        let w = weight(&mut r);
        edges.push((u, v, w));
        tree.insert((u, v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if r.random::<f64>() < p && !tree.contains(&(u, v)) {
                let w = weight(&mut r);
                edges.push((u, v, w));
            }
        }
    }
    WeightedGraph::from_edges(n, edges).unwrap().0
}

/// Ten-node tree: centre 0, middle nodes 1..=3, two leaves per middle node.
pub fn tree() -> WeightedGraph {
    let mut edges = Vec::new();
    for y in 1..=3 {
        edges.push((0, y, 1.0));
        edges.push((y, 4 + 2 * (y - 1), 1.0));
        edges.push((y, 5 + 2 * (y - 1), 1.0));
    }
    WeightedGraph::from_edges(10, edges).unwrap().0
}

pub fn tree_state() -> OpinionState {
    let mut s = vec![0.0; 10];
    let mut a = vec![0.01; 10];
    s[0] = 1.0;
    a[0] = 1.0;
    for y in 1..=3 {
        a[y] = 0.6;
    }
    OpinionState::new(s, a).unwrap()
}

pub fn random_state(n: usize, dist: OpinionDistribution, seed: u64) -> OpinionState {
    let s = generate_innate(&GenSpec::new(dist, n, seed)).unwrap();
    OpinionState::new(s, generate_resistance(n, seed)).unwrap()
}

/// State whose resistances are drawn from `[floor, 1)`.
pub fn state_with_floor(n: usize, floor: f64, seed: u64) -> OpinionState {
    let s = generate_innate(&GenSpec::new(OpinionDistribution::Uniform, n, seed)).unwrap();
    let a = generate_resistance(n, seed)
        .into_iter()
        .map(|a| floor + (1.0 - floor) * a)
        .collect();
    OpinionState::new(s, a).unwrap()
}

pub fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
