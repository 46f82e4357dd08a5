#![allow(dead_code)]

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use hofj::io::{self, PreparedGraph};
use hofj_core::rng::{self, StreamRng};
use hofj_core::WeightedGraph;
use rand::Rng;

/// Sizes `(n, m)` of the small social corpora used for accuracy runs.
pub const CORPUS_SIZES: [(&str, usize, usize); 4] = [
    ("social-1788", 1788, 12476),
    ("social-2000", 2000, 16098),
    ("social-3892", 3892, 17239),
    ("social-4039", 4039, 88234),
];

/// Preferential attachment with triad formation (Holme–Kim): every new node
/// links to degree-proportional targets, and after each such link closes a
/// triangle with probability `triad` instead. Produces exactly `n` nodes and
/// `m` edges and is connected.
pub fn social_graph_edges(n: usize, m: usize, triad: f64, seed: u64) -> Vec<(usize, usize)> {
    let mut r = rng::stream(seed, 0xC0);
    let mut seed_size = 2;
    while seed_size * (seed_size - 1) / 2 + (n - seed_size) * (seed_size - 1) < m {
        seed_size += 1;
    }
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(m);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut ends: Vec<usize> = Vec::with_capacity(2 * m);
    let add = |u: usize, v: usize, edges: &mut Vec<(usize, usize)>, adj: &mut Vec<Vec<usize>>, ends: &mut Vec<usize>| {
        edges.push((u.min(v), u.max(v)));
        adj[u].push(v);
        adj[v].push(u);
        ends.push(u);
        ends.push(v);
    };
    // A path over the seed nodes keeps the core connected; the remaining
    // seed budget is spread over new arrivals.
    for v in 1..seed_size {
        add(v - 1, v, &mut edges, &mut adj, &mut ends);
    }
    let arrivals = n - seed_size;
    let remaining = m - (seed_size - 1);
    let base = remaining / arrivals;
    let extra = remaining % arrivals;
    for (i, v) in (seed_size..n).enumerate() {
        let want = (base + usize::from(i < extra)).min(v);
        let mut chosen: HashSet<usize> = HashSet::with_capacity(want);
        let mut last: Option<usize> = None;
        while chosen.len() < want {
            let candidate = match last {
                Some(prev) if r.random::<f64>() < triad => adj[prev][r.random_range(0..adj[prev].len())],
                _ => ends[r.random_range(0..ends.len())],
            };
            if candidate != v && chosen.insert(candidate) {
                last = Some(candidate);
            } else {
                last = None;
            }
        }
        let mut chosen: Vec<usize> = chosen.into_iter().collect();
        chosen.sort_unstable();
        for u in chosen {
            add(u, v, &mut edges, &mut adj, &mut ends);
        }
    }
    edges
}

pub struct Corpus {
    pub name: String,
    pub prepared: PreparedGraph,
}

impl Corpus {
    pub fn graph(&self) -> &WeightedGraph {
        &self.prepared.graph
    }
}

fn write_edge_file(dir: &Path, name: &str, edges: &[(usize, usize)]) -> PathBuf {
    let mut text = format!("% synthetic social graph {name}\n");
    for (u, v) in edges {
        writeln!(text, "{u} {v}").unwrap();
    }
    let path = dir.join(format!("{name}.txt"));
    std::fs::write(&path, text).unwrap();
    path
}

/// Real corpora from `HOFJ_CORPUS_DIR` when set, otherwise synthetic
/// stand-ins written to `dir` and read back through the edge-list loader.
pub fn corpora(dir: &Path) -> Vec<Corpus> {
    if let Ok(real) = std::env::var("HOFJ_CORPUS_DIR") {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(&real)
            .expect("HOFJ_CORPUS_DIR is readable")
            .map(|e| e.unwrap().path())
            .filter(|p| p.is_file())
            .collect();
        paths.sort();
        return paths
            .into_iter()
            .filter_map(|p| {
                let prepared = io::prepare(&p, false).ok()?;
                let n = prepared.graph.node_count();
                (1788..=7057).contains(&n).then(|| Corpus {
                    name: p.file_stem().unwrap().to_string_lossy().into_owned(),
                    prepared,
                })
            })
            .collect();
    }
    CORPUS_SIZES
        .iter()
        .enumerate()
        .map(|(i, &(name, n, m))| {
            let edges = social_graph_edges(n, m, 0.5, 1000 + i as u64);
            let path = write_edge_file(dir, name, &edges);
            Corpus { name: name.to_owned(), prepared: io::prepare(&path, false).unwrap() }
        })
        .collect()
}

/// Connected simple random graph: random recursive tree plus `G(n, p)` edges.
pub fn random_graph(n: usize, p: f64, weighted: bool, seed: u64) -> WeightedGraph {
    let mut r: StreamRng = rng::stream(seed, 0xA1);
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    let weight = |r: &mut StreamRng| if weighted { 0.5 + 1.5 * r.random::<f64>() } else { 1.0 };
    for v in 1..n {
        let u = r.random_range(0..v);
        seen.insert((u, v));
        let w = weight(&mut r);
        edges.push((u, v, w));
    }
    for u in 0..n {
        for v in u + 1..n {
            if r.random::<f64>() < p && !seen.contains(&(u, v)) {
                let w = weight(&mut r);
                edges.push((u, v, w));
            }
        }
    }
    WeightedGraph::from_edges(n, edges).unwrap().0
}

/// Classic equilibrium by plain Gaussian elimination on
/// `(I − (I − Α) D⁻¹A) z = Α s`, assembled straight from the adjacency.
pub fn classic_equilibrium_oracle(g: &WeightedGraph, s: &[f64], alpha: &[f64]) -> Vec<f64> {
    let n = g.node_count();
    let mut a = vec![vec![0.0; n + 1]; n];
    for i in 0..n {
        a[i][i] = 1.0;
        for (j, w) in g.neighbors(i) {
            a[i][j] -= (1.0 - alpha[i]) * w / g.degree(i);
        }
        a[i][n] = alpha[i] * s[i];
    }
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
        a.swap(c, p);
        let pivot = a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / pivot;
            if f != 0.0 {
                for k in c..=n {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    let mut z = vec![0.0; n];
    for i in (0..n).rev() {
        let tail: f64 = (i + 1..n).map(|k| a[i][k] * z[k]).sum();
        z[i] = (a[i][n] - tail) / a[i][i];
    }
    z
}
