//! Weighted undirected graphs.
//!
//! [`WeightedGraph`] stores a simple undirected graph in compressed sparse row
//! form. Each adjacency row is sorted by neighbour id and carries a running
//! prefix sum of edge weights, so a neighbour can be drawn with probability
//! `w_uv / d_u` by one binary search.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};

/// An undirected edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// What ingestion did to the raw edge list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub input_edges: usize,
    pub self_loops_dropped: usize,
    /// Raw edges folded into an existing edge (duplicates and reciprocals).
    pub duplicates_merged: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    /// Per-row inclusive prefix sums of `weights`.
    cumulative: Vec<f64>,
    degree: Vec<f64>,
    edges: Vec<Edge>,
    /// Inclusive prefix sums of edge weights in `edges` order.
    edge_cumulative: Vec<f64>,
}

impl WeightedGraph {
    /// Builds a simple graph on `n` nodes.
    ///
    /// Self-loops are dropped and repeated node pairs (in either orientation)
    /// are merged into one edge whose weight is the sum of the parts.
    pub fn from_edges<I>(n: usize, raw: I) -> Result<(Self, IngestStats)>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut stats = IngestStats::default();
        let mut pairs = Vec::new();
        for (u, v, w) in raw {
            stats.input_edges += 1;
            for id in [u, v] {
                if id >= n {
                    return Err(Error::NodeOutOfRange { id, n });
                }
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::NonPositiveWeight { u, v, weight: w });
            }
            if u == v {
                stats.self_loops_dropped += 1;
                continue;
            }
            pairs.push(Edge {
                u: u.min(v),
                v: u.max(v),
                weight: w,
            });
        }
        pairs.sort_by(|a, b| (a.u, a.v).cmp(&(b.u, b.v)));

        let mut edges: Vec<Edge> = Vec::with_capacity(pairs.len());
        for e in pairs {
            match edges.last_mut() {
                Some(last) if last.u == e.u && last.v == e.v => {
                    last.weight += e.weight;
                    stats.duplicates_merged += 1;
                }
                _ => edges.push(e),
            }
        }
        if edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        Ok((Self::from_simple_edges(n, edges), stats))
    }

    /// `edges` must already be simple, canonical (`u < v`) and sorted.
    fn from_simple_edges(n: usize, edges: Vec<Edge>) -> Self {
        let mut counts = vec![0usize; n + 1];
        for e in &edges {
            counts[e.u + 1] += 1;
            counts[e.v + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let offsets = counts;
        let mut fill = offsets.clone();
        let mut targets = vec![0usize; 2 * edges.len()];
        let mut weights = vec![0.0; 2 * edges.len()];
        // Edges are sorted by (u, v), so filling in edge order keeps every row
        // sorted: row x receives all smaller neighbours (edges with u < x)
        // before any larger one.
        for e in &edges {
            for (x, y) in [(e.u, e.v), (e.v, e.u)] {
                targets[fill[x]] = y;
                weights[fill[x]] = e.weight;
                fill[x] += 1;
            }
        }

        let mut cumulative = vec![0.0; weights.len()];
        let mut degree = vec![0.0; n];
        for x in 0..n {
            let mut acc = 0.0;
            for k in offsets[x]..offsets[x + 1] {
                acc += weights[k];
                cumulative[k] = acc;
            }
            degree[x] = acc;
        }

        let mut edge_cumulative = Vec::with_capacity(edges.len());
        let mut acc = 0.0;
        for e in &edges {
            acc += e.weight;
            edge_cumulative.push(acc);
        }

        Self {
            offsets,
            targets,
            weights,
            cumulative,
            degree,
            edges,
            edge_cumulative,
        }
    }

    pub fn node_count(&self) -> usize {
        self.degree.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degree(&self, u: usize) -> f64 {
        self.degree[u]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degree
    }

    /// Sum of all edge weights (each edge counted once).
    pub fn total_weight(&self) -> f64 {
        self.edge_cumulative.last().copied().unwrap_or(0.0)
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[u]..self.offsets[u + 1];
        self.targets[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    pub fn neighbor_count(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    /// Weight of edge `(u, v)`, if present.
    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        let range = self.offsets[u]..self.offsets[u + 1];
        let row = &self.targets[range.clone()];
        row.binary_search(&v)
            .ok()
            .map(|k| self.weights[range.start + k])
    }

    fn check_node(&self, u: usize) -> Result<()> {
        if u >= self.node_count() {
            return Err(Error::NodeOutOfRange {
                id: u,
                n: self.node_count(),
            });
        }
        Ok(())
    }

    /// Component label per node; labels are assigned in order of each
    /// component's smallest node id.
    pub fn component_labels(&self) -> (Vec<usize>, usize) {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        let mut next = 0;
        for root in 0..n {
            if label[root] != usize::MAX {
                continue;
            }
            label[root] = next;
            queue.push_back(root);
            while let Some(x) = queue.pop_front() {
                for (y, _) in self.neighbors(x) {
                    if label[y] == usize::MAX {
                        label[y] = next;
                        queue.push_back(y);
                    }
                }
            }
            next += 1;
        }
        (label, next)
    }

    pub fn is_connected(&self) -> bool {
        self.component_labels().1 == 1
    }

    /// Induced subgraph on the largest connected component.
    ///
    /// Returns the subgraph with ids compacted in increasing order, and for
    /// each new id the id it had in `self`. Equal-size components are broken
    /// in favour of the one containing the smallest node id.
    pub fn largest_connected_component(&self) -> (WeightedGraph, Vec<usize>) {
        let (label, count) = self.component_labels();
        let mut sizes = vec![0usize; count];
        for &l in &label {
            sizes[l] += 1;
        }
        // Labels follow smallest member id, so the first maximum wins ties.
        let mut best = 0;
        for (l, &s) in sizes.iter().enumerate() {
            if s > sizes[best] {
                best = l;
            }
        }
        let kept: Vec<usize> = (0..self.node_count()).filter(|&x| label[x] == best).collect();
        let mut new_id = vec![usize::MAX; self.node_count()];
        for (i, &x) in kept.iter().enumerate() {
            new_id[x] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| label[e.u] == best)
            .map(|e| Edge {
                u: new_id[e.u],
                v: new_id[e.v],
                weight: e.weight,
            })
            .collect();
        (Self::from_simple_edges(kept.len(), edges), kept)
    }

    /// Draws a neighbour of `u` with probability `w_uv / d_u`.
    pub fn sample_neighbor<R: Rng + ?Sized>(&self, u: usize, rng: &mut R) -> Result<usize> {
        self.check_node(u)?;
        let (start, end) = (self.offsets[u], self.offsets[u + 1]);
        if start == end {
            return Err(Error::IsolatedNode(u));
        }
        Ok(self.sample_row(start, end, rng))
    }

    #[inline]
    fn sample_row<R: Rng + ?Sized>(&self, start: usize, end: usize, rng: &mut R) -> usize {
        let row = &self.cumulative[start..end];
        let x = rng.random::<f64>() * row[row.len() - 1];
        let k = row.partition_point(|&c| c <= x).min(row.len() - 1);
        self.targets[start + k]
    }

    /// One walk step returning the next node and the traversed edge weight.
    /// Caller guarantees `u` is valid and not isolated.
    #[inline]
    pub(crate) fn step<R: Rng + ?Sized>(&self, u: usize, rng: &mut R) -> (usize, f64) {
        let (start, end) = (self.offsets[u], self.offsets[u + 1]);
        let row = &self.cumulative[start..end];
        let x = rng.random::<f64>() * row[row.len() - 1];
        let k = start + row.partition_point(|&c| c <= x).min(row.len() - 1);
        (self.targets[k], self.weights[k])
    }

    /// Endpoint of a `steps`-step random walk from `start`.
    pub fn random_walk<R: Rng + ?Sized>(&self, start: usize, steps: usize, rng: &mut R) -> Result<usize> {
        let mut walker = RandomWalk::new(self, start, rng)?;
        for _ in 0..steps {
            walker.step()?;
        }
        Ok(walker.current())
    }

    /// Full visited path `(start, ..., end)` of a `steps`-step random walk.
    pub fn random_walk_path<R: Rng + ?Sized>(
        &self,
        start: usize,
        steps: usize,
        rng: &mut R,
    ) -> Result<Vec<usize>> {
        let mut walker = RandomWalk::new(self, start, rng)?;
        let mut path = Vec::with_capacity(steps + 1);
        path.push(start);
        for _ in 0..steps {
            path.push(walker.step()?);
        }
        Ok(path)
    }

    /// Index into [`edges`](Self::edges), uniformly.
    pub fn sample_edge_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.random_range(0..self.edges.len())
    }

    /// Index into [`edges`](Self::edges) with probability `w_e / Σw`.
    pub fn sample_edge_weighted<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let x = rng.random::<f64>() * self.total_weight();
        self.edge_cumulative
            .partition_point(|&c| c <= x)
            .min(self.edges.len() - 1)
    }
}

/// A walker positioned on a node of a graph, owning its random stream.
#[derive(Debug)]
pub struct RandomWalk<'g, R: ?Sized> {
    graph: &'g WeightedGraph,
    current: usize,
    rng: &'g mut R,
}

impl<'g, R: Rng + ?Sized> RandomWalk<'g, R> {
    pub fn new(graph: &'g WeightedGraph, start: usize, rng: &'g mut R) -> Result<Self> {
        graph.check_node(start)?;
        Ok(Self {
            graph,
            current: start,
            rng,
        })
    }

    pub fn current(&self) -> usize {
        self.current
    }

    pub fn step(&mut self) -> Result<usize> {
        self.current = self.graph.sample_neighbor(self.current, self.rng)?;
        Ok(self.current)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn graph(n: usize, edges: &[(usize, usize, f64)]) -> WeightedGraph {
        WeightedGraph::from_edges(n, edges.iter().copied()).unwrap().0
    }

    #[test]
    fn path_graph_ingest() {
        let g = graph(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert!(g.edges().iter().all(|e| e.weight == 1.0));
        assert_eq!(g.degrees(), &[1.0, 2.0, 1.0]);
    }

    #[test]
    fn reciprocal_edges_merge_by_sum() {
        let (g, stats) = WeightedGraph::from_edges(2, [(0, 1, 2.0), (1, 0, 3.0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.weight(0, 1), Some(5.0));
        assert_eq!(g.weight(1, 0), Some(5.0));
        assert_eq!(stats.duplicates_merged, 1);
    }

    #[test]
    fn self_loops_are_dropped_and_counted() {
        let (g, stats) =
            WeightedGraph::from_edges(3, [(0, 0, 1.0), (0, 1, 1.0), (2, 2, 4.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(stats.self_loops_dropped, 2);
        assert_eq!(g.degree(0), 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            WeightedGraph::from_edges(2, [(0, 1, 0.0)]).unwrap_err(),
            Error::NonPositiveWeight { u: 0, v: 1, weight: 0.0 }
        );
        assert!(matches!(
            WeightedGraph::from_edges(2, [(0, 1, -1.0)]),
            Err(Error::NonPositiveWeight { .. })
        ));
        assert_eq!(
            WeightedGraph::from_edges(2, [(0, 0, 1.0)]).unwrap_err(),
            Error::EmptyGraph
        );
        assert_eq!(
            WeightedGraph::from_edges(2, [(0, 2, 1.0)]).unwrap_err(),
            Error::NodeOutOfRange { id: 2, n: 2 }
        );
    }

    #[test]
    fn rows_are_sorted_with_prefix_sums() {
        let g = graph(4, &[(2, 3, 1.0), (0, 2, 2.0), (1, 2, 0.5)]);
        let row: Vec<_> = g.neighbors(2).collect();
        assert_eq!(row, vec![(0, 2.0), (1, 0.5), (3, 1.0)]);
        assert_eq!(g.degree(2), 3.5);
        assert_eq!(g.weight(2, 1), Some(0.5));
        assert_eq!(g.weight(0, 1), None);
    }

    #[test]
    fn lcc_identity_on_connected_graph() {
        let g = graph(3, &[(0, 1, 1.0), (1, 2, 2.0)]);
        let (h, kept) = g.largest_connected_component();
        assert_eq!(kept, vec![0, 1, 2]);
        assert_eq!(h.edges(), g.edges());
    }

    #[test]
    fn lcc_picks_larger_component() {
        let g = graph(5, &[(3, 4, 1.0), (0, 1, 1.0), (1, 2, 1.0)]);
        let (h, kept) = g.largest_connected_component();
        assert_eq!(kept, vec![0, 1, 2]);
        assert_eq!(h.node_count(), 3);
        assert!(h.is_connected());

        let g = graph(5, &[(0, 1, 1.0), (2, 3, 1.0), (3, 4, 1.0)]);
        let (_, kept) = g.largest_connected_component();
        assert_eq!(kept, vec![2, 3, 4]);
    }

    #[test]
    fn lcc_tie_goes_to_smallest_id() {
        let g = graph(4, &[(2, 3, 1.0), (0, 1, 1.0)]);
        let (_, kept) = g.largest_connected_component();
        assert_eq!(kept, vec![0, 1]);
        let g = graph(5, &[(3, 4, 1.0), (1, 2, 1.0)]);
        let (_, kept) = g.largest_connected_component();
        assert_eq!(kept, vec![1, 2]);
    }

    #[test]
    fn isolated_node_cannot_be_sampled() {
        let g = graph(3, &[(0, 1, 1.0)]);
        let mut r = rng::stream(0, 0);
        assert_eq!(g.sample_neighbor(2, &mut r), Err(Error::IsolatedNode(2)));
        assert!(matches!(g.sample_neighbor(9, &mut r), Err(Error::NodeOutOfRange { .. })));
    }

    #[test]
    fn walks() {
        let g = graph(2, &[(0, 1, 1.0)]);
        let mut r = rng::stream(1, 0);
        assert_eq!(g.random_walk(0, 0, &mut r).unwrap(), 0);
        assert_eq!(g.random_walk(0, 1, &mut r).unwrap(), 1);
        assert_eq!(g.random_walk_path(0, 3, &mut r).unwrap(), vec![0, 1, 0, 1]);
    }
}
