//! Compressed sparse row storage and sparse Laplacians.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::graph::{Edge, WeightedGraph};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    offsets: Vec<usize>,
    columns: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from per-row entry lists. Entries within a row need not be
    /// sorted but must not repeat a column.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let nnz = rows.iter().map(Vec::len).sum();
        let mut columns = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            for (c, v) in row {
                columns.push(c);
                values.push(v);
            }
            offsets.push(columns.len());
        }
        Self {
            n,
            offsets,
            columns,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[i]..self.offsets[i + 1];
        self.columns[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    /// `y = A x`, accumulating each row in column order.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let r = self.offsets[i]..self.offsets[i + 1];
            let mut acc = 0.0;
            for (&c, &v) in self.columns[r.clone()].iter().zip(&self.values[r]) {
                acc += v * x[c];
            }
            *yi = acc;
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m.set(i, j, v);
            }
        }
        m
    }
}

/// Laplacian of a weighted graph without self-loops, held as its edge list.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseLaplacian {
    n: usize,
    edges: Vec<Edge>,
    diagonal: Vec<f64>,
}

impl SparseLaplacian {
    /// `edges` must be canonical (`u < v`), distinct, with positive weights.
    pub fn from_edges(n: usize, mut edges: Vec<Edge>) -> Self {
        edges.sort_by(|a, b| (a.u, a.v).cmp(&(b.u, b.v)));
        let mut diagonal = vec![0.0; n];
        for e in &edges {
            diagonal[e.u] += e.weight;
            diagonal[e.v] += e.weight;
        }
        Self { n, edges, diagonal }
    }

    /// `L = D − A` of `g`.
    pub fn of_graph(g: &WeightedGraph) -> Self {
        Self::from_edges(g.node_count(), g.edges().to_vec())
    }

    pub fn empty(n: usize) -> Self {
        Self::from_edges(n, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `L_ii`, the weighted degree in the sparse graph.
    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                weight: e.weight * factor,
                ..*e
            })
            .collect();
        Self::from_edges(self.n, edges)
    }

    /// `xᵀ L x = Σ_e w_e (x_u − x_v)²`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.edges
            .iter()
            .map(|e| {
                let d = x[e.u] - x[e.v];
                e.weight * d * d
            })
            .sum()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n, self.n);
        for (i, &d) in self.diagonal.iter().enumerate() {
            m.set(i, i, d);
        }
        for e in &self.edges {
            m.set(e.u, e.v, m.get(e.u, e.v) - e.weight);
            m.set(e.v, e.u, m.get(e.v, e.u) - e.weight);
        }
        m
    }

    /// Adjacency rows `(neighbour, weight)` of the sparse graph.
    pub fn adjacency_rows(&self) -> Vec<Vec<(usize, f64)>> {
        let mut rows = vec![Vec::new(); self.n];
        for e in &self.edges {
            rows[e.u].push((e.v, e.weight));
            rows[e.v].push((e.u, e.weight));
        }
        rows
    }
}
