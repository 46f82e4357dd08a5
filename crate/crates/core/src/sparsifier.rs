//! Path-sampling sparsification of random-walk matrix polynomials.
//!
//! Each of `M` samples draws a walk length `r ∈ 1..=T`, an edge `e = (u, v)`
//! of the graph and a split position `k ∈ 1..=r`, then extends `e` into a
//! length-`r` path by walking `k − 1` steps from `u` and `r − k` steps from
//! `v`. The endpoints `(u_0, u_r)` become an edge of the sparsifier, weighted
//! by the inverse of the probability of drawing that path so that
//! `E[L̃] = L_β`. The path statistic
//!
//! > Z(p) = Σ_{i=1}^{r} 2 / a_{u_{i−1} u_i}
//!
//! is what makes uniform edge picking unbiased on weighted graphs: summed
//! over the `r` positions the edge could have occupied, the probability of a
//! path is proportional to `Z(p)` times its contribution to `L_β`.
//!
//! Parallel construction splits the budget over workers with independent
//! random streams; partial results merge by summing weights per node pair
//! in worker order, so the output depends only on `(seed, workers)`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use hashbrown::HashMap;
use rand::Rng;
use rustc_hash::FxBuildHasher;

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::graph::{Edge, WeightedGraph};
use crate::polynomial::{build_polynomial_laplacian, DenseOperator, DEFAULT_DENSE_CAP};
use crate::rng::{self, StreamRng};
use crate::sparse::SparseLaplacian;

/// How edges and walk lengths are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingMode {
    /// Edge uniform over `E`, `r` uniform over `1..=T`; sample weight
    /// `2 r m T β_r / (M Z)`.
    #[default]
    LiteralUniform,
    /// Edge with probability `w_e / Σw`, `r` with probability `β_r`; sample
    /// weight `Σw / M`.
    WeightProportional,
}

impl SamplingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::LiteralUniform => "literal-uniform",
            Self::WeightProportional => "weight-proportional",
        }
    }
}

impl fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal-uniform" => Ok(Self::LiteralUniform),
            "weight-proportional" => Ok(Self::WeightProportional),
            _ => Err(Error::InvalidConfig(
                "sampling mode must be literal-uniform or weight-proportional",
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparsifierConfig {
    /// Number of samples `M`.
    pub budget: usize,
    pub mode: SamplingMode,
    pub seed: u64,
    /// Estimate spectral similarity after construction (dense, `O(n²)`).
    pub record_diagnostics: bool,
}

impl SparsifierConfig {
    pub fn new(budget: usize, seed: u64) -> Self {
        Self {
            budget,
            mode: SamplingMode::default(),
            seed,
            record_diagnostics: false,
        }
    }

    /// `M = k · T · m`.
    pub fn with_multiplier(k: usize, degree: usize, edges: usize, seed: u64) -> Self {
        Self::new(k * degree * edges, seed)
    }
}

/// A sampled length-`r` walk `(u_0, …, u_r)` and its statistic `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    pub nodes: Vec<usize>,
    /// Position `k ∈ 1..=r` of the seed edge: it joins `nodes[k-1]` and `nodes[k]`.
    pub split: usize,
    pub z: f64,
}

impl SampledPath {
    pub fn length(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }
}

fn pick_edge<R: Rng + ?Sized>(g: &WeightedGraph, mode: SamplingMode, rng: &mut R) -> Edge {
    let idx = match mode {
        SamplingMode::LiteralUniform => g.sample_edge_uniform(rng),
        SamplingMode::WeightProportional => g.sample_edge_weighted(rng),
    };
    g.edges()[idx]
}

/// Draws one length-`r` path through an edge picked according to `mode`.
pub fn path_sample<R: Rng + ?Sized>(
    g: &WeightedGraph,
    r: usize,
    mode: SamplingMode,
    rng: &mut R,
) -> Result<SampledPath> {
    if r == 0 {
        return Err(Error::InvalidConfig("path length must be at least 1"));
    }
    let e = pick_edge(g, mode, rng);
    let k = rng.random_range(1..=r);
    let mut z = 2.0 / e.weight;

    let mut back = Vec::with_capacity(k);
    back.push(e.u);
    let mut cur = e.u;
    for _ in 1..k {
        let (next, w) = g.step(cur, rng);
        z += 2.0 / w;
        back.push(next);
        cur = next;
    }
    back.reverse();

    let mut nodes = back;
    nodes.reserve(r + 1 - k);
    nodes.push(e.v);
    let mut cur = e.v;
    for _ in k..r {
        let (next, w) = g.step(cur, rng);
        z += 2.0 / w;
        nodes.push(next);
        cur = next;
    }
    Ok(SampledPath { nodes, split: k, z })
}

/// Endpoints and `Z` of a sampled path without materialising it. Consumes the
/// random stream exactly as [`path_sample`] does.
#[inline]
fn sample_endpoints<R: Rng + ?Sized>(
    g: &WeightedGraph,
    r: usize,
    mode: SamplingMode,
    rng: &mut R,
) -> (usize, usize, f64) {
    let e = pick_edge(g, mode, rng);
    let k = rng.random_range(1..=r);
    let mut z = 2.0 / e.weight;
    let mut head = e.u;
    for _ in 1..k {
        let (next, w) = g.step(head, rng);
        z += 2.0 / w;
        head = next;
    }
    let mut tail = e.v;
    for _ in k..r {
        let (next, w) = g.step(tail, rng);
        z += 2.0 / w;
        tail = next;
    }
    (head, tail, z)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparsifierOutput {
    pub laplacian: SparseLaplacian,
    /// Distinct node pairs in `L̃`; never exceeds the budget.
    pub merged_edge_count: usize,
    /// Samples with `u_0 = u_r`, which contribute nothing to a Laplacian.
    pub self_loop_samples: usize,
    /// Samples whose weight was zero because `β_r = 0`.
    pub zero_weight_samples: usize,
    /// Samples drawn per walk length `r = 1..=T`; sums to the budget.
    pub per_r_counts: Vec<usize>,
    pub epsilon_estimate: Option<f64>,
    pub config: SparsifierConfig,
    pub workers: usize,
}

/// Weighted pair counts from one worker's share of the budget.
#[derive(Debug, Clone)]
pub struct PartialSparsifier {
    weights: HashMap<(usize, usize), f64, FxBuildHasher>,
    self_loop_samples: usize,
    zero_weight_samples: usize,
    per_r_counts: Vec<usize>,
}

/// Splits a sparsifier budget into per-worker chunks with their own streams.
#[derive(Debug, Clone)]
pub struct SparsifierPlan<'a> {
    graph: &'a WeightedGraph,
    beta: Vec<f64>,
    /// Cumulative `β` for length selection proportional to `β_r`.
    beta_cumulative: Vec<f64>,
    config: SparsifierConfig,
    workers: usize,
}

impl<'a> SparsifierPlan<'a> {
    pub fn new(
        graph: &'a WeightedGraph,
        spec: &crate::PolynomialSpec,
        config: SparsifierConfig,
        workers: usize,
    ) -> Result<Self> {
        if config.budget == 0 {
            return Err(Error::InvalidConfig("sample budget M must be at least 1"));
        }
        if spec.beta().iter().all(|&b| b == 0.0) {
            return Err(Error::InvalidPolynomial("all coefficients are zero"));
        }
        if workers == 0 {
            return Err(Error::InvalidConfig("at least one worker is required"));
        }
        if graph.edge_count() == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut acc = 0.0;
        let beta_cumulative = spec
            .beta()
            .iter()
            .map(|b| {
                acc += b;
                acc
            })
            .collect();
        Ok(Self {
            graph,
            beta: spec.beta().to_vec(),
            beta_cumulative,
            config,
            workers,
        })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Number of samples assigned to `worker`.
    pub fn chunk_len(&self, worker: usize) -> usize {
        let base = self.config.budget / self.workers;
        base + usize::from(worker < self.config.budget % self.workers)
    }

    fn draw_length(&self, rng: &mut StreamRng) -> usize {
        match self.config.mode {
            SamplingMode::LiteralUniform => rng.random_range(1..=self.beta.len()),
            SamplingMode::WeightProportional => {
                let total = self.beta_cumulative[self.beta.len() - 1];
                let x = rng.random::<f64>() * total;
                // Zero-coefficient lengths have empty intervals and are never hit.
                1 + self
                    .beta_cumulative
                    .partition_point(|&c| c <= x)
                    .min(self.beta.len() - 1)
            }
        }
    }

    /// Runs `worker`'s share of the budget on its own stream.
    pub fn sample_chunk(&self, worker: usize) -> PartialSparsifier {
        let g = self.graph;
        let t = self.beta.len();
        let m = g.edge_count() as f64;
        let budget = self.config.budget as f64;
        let stream = rng::SPARSIFIER_STREAM_BASE + worker as u64;
        let mut rng = rng::stream(self.config.seed, stream);

        let mut part = PartialSparsifier {
            weights: HashMap::with_hasher(FxBuildHasher),
            self_loop_samples: 0,
            zero_weight_samples: 0,
            per_r_counts: vec![0; t],
        };
        for _ in 0..self.chunk_len(worker) {
            let r = self.draw_length(&mut rng);
            part.per_r_counts[r - 1] += 1;
            let beta_r = self.beta[r - 1];
            if beta_r == 0.0 {
                part.zero_weight_samples += 1;
                continue;
            }
            let (a, b, z) = sample_endpoints(g, r, self.config.mode, &mut rng);
            if a == b {
                part.self_loop_samples += 1;
                continue;
            }
            let w = match self.config.mode {
                SamplingMode::LiteralUniform => {
                    2.0 * r as f64 * m * t as f64 * beta_r / (budget * z)
                }
                SamplingMode::WeightProportional => g.total_weight() / budget,
            };
            *part.weights.entry((a.min(b), a.max(b))).or_insert(0.0) += w;
        }
        part
    }

    /// Merges worker results (in worker order) into the sparsifier.
    pub fn merge(&self, parts: Vec<PartialSparsifier>) -> SparsifierOutput {
        let t = self.beta.len();
        let mut per_r_counts = vec![0; t];
        let mut self_loop_samples = 0;
        let mut zero_weight_samples = 0;
        let mut merged: HashMap<(usize, usize), f64, FxBuildHasher> =
            HashMap::with_hasher(FxBuildHasher);
        for part in &parts {
            for (total, c) in per_r_counts.iter_mut().zip(&part.per_r_counts) {
                *total += c;
            }
            self_loop_samples += part.self_loop_samples;
            zero_weight_samples += part.zero_weight_samples;
            // Each key receives its partial sums in worker order.
            for (key, w) in &part.weights {
                *merged.entry(*key).or_insert(0.0) += w;
            }
        }
        let edges: Vec<Edge> = merged
            .into_iter()
            .map(|((u, v), weight)| Edge { u, v, weight })
            .collect();
        let laplacian = SparseLaplacian::from_edges(self.graph.node_count(), edges);
        SparsifierOutput {
            merged_edge_count: laplacian.edges().len(),
            laplacian,
            self_loop_samples,
            zero_weight_samples,
            per_r_counts,
            epsilon_estimate: None,
            config: self.config,
            workers: self.workers,
        }
    }

    /// Runs every chunk sequentially and merges.
    pub fn run(&self) -> SparsifierOutput {
        let parts = (0..self.workers).map(|w| self.sample_chunk(w)).collect();
        self.merge(parts)
    }
}

/// Single-stream sparsifier for `L_β` of `g`.
pub fn build_sparsifier(
    g: &WeightedGraph,
    spec: &crate::PolynomialSpec,
    config: SparsifierConfig,
) -> Result<SparsifierOutput> {
    let mut out = SparsifierPlan::new(g, spec, config, 1)?.run();
    if config.record_diagnostics {
        record_epsilon_estimate(g, spec, &mut out)?;
    }
    Ok(out)
}

/// Probe count used for [`SparsifierOutput::epsilon_estimate`].
pub const DIAGNOSTIC_PROBES: usize = 32;

/// Fills `epsilon_estimate` by comparing against the dense `L_β`.
pub fn record_epsilon_estimate(
    g: &WeightedGraph,
    spec: &crate::PolynomialSpec,
    out: &mut SparsifierOutput,
) -> Result<()> {
    let l_beta = build_polynomial_laplacian(g, spec)?;
    let mut probe = rng::stream(out.config.seed, rng::PROBE_STREAM);
    let report = spectral_similarity_check(&l_beta, &out.laplacian, DIAGNOSTIC_PROBES, &mut probe)?;
    out.epsilon_estimate = Some(report.epsilon_estimate());
    Ok(())
}

/// Extremes of `xᵀL_β x / xᵀL̃ x` over random probes orthogonal to `1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityReport {
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// Probes with `xᵀL̃x = 0`; a positive count means `L̃` is disconnected
    /// and `max_ratio` is infinite.
    pub degenerate_probes: usize,
}

impl SimilarityReport {
    /// `ε̂ = max(max_ratio − 1, 1 − min_ratio)`.
    pub fn epsilon_estimate(&self) -> f64 {
        (self.max_ratio - 1.0).max(1.0 - self.min_ratio)
    }
}

pub fn spectral_similarity_check<R: Rng + ?Sized>(
    l_beta: &DenseOperator,
    l_tilde: &SparseLaplacian,
    trials: usize,
    rng: &mut R,
) -> Result<SimilarityReport> {
    let n = l_beta.dim();
    if l_tilde.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: l_tilde.dim(),
        });
    }
    if trials == 0 {
        return Err(Error::InvalidConfig("at least one probe is required"));
    }
    let mut report = SimilarityReport {
        max_ratio: f64::NEG_INFINITY,
        min_ratio: f64::INFINITY,
        degenerate_probes: 0,
    };
    let mut x = vec![0.0; n];
    for _ in 0..trials {
        for xi in x.iter_mut() {
            *xi = rng.random::<f64>() * 2.0 - 1.0;
        }
        let mean = x.iter().sum::<f64>() / n as f64;
        x.iter_mut().for_each(|xi| *xi -= mean);

        let num = l_beta.matrix.quadratic_form(&x);
        let den = l_tilde.quadratic_form(&x);
        let scale: f64 = x.iter().map(|v| v * v).sum();
        if den <= 1e-14 * scale {
            report.degenerate_probes += 1;
            report.max_ratio = f64::INFINITY;
            continue;
        }
        let ratio = num / den;
        report.max_ratio = report.max_ratio.max(ratio);
        report.min_ratio = report.min_ratio.min(ratio);
    }
    if report.degenerate_probes == trials {
        report.min_ratio = f64::INFINITY;
    }
    Ok(report)
}

/// Largest singular value of `D⁻¹(L̃ − L_β)`, by power iteration on `BᵀB`.
pub fn singular_gap_estimate(
    g: &WeightedGraph,
    l_beta: &DenseOperator,
    l_tilde: &SparseLaplacian,
) -> Result<f64> {
    let n = g.node_count();
    if n > DEFAULT_DENSE_CAP {
        return Err(Error::DenseCapExceeded {
            n,
            cap: DEFAULT_DENSE_CAP,
        });
    }
    for d in [l_beta.dim(), l_tilde.dim()] {
        if d != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: d,
            });
        }
    }
    let mut b = l_tilde.to_dense();
    for i in 0..n {
        let inv = 1.0 / g.degree(i);
        let lb = l_beta.matrix.row(i);
        for (v, &l) in b.row_mut(i).iter_mut().zip(lb) {
            *v = (*v - l) * inv;
        }
    }
    Ok(largest_singular_value(&b))
}

pub(crate) fn largest_singular_value(b: &DenseMatrix) -> f64 {
    let n = b.cols();
    if b.as_slice().iter().all(|&v| v == 0.0) {
        return 0.0;
    }
    let mut probe = rng::stream(0x5eed, rng::PROBE_STREAM);
    let mut v: Vec<f64> = (0..n).map(|_| probe.random::<f64>() - 0.5).collect();
    normalize(&mut v);
    let mut sigma = 0.0;
    for _ in 0..5000 {
        let bv = b.mul_vec(&v);
        let mut w = b.mul_transpose_vec(&bv);
        let norm = normalize(&mut w);
        let next = libm::sqrt(norm);
        v = w;
        if (next - sigma).abs() <= 1e-12 * next {
            return next;
        }
        sigma = next;
    }
    sigma
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = libm::sqrt(v.iter().map(|x| x * x).sum());
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::PolynomialSpec;

    fn triangle() -> WeightedGraph {
        WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
            .unwrap()
            .0
    }

    #[test]
    fn single_step_path_is_the_edge() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 4.0), (1, 2, 0.5)]).unwrap().0;
        let mut r = rng::stream(3, 0);
        for _ in 0..50 {
            let p = path_sample(&g, 1, SamplingMode::LiteralUniform, &mut r).unwrap();
            assert_eq!(p.length(), 1);
            let w = g.weight(p.nodes[0], p.nodes[1]).unwrap();
            assert_eq!(p.z, 2.0 / w);
            assert_eq!(p.split, 1);
        }
    }

    #[test]
    fn two_node_graph_two_steps() {
        let g = WeightedGraph::from_edges(2, [(0, 1, 2.5)]).unwrap().0;
        let mut r = rng::stream(4, 0);
        for _ in 0..20 {
            let p = path_sample(&g, 2, SamplingMode::LiteralUniform, &mut r).unwrap();
            let (a, b) = p.endpoints();
            assert_eq!(a, b);
            assert_eq!(p.z, 2.0 / 2.5 + 2.0 / 2.5);
        }
    }

    #[test]
    fn unit_triangle_two_steps_has_z_four() {
        let g = triangle();
        let mut r = rng::stream(5, 0);
        for _ in 0..50 {
            let p = path_sample(&g, 2, SamplingMode::WeightProportional, &mut r).unwrap();
            assert_eq!(p.z, 4.0);
            for w in p.nodes.windows(2) {
                assert!(g.weight(w[0], w[1]).is_some());
            }
        }
    }

    #[test]
    fn zero_length_is_rejected() {
        let mut r = rng::stream(0, 0);
        assert!(path_sample(&triangle(), 0, SamplingMode::LiteralUniform, &mut r).is_err());
    }

    #[test]
    fn endpoint_sampler_matches_full_path() {
        let g = WeightedGraph::from_edges(5, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5), (3, 4, 1.0), (0, 4, 3.0)])
            .unwrap()
            .0;
        for mode in [SamplingMode::LiteralUniform, SamplingMode::WeightProportional] {
            let mut a = rng::stream(11, 0);
            let mut b = rng::stream(11, 0);
            for r in [1, 2, 3, 5] {
                let p = path_sample(&g, r, mode, &mut a).unwrap();
                let (u, v, z) = sample_endpoints(&g, r, mode, &mut b);
                assert_eq!((u, v), p.endpoints());
                assert!((z - p.z).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_empty_budget_and_zero_beta() {
        let g = triangle();
        let spec = PolynomialSpec::classic();
        assert!(build_sparsifier(&g, &spec, SparsifierConfig::new(0, 1)).is_err());
    }

    #[test]
    fn identical_laplacians_have_unit_ratios() {
        let g = triangle();
        let spec = PolynomialSpec::classic();
        let l = build_polynomial_laplacian(&g, &spec).unwrap();
        let lt = SparseLaplacian::of_graph(&g);
        let mut r = rng::stream(1, 9);
        let rep = spectral_similarity_check(&l, &lt, 10, &mut r).unwrap();
        assert!((rep.max_ratio - 1.0).abs() < 1e-12);
        assert!((rep.min_ratio - 1.0).abs() < 1e-12);
        let rep = spectral_similarity_check(&l, &lt.scaled(2.0), 10, &mut r).unwrap();
        assert!((rep.max_ratio - 0.5).abs() < 1e-12 && (rep.min_ratio - 0.5).abs() < 1e-12);
        assert!((rep.epsilon_estimate() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn disconnected_sparsifier_is_reported() {
        let g = triangle();
        let l = build_polynomial_laplacian(&g, &PolynomialSpec::classic()).unwrap();
        let mut r = rng::stream(1, 9);
        let rep = spectral_similarity_check(&l, &SparseLaplacian::empty(3), 4, &mut r).unwrap();
        assert_eq!(rep.degenerate_probes, 4);
        assert!(rep.max_ratio.is_infinite());
    }

    #[test]
    fn gap_is_zero_for_exact_laplacian() {
        let g = triangle();
        let l = build_polynomial_laplacian(&g, &PolynomialSpec::classic()).unwrap();
        let gap = singular_gap_estimate(&g, &l, &SparseLaplacian::of_graph(&g)).unwrap();
        assert!(gap < 1e-12);
    }
}
