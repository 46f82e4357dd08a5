//! Random-walk matrix polynomials and the exact equilibrium.
//!
//! For coefficients `β = (β_1, …, β_T)` with `Σβ_r = 1` the generalised
//! transition matrix is `P* = Σ_r β_r P^r` with `P = D⁻¹A`, and the matrix
//! polynomial is `L_β = D − Σ_r β_r D P^r = D (I − P*)`. `L_β` is the
//! Laplacian of a dense graph with loops, so it is symmetric with zero row
//! sums and non-positive off-diagonals.
//!
//! The higher-order equilibrium `z*` solves `(I − (I − Α) P*) z* = Α s`.
//! Everything here is dense and `O(n²)` in memory, so construction refuses
//! graphs above a node cap.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::{axpy, DenseMatrix};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::opinion::OpinionState;

/// Default node cap for dense construction.
pub const DEFAULT_DENSE_CAP: usize = 20_000;

/// Tolerance on `Σβ_r = 1`.
pub const BETA_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialSpec {
    beta: Vec<f64>,
}

impl PolynomialSpec {
    pub fn new(beta: Vec<f64>) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::InvalidPolynomial("at least one coefficient is required"));
        }
        if !beta.iter().all(|b| b.is_finite() && *b >= 0.0) {
            return Err(Error::InvalidPolynomial("coefficients must be non-negative"));
        }
        let sum: f64 = beta.iter().sum();
        if (sum - 1.0).abs() > BETA_SUM_TOLERANCE {
            return Err(Error::InvalidPolynomial("coefficients must sum to 1"));
        }
        Ok(Self { beta })
    }

    /// `β = (1)`: the classic model.
    pub fn classic() -> Self {
        Self { beta: vec![1.0] }
    }

    /// Degree `T`.
    pub fn degree(&self) -> usize {
        self.beta.len()
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// `β_r` for `r ∈ 1..=T`.
    pub fn coefficient(&self, r: usize) -> f64 {
        self.beta[r - 1]
    }
}

/// Which matrix a [`DenseOperator`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// `P*`
    Transition,
    /// `L_β`
    PolynomialLaplacian,
    /// `I − (I − Α) P*`
    System,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    pub kind: OperatorKind,
    pub matrix: DenseMatrix,
}

impl DenseOperator {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Largest `|Σ_j a_ij − target|` over rows.
    pub fn row_sum_deviation(&self, target: f64) -> f64 {
        self.matrix
            .row_sums()
            .iter()
            .fold(0.0, |m, s| m.max((s - target).abs()))
    }

    /// Largest off-diagonal entry.
    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.dim();
        let mut worst = f64::NEG_INFINITY;
        for i in 0..n {
            for (j, &v) in self.matrix.row(i).iter().enumerate() {
                if i != j {
                    worst = worst.max(v);
                }
            }
        }
        worst
    }
}

fn check_cap(g: &WeightedGraph, cap: usize) -> Result<()> {
    if g.node_count() > cap {
        return Err(Error::DenseCapExceeded {
            n: g.node_count(),
            cap,
        });
    }
    Ok(())
}

/// `acc ← acc · P` where `P = D⁻¹A` is applied through the graph's rows.
fn right_multiply_transition(acc: &DenseMatrix, g: &WeightedGraph) -> DenseMatrix {
    let n = g.node_count();
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let src = acc.row(i);
        let dst = out.row_mut(i);
        for (j, &a) in src.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let scale = a / g.degree(j);
            for (k, w) in g.neighbors(j) {
                dst[k] += scale * w;
            }
        }
    }
    out
}

/// `P = D⁻¹A` as a dense matrix.
pub fn dense_transition(g: &WeightedGraph) -> DenseMatrix {
    let n = g.node_count();
    let mut p = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let d = g.degree(i);
        let row = p.row_mut(i);
        for (j, w) in g.neighbors(i) {
            row[j] = w / d;
        }
    }
    p
}

/// `P* = Σ_r β_r P^r` by repeated multiplication of an accumulator by `P`.
pub fn build_transition_polynomial(g: &WeightedGraph, spec: &PolynomialSpec) -> Result<DenseOperator> {
    build_transition_polynomial_capped(g, spec, DEFAULT_DENSE_CAP)
}

pub fn build_transition_polynomial_capped(
    g: &WeightedGraph,
    spec: &PolynomialSpec,
    cap: usize,
) -> Result<DenseOperator> {
    check_cap(g, cap)?;
    if let Some(i) = (0..g.node_count()).find(|&i| g.degree(i) == 0.0) {
        return Err(Error::IsolatedNode(i));
    }
    let n = g.node_count();
    let mut power = dense_transition(g);
    let mut total = DenseMatrix::zeros(n, n);
    for r in 1..=spec.degree() {
        if r > 1 {
            power = right_multiply_transition(&power, g);
        }
        let b = spec.coefficient(r);
        if b != 0.0 {
            for i in 0..n {
                axpy(b, power.row(i), total.row_mut(i));
            }
        }
    }
    Ok(DenseOperator {
        kind: OperatorKind::Transition,
        matrix: total,
    })
}

/// `L_β = D (I − P*)`.
pub fn build_polynomial_laplacian(g: &WeightedGraph, spec: &PolynomialSpec) -> Result<DenseOperator> {
    build_polynomial_laplacian_capped(g, spec, DEFAULT_DENSE_CAP)
}

pub fn build_polynomial_laplacian_capped(
    g: &WeightedGraph,
    spec: &PolynomialSpec,
    cap: usize,
) -> Result<DenseOperator> {
    let p_star = build_transition_polynomial_capped(g, spec, cap)?;
    Ok(laplacian_from_transition(g, &p_star))
}

/// `L_β = D (I − P*)` from an already built `P*`.
pub fn laplacian_from_transition(g: &WeightedGraph, p_star: &DenseOperator) -> DenseOperator {
    let n = g.node_count();
    let mut m = p_star.matrix.clone();
    for i in 0..n {
        let d = g.degree(i);
        let row = m.row_mut(i);
        for v in row.iter_mut() {
            *v = -d * *v;
        }
        row[i] += d;
    }
    DenseOperator {
        kind: OperatorKind::PolynomialLaplacian,
        matrix: m,
    }
}

/// `M = I − (I − Α) P*`.
pub fn system_matrix(p_star: &DenseOperator, state: &OpinionState) -> Result<DenseOperator> {
    let n = p_star.dim();
    state.check_len(n)?;
    let mut m = p_star.matrix.clone();
    for (i, &a) in state.resistance().iter().enumerate() {
        let row = m.row_mut(i);
        for v in row.iter_mut() {
            *v *= -(1.0 - a);
        }
        row[i] += 1.0;
    }
    Ok(DenseOperator {
        kind: OperatorKind::System,
        matrix: m,
    })
}

/// Exact equilibrium of the higher-order model on `g`.
pub fn solve_equilibrium_exact(
    g: &WeightedGraph,
    spec: &PolynomialSpec,
    state: &OpinionState,
) -> Result<Vec<f64>> {
    let p_star = build_transition_polynomial(g, spec)?;
    solve_equilibrium_with(&p_star, state)
}

/// Exact equilibrium for a prebuilt `P*`, by LU factorisation of `M`.
pub fn solve_equilibrium_with(p_star: &DenseOperator, state: &OpinionState) -> Result<Vec<f64>> {
    let m = system_matrix(p_star, state)?;
    m.matrix.into_lu()?.solve(&state.anchored())
}

/// Classic FJ equilibrium `(I − (I − Α) P)⁻¹ Α s`.
pub fn classic_equilibrium(g: &WeightedGraph, state: &OpinionState) -> Result<Vec<f64>> {
    solve_equilibrium_exact(g, &PolynomialSpec::classic(), state)
}

/// `‖M z − Α s‖∞`.
pub fn equilibrium_residual(p_star: &DenseOperator, state: &OpinionState, z: &[f64]) -> Result<f64> {
    let m = system_matrix(p_star, state)?;
    let mz = m.matrix.mul_vec(z);
    Ok(mz
        .iter()
        .zip(state.anchored())
        .fold(0.0, |acc, (l, r)| acc.max((l - r).abs())))
}

/// `σ = Σ|a_i − b_i| / n`.
pub fn mean_absolute_error(exact: &[f64], approx: &[f64]) -> Result<f64> {
    if exact.len() != approx.len() {
        return Err(Error::DimensionMismatch {
            expected: exact.len(),
            actual: approx.len(),
        });
    }
    if exact.is_empty() {
        return Ok(0.0);
    }
    let total: f64 = exact.iter().zip(approx).map(|(a, b)| (a - b).abs()).sum();
    Ok(total / exact.len() as f64)
}

/// `‖a − b‖∞`.
pub fn max_abs_difference(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
