//! Opinion iteration and its error bounds.
//!
//! The update `x(t+1) = Α s + (I − Α) P x(t)` is run against any
//! [`TransitionOperator`]: the dense `P*` or the sparse
//! `P̃ = I − D⁻¹ L̃` built from a sparsifier, where `D` is the degree matrix
//! of the original graph.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::polynomial::{max_abs_difference, solve_equilibrium_with, DenseOperator};
use crate::sparse::{CsrMatrix, SparseLaplacian};
use crate::OpinionState;

pub trait TransitionOperator {
    fn dim(&self) -> usize;

    /// `out = P x`.
    fn apply(&self, x: &[f64], out: &mut [f64]);
}

impl TransitionOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.matrix.rows()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.matrix.mul_vec_into(x, out);
    }
}

/// `P̃ = I − D⁻¹ L̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseTransition {
    matrix: CsrMatrix,
    /// Entries below zero, which occur on the diagonal when `L̃_ii > d_i`.
    pub negative_entry_count: usize,
}

impl SparseTransition {
    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }
}

impl TransitionOperator for SparseTransition {
    fn dim(&self) -> usize {
        self.matrix.dim()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        self.matrix.mul_vec_into(x, out);
    }
}

pub fn build_sparse_transition(g: &WeightedGraph, l_tilde: &SparseLaplacian) -> Result<SparseTransition> {
    let n = g.node_count();
    if l_tilde.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: l_tilde.dim(),
        });
    }
    let mut rows = l_tilde.adjacency_rows();
    let mut negative_entry_count = 0;
    for (i, row) in rows.iter_mut().enumerate() {
        let d = g.degree(i);
        if d <= 0.0 {
            return Err(Error::IsolatedNode(i));
        }
        for (_, w) in row.iter_mut() {
            *w /= d;
        }
        let diag = 1.0 - l_tilde.diagonal()[i] / d;
        if diag < 0.0 {
            negative_entry_count += 1;
        }
        row.push((i, diag));
    }
    Ok(SparseTransition {
        matrix: CsrMatrix::from_rows(rows),
        negative_entry_count,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationConfig {
    pub max_iters: usize,
    /// Stop once `‖x(i) − x(i−1)‖∞` falls below this.
    pub stop_tol: Option<f64>,
    pub track_trace: bool,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            max_iters: 100,
            stop_tol: None,
            track_trace: false,
        }
    }
}

impl IterationConfig {
    /// Early-stopping tolerance used when none is given explicitly.
    pub const DEFAULT_STOP_TOL: f64 = 1e-10;

    pub fn fixed(max_iters: usize) -> Self {
        Self {
            max_iters,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1"));
        }
        if let Some(tol) = self.stop_tol {
            if !(tol > 0.0) {
                return Err(Error::InvalidConfig("stop_tol must be positive"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationOutcome {
    pub expressed: Vec<f64>,
    pub iterations: usize,
    /// `‖x(i) − x(i−1)‖∞` per step, when tracked.
    pub trace: Vec<f64>,
}

/// Runs the update from `x(0) = s`.
pub fn iterate_opinions<P: TransitionOperator + ?Sized>(
    op: &P,
    state: &OpinionState,
    cfg: &IterationConfig,
) -> Result<IterationOutcome> {
    iterate_opinions_with(op, state, cfg, |_, _| {})
}

/// As [`iterate_opinions`], calling `observe(i, x(i))` for `i = 0, 1, …`.
pub fn iterate_opinions_with<P, F>(
    op: &P,
    state: &OpinionState,
    cfg: &IterationConfig,
    mut observe: F,
) -> Result<IterationOutcome>
where
    P: TransitionOperator + ?Sized,
    F: FnMut(usize, &[f64]),
{
    cfg.validate()?;
    let n = op.dim();
    state.check_len(n)?;
    let anchored = state.anchored();
    let alpha = state.resistance();
    let mut x = state.innate().to_vec();
    let mut px = vec![0.0; n];
    let mut trace = Vec::new();
    observe(0, &x);
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        op.apply(&x, &mut px);
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let next = anchored[i] + (1.0 - alpha[i]) * px[i];
            delta = delta.max((next - x[i]).abs());
            x[i] = next;
        }
        iterations += 1;
        if cfg.track_trace {
            trace.push(delta);
        }
        observe(iterations, &x);
        if cfg.stop_tol.is_some_and(|tol| delta < tol) {
            break;
        }
    }
    Ok(IterationOutcome {
        expressed: x,
        iterations,
        trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBoundInputs {
    pub epsilon: f64,
    pub alpha_min: f64,
    pub n: usize,
    pub t: usize,
}

fn check_alpha_min(alpha_min: f64) -> Result<()> {
    if !(alpha_min > 0.0 && alpha_min <= 1.0) {
        return Err(Error::InvalidConfig("alpha_min must lie in (0, 1]"));
    }
    Ok(())
}

/// `(1 − α_min)^t / α_min`: distance of the exact iteration from `z*`.
pub fn convergence_bound(alpha_min: f64, t: usize) -> Result<f64> {
    check_alpha_min(alpha_min)?;
    Ok(libm::pow(1.0 - alpha_min, t as f64) / alpha_min)
}

/// `4ε√n (1 − α_min)(1 − (1 − α_min)^t) / α_min`: drift of the sparsified
/// iteration from the exact one.
pub fn sparsification_drift_bound(inp: &ErrorBoundInputs) -> Result<f64> {
    check_alpha_min(inp.alpha_min)?;
    let q = 1.0 - inp.alpha_min;
    Ok(4.0 * inp.epsilon * libm::sqrt(inp.n as f64) * q * (1.0 - libm::pow(q, inp.t as f64))
        / inp.alpha_min)
}

/// Bound on `‖x̃(t) − z*‖∞`: the sum of the two bounds above.
pub fn approximation_error_bound(inp: &ErrorBoundInputs) -> Result<f64> {
    Ok(sparsification_drift_bound(inp)? + convergence_bound(inp.alpha_min, inp.t)?)
}

/// Errors `‖x(t) − z*‖∞` for `t = 0..=steps` under the dense `P*`.
pub fn equilibrium_errors(p_star: &DenseOperator, state: &OpinionState, steps: usize) -> Result<Vec<f64>> {
    let z = solve_equilibrium_with(p_star, state)?;
    let mut errors = Vec::with_capacity(steps + 1);
    if steps == 0 {
        errors.push(max_abs_difference(state.innate(), &z));
        return Ok(errors);
    }
    iterate_opinions_with(p_star, state, &IterationConfig::fixed(steps), |_, x| {
        errors.push(max_abs_difference(x, &z));
    })?;
    Ok(errors)
}

/// Below this the max-norm error is at rounding level and strict decrease is
/// no longer meaningful.
pub const CONTRACTION_FLOOR: f64 = 1e-13;

/// Whether `‖x(t) − z*‖∞` strictly decreases at every step up to `steps`.
pub fn contraction_check(p_star: &DenseOperator, state: &OpinionState, steps: usize) -> Result<bool> {
    let errors = equilibrium_errors(p_star, state, steps)?;
    Ok(errors
        .windows(2)
        .all(|w| w[0] <= CONTRACTION_FLOOR || w[1] < w[0]))
}
