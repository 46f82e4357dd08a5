//! Higher-order Friedkin–Johnsen opinion dynamics.
//!
//! In the classic Friedkin–Johnsen (FJ) model every agent `i` holds a fixed
//! innate opinion `s_i ∈ [0, 1]` and a resistance `α_i ∈ (0, 1]`, and
//! repeatedly expresses
//!
//! > x(t+1) = Α s + (I − Α) P x(t)
//!
//! where `P = D⁻¹A` is the random-walk transition matrix of the social graph.
//! The higher-order model replaces `P` with a random-walk matrix polynomial
//! `P* = Σ_r β_r P^r`, so agents also listen to neighbours `r` hops away.
//!
//! This crate provides:
//!
//! - [`graph`]: weighted undirected graphs in CSR form with `O(log d)`
//!   weighted neighbour sampling and largest-component extraction.
//! - [`polynomial`]: dense construction of `P*` and `L_β = D(I − P*)`, and the
//!   exact equilibrium solver.
//! - [`sparsifier`]: the path-sampling sparsifier producing a sparse Laplacian
//!   `L̃ ≈ L_β` in `O(M T log n)` time, plus spectral diagnostics.
//! - [`dynamics`]: the fixed-point iteration against either operator together
//!   with the a-priori error bounds.
//! - [`opinion_gen`]: deterministic generation of innate opinions and
//!   resistances.
//!
//! The crate is `no_std` and needs only `alloc`. Randomness comes from
//! [`rng::stream`], which derives independent ChaCha8 streams from a root
//! seed, so every result is reproducible from `(seed, stream)`.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod dense;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod opinion;
pub mod opinion_gen;
pub mod polynomial;
pub mod rng;
pub mod sparse;
pub mod sparsifier;
pub mod stats;

pub use error::{Error, Result};
pub use graph::WeightedGraph;
pub use opinion::OpinionState;
pub use polynomial::PolynomialSpec;
