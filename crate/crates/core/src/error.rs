use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("edge ({u}, {v}) has non-positive weight {weight}")]
    NonPositiveWeight { u: usize, v: usize, weight: f64 },
    #[error("node id {id} out of range for graph with {n} nodes")]
    NodeOutOfRange { id: usize, n: usize },
    #[error("node {0} has no neighbours")]
    IsolatedNode(usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("invalid polynomial coefficients: {0}")]
    InvalidPolynomial(&'static str),
    #[error("invalid opinion state: {0}")]
    InvalidOpinions(&'static str),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("{n} nodes exceeds the dense-size cap of {cap}; use the sparsified solver instead")]
    DenseCapExceeded { n: usize, cap: usize },
    #[error("system matrix is singular at pivot {0}")]
    Singular(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}
