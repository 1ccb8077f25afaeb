//! Exact integer and rational linear algebra.

pub mod dense;
pub mod field;
pub mod ilp;
pub mod lp;
pub mod scalar;
pub mod snf;
pub mod solve;
pub mod sparse;

use thiserror::Error;

pub use dense::{DMat, IntMatrix};
pub use ilp::{ilp_min_linf, ilp_min_linf_with, ilp_resume, IlpCheckpoint, IlpOptions, InfeasibilityProof, NormCertificate};
pub use lp::{lp_min_linf, lp_min_linf_with, LpOptions, LpResult};
pub use snf::{invariant_factors, rank, smith_normal_form, smith_normal_form_with, SnfDecomposition, SnfOptions};
pub use solve::{solve_integer, Obstruction, SolveOutcome};
pub use sparse::SparseMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("shape mismatch: expected length {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("size guard exceeded: {needed} entries needed, budget {budget}")]
    SizeGuardExceeded { needed: usize, budget: usize },
    #[error("system has no rational solution")]
    InfeasibleOverQ,
    #[error("system has no integer solution ({0:?})")]
    NoIntegerSolution(Obstruction),
    #[error("node limit exceeded after {} nodes; optimum lies in [{}, {}]", .0.nodes, .0.lower, .0.upper)]
    NodeLimitExceeded(Box<IlpCheckpoint>),
    #[error("internal error: {0}")]
    Internal(String),
}
