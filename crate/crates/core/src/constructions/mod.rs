//! Builders for the annulus towers, the complexes `M_k`, their recursive
//! towers, the prism primitive `β` and the fibre-product stages.

mod beta;
mod mk;
mod pullback;
mod tower;

pub use beta::{build_beta, build_beta_with, collapse_map_xi, product_map, staircase_prism, BetaOutcome, NMode};
pub use mk::{build_Mk, build_Tp, MkBundle, MkParams, ValenceReport};
pub use pullback::{build_Y_stage, pullback_complex, pullback_with, pullback_section, Pullback, YStage};
pub use tower::{build_tower, carrier_containment, midpoint_subdivide, refinement_witnesses, simplicial_approx_identity, witnesses_valid, TowerStage};

use thiserror::Error;

use crate::cochain::CochainError;
use crate::complex::{CellComplex, ComplexError, Label};
use crate::degree::DegreeError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("size guard exceeded: {needed} cells, budget {budget} (try reduce mode or a smaller depth)")]
    SizeGuardExceeded { needed: usize, budget: usize },
    #[error("|γ| = {value} on edge {edge} does not divide n = {n}")]
    DivisibilityViolated { edge: usize, value: i64, n: usize },
    #[error("map is not light: {0}")]
    NotLight(String),
    #[error("not simplicial: {0}")]
    NotSimplicial(String),
    #[error("no vertex assignment satisfies carrier containment at vertex {0}")]
    NoValidAssignment(usize),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error(transparent)]
    Degree(#[from] DegreeError),
}

/// Default cell budget for a single built complex.
pub const DEFAULT_BUDGET: usize = 5_000_000;

/// The label consisting of the edges along a closed vertex sequence.
pub(crate) fn circuit_label(cx: &CellComplex, circuit: &[usize]) -> Result<Label, ComplexError> {
    let n = circuit.len();
    let mut edges = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (circuit[i], circuit[(i + 1) % n]);
        let e = cx
            .simplex_index(&[a.min(b), a.max(b)])
            .ok_or_else(|| ComplexError::NotSimplicial(format!("{a}→{b} is not an edge")))?;
        edges.push(e);
    }
    let mut l = cx.closure(vec![vec![], edges]);
    l.circuit = Some(circuit.to_vec());
    Ok(l)
}
