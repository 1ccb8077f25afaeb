//! Cohomology and homology ranks from integer elimination.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{coboundary_operator, is_prime, CochainError, Ring};
use crate::complex::{CellComplex, ComplexError, Label};
use crate::linalg::field::{rank_over, Fp};
use crate::linalg::{invariant_factors, SparseMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologySummary {
    pub degree: usize,
    pub ring: Ring,
    pub free_rank: usize,
    /// Torsion coefficients over Z, a divisibility chain; empty otherwise.
    pub torsion: Vec<BigInt>,
}

impl CohomologySummary {
    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologySummary {
    pub degree: usize,
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

/// Cells of dimension `k` outside `a`.
pub(crate) fn free_cells(x: &CellComplex, a: Option<&Label>, k: usize) -> Vec<usize> {
    match a {
        None => (0..x.count(k)).collect(),
        Some(a) => (0..x.count(k)).filter(|&c| !a.contains(k, c)).collect(),
    }
}

/// Relative coboundary `δ_k: C^k(X, A) → C^{k+1}(X, A)`.
pub(crate) fn relative_coboundary(x: &CellComplex, a: Option<&Label>, k: usize) -> SparseMatrix {
    let d = coboundary_operator(x, k);
    match a {
        None => d,
        Some(_) => d.select(&free_cells(x, a, k + 1), &free_cells(x, a, k)),
    }
}

fn rank_in(m: &SparseMatrix, ring: Ring) -> Result<usize, CochainError> {
    Ok(match ring {
        Ring::Zp(p) => rank_over(&Fp(p), m),
        Ring::Z | Ring::Q => crate::linalg::rank(m)?,
    })
}

fn summary(x: &CellComplex, a: Option<&Label>, k: usize, ring: Ring) -> Result<CohomologySummary, CochainError> {
    if k > x.dim() {
        return Err(CochainError::DegreeOutOfRange { degree: k, dim: x.dim() });
    }
    if let Ring::Zp(p) = ring {
        if !is_prime(p) {
            return Err(CochainError::NotPrime(p));
        }
    }
    let n = free_cells(x, a, k).len();
    let out = relative_coboundary(x, a, k);
    let rank_out = rank_in(&out, ring)?;
    let (rank_prev, torsion) = if k == 0 {
        (0, Vec::new())
    } else {
        let prev = relative_coboundary(x, a, k - 1);
        if ring == Ring::Z {
            let f = invariant_factors(&prev)?;
            let t = f.iter().filter(|d| !d.is_one()).cloned().collect();
            (f.len(), t)
        } else {
            (rank_in(&prev, ring)?, Vec::new())
        }
    };
    Ok(CohomologySummary { degree: k, ring, free_rank: n - rank_out - rank_prev, torsion })
}

/// `H^k(X; R)`.
pub fn cohomology(x: &CellComplex, k: usize, ring: Ring) -> Result<CohomologySummary, CochainError> {
    summary(x, None, k, ring)
}

/// `H^k(X, A; R)` from cochains vanishing on `A`.
pub fn relative_cohomology(x: &CellComplex, a: &Label, k: usize, ring: Ring) -> Result<CohomologySummary, CochainError> {
    if !x.is_closed(a) {
        return Err(ComplexError::NotASubcomplex("relative subcomplex".into()).into());
    }
    summary(x, Some(a), k, ring)
}

/// Integral homology `H_k(X; Z)`.
pub fn homology(x: &CellComplex, k: usize) -> Result<HomologySummary, CochainError> {
    if k > x.dim() {
        return Err(CochainError::DegreeOutOfRange { degree: k, dim: x.dim() });
    }
    let rank_k = if k == 0 { 0 } else { crate::linalg::rank(&x.boundary(k))? };
    let f = invariant_factors(&x.boundary(k + 1))?;
    let torsion = f.iter().filter(|d| !d.is_one()).cloned().collect();
    Ok(HomologySummary { degree: k, free_rank: x.count(k) - rank_k - f.len(), torsion })
}
