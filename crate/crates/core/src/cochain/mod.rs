//! Cochains, coboundaries, cohomology of complexes and pairs, and
//! minimal-norm primitives.

mod cohomology;
mod exactness;
mod min_norm;

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{CellComplex, CellMap, ComplexError, Label};
use crate::linalg::{LinalgError, Obstruction, SparseMatrix};

pub use cohomology::{cohomology, homology, relative_cohomology, CohomologySummary, HomologySummary};
pub use exactness::{exactness_check, ExactnessReport, NodeCheck};
pub use min_norm::{integer_primitive, min_norm_primitive, verify_cycle_proof, verify_norm_certificate, CycleProof, Method, MinNormOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ring {
    Z,
    Zp(u64),
    Q,
}

impl std::fmt::Display for Ring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ring::Z => write!(f, "Z"),
            Ring::Zp(p) => write!(f, "Z_{p}"),
            Ring::Q => write!(f, "Q"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CochainError {
    #[error("degree {degree} out of range for a complex of dimension {dim}")]
    DegreeOutOfRange { degree: usize, dim: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cochain has {found} values, expected {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("wrong shape: {0}")]
    WrongShape(String),
    #[error("cochain is not a coboundary ({0:?})")]
    NotACoboundary(Obstruction),
    #[error("cochain does not vanish on the relative subcomplex")]
    NotRelative,
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// A `degree`-cochain: one coefficient per `degree`-cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    complex: Arc<CellComplex>,
    degree: usize,
    ring: Ring,
    values: Vec<BigRational>,
}

impl Cochain {
    pub fn new(complex: Arc<CellComplex>, degree: usize, ring: Ring, values: Vec<BigRational>) -> Result<Cochain, CochainError> {
        if degree > complex.dim() {
            return Err(CochainError::DegreeOutOfRange { degree, dim: complex.dim() });
        }
        if values.len() != complex.count(degree) {
            return Err(CochainError::WrongLength { expected: complex.count(degree), found: values.len() });
        }
        if let Ring::Zp(p) = ring {
            if !is_prime(p) {
                return Err(CochainError::NotPrime(p));
            }
        }
        if ring != Ring::Q && values.iter().any(|v| !v.is_integer()) {
            return Err(CochainError::WrongShape("non-integral value in an integral cochain".into()));
        }
        let mut c = Cochain { complex, degree, ring, values };
        c.reduce();
        Ok(c)
    }

    pub fn from_integers(complex: Arc<CellComplex>, degree: usize, ring: Ring, values: &[i64]) -> Result<Cochain, CochainError> {
        let v = values.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect();
        Cochain::new(complex, degree, ring, v)
    }

    pub fn zero(complex: Arc<CellComplex>, degree: usize, ring: Ring) -> Result<Cochain, CochainError> {
        let n = complex.count(degree);
        Cochain::new(complex, degree, ring, vec![BigRational::zero(); n])
    }

    fn reduce(&mut self) {
        if let Ring::Zp(p) = self.ring {
            let p = BigInt::from(p);
            for v in &mut self.values {
                let r = ((v.to_integer() % &p) + &p) % &p;
                *v = BigRational::from_integer(r);
            }
        }
    }

    pub fn complex(&self) -> &Arc<CellComplex> {
        &self.complex
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    /// Integer values; `None` for non-integral or oversized entries.
    pub fn integer_values(&self) -> Option<Vec<i64>> {
        self.values.iter().map(|v| if v.is_integer() { v.to_integer().to_i64() } else { None }).collect()
    }

    /// Sup-norm for Z and Q; identically zero for Z_p.
    pub fn norm(&self) -> BigRational {
        match self.ring {
            Ring::Zp(_) => BigRational::zero(),
            _ => self.values.iter().map(|v| v.abs()).max().unwrap_or_else(BigRational::zero),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| !self.values[i].is_zero()).collect()
    }

    /// `⟨c, z⟩` for an integer chain `z` of the same degree.
    pub fn evaluate(&self, z: &[i64]) -> BigRational {
        let mut s: BigRational = self.values.iter().zip(z).filter(|(_, &c)| c != 0).map(|(v, &c)| v * BigInt::from(c)).sum();
        if let Ring::Zp(p) = self.ring {
            let p = BigInt::from(p);
            s = BigRational::from_integer(((s.to_integer() % &p) + &p) % &p);
        }
        s
    }

    pub fn coboundary(&self) -> Result<Cochain, CochainError> {
        let d = coboundary_operator(&self.complex, self.degree);
        let v = apply_rational(&d, &self.values);
        Cochain::new(self.complex.clone(), self.degree + 1, self.ring, v).or_else(|e| match e {
            CochainError::DegreeOutOfRange { .. } => Err(CochainError::DegreeOutOfRange {
                degree: self.degree + 1,
                dim: self.complex.dim(),
            }),
            other => Err(other),
        })
    }

    /// Whether the cochain vanishes on every `degree`-cell of `label`.
    pub fn vanishes_on(&self, label: &Label) -> bool {
        label.cells_in(self.degree).iter().all(|&c| self.values[c].is_zero())
    }
}

/// `δ_k: C^k → C^{k+1}`, the transpose of `∂_{k+1}`; `0 ≤ k < dim X`.
pub fn coboundary_matrix(x: &CellComplex, k: usize) -> Result<SparseMatrix, CochainError> {
    if k >= x.dim() {
        return Err(CochainError::DegreeOutOfRange { degree: k, dim: x.dim() });
    }
    Ok(x.boundary(k + 1).transpose())
}

/// `δ_k` for any `k ≥ 0`, zero with the right shape at the top.
pub(crate) fn coboundary_operator(x: &CellComplex, k: usize) -> SparseMatrix {
    x.boundary(k + 1).transpose()
}

pub(crate) fn apply_rational(m: &SparseMatrix, x: &[BigRational]) -> Vec<BigRational> {
    let mut y = vec![BigRational::zero(); m.nrows()];
    for (c, col) in m.columns().iter().enumerate() {
        if x[c].is_zero() {
            continue;
        }
        for &(r, v) in col {
            y[r] += &x[c] * BigInt::from(v);
        }
    }
    y
}

/// `(f^*c)(σ) = c(f_#σ)`.
pub fn pullback_cochain(f: &CellMap, c: &Cochain) -> Result<Cochain, CochainError> {
    if c.degree > f.source().dim() {
        return Err(CochainError::DegreeOutOfRange { degree: c.degree, dim: f.source().dim() });
    }
    if c.values.len() != f.target().count(c.degree) {
        return Err(CochainError::WrongLength { expected: f.target().count(c.degree), found: c.values.len() });
    }
    let v = apply_rational(&f.chain(c.degree).transpose(), &c.values);
    Cochain::new(f.source().clone(), c.degree, c.ring, v)
}

/// The `n`-cochain taking every `n`-simplex to 1 on a disjoint union of
/// `n`-simplices.
pub fn fundamental_class(x: &Arc<CellComplex>, n: usize) -> Result<Cochain, CochainError> {
    if x.total_cells() == 0 {
        return Ok(Cochain { complex: x.clone(), degree: n, ring: Ring::Z, values: Vec::new() });
    }
    if !x.is_simplicial() || x.dim() != n {
        return Err(CochainError::WrongShape(format!("expected a disjoint union of {n}-simplices")));
    }
    let mut seen = vec![false; x.n_vertices()];
    for s in x.simplices(n) {
        for &v in s {
            if seen[v] {
                return Err(CochainError::WrongShape("two top simplices share a vertex".into()));
            }
            seen[v] = true;
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(CochainError::WrongShape("vertex outside the top simplices".into()));
    }
    let ones = vec![1i64; x.count(n)];
    Cochain::from_integers(x.clone(), n, Ring::Z, &ones)
}
