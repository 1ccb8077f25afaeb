//! Exact `min ‖x‖∞` over integer solutions of `A x = b`.
//!
//! The optimum is located by a bound search: each candidate bound `B` is a
//! pure feasibility problem `A x = b, |x_i| ≤ B`, decided by depth-first
//! search with interval propagation on the rows.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::lp::{lp_min_linf_with, LpOptions};
use super::solve::{solve_integer, SolveOutcome};
use super::sparse::SparseMatrix;
use super::LinalgError;

pub const DEFAULT_NODE_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IlpOptions {
    pub node_limit: u64,
    pub lp: LpOptions,
}

impl Default for IlpOptions {
    fn default() -> Self {
        IlpOptions { node_limit: DEFAULT_NODE_LIMIT, lp: LpOptions::default() }
    }
}

/// Evidence that no solution exists with bound `optimum − 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfeasibilityProof {
    /// The optimum is 0; there is nothing below it.
    ZeroOptimum,
    /// `b ≠ 0`, so the zero vector is not a solution.
    NonzeroRhs,
    /// The rational relaxation already exceeds `optimum − 1`.
    LpDual { lp_value: BigRational, dual: Vec<BigRational> },
    /// The depth-first search at `bound` exhausted all branches.
    Exhausted { bound: i64, nodes: u64 },
    /// Cycle family for coboundary systems, see [`crate::cochain::CycleProof`].
    Cycles(Box<crate::cochain::CycleProof>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormCertificate {
    pub optimum: i64,
    pub witness: Vec<i64>,
    pub infeasibility_proof: InfeasibilityProof,
    pub node_count: u64,
}

/// Search state at the moment the node budget ran out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IlpCheckpoint {
    /// Every bound below `lower` is infeasible.
    pub lower: i64,
    /// A solution with this bound is known.
    pub upper: i64,
    pub incumbent: Vec<i64>,
    /// Bound whose search was interrupted.
    pub interrupted_bound: i64,
    pub nodes: u64,
    pub lp_value: Option<BigRational>,
    /// Largest bound proved infeasible by search so far, with its node count.
    pub last_infeasible: Option<(i64, u64)>,
}

struct Rows {
    rows: Vec<Vec<(usize, i128)>>,
    var_rows: Vec<Vec<usize>>,
    b: Vec<i128>,
    n: usize,
}

impl Rows {
    fn new(a: &SparseMatrix, b: &[BigInt]) -> Result<Rows, LinalgError> {
        let t = a.transpose();
        let rows: Vec<Vec<(usize, i128)>> =
            (0..a.nrows()).map(|i| t.col(i).iter().map(|&(j, v)| (j, v as i128)).collect()).collect();
        let mut var_rows = vec![Vec::new(); a.ncols()];
        for (i, row) in rows.iter().enumerate() {
            for &(j, _) in row {
                var_rows[j].push(i);
            }
        }
        let b = b
            .iter()
            .map(|x| x.to_i128().ok_or_else(|| LinalgError::Internal("right-hand side exceeds i128".into())))
            .collect::<Result<_, _>>()?;
        Ok(Rows { rows, var_rows, b, n: a.ncols() })
    }

    fn propagate(&self, lo: &mut [i64], hi: &mut [i64], seeds: impl IntoIterator<Item = usize>) -> bool {
        let mut queued = vec![false; self.rows.len()];
        let mut queue = VecDeque::new();
        for r in seeds {
            if !queued[r] {
                queued[r] = true;
                queue.push_back(r);
            }
        }
        while let Some(r) = queue.pop_front() {
            queued[r] = false;
            let row = &self.rows[r];
            let (mut smin, mut smax) = (0i128, 0i128);
            for &(j, a) in row {
                let (x, y) = (a * lo[j] as i128, a * hi[j] as i128);
                smin += x.min(y);
                smax += x.max(y);
            }
            let b = self.b[r];
            if b < smin || b > smax {
                return false;
            }
            for &(j, a) in row {
                let (x, y) = (a * lo[j] as i128, a * hi[j] as i128);
                let (cmin, cmax) = (x.min(y), x.max(y));
                // a·x_j ∈ [b − (smax − cmax), b − (smin − cmin)]
                let lo_t = b - (smax - cmax);
                let hi_t = b - (smin - cmin);
                let (nlo, nhi) = if a > 0 {
                    (Integer::div_ceil(&lo_t, &a), Integer::div_floor(&hi_t, &a))
                } else {
                    (Integer::div_ceil(&hi_t, &a), Integer::div_floor(&lo_t, &a))
                };
                let nlo = nlo.max(lo[j] as i128) as i64;
                let nhi = nhi.min(hi[j] as i128) as i64;
                if nlo > nhi {
                    return false;
                }
                if nlo != lo[j] || nhi != hi[j] {
                    lo[j] = nlo;
                    hi[j] = nhi;
                    for &r2 in &self.var_rows[j] {
                        if !queued[r2] {
                            queued[r2] = true;
                            queue.push_back(r2);
                        }
                    }
                }
            }
        }
        true
    }

    /// First solution in branching order with `|x_i| ≤ bound`, or `None` if
    /// there is none. `Err` carries the node count when the budget runs out.
    fn feasible(&self, bound: i64, nodes: &mut u64, limit: u64) -> Result<Option<Vec<i64>>, ()> {
        let mut lo = vec![-bound; self.n];
        let mut hi = vec![bound; self.n];
        if !self.propagate(&mut lo, &mut hi, 0..self.rows.len()) {
            return Ok(None);
        }
        self.dfs(lo, hi, nodes, limit)
    }

    fn dfs(&self, lo: Vec<i64>, hi: Vec<i64>, nodes: &mut u64, limit: u64) -> Result<Option<Vec<i64>>, ()> {
        let Some(j) = (0..self.n).find(|&j| lo[j] < hi[j]) else {
            return Ok(Some(lo));
        };
        for v in value_order(lo[j], hi[j]) {
            *nodes += 1;
            if *nodes > limit {
                return Err(());
            }
            let (mut l2, mut h2) = (lo.clone(), hi.clone());
            l2[j] = v;
            h2[j] = v;
            if self.propagate(&mut l2, &mut h2, self.var_rows[j].iter().copied()) {
                if let Some(x) = self.dfs(l2, h2, nodes, limit)? {
                    return Ok(Some(x));
                }
            }
        }
        Ok(None)
    }
}

/// `0, +1, −1, +2, −2, …` restricted to `[lo, hi]`.
pub fn value_order(lo: i64, hi: i64) -> impl Iterator<Item = i64> {
    let reach = lo.unsigned_abs().max(hi.unsigned_abs()) as i64;
    (0..=reach).flat_map(|k| if k == 0 { vec![0] } else { vec![k, -k] }).filter(move |v| *v >= lo && *v <= hi)
}

pub fn ilp_min_linf(a: &SparseMatrix, b: &[BigInt], node_limit: u64) -> Result<NormCertificate, LinalgError> {
    ilp_min_linf_with(a, b, &IlpOptions { node_limit, ..IlpOptions::default() })
}

pub fn ilp_min_linf_with(a: &SparseMatrix, b: &[BigInt], opts: &IlpOptions) -> Result<NormCertificate, LinalgError> {
    let x0 = match solve_integer(a, b)? {
        SolveOutcome::Solution { x, .. } => x,
        SolveOutcome::NoSolution(o) => return Err(LinalgError::NoIntegerSolution(o)),
    };
    if b.iter().all(Zero::is_zero) {
        return Ok(NormCertificate {
            optimum: 0,
            witness: vec![0; a.ncols()],
            infeasibility_proof: InfeasibilityProof::ZeroOptimum,
            node_count: 0,
        });
    }
    let upper = x0.iter().map(|v| v.abs()).max().unwrap_or_default();
    let upper = upper.to_i64().ok_or_else(|| LinalgError::Internal("particular solution exceeds i64".into()))?;
    let incumbent: Vec<i64> = x0.iter().map(|v| v.to_i64().expect("bounded by upper")).collect();
    let lp = match lp_min_linf_with(a, b, &opts.lp) {
        Ok(r) => Some(r),
        Err(LinalgError::SizeGuardExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let lower = match &lp {
        Some(r) => ceil_rational(&r.value).max(1),
        None => 1,
    };
    let start = IlpCheckpoint {
        lower,
        upper,
        incumbent,
        interrupted_bound: lower,
        nodes: 0,
        lp_value: lp.as_ref().map(|r| r.value.clone()),
        last_infeasible: None,
    };
    search(a, b, opts, start, lp.map(|r| r.dual))
}

/// Continues a search interrupted by the node budget.
pub fn ilp_resume(
    a: &SparseMatrix,
    b: &[BigInt],
    opts: &IlpOptions,
    checkpoint: IlpCheckpoint,
) -> Result<NormCertificate, LinalgError> {
    let dual = match (&checkpoint.lp_value, lp_min_linf_with(a, b, &opts.lp)) {
        (Some(_), Ok(r)) => Some(r.dual),
        _ => None,
    };
    search(a, b, opts, checkpoint, dual)
}

fn search(
    a: &SparseMatrix,
    b: &[BigInt],
    opts: &IlpOptions,
    mut st: IlpCheckpoint,
    dual: Option<Vec<BigRational>>,
) -> Result<NormCertificate, LinalgError> {
    let rows = Rows::new(a, b)?;
    let lp_lower = st.lp_value.as_ref().map(ceil_rational);
    let mut step = 1i64;
    let mut galloping = true;
    let mut canonical = false;
    let mut test = st.interrupted_bound.clamp(st.lower, st.upper);
    loop {
        if st.lower >= st.upper && canonical {
            break;
        }
        if st.lower >= st.upper {
            test = st.upper;
        }
        let before = st.nodes;
        st.interrupted_bound = test;
        let mut nodes = st.nodes;
        let res = rows.feasible(test, &mut nodes, opts.node_limit);
        st.nodes = nodes;
        match res {
            Err(()) => return Err(LinalgError::NodeLimitExceeded(Box::new(st))),
            Ok(Some(x)) => {
                st.upper = test;
                st.incumbent = x;
                canonical = true;
                galloping = false;
            }
            Ok(None) => {
                st.lower = test + 1;
                st.last_infeasible = Some((test, st.nodes - before));
            }
        }
        if st.lower >= st.upper {
            continue;
        }
        test = if galloping {
            let t = (st.lower - 1 + step).min(st.upper);
            step *= 2;
            t.max(st.lower)
        } else {
            st.lower + (st.upper - st.lower) / 2
        };
    }
    let optimum = st.upper;
    let proof = match st.last_infeasible {
        Some((bound, nodes)) if bound == optimum - 1 => InfeasibilityProof::Exhausted { bound, nodes },
        _ => match (lp_lower, dual, st.lp_value.clone()) {
            (Some(l), Some(dual), Some(lp_value)) if l == optimum => InfeasibilityProof::LpDual { lp_value, dual },
            _ if optimum == 1 => InfeasibilityProof::NonzeroRhs,
            _ => return Err(LinalgError::Internal("no infeasibility proof below the optimum".into())),
        },
    };
    Ok(NormCertificate { optimum, witness: st.incumbent, infeasibility_proof: proof, node_count: st.nodes })
}

pub fn ceil_rational(r: &BigRational) -> i64 {
    r.ceil().to_integer().to_i64().expect("LP value fits i64")
}

/// Re-checks a certificate without searching: the witness solves the system
/// with the claimed norm, and the stated proof is valid where it can be
/// checked by linear algebra alone.
pub fn verify_certificate(a: &SparseMatrix, b: &[BigInt], cert: &NormCertificate) -> bool {
    if cert.witness.len() != a.ncols() {
        return false;
    }
    let x: Vec<BigInt> = cert.witness.iter().map(|&v| BigInt::from(v)).collect();
    if a.mul_vec(&x) != b {
        return false;
    }
    if cert.witness.iter().map(|v| v.abs()).max().unwrap_or(0) != cert.optimum {
        return false;
    }
    match &cert.infeasibility_proof {
        InfeasibilityProof::ZeroOptimum => cert.optimum == 0,
        InfeasibilityProof::NonzeroRhs => cert.optimum == 1 && b.iter().any(|v| !v.is_zero()),
        InfeasibilityProof::LpDual { lp_value, dual } => {
            super::lp::verify_dual(a, b, dual).as_ref() == Some(lp_value)
                && BigRational::from_integer(BigInt::from(cert.optimum - 1)) < *lp_value
        }
        InfeasibilityProof::Exhausted { bound, .. } => {
            let Ok(rows) = Rows::new(a, b) else { return false };
            let mut nodes = 0;
            *bound == cert.optimum - 1 && matches!(rows.feasible(*bound, &mut nodes, u64::MAX), Ok(None))
        }
        InfeasibilityProof::Cycles(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(v: &[i64]) -> SparseMatrix {
        SparseMatrix::from_triples(1, v.len(), v.iter().enumerate().map(|(j, &x)| (0, j, x)))
    }

    #[test]
    fn five_two() {
        let a = row(&[5, 2]);
        let b = [BigInt::from(1)];
        let cert = ilp_min_linf(&a, &b, DEFAULT_NODE_LIMIT).unwrap();
        assert_eq!(cert.optimum, 2);
        assert_eq!(cert.witness, vec![1, -2]);
        assert!(verify_certificate(&a, &b, &cert));
    }

    #[test]
    fn one_one() {
        let cert = ilp_min_linf(&row(&[1, 1]), &[BigInt::from(2)], 100).unwrap();
        assert_eq!(cert.optimum, 1);
        assert!(matches!(cert.infeasibility_proof, InfeasibilityProof::LpDual { .. } | InfeasibilityProof::NonzeroRhs));
    }

    #[test]
    fn no_integer_solution() {
        let err = ilp_min_linf(&row(&[2]), &[BigInt::from(3)], 100).unwrap_err();
        assert!(matches!(err, LinalgError::NoIntegerSolution(_)));
    }

    #[test]
    fn value_order_is_symmetric_and_clipped() {
        assert_eq!(value_order(-2, 2).collect::<Vec<_>>(), vec![0, 1, -1, 2, -2]);
        assert_eq!(value_order(1, 3).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(value_order(-3, -2).collect::<Vec<_>>(), vec![-2, -3]);
    }

    #[test]
    fn node_limit_then_resume() {
        // Propagation alone does not settle this row, so the search needs more than one node.
        let a = row(&[7, 11, 13, 17, 19, 23, 29, 31]);
        let b = [BigInt::from(1000)];
        let full = ilp_min_linf(&a, &b, DEFAULT_NODE_LIMIT).unwrap();
        let opts = IlpOptions { node_limit: 1, ..IlpOptions::default() };
        let err = ilp_min_linf_with(&a, &b, &opts).unwrap_err();
        let LinalgError::NodeLimitExceeded(cp) = err else { panic!("expected node limit, got {err:?} (full {full:?})") };
        assert!(cp.lower <= full.optimum && full.optimum <= cp.upper);
        let resumed = ilp_resume(&a, &b, &IlpOptions::default(), *cp).unwrap();
        assert_eq!(resumed.optimum, full.optimum);
        assert_eq!(resumed.witness, full.witness);
    }
}
