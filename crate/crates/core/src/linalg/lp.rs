//! Exact rational linear programming for `min ‖x‖∞ subject to A x = b`.
//!
//! The problem is put in standard form with `x = w − t·1`, `0 ≤ w ≤ 2t`, and
//! solved by a two-phase dense simplex over `BigRational` with Bland's rule.
//! The optimal simplex multipliers of the equality rows give a dual
//! certificate `y` with `b·y = L` and `‖Aᵀy‖₁ ≤ 1`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::sparse::SparseMatrix;
use super::LinalgError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LpOptions {
    /// Budget on tableau entries.
    pub max_tableau: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions { max_tableau: 300_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpResult {
    pub value: BigRational,
    pub x: Vec<BigRational>,
    /// Dual certificate: `b·y = value` and `‖Aᵀy‖₁ ≤ 1`.
    pub dual: Vec<BigRational>,
}

/// Checks that `y` proves `‖x‖∞ ≥ b·y` for every rational solution of `A x = b`.
pub fn verify_dual(a: &SparseMatrix, b: &[BigInt], y: &[BigRational]) -> Option<BigRational> {
    if y.len() != a.nrows() || b.len() != a.nrows() {
        return None;
    }
    let mut l1 = BigRational::zero();
    for col in a.columns() {
        let mut s = BigRational::zero();
        for &(r, v) in col {
            s += &y[r] * BigRational::from_integer(BigInt::from(v));
        }
        l1 += s.abs();
    }
    if l1 > BigRational::one() {
        return None;
    }
    Some(b.iter().zip(y).map(|(bi, yi)| yi * BigRational::from_integer(bi.clone())).sum())
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    z: Vec<BigRational>,
    z_rhs: BigRational,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for x in self.rows[r].iter_mut() {
                if !x.is_zero() {
                    *x /= &p;
                }
            }
            self.rhs[r] /= &p;
        }
        let prow = self.rows[r].clone();
        let prhs = self.rhs[r].clone();
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for &j in &nz {
                let d = &f * &prow[j];
                self.rows[i][j] -= d;
            }
            self.rhs[i] -= &f * &prhs;
        }
        if !self.z[c].is_zero() {
            let f = self.z[c].clone();
            for &j in &nz {
                let d = &f * &prow[j];
                self.z[j] -= d;
            }
            self.z_rhs -= &f * &prhs;
        }
        self.basis[r] = c;
    }

    fn set_costs(&mut self, costs: &[BigRational]) {
        self.z = costs.to_vec();
        self.z_rhs = BigRational::zero();
        for (i, &bv) in self.basis.iter().enumerate() {
            let cb = &costs[bv];
            if cb.is_zero() {
                continue;
            }
            for (j, x) in self.rows[i].iter().enumerate() {
                if !x.is_zero() {
                    self.z[j] -= cb * x;
                }
            }
            self.z_rhs -= cb * &self.rhs[i];
        }
    }

    /// Bland's rule over columns `< allowed`.
    fn run(&mut self, allowed: usize) {
        loop {
            let Some(c) = (0..allowed).find(|&j| self.z[j].is_negative()) else { return };
            let mut best: Option<(usize, BigRational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let (r, _) = best.expect("objective is bounded below");
            self.pivot(r, c);
        }
    }
}

pub fn lp_min_linf(a: &SparseMatrix, b: &[BigInt]) -> Result<LpResult, LinalgError> {
    lp_min_linf_with(a, b, &LpOptions::default())
}

pub fn lp_min_linf_with(a: &SparseMatrix, b: &[BigInt], opts: &LpOptions) -> Result<LpResult, LinalgError> {
    let (m, n) = (a.nrows(), a.ncols());
    if b.len() != m {
        return Err(LinalgError::ShapeMismatch { expected: m, found: b.len() });
    }
    if b.iter().all(Zero::is_zero) {
        return Ok(LpResult {
            value: BigRational::zero(),
            x: vec![BigRational::zero(); n],
            dual: vec![BigRational::zero(); m],
        });
    }
    let t_col = 2 * n;
    let art0 = 2 * n + 1;
    let width = art0 + m;
    let needed = (m + n) * width;
    if needed > opts.max_tableau {
        return Err(LinalgError::SizeGuardExceeded { needed, budget: opts.max_tableau });
    }
    let q = |v: i64| BigRational::from_integer(BigInt::from(v));
    let dense = a.transpose();
    let mut rows = Vec::with_capacity(m + n);
    let mut rhs = Vec::with_capacity(m + n);
    let mut negated = vec![false; m];
    for i in 0..m {
        let mut row = vec![BigRational::zero(); width];
        let mut sum = 0i64;
        for &(j, v) in dense.col(i) {
            row[j] = q(v);
            sum += v;
        }
        row[t_col] = q(-sum);
        let mut bi = BigRational::from_integer(b[i].clone());
        if bi.is_negative() {
            negated[i] = true;
            for x in row.iter_mut() {
                *x = -x.clone();
            }
            bi = -bi;
        }
        row[art0 + i] = BigRational::one();
        rows.push(row);
        rhs.push(bi);
    }
    for j in 0..n {
        let mut row = vec![BigRational::zero(); width];
        row[j] = BigRational::one();
        row[n + j] = BigRational::one();
        row[t_col] = q(-2);
        rows.push(row);
        rhs.push(BigRational::zero());
    }
    let basis: Vec<usize> = (0..m).map(|i| art0 + i).chain((0..n).map(|j| n + j)).collect();
    let mut tab = Tableau { rows, rhs, z: Vec::new(), z_rhs: BigRational::zero(), basis };

    let mut phase1 = vec![BigRational::zero(); width];
    for c in phase1.iter_mut().skip(art0) {
        *c = BigRational::one();
    }
    tab.set_costs(&phase1);
    tab.run(width);
    if !tab.z_rhs.is_zero() {
        return Err(LinalgError::InfeasibleOverQ);
    }
    for r in 0..tab.rows.len() {
        if tab.basis[r] >= art0 {
            if let Some(c) = (0..art0).find(|&j| !tab.rows[r][j].is_zero()) {
                tab.pivot(r, c);
            }
        }
    }
    let mut phase2 = vec![BigRational::zero(); width];
    phase2[t_col] = BigRational::one();
    tab.set_costs(&phase2);
    tab.run(art0);

    let mut vals = vec![BigRational::zero(); width];
    for (i, &bv) in tab.basis.iter().enumerate() {
        vals[bv] = tab.rhs[i].clone();
    }
    let t = vals[t_col].clone();
    let x: Vec<BigRational> = (0..n).map(|j| &vals[j] - &t).collect();
    let dual: Vec<BigRational> = (0..m)
        .map(|i| {
            let pi = -tab.z[art0 + i].clone();
            if negated[i] {
                -pi
            } else {
                pi
            }
        })
        .collect();
    let certified = verify_dual(a, b, &dual);
    if certified.as_ref() != Some(&t) {
        return Err(LinalgError::Internal("LP dual certificate failed verification".into()));
    }
    Ok(LpResult { value: t, x, dual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(v: &[i64]) -> SparseMatrix {
        SparseMatrix::from_triples(1, v.len(), v.iter().enumerate().map(|(j, &x)| (0, j, x)))
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn symmetric_pair() {
        let res = lp_min_linf(&row(&[1, 1]), &[BigInt::from(2)]).unwrap();
        assert_eq!(res.value, r(1, 1));
        assert_eq!(res.x, vec![r(1, 1), r(1, 1)]);
    }

    #[test]
    fn zero_rhs() {
        assert_eq!(lp_min_linf(&row(&[1]), &[BigInt::from(0)]).unwrap().value, r(0, 1));
    }

    #[test]
    fn five_two() {
        let res = lp_min_linf(&row(&[5, 2]), &[BigInt::from(1)]).unwrap();
        assert_eq!(res.value, r(1, 7));
        assert_eq!(verify_dual(&row(&[5, 2]), &[BigInt::from(1)], &res.dual), Some(r(1, 7)));
    }

    #[test]
    fn negative_rhs_and_two_rows() {
        let a = SparseMatrix::from_triples(2, 3, [(0, 0, 1), (0, 1, -1), (1, 1, 1), (1, 2, 1)]);
        let b = [BigInt::from(-3), BigInt::from(1)];
        let res = lp_min_linf(&a, &b).unwrap();
        // x0 - x1 = -3 forces ‖x‖∞ ≥ 3/2, attained at (-3/2, 3/2, -1/2).
        assert_eq!(res.value, r(3, 2));
    }

    #[test]
    fn infeasible() {
        let a = SparseMatrix::from_triples(2, 1, [(0, 0, 1), (1, 0, 1)]);
        let err = lp_min_linf(&a, &[BigInt::from(1), BigInt::from(2)]).unwrap_err();
        assert!(matches!(err, LinalgError::InfeasibleOverQ));
    }
}
