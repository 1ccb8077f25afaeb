//! Smith normal form over the integers.

use num_bigint::BigInt;

use serde::{Deserialize, Serialize};

use super::dense::{DMat, IntMatrix};
use super::scalar::{Overflow, Scalar};
use super::sparse::SparseMatrix;
use super::LinalgError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SnfOptions {
    /// Budget on the number of stored matrix entries (A plus both factors).
    pub max_entries: usize,
}

impl Default for SnfOptions {
    fn default() -> Self {
        SnfOptions { max_entries: 60_000_000 }
    }
}

/// `U · A · V = D` with `U`, `V` unimodular and `D` diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// Diagonal of `D`, length `min(rows, cols)`; nonzero entries first, forming a divisibility chain.
    pub diagonal: Vec<BigInt>,
    pub rows: usize,
    pub cols: usize,
}

impl SnfDecomposition {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().take_while(|d| !d.is_zero()).count()
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.diagonal[..self.rank()]
    }

    pub fn d_matrix(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.rows, self.cols);
        for (i, x) in self.diagonal.iter().enumerate() {
            d.set(i, i, x.clone());
        }
        d
    }

    /// Multiplies out `U · A · V` and compares with `D`; also checks the
    /// divisibility chain and the sign convention.
    pub fn verify(&self, a: &IntMatrix) -> bool {
        if a.rows() != self.rows || a.cols() != self.cols {
            return false;
        }
        let r = self.rank();
        if self.diagonal[r..].iter().any(|d| !d.is_zero()) {
            return false;
        }
        if self.diagonal[..r].iter().any(|d| d <= &BigInt::zero()) {
            return false;
        }
        if self.diagonal[..r].windows(2).any(|w| !(&w[1] % &w[0]).is_zero()) {
            return false;
        }
        match self.u.mul(a).and_then(|ua| ua.mul(&self.v)) {
            Ok(prod) => prod == self.d_matrix(),
            Err(_) => false,
        }
    }
}

struct Eliminated<T> {
    a: DMat<T>,
    u: Option<DMat<T>>,
    v: Option<DMat<T>>,
}

/// Elimination kernel shared by the `i128` and `BigInt` paths. Only the
/// diagonal of the returned `a` is meaningful.
fn eliminate<T: Scalar>(mut a: DMat<T>, track: bool) -> Result<Eliminated<T>, Overflow> {
    let (m, n) = (a.rows(), a.cols());
    let mut u = track.then(|| DMat::<T>::identity(m));
    let mut v = track.then(|| DMat::<T>::identity(n));
    let lim = m.min(n);
    for t in 0..lim {
        let Some((pr, pc)) = find_pivot(&a, t) else { break };
        swap_rows(&mut a, u.as_mut(), t, pr);
        swap_cols(&mut a, v.as_mut(), t, pc);
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = a.get(i, t).quot(a.get(t, t))?;
                a.row_sub_mul(i, t, &q)?;
                if let Some(u) = u.as_mut() {
                    u.row_sub_mul(i, t, &q)?;
                }
                if !a.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = a.get(t, j).quot(a.get(t, t))?;
                a.col_sub_mul(j, t, &q)?;
                if let Some(v) = v.as_mut() {
                    v.col_sub_mul(j, t, &q)?;
                }
                if !a.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                let mut best: Option<(bool, usize)> = None;
                let mut best_val: Option<T> = None;
                for i in t + 1..m {
                    let x = a.get(i, t);
                    if !x.is_zero() && best_val.as_ref().map_or(true, |b| x.cmp_abs(b).is_lt()) {
                        best = Some((true, i));
                        best_val = Some(x.clone());
                    }
                }
                for j in t + 1..n {
                    let x = a.get(t, j);
                    if !x.is_zero() && best_val.as_ref().map_or(true, |b| x.cmp_abs(b).is_lt()) {
                        best = Some((false, j));
                        best_val = Some(x.clone());
                    }
                }
                match best {
                    Some((true, i)) => swap_rows(&mut a, u.as_mut(), t, i),
                    Some((false, j)) => swap_cols(&mut a, v.as_mut(), t, j),
                    None => {}
                }
                continue;
            }
            if !a.get(t, t).is_abs_one() {
                if let Some(i) = find_non_multiple(&a, t) {
                    let minus_one = T::one().neg()?;
                    a.row_sub_mul(t, i, &minus_one)?;
                    if let Some(u) = u.as_mut() {
                        u.row_sub_mul(t, i, &minus_one)?;
                    }
                    continue;
                }
            }
            break;
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t)?;
            if let Some(u) = u.as_mut() {
                u.negate_row(t)?;
            }
        }
    }
    Ok(Eliminated { a, u, v })
}

fn swap_rows<T: Scalar>(a: &mut DMat<T>, u: Option<&mut DMat<T>>, i: usize, j: usize) {
    a.swap_rows(i, j);
    if let Some(u) = u {
        u.swap_rows(i, j);
    }
}

fn swap_cols<T: Scalar>(a: &mut DMat<T>, v: Option<&mut DMat<T>>, i: usize, j: usize) {
    a.swap_cols(i, j);
    if let Some(v) = v {
        v.swap_cols(i, j);
    }
}

/// Smallest nonzero absolute value in the trailing submatrix, first in
/// row-major order among ties.
fn find_pivot<T: Scalar>(a: &DMat<T>, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            if x.is_abs_one() {
                return Some((i, j));
            }
            if best.map_or(true, |(bi, bj)| x.cmp_abs(a.get(bi, bj)).is_lt()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// A row `i > t` holding an entry of the trailing block not divisible by the pivot.
fn find_non_multiple<T: Scalar>(a: &DMat<T>, t: usize) -> Option<usize> {
    let p = a.get(t, t);
    (t + 1..a.rows()).find(|&i| (t + 1..a.cols()).any(|j| !a.get(i, j).rem(p).is_zero()))
}

fn check_budget(rows: usize, cols: usize, track: bool, opts: &SnfOptions) -> Result<(), LinalgError> {
    let needed = rows * cols + if track { rows * rows + cols * cols } else { 0 };
    if needed > opts.max_entries {
        return Err(LinalgError::SizeGuardExceeded { needed, budget: opts.max_entries });
    }
    Ok(())
}

fn diagonal_of<T: Scalar>(a: &DMat<T>) -> Vec<BigInt> {
    (0..a.rows().min(a.cols())).map(|i| a.get(i, i).to_big()).collect()
}

pub fn smith_normal_form(a: &SparseMatrix) -> Result<SnfDecomposition, LinalgError> {
    smith_normal_form_with(a, &SnfOptions::default())
}

pub fn smith_normal_form_with(a: &SparseMatrix, opts: &SnfOptions) -> Result<SnfDecomposition, LinalgError> {
    check_budget(a.nrows(), a.ncols(), true, opts)?;
    let dec = match eliminate(a.to_dense::<i128>(), true) {
        Ok(Eliminated { a: d, u, v }) => SnfDecomposition {
            diagonal: diagonal_of(&d),
            u: u.expect("tracked").to_big(),
            v: v.expect("tracked").to_big(),
            rows: a.nrows(),
            cols: a.ncols(),
        },
        Err(Overflow) => return smith_normal_form_dense(&a.to_dense::<BigInt>(), opts),
    };
    if cfg!(debug_assertions) {
        debug_assert!(dec.verify(&a.to_dense::<BigInt>()), "SNF self-check failed");
    }
    Ok(dec)
}

/// Arbitrary-precision path for inputs given as dense big-integer matrices.
pub fn smith_normal_form_dense(a: &IntMatrix, opts: &SnfOptions) -> Result<SnfDecomposition, LinalgError> {
    check_budget(a.rows(), a.cols(), true, opts)?;
    let Eliminated { a: d, u, v } = eliminate(a.clone(), true).expect("BigInt arithmetic cannot overflow");
    let dec = SnfDecomposition {
        diagonal: diagonal_of(&d),
        u: u.expect("tracked"),
        v: v.expect("tracked"),
        rows: a.rows(),
        cols: a.cols(),
    };
    if cfg!(debug_assertions) {
        debug_assert!(dec.verify(a), "SNF self-check failed");
    }
    Ok(dec)
}

/// Nonzero diagonal entries of the Smith form, without the factors.
pub fn invariant_factors(a: &SparseMatrix) -> Result<Vec<BigInt>, LinalgError> {
    invariant_factors_with(a, &SnfOptions::default())
}

pub fn invariant_factors_with(a: &SparseMatrix, opts: &SnfOptions) -> Result<Vec<BigInt>, LinalgError> {
    check_budget(a.nrows(), a.ncols(), false, opts)?;
    // Empty columns and rows do not affect the result; dropping them keeps the dense block small.
    let cols: Vec<usize> = (0..a.ncols()).filter(|&c| !a.col(c).is_empty()).collect();
    let mut used = vec![false; a.nrows()];
    for &c in &cols {
        for &(r, _) in a.col(c) {
            used[r] = true;
        }
    }
    let rows: Vec<usize> = (0..a.nrows()).filter(|&r| used[r]).collect();
    let sub = a.select(&rows, &cols);
    let diag = match eliminate(sub.to_dense::<i128>(), false) {
        Ok(Eliminated { a: d, .. }) => diagonal_of(&d),
        Err(Overflow) => {
            let Eliminated { a: d, .. } = eliminate(sub.to_dense::<BigInt>(), false).expect("no overflow");
            diagonal_of(&d)
        }
    };
    Ok(diag.into_iter().filter(|d| !d.is_zero()).collect())
}

/// Rank over Q, read off the Smith form.
pub fn rank(a: &SparseMatrix) -> Result<usize, LinalgError> {
    Ok(invariant_factors(a)?.len())
}
