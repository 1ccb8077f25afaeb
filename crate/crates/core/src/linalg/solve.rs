//! Integer linear systems through the Smith form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::snf::{smith_normal_form_with, SnfOptions};
use super::sparse::SparseMatrix;
use super::LinalgError;

/// Why `A x = b` has no integer solution, stated in Smith coordinates
/// `c = U b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Obstruction {
    /// `c[row] != 0` but row `row` of `D` is zero: no rational solution either.
    Inconsistent { row: usize, value: BigInt },
    /// `d_index` does not divide `c[index]`.
    Divisibility { index: usize, divisor: BigInt, value: BigInt },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveOutcome {
    Solution { x: Vec<BigInt>, kernel: Vec<Vec<BigInt>> },
    NoSolution(Obstruction),
}

impl SolveOutcome {
    pub fn solution(&self) -> Option<&[BigInt]> {
        match self {
            SolveOutcome::Solution { x, .. } => Some(x),
            SolveOutcome::NoSolution(_) => None,
        }
    }
}

pub fn solve_integer(a: &SparseMatrix, b: &[BigInt]) -> Result<SolveOutcome, LinalgError> {
    solve_integer_with(a, b, &SnfOptions::default())
}

pub fn solve_integer_with(a: &SparseMatrix, b: &[BigInt], opts: &SnfOptions) -> Result<SolveOutcome, LinalgError> {
    if b.len() != a.nrows() {
        return Err(LinalgError::ShapeMismatch { expected: a.nrows(), found: b.len() });
    }
    let snf = smith_normal_form_with(a, opts)?;
    let c = snf.u.mul_vec(b).expect("BigInt");
    let r = snf.rank();
    if let Some(row) = (r..a.nrows()).find(|&i| !c[i].is_zero()) {
        return Ok(SolveOutcome::NoSolution(Obstruction::Inconsistent { row, value: c[row].clone() }));
    }
    let mut y = vec![BigInt::zero(); a.ncols()];
    for i in 0..r {
        let (q, rem) = c[i].div_rem(&snf.diagonal[i]);
        if !rem.is_zero() {
            return Ok(SolveOutcome::NoSolution(Obstruction::Divisibility {
                index: i,
                divisor: snf.diagonal[i].clone(),
                value: c[i].clone(),
            }));
        }
        y[i] = q;
    }
    let x = snf.v.mul_vec(&y).expect("BigInt");
    debug_assert_eq!(a.mul_vec(&x), b);
    let kernel = (r..a.ncols()).map(|j| (0..a.ncols()).map(|i| snf.v.get(i, j).clone()).collect()).collect();
    Ok(SolveOutcome::Solution { x, kernel })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn scalar_cases() {
        let a = SparseMatrix::from_triples(1, 1, [(0, 0, 2)]);
        assert_eq!(solve_integer(&a, &big(&[4])).unwrap().solution(), Some(&big(&[2])[..]));
        match solve_integer(&a, &big(&[3])).unwrap() {
            SolveOutcome::NoSolution(Obstruction::Divisibility { divisor, value, .. }) => {
                assert_eq!(divisor, BigInt::from(2));
                assert_eq!(value.magnitude(), BigInt::from(3).magnitude());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bezout_row() {
        let a = SparseMatrix::from_triples(1, 2, [(0, 0, 5), (0, 1, 2)]);
        let SolveOutcome::Solution { x, kernel } = solve_integer(&a, &big(&[1])).unwrap() else { panic!() };
        assert_eq!(a.mul_vec(&x), big(&[1]));
        assert_eq!(kernel.len(), 1);
        assert_eq!(a.mul_vec(&kernel[0]), big(&[0]));
    }

    #[test]
    fn inconsistent_system() {
        let a = SparseMatrix::from_triples(2, 1, [(0, 0, 1), (1, 0, 1)]);
        assert!(matches!(
            solve_integer(&a, &big(&[1, 2])).unwrap(),
            SolveOutcome::NoSolution(Obstruction::Inconsistent { .. })
        ));
    }

    #[test]
    fn shape_mismatch() {
        let a = SparseMatrix::zeros(2, 2);
        assert!(matches!(solve_integer(&a, &big(&[1])), Err(LinalgError::ShapeMismatch { .. })));
    }
}
