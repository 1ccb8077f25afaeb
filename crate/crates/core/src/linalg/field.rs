//! Dense elimination over Q and over Z/p.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::sparse::SparseMatrix;

pub trait Field {
    type E: Clone + PartialEq + std::fmt::Debug;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn from_i64(&self, v: i64) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
}

#[derive(Debug, Clone, Copy)]
pub struct Rationals;

impl Field for Rationals {
    type E = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
}

/// Integers modulo a prime `p < 2^32`.
#[derive(Debug, Clone, Copy)]
pub struct Fp(pub u64);

impl Field for Fp {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.0
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.0 as i64) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.0
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.0 - b) % self.0
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.0
    }
    fn inv(&self, a: &u64) -> u64 {
        // Fermat: a^(p−2).
        let (mut base, mut e, mut acc) = (*a % self.0, self.0 - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.0;
            }
            base = base * base % self.0;
            e >>= 1;
        }
        acc
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
}

/// Dense matrix over a field, stored as rows.
#[derive(Debug)]
pub struct FMat<F: Field> {
    pub rows: Vec<Vec<F::E>>,
    pub ncols: usize,
}

impl<F: Field> Clone for FMat<F> {
    fn clone(&self) -> Self {
        FMat { rows: self.rows.clone(), ncols: self.ncols }
    }
}

impl<F: Field> FMat<F> {
    pub fn from_sparse(f: &F, a: &SparseMatrix) -> FMat<F> {
        let mut rows = vec![vec![f.zero(); a.ncols()]; a.nrows()];
        for (c, col) in a.columns().iter().enumerate() {
            for &(r, v) in col {
                rows[r][c] = f.from_i64(v);
            }
        }
        FMat { rows, ncols: a.ncols() }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(f: &F, nrows: usize, cols: &[Vec<F::E>]) -> FMat<F> {
        let mut rows = vec![vec![f.zero(); cols.len()]; nrows];
        for (c, col) in cols.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                rows[r][c] = v.clone();
            }
        }
        FMat { rows, ncols: cols.len() }
    }

    /// Reduces to row echelon form in place; returns the pivot columns.
    pub fn echelon(&mut self, f: &F) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.ncols {
            let Some(p) = (r..self.rows.len()).find(|&i| !f.is_zero(&self.rows[i][c])) else { continue };
            self.rows.swap(r, p);
            let inv = f.inv(&self.rows[r][c]);
            for x in self.rows[r].iter_mut() {
                *x = f.mul(x, &inv);
            }
            let pivot_row = self.rows[r].clone();
            for i in 0..self.rows.len() {
                if i == r || f.is_zero(&self.rows[i][c]) {
                    continue;
                }
                let factor = self.rows[i][c].clone();
                for (j, pv) in pivot_row.iter().enumerate().skip(c) {
                    if !f.is_zero(pv) {
                        self.rows[i][j] = f.sub(&self.rows[i][j], &f.mul(&factor, pv));
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == self.rows.len() {
                break;
            }
        }
        pivots
    }

    pub fn rank(&self, f: &F) -> usize {
        self.clone().echelon(f).len()
    }

    /// Basis of the null space `{x : A x = 0}`.
    pub fn kernel(&self, f: &F) -> Vec<Vec<F::E>> {
        let mut m = self.clone();
        let pivots = m.echelon(f);
        let free: Vec<usize> = (0..self.ncols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![f.zero(); self.ncols];
                v[fc] = f.one();
                for (i, &pc) in pivots.iter().enumerate() {
                    let x = &m.rows[i][fc];
                    if !f.is_zero(x) {
                        v[pc] = f.sub(&f.zero(), x);
                    }
                }
                v
            })
            .collect()
    }

    pub fn mul_vec(&self, f: &F, x: &[F::E]) -> Vec<F::E> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(x).fold(f.zero(), |acc, (a, b)| if f.is_zero(a) { acc } else { f.add(&acc, &f.mul(a, b)) }))
            .collect()
    }
}

/// Rank of a sparse integer matrix over `F`.
pub fn rank_over<F: Field>(f: &F, a: &SparseMatrix) -> usize {
    FMat::from_sparse(f, a).rank(f)
}
