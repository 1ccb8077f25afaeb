//! Dense row-major matrices over a [`Scalar`].

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::scalar::{Overflow, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = DMat<BigInt>;

impl<T: Scalar> DMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DMat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        DMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// `row[dst] -= q * row[src]`.
    pub fn row_sub_mul(&mut self, dst: usize, src: usize, q: &T) -> Result<(), Overflow> {
        for c in 0..self.cols {
            let s = &self.data[src * self.cols + c];
            if s.is_zero() {
                continue;
            }
            let v = self.data[dst * self.cols + c].sub_mul(q, s)?;
            self.data[dst * self.cols + c] = v;
        }
        Ok(())
    }

    /// `col[dst] -= q * col[src]`.
    pub fn col_sub_mul(&mut self, dst: usize, src: usize, q: &T) -> Result<(), Overflow> {
        for r in 0..self.rows {
            let s = &self.data[r * self.cols + src];
            if s.is_zero() {
                continue;
            }
            let v = self.data[r * self.cols + dst].sub_mul(q, s)?;
            self.data[r * self.cols + dst] = v;
        }
        Ok(())
    }

    pub fn negate_row(&mut self, r: usize) -> Result<(), Overflow> {
        for c in 0..self.cols {
            let v = self.data[r * self.cols + c].neg()?;
            self.data[r * self.cols + c] = v;
        }
        Ok(())
    }

    pub fn mul(&self, other: &DMat<T>) -> Result<DMat<T>, Overflow> {
        assert_eq!(self.cols, other.rows, "shape mismatch in dense product");
        let mut out = DMat::<T>::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).add(&a.mul(b)?)?;
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>, Overflow> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![T::zero(); self.rows];
        for (i, yi) in y.iter_mut().enumerate() {
            for (j, xj) in x.iter().enumerate() {
                let a = self.get(i, j);
                if a.is_zero() || xj.is_zero() {
                    continue;
                }
                *yi = yi.add(&a.mul(xj)?)?;
            }
        }
        Ok(y)
    }

    pub fn transpose(&self) -> DMat<T> {
        let mut t = DMat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn to_big(&self) -> IntMatrix {
        DMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(Scalar::to_big).collect() }
    }

    pub fn try_from_big(m: &IntMatrix) -> Result<DMat<T>, Overflow> {
        Ok(DMat { rows: m.rows, cols: m.cols, data: m.data.iter().map(T::from_big).collect::<Result<_, _>>()? })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn determinant(&self) -> Result<T, Overflow> {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut sign_neg = false;
        let mut prev = T::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !m.get(r, k).is_zero()) else {
                return Ok(T::zero());
            };
            if p != k {
                m.swap_rows(p, k);
                sign_neg = !sign_neg;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = m.get(i, j).mul(m.get(k, k))?.sub(&m.get(i, k).mul(m.get(k, j))?)?.quot(&prev)?;
                    m.set(i, j, v);
                }
            }
            prev = m.get(k, k).clone();
        }
        let d = if n == 0 { T::one() } else { m.get(n - 1, n - 1).clone() };
        if sign_neg {
            d.neg()
        } else {
            Ok(d)
        }
    }
}
