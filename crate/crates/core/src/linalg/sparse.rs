//! Column-compressed sparse integer matrices.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::dense::DMat;


/// Sparse integer matrix stored by columns; each column is sorted by row
/// and holds no explicit zeros.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    cols: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, ncols, cols: vec![Vec::new(); ncols] }
    }

    /// Builds a matrix from `(row, col, value)` triples. Repeated positions
    /// are summed. Panics if an index is out of range.
    pub fn from_triples(nrows: usize, ncols: usize, triples: impl IntoIterator<Item = (usize, usize, i64)>) -> Self {
        let mut cols: Vec<Vec<(usize, i64)>> = vec![Vec::new(); ncols];
        for (r, c, v) in triples {
            assert!(r < nrows && c < ncols, "triple ({r},{c}) outside {nrows}x{ncols}");
            cols[c].push((r, v));
        }
        for col in &mut cols {
            normalize(col);
        }
        SparseMatrix { nrows, ncols, cols }
    }

    pub fn from_columns(nrows: usize, columns: Vec<Vec<(usize, i64)>>) -> Self {
        let ncols = columns.len();
        Self::from_triples(
            nrows,
            ncols,
            columns.into_iter().enumerate().flat_map(|(c, col)| col.into_iter().map(move |(r, v)| (r, c, v))),
        )
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn col(&self, c: usize) -> &[(usize, i64)] {
        &self.cols[c]
    }

    pub fn columns(&self) -> &[Vec<(usize, i64)>] {
        &self.cols
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.cols[c].binary_search_by_key(&r, |e| e.0).map(|i| self.cols[c][i].1).unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    /// Triples in row-major order.
    pub fn triples(&self) -> Vec<(usize, usize, i64)> {
        let mut t: Vec<_> =
            self.cols.iter().enumerate().flat_map(|(c, col)| col.iter().map(move |&(r, v)| (r, c, v))).collect();
        t.sort_unstable();
        t
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut cols = vec![Vec::new(); self.nrows];
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                cols[r].push((c, v));
            }
        }
        SparseMatrix { nrows: self.ncols, ncols: self.nrows, cols }
    }

    /// Product `self * other`; panics on shape mismatch or i64 overflow.
    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols, other.nrows, "shape mismatch in sparse product");
        let mut acc = vec![0i64; self.nrows];
        let mut touched = Vec::new();
        let mut cols = Vec::with_capacity(other.ncols);
        for ocol in &other.cols {
            for &(k, w) in ocol {
                for &(r, v) in &self.cols[k] {
                    if acc[r] == 0 {
                        touched.push(r);
                    }
                    acc[r] = acc[r].checked_add(v.checked_mul(w).expect("overflow")).expect("overflow");
                }
            }
            touched.sort_unstable();
            touched.dedup();
            let mut col = Vec::new();
            for &r in &touched {
                if acc[r] != 0 {
                    col.push((r, acc[r]));
                }
                acc[r] = 0;
            }
            touched.clear();
            cols.push(col);
        }
        SparseMatrix { nrows: self.nrows, ncols: other.ncols, cols }
    }

    /// First column (and a nonzero row in it) of `self * other`, if the
    /// product is nonzero.
    pub fn first_nonzero_of_product(&self, other: &SparseMatrix) -> Option<(usize, usize)> {
        let p = self.mul(other);
        p.cols.iter().enumerate().find_map(|(c, col)| col.first().map(|&(r, _)| (r, c)))
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![BigInt::zero(); self.nrows];
        for (c, col) in self.cols.iter().enumerate() {
            if x[c].is_zero() {
                continue;
            }
            for &(r, v) in col {
                y[r] += &x[c] * v;
            }
        }
        y
    }

    pub fn mul_vec_i64(&self, x: &[i64]) -> Vec<i64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![0i64; self.nrows];
        for (c, col) in self.cols.iter().enumerate() {
            if x[c] == 0 {
                continue;
            }
            for &(r, v) in col {
                y[r] += v * x[c];
            }
        }
        y
    }

    /// Submatrix on the given rows and columns (in the given order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut pos = vec![usize::MAX; self.nrows];
        for (i, &r) in rows.iter().enumerate() {
            pos[r] = i;
        }
        let columns = cols
            .iter()
            .map(|&c| {
                let mut col: Vec<(usize, i64)> =
                    self.cols[c].iter().filter(|e| pos[e.0] != usize::MAX).map(|&(r, v)| (pos[r], v)).collect();
                col.sort_unstable();
                col
            })
            .collect();
        SparseMatrix { nrows: rows.len(), ncols: cols.len(), cols: columns }
    }

    pub fn to_dense<T: super::scalar::Scalar>(&self) -> DMat<T> {
        let mut m = DMat::zeros(self.nrows, self.ncols);
        for (c, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                m.set(r, c, T::from_big(&BigInt::from(v)).expect("i64 fits every scalar"));
            }
        }
        m
    }
}

fn normalize(col: &mut Vec<(usize, i64)>) {
    col.sort_unstable_by_key(|e| e.0);
    let mut out: Vec<(usize, i64)> = Vec::with_capacity(col.len());
    for &(r, v) in col.iter() {
        match out.last_mut() {
            Some(last) if last.0 == r => last.1 += v,
            _ => out.push((r, v)),
        }
    }
    out.retain(|e| e.1 != 0);
    *col = out;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triples_merge_and_drop_zeros() {
        let m = SparseMatrix::from_triples(2, 2, [(0, 0, 1), (0, 0, -1), (1, 0, 2), (1, 1, 3), (1, 1, 1)]);
        assert_eq!(m.triples(), vec![(1, 0, 2), (1, 1, 4)]);
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn product_and_transpose() {
        let a = SparseMatrix::from_triples(2, 3, [(0, 0, 1), (0, 2, 2), (1, 1, -1)]);
        let p = a.mul(&a.transpose());
        assert_eq!(p.triples(), vec![(0, 0, 5), (1, 1, 1)]);
        assert_eq!(a.mul_vec_i64(&[1, 1, 1]), vec![3, -1]);
    }

    #[test]
    fn select_reorders() {
        let a = SparseMatrix::from_triples(3, 3, [(0, 0, 1), (1, 1, 2), (2, 2, 3)]);
        let s = a.select(&[2, 0], &[2, 0]);
        assert_eq!(s.triples(), vec![(0, 0, 3), (1, 1, 1)]);
    }
}
