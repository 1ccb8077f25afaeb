//! Finite regular cell complexes with integer incidence matrices.
//!
//! A complex either carries explicit simplices (simplicial mode) or only its
//! boundary matrices (cell mode). In simplicial mode the `k`-cells are the
//! sorted vertex lists of the `k`-simplices, in lexicographic order, and the
//! boundary of `[v0, …, vk]` is `Σ (−1)^i [v0, …, v̂i, …, vk]`.

mod builders;
pub mod io;
mod map;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::SparseMatrix;

pub use builders::*;
pub use map::CellMap;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("shape mismatch in boundary[{dim}]: expected {expected}, found {found}")]
    ShapeMismatch { dim: usize, expected: String, found: String },
    #[error("boundary[{dim}]·boundary[{}] is nonzero at cell {col} (row {row})", dim + 1)]
    NotAChainComplex { dim: usize, row: usize, col: usize },
    #[error("edge {col} does not have one +1 and one −1 endpoint")]
    BadEdgeColumn { col: usize },
    #[error("cell {col} of dimension {dim} is not a simplex boundary")]
    NotSimplexBoundary { dim: usize, col: usize },
    #[error("a circle needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("{b} does not divide {a}")]
    NotDivisible { a: usize, b: usize },
    #[error("not simplicial: {0}")]
    NotSimplicial(String),
    #[error("{0} is not a vertex")]
    NotAVertex(usize),
    #[error("matched subcomplexes are not isomorphic: {0}")]
    NotIsomorphic(String),
    #[error("matching reverses the orientation of the glued circle")]
    OrientationMismatch,
    #[error("dimension {found} exceeds the supported maximum {max}")]
    DimensionTooHigh { found: usize, max: usize },
    #[error("input is not a single 2-simplex")]
    NotASimplex,
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("label {0:?} is not a subcomplex")]
    NotASubcomplex(String),
    #[error("size guard exceeded: {needed} cells, budget {budget}")]
    SizeGuardExceeded { needed: usize, budget: usize },
    #[error("format error: {0}")]
    Format(String),
}

/// A named set of cells, optionally with an oriented cyclic vertex sequence
/// when the cells form a circle.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Label {
    /// Sorted cell indices per dimension.
    pub cells: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<Vec<usize>>,
}

impl Label {
    pub fn from_cells(mut cells: Vec<Vec<usize>>) -> Label {
        for c in &mut cells {
            c.sort_unstable();
            c.dedup();
        }
        while cells.last().is_some_and(Vec::is_empty) {
            cells.pop();
        }
        Label { cells, circuit: None }
    }

    pub fn cells_in(&self, k: usize) -> &[usize] {
        self.cells.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn contains(&self, k: usize, cell: usize) -> bool {
        self.cells_in(k).binary_search(&cell).is_ok()
    }

    pub fn len(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellComplex {
    counts: Vec<usize>,
    /// `boundary[k]` has rows = (k−1)-cells and columns = k-cells; `boundary[0]` is `0 × n0`.
    boundary: Vec<SparseMatrix>,
    simplices: Option<Vec<Vec<Vec<usize>>>>,
    index: Option<Vec<HashMap<Vec<usize>, usize>>>,
    labels: BTreeMap<String, Label>,
}

impl CellComplex {
    /// Validated cell-mode complex from cell counts and boundary matrices
    /// `boundaries[k−1] = ∂_k` for `k = 1..=dim`.
    pub fn new(counts: Vec<usize>, boundaries: Vec<SparseMatrix>) -> Result<CellComplex, ComplexError> {
        if counts.is_empty() {
            return Err(ComplexError::ShapeMismatch {
                dim: 0,
                expected: "at least one dimension".into(),
                found: "none".into(),
            });
        }
        if boundaries.len() + 1 != counts.len() {
            return Err(ComplexError::ShapeMismatch {
                dim: boundaries.len(),
                expected: format!("{} boundary matrices", counts.len() - 1),
                found: format!("{}", boundaries.len()),
            });
        }
        let mut boundary = vec![SparseMatrix::zeros(0, counts[0])];
        for (i, m) in boundaries.into_iter().enumerate() {
            let k = i + 1;
            if m.nrows() != counts[k - 1] || m.ncols() != counts[k] {
                return Err(ComplexError::ShapeMismatch {
                    dim: k,
                    expected: format!("{}x{}", counts[k - 1], counts[k]),
                    found: format!("{}x{}", m.nrows(), m.ncols()),
                });
            }
            boundary.push(m);
        }
        let cx = CellComplex { counts, boundary, simplices: None, index: None, labels: BTreeMap::new() };
        cx.validate()?;
        Ok(cx)
    }

    /// Simplicial complex on vertices `0..n_vertices` generated by the given
    /// simplices and all their faces. Isolated vertices are kept.
    pub fn from_simplices(n_vertices: usize, generators: &[Vec<usize>]) -> Result<CellComplex, ComplexError> {
        let mut dim = 0;
        let mut sets: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new()];
        for g in generators {
            let mut s = g.clone();
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(ComplexError::NotSimplicial(format!("repeated vertex in {g:?}")));
            }
            if let Some(&v) = s.iter().find(|&&v| v >= n_vertices) {
                return Err(ComplexError::NotAVertex(v));
            }
            if s.is_empty() {
                continue;
            }
            dim = dim.max(s.len() - 1);
            while sets.len() <= s.len() - 1 {
                sets.push(BTreeSet::new());
            }
            insert_with_faces(&mut sets, s);
        }
        for v in 0..n_vertices {
            sets[0].insert(vec![v]);
        }
        let simplices: Vec<Vec<Vec<usize>>> = sets.into_iter().take(dim + 1).map(|s| s.into_iter().collect()).collect();
        Ok(Self::from_sorted_simplices(simplices))
    }

    pub(crate) fn from_sorted_simplices(simplices: Vec<Vec<Vec<usize>>>) -> CellComplex {
        let index: Vec<HashMap<Vec<usize>, usize>> =
            simplices.iter().map(|l| l.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()).collect();
        let counts: Vec<usize> = simplices.iter().map(Vec::len).collect();
        let mut boundary = vec![SparseMatrix::zeros(0, counts[0])];
        for k in 1..simplices.len() {
            let cols: Vec<Vec<(usize, i64)>> = simplices[k]
                .iter()
                .map(|s| {
                    (0..s.len())
                        .map(|i| {
                            let mut f = s.clone();
                            f.remove(i);
                            (index[k - 1][&f], if i % 2 == 0 { 1 } else { -1 })
                        })
                        .collect()
                })
                .collect();
            boundary.push(SparseMatrix::from_columns(counts[k - 1], cols));
        }
        CellComplex { counts, boundary, simplices: Some(simplices), index: Some(index), labels: BTreeMap::new() }
    }

    /// Checks shapes, `∂∂ = 0`, the edge rule, and the simplicial-mode rule.
    pub fn validate(&self) -> Result<(), ComplexError> {
        for k in 1..self.boundary.len() {
            let m = &self.boundary[k];
            if m.nrows() != self.counts[k - 1] || m.ncols() != self.counts[k] {
                return Err(ComplexError::ShapeMismatch {
                    dim: k,
                    expected: format!("{}x{}", self.counts[k - 1], self.counts[k]),
                    found: format!("{}x{}", m.nrows(), m.ncols()),
                });
            }
        }
        if self.dim() >= 1 {
            for (c, col) in self.boundary[1].columns().iter().enumerate() {
                let ok = col.is_empty()
                    || (col.len() == 2 && {
                        let mut s = [col[0].1, col[1].1];
                        s.sort_unstable();
                        s == [-1, 1]
                    });
                if !ok || (self.is_simplicial() && col.is_empty()) {
                    return Err(ComplexError::BadEdgeColumn { col: c });
                }
            }
        }
        if self.is_simplicial() {
            for k in 1..self.boundary.len() {
                for (c, col) in self.boundary[k].columns().iter().enumerate() {
                    if col.len() != k + 1 || col.iter().any(|e| e.1.abs() != 1) {
                        return Err(ComplexError::NotSimplexBoundary { dim: k, col: c });
                    }
                }
            }
        }
        for k in 1..self.boundary.len().saturating_sub(1) {
            if let Some((row, col)) = self.boundary[k].first_nonzero_of_product(&self.boundary[k + 1]) {
                return Err(ComplexError::NotAChainComplex { dim: k, row, col });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Number of `k`-cells (0 beyond the top dimension).
    pub fn count(&self, k: usize) -> usize {
        self.counts.get(k).copied().unwrap_or(0)
    }

    pub fn total_cells(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn n_vertices(&self) -> usize {
        self.counts[0]
    }

    /// `∂_k`; for `k` beyond the top dimension an empty matrix of the right shape.
    pub fn boundary(&self, k: usize) -> SparseMatrix {
        if k == 0 {
            SparseMatrix::zeros(0, self.counts[0])
        } else if k <= self.dim() {
            self.boundary[k].clone()
        } else {
            SparseMatrix::zeros(self.count(k - 1), 0)
        }
    }

    pub fn boundary_ref(&self, k: usize) -> Option<&SparseMatrix> {
        self.boundary.get(k)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.counts.iter().enumerate().map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) }).sum()
    }

    pub fn is_simplicial(&self) -> bool {
        self.simplices.is_some()
    }

    /// Vertex lists of the `k`-simplices (simplicial mode only).
    pub fn simplices(&self, k: usize) -> &[Vec<usize>] {
        self.simplices.as_ref().and_then(|s| s.get(k)).map_or(&[], Vec::as_slice)
    }

    pub fn simplex(&self, k: usize, i: usize) -> &[usize] {
        &self.simplices.as_ref().expect("simplicial mode")[k][i]
    }

    /// Index of the simplex with the given sorted vertex list.
    pub fn simplex_index(&self, vertices: &[usize]) -> Option<usize> {
        let k = vertices.len().checked_sub(1)?;
        self.index.as_ref()?.get(k)?.get(vertices).copied()
    }

    /// Endpoints `(u, v)` of edge `e` with `∂e = v − u`.
    pub fn edge_endpoints(&self, e: usize) -> Option<(usize, usize)> {
        let col = self.boundary.get(1)?.col(e);
        if col.len() != 2 {
            return None;
        }
        Some(if col[0].1 < 0 { (col[0].0, col[1].0) } else { (col[1].0, col[0].0) })
    }

    pub fn labels(&self) -> &BTreeMap<String, Label> {
        &self.labels
    }

    pub fn label(&self, name: &str) -> Result<&Label, ComplexError> {
        self.labels.get(name).ok_or_else(|| ComplexError::UnknownLabel(name.to_string()))
    }

    /// Adds (or replaces) a label after checking it is closed under faces.
    pub fn set_label(&mut self, name: &str, label: Label) -> Result<(), ComplexError> {
        let label = Label { circuit: label.circuit, ..Label::from_cells(label.cells) };
        for (k, cells) in label.cells.iter().enumerate() {
            if cells.iter().any(|&c| c >= self.count(k)) {
                return Err(ComplexError::NotASubcomplex(name.to_string()));
            }
        }
        if !self.is_closed(&label) {
            return Err(ComplexError::NotASubcomplex(name.to_string()));
        }
        self.labels.insert(name.to_string(), label);
        Ok(())
    }

    pub fn remove_label(&mut self, name: &str) -> Option<Label> {
        self.labels.remove(name)
    }

    pub fn rename_label(&mut self, from: &str, to: &str) -> Result<(), ComplexError> {
        let l = self.labels.remove(from).ok_or_else(|| ComplexError::UnknownLabel(from.to_string()))?;
        self.labels.insert(to.to_string(), l);
        Ok(())
    }

    pub(crate) fn labels_mut(&mut self) -> &mut BTreeMap<String, Label> {
        &mut self.labels
    }

    /// Whether every face of every cell in `label` is also in `label`.
    pub fn is_closed(&self, label: &Label) -> bool {
        for k in 1..=self.dim() {
            for &c in label.cells_in(k) {
                if self.boundary[k].col(c).iter().any(|&(r, _)| !label.contains(k - 1, r)) {
                    return false;
                }
            }
        }
        true
    }

    /// Closure under faces of a set of cells.
    pub fn closure(&self, mut cells: Vec<Vec<usize>>) -> Label {
        cells.resize(self.dim() + 1, Vec::new());
        let mut sets: Vec<BTreeSet<usize>> = cells.into_iter().map(|v| v.into_iter().collect()).collect();
        for k in (1..=self.dim()).rev() {
            let faces: Vec<usize> =
                sets[k].iter().flat_map(|&c| self.boundary[k].col(c).iter().map(|e| e.0)).collect();
            sets[k - 1].extend(faces);
        }
        Label::from_cells(sets.into_iter().map(|s| s.into_iter().collect()).collect())
    }

    /// Subcomplex spanned by a vertex set: all simplices with every vertex in the set.
    pub fn full_subcomplex(&self, vertices: &BTreeSet<usize>) -> Label {
        let cells = (0..=self.dim())
            .map(|k| {
                (0..self.count(k)).filter(|&i| self.simplex(k, i).iter().all(|v| vertices.contains(v))).collect()
            })
            .collect();
        Label::from_cells(cells)
    }

    /// Vertices of a label's 0-cells.
    pub fn label_vertices(&self, label: &Label) -> BTreeSet<usize> {
        label.cells_in(0).iter().copied().collect()
    }

    /// Edges incident to each vertex.
    pub fn vertex_edges(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n_vertices()];
        if self.dim() >= 1 {
            for (e, col) in self.boundary[1].columns().iter().enumerate() {
                for &(v, _) in col {
                    inc[v].push(e);
                }
            }
        }
        inc
    }

    /// Neighbours of each vertex along edges, sorted.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_vertices()];
        if self.dim() >= 1 {
            for col in self.boundary[1].columns() {
                if col.len() == 2 {
                    adj[col[0].0].push(col[1].0);
                    adj[col[1].0].push(col[0].0);
                }
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }

    /// Cofaces: for each `k`-cell the `(k+1)`-cells having it as a face.
    pub fn cofaces(&self, k: usize) -> Vec<Vec<usize>> {
        let mut co = vec![Vec::new(); self.count(k)];
        if k < self.dim() {
            for (c, col) in self.boundary[k + 1].columns().iter().enumerate() {
                for &(r, _) in col {
                    co[r].push(c);
                }
            }
        }
        co
    }

    /// Maximum number of edges at a vertex.
    pub fn max_valence(&self) -> usize {
        self.vertex_edges().iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Top-dimensional simplices as generators, for rebuilding.
    pub fn maximal_simplices(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for k in 0..=self.dim() {
            let co = self.cofaces(k);
            for (i, s) in self.simplices(k).iter().enumerate() {
                if co[i].is_empty() {
                    out.push(s.clone());
                }
            }
        }
        out
    }

    /// Ensures the complex stays under a size budget.
    pub fn check_size(&self, budget: usize) -> Result<(), ComplexError> {
        let needed = self.total_cells();
        if needed > budget {
            return Err(ComplexError::SizeGuardExceeded { needed, budget });
        }
        Ok(())
    }
}

fn insert_with_faces(sets: &mut [BTreeSet<Vec<usize>>], s: Vec<usize>) {
    let k = s.len() - 1;
    if sets[k].contains(&s) {
        return;
    }
    if k > 0 {
        for i in 0..s.len() {
            let mut f = s.clone();
            f.remove(i);
            insert_with_faces(sets, f);
        }
    }
    sets[k].insert(s);
}
