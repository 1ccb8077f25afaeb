use std::sync::Arc;

use super::{CellComplex, ComplexError};
use crate::linalg::SparseMatrix;

/// Cellular chain map between two complexes; simplicial maps also keep
/// their vertex map.
#[derive(Debug, Clone)]
pub struct CellMap {
    source: Arc<CellComplex>,
    target: Arc<CellComplex>,
    /// `chains[k]`: rows = target k-cells, columns = source k-cells.
    chains: Vec<SparseMatrix>,
    vertex_map: Option<Vec<usize>>,
}

impl CellMap {
    pub fn simplicial(
        source: Arc<CellComplex>,
        target: Arc<CellComplex>,
        vertex_map: Vec<usize>,
    ) -> Result<CellMap, ComplexError> {
        if !source.is_simplicial() || !target.is_simplicial() {
            return Err(ComplexError::NotSimplicial("simplicial map between cell-mode complexes".into()));
        }
        if vertex_map.len() != source.n_vertices() {
            return Err(ComplexError::NotSimplicial(format!(
                "vertex map has {} entries for {} vertices",
                vertex_map.len(),
                source.n_vertices()
            )));
        }
        if let Some(&v) = vertex_map.iter().find(|&&v| v >= target.n_vertices()) {
            return Err(ComplexError::NotAVertex(v));
        }
        let mut chains = Vec::with_capacity(source.dim() + 1);
        for k in 0..=source.dim() {
            let mut triples = Vec::new();
            for (i, s) in source.simplices(k).iter().enumerate() {
                let img: Vec<usize> = s.iter().map(|&v| vertex_map[v]).collect();
                let (sorted, sign) = sort_with_sign(&img);
                if sign == 0 {
                    let mut set = sorted;
                    set.dedup();
                    if target.simplex_index(&set).is_none() {
                        return Err(ComplexError::NotSimplicial(format!("image of {s:?} is not a simplex")));
                    }
                    continue;
                }
                let t = target
                    .simplex_index(&sorted)
                    .ok_or_else(|| ComplexError::NotSimplicial(format!("image of {s:?} is not a simplex")))?;
                triples.push((t, i, sign));
            }
            chains.push(SparseMatrix::from_triples(target.count(k), source.count(k), triples));
        }
        Ok(CellMap { source, target, chains, vertex_map: Some(vertex_map) })
    }

    /// A general cellular map given by its chain matrices; checked to commute with `∂`.
    pub fn from_chains(
        source: Arc<CellComplex>,
        target: Arc<CellComplex>,
        chains: Vec<SparseMatrix>,
    ) -> Result<CellMap, ComplexError> {
        if chains.len() != source.dim() + 1 {
            return Err(ComplexError::ShapeMismatch {
                dim: chains.len(),
                expected: format!("{} chain matrices", source.dim() + 1),
                found: chains.len().to_string(),
            });
        }
        for (k, m) in chains.iter().enumerate() {
            if m.nrows() != target.count(k) || m.ncols() != source.count(k) {
                return Err(ComplexError::ShapeMismatch {
                    dim: k,
                    expected: format!("{}x{}", target.count(k), source.count(k)),
                    found: format!("{}x{}", m.nrows(), m.ncols()),
                });
            }
        }
        let map = CellMap { source, target, chains, vertex_map: None };
        if let Some(k) = map.chain_map_defect() {
            return Err(ComplexError::NotAChainComplex { dim: k, row: 0, col: 0 });
        }
        Ok(map)
    }

    pub fn identity(x: Arc<CellComplex>) -> CellMap {
        let chains = (0..=x.dim()).map(|k| SparseMatrix::from_triples(x.count(k), x.count(k), (0..x.count(k)).map(|i| (i, i, 1)))).collect();
        let vertex_map = x.is_simplicial().then(|| (0..x.n_vertices()).collect());
        CellMap { source: x.clone(), target: x, chains, vertex_map }
    }

    pub fn source(&self) -> &Arc<CellComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<CellComplex> {
        &self.target
    }

    pub fn vertex_map(&self) -> Option<&[usize]> {
        self.vertex_map.as_deref()
    }

    /// Chain matrix in degree `k` (zero beyond the source dimension).
    pub fn chain(&self, k: usize) -> SparseMatrix {
        self.chains.get(k).cloned().unwrap_or_else(|| SparseMatrix::zeros(self.target.count(k), self.source.count(k)))
    }

    pub fn chain_ref(&self, k: usize) -> Option<&SparseMatrix> {
        self.chains.get(k)
    }

    /// First degree where `∂ ∘ f ≠ f ∘ ∂`.
    pub fn chain_map_defect(&self) -> Option<usize> {
        for k in 1..=self.source.dim() {
            let lhs = self.target.boundary(k).mul(&self.chain(k));
            let rhs = self.chain(k - 1).mul(&self.source.boundary(k));
            if lhs != rhs {
                return Some(k);
            }
        }
        None
    }

    pub fn is_chain_map(&self) -> bool {
        self.chain_map_defect().is_none()
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &CellMap) -> Result<CellMap, ComplexError> {
        if !Arc::ptr_eq(&self.target, &g.source) && *self.target != *g.source {
            return Err(ComplexError::NotSimplicial("maps are not composable".into()));
        }
        if let (Some(f), Some(h)) = (&self.vertex_map, &g.vertex_map) {
            let vm = f.iter().map(|&v| h[v]).collect();
            return CellMap::simplicial(self.source.clone(), g.target.clone(), vm);
        }
        let chains = (0..=self.source.dim()).map(|k| g.chain(k).mul(&self.chain(k))).collect();
        Ok(CellMap { source: self.source.clone(), target: g.target.clone(), chains, vertex_map: None })
    }

    /// Sorted, deduplicated image vertices of a source simplex.
    pub fn image_vertices(&self, k: usize, i: usize) -> Vec<usize> {
        let vm = self.vertex_map.as_ref().expect("simplicial map");
        let mut img: Vec<usize> = self.source.simplex(k, i).iter().map(|&v| vm[v]).collect();
        img.sort_unstable();
        img.dedup();
        img
    }

    /// Whether the map is injective on the vertices of every simplex.
    pub fn is_light(&self) -> bool {
        let Some(vm) = &self.vertex_map else { return false };
        let top = self.source.dim();
        (0..=top).all(|k| {
            self.source.simplices(k).iter().all(|s| {
                let mut img: Vec<usize> = s.iter().map(|&v| vm[v]).collect();
                img.sort_unstable();
                img.windows(2).all(|w| w[0] != w[1])
            })
        })
    }
}

/// Sorts a vertex list and returns the permutation sign, or 0 if a vertex repeats.
pub(crate) fn sort_with_sign(v: &[usize]) -> (Vec<usize>, i64) {
    let mut s = v.to_vec();
    let mut sign = 1;
    for i in 1..s.len() {
        let mut j = i;
        while j > 0 && s[j - 1] > s[j] {
            s.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if s.windows(2).any(|w| w[0] == w[1]) {
        sign = 0;
    }
    (s, sign)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_of_sorting() {
        assert_eq!(sort_with_sign(&[2, 0, 1]), (vec![0, 1, 2], 1));
        assert_eq!(sort_with_sign(&[1, 0, 2]), (vec![0, 1, 2], -1));
        assert_eq!(sort_with_sign(&[1, 1]).1, 0);
    }

    #[test]
    fn simplicial_map_is_chain_map() {
        let x = Arc::new(CellComplex::from_simplices(3, &[vec![0, 1, 2]]).unwrap());
        let f = CellMap::simplicial(x.clone(), x.clone(), vec![1, 2, 0]).unwrap();
        assert!(f.is_chain_map());
        let g = CellMap::simplicial(x.clone(), x.clone(), vec![0, 0, 1]).unwrap();
        assert!(g.is_chain_map());
        assert!(f.then(&g).unwrap().is_chain_map());
        assert!(f.is_light() && !g.is_light());
    }
}
