use std::sync::Arc;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{ConstructionError, DEFAULT_BUDGET};
use crate::cochain::{pullback_cochain, Cochain, Ring};
use crate::complex::{path, product_interval, CellComplex, CellMap, ProductComplex};
use crate::linalg::SparseMatrix;

/// `ξ : [0, n] → [0, 1]`, collapsing `[0, n−1]` to `0`.
pub fn collapse_map_xi(n: usize) -> Result<CellMap, ConstructionError> {
    if n == 0 {
        return Err(ConstructionError::InvalidParams("ξ needs n ≥ 1".into()));
    }
    let vm = (0..=n).map(|l| usize::from(l == n)).collect();
    Ok(CellMap::simplicial(Arc::new(path(n)), Arc::new(path(1)), vm)?)
}

/// `f × ξ` on product complexes built by `product_interval`, where `f` is
/// a cellular map of the bases and `ξ` a simplicial map of subdivided intervals.
pub fn product_map(
    f: &CellMap,
    xi: &CellMap,
    src: &Arc<CellComplex>,
    src_layout: &crate::complex::ProductLayout,
    tgt: &Arc<CellComplex>,
    tgt_layout: &crate::complex::ProductLayout,
) -> Result<CellMap, ConstructionError> {
    let xv = xi.vertex_map().ok_or_else(|| ConstructionError::NotSimplicial("ξ must be simplicial".into()))?;
    let xe = xi.chain(1);
    let top = src.dim();
    let mut chains = Vec::with_capacity(top + 1);
    for k in 0..=top {
        let mut t = Vec::new();
        if k < src_layout.base_counts.len() {
            let fk = f.chain(k);
            for l in 0..=src_layout.n {
                for (s, col) in fk.columns().iter().enumerate() {
                    for &(r, v) in col {
                        t.push((tgt_layout.slice_cell(k, r, xv[l]), src_layout.slice_cell(k, s, l), v));
                    }
                }
            }
        }
        if k >= 1 {
            let fk = f.chain(k - 1);
            for l in 0..src_layout.n {
                for &(e, w) in xe.col(l) {
                    for (s, col) in fk.columns().iter().enumerate() {
                        for &(r, v) in col {
                            t.push((tgt_layout.prism_cell(k - 1, r, e), src_layout.prism_cell(k - 1, s, l), v * w));
                        }
                    }
                }
            }
        }
        chains.push(SparseMatrix::from_triples(tgt.count(k), src.count(k), t));
    }
    Ok(CellMap::from_chains(src.clone(), tgt.clone(), chains)?)
}

/// How the interval length is chosen from a primitive `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NMode {
    /// `n = ‖γ‖!`.
    Factorial,
    /// `n = lcm{|γ(e)|}`.
    Lcm,
}

impl NMode {
    /// The interval length for `γ`; `None` when it does not fit in `limit`.
    pub fn n_for(self, gamma: &Cochain, limit: usize) -> Option<usize> {
        let vals = gamma.integer_values()?;
        let mut n: usize = 1;
        match self {
            NMode::Factorial => {
                let m = vals.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
                for i in 2..=m {
                    n = n.checked_mul(i as usize)?;
                    if n > limit {
                        return None;
                    }
                }
            }
            NMode::Lcm => {
                for v in vals.iter().filter(|&&v| v != 0) {
                    n = n.lcm(&(v.unsigned_abs() as usize));
                    if n > limit {
                        return None;
                    }
                }
            }
        }
        Some(n)
    }
}

#[derive(Debug, Clone)]
pub struct BetaOutcome {
    pub product: Arc<CellComplex>,
    pub layout: crate::complex::ProductLayout,
    pub beta: Cochain,
}

impl BetaOutcome {
    /// `(q × ξ)^*(1_{Δ×[0,1]})` for `q` the map of the base into a 2-simplex.
    pub fn target_cocycle(&self, q: &CellMap) -> Result<Cochain, ConstructionError> {
        let delta = q.target();
        if delta.counts() != [3, 3, 1] {
            return Err(ConstructionError::InvalidParams("q must map into a single 2-simplex".into()));
        }
        let ProductComplex { complex, layout } = product_interval(delta, 1)?;
        let tgt = Arc::new(complex);
        let xi = collapse_map_xi(self.layout.n)?;
        let f = product_map(q, &xi, &self.product, &self.layout, &tgt, &layout)?;
        let mut one = vec![0i64; tgt.count(3)];
        one[layout.prism_cell(2, 0, 0)] = 1;
        let mu = Cochain::from_integers(tgt, 3, Ring::Z, &one)?;
        Ok(pullback_cochain(&f, &mu)?)
    }

    /// `δβ = target`, `‖β‖ ≤ 4`, and `β` vanishes on `∂M × [0,n] ∪ M × {0,n}`
    /// for `∂M` the base label `relative`.
    pub fn verify(&self, target: &Cochain, relative: &str) -> Result<bool, ConstructionError> {
        let d = self.beta.coboundary()?;
        let n = self.layout.n;
        let mut ok = d.values() == target.values() && self.beta.norm() <= BigRational::from_integer(4.into());
        for name in [format!("{relative}×I"), "slice-0".to_string(), format!("slice-{n}")] {
            ok &= self.beta.vanishes_on(self.product.label(&name)?);
        }
        Ok(ok)
    }
}

/// `β` on `M × [0, n]` for a 1-cochain `γ` on `M`: prisms `e × [im, im+1]`
/// with `m = n / |γ(e)|` get `sgn γ(e)`, other prisms `0`; slices
/// `σ × {l}` get `−β(∂σ × [0, l])` for `0 < l < n` and `0` at the ends.
pub fn build_beta(gamma: &Cochain, n: usize) -> Result<BetaOutcome, ConstructionError> {
    build_beta_with(gamma, n, DEFAULT_BUDGET)
}

pub fn build_beta_with(gamma: &Cochain, n: usize, budget: usize) -> Result<BetaOutcome, ConstructionError> {
    if gamma.degree() != 1 {
        return Err(ConstructionError::InvalidParams("γ must be a 1-cochain".into()));
    }
    if n == 0 {
        return Err(ConstructionError::InvalidParams("n must be at least 1".into()));
    }
    let x = gamma.complex();
    let needed = (2 * n + 1).saturating_mul(x.total_cells());
    if needed > budget {
        return Err(ConstructionError::SizeGuardExceeded { needed, budget });
    }
    let g: Vec<i64> = gamma
        .values()
        .iter()
        .map(|v| if v.is_integer() { v.to_integer().to_i64() } else { None })
        .collect::<Option<Vec<i64>>>()
        .ok_or_else(|| ConstructionError::InvalidParams("γ must be integral".into()))?;
    let mut prism = vec![vec![0i64; n]; g.len()];
    for (e, &v) in g.iter().enumerate() {
        if v == 0 {
            continue;
        }
        let a = v.unsigned_abs() as usize;
        if n % a != 0 {
            return Err(ConstructionError::DivisibilityViolated { edge: e, value: v, n });
        }
        let m = n / a;
        for i in 0..a {
            prism[e][i * m] = v.signum();
        }
    }
    let ProductComplex { complex, layout } = product_interval(x, n)?;
    let mut vals = vec![0i64; complex.count(2)];
    for (e, row) in prism.iter().enumerate() {
        for (l, &v) in row.iter().enumerate() {
            vals[layout.prism_cell(1, e, l)] = v;
        }
    }
    if x.dim() >= 2 {
        let bd = x.boundary(2);
        for (s, col) in bd.columns().iter().enumerate() {
            let mut acc = 0i64;
            for l in 1..n {
                for &(e, c) in col {
                    acc += c * prism[e][l - 1];
                }
                vals[layout.slice_cell(2, s, l)] = -acc;
            }
        }
    }
    let product = Arc::new(complex);
    let beta = Cochain::from_integers(product.clone(), 2, Ring::Z, &vals)?;
    Ok(BetaOutcome { product, layout, beta })
}

/// Simplicial triangulation of `X × [0, n]`: vertex `(v, l)` is `l·|V| + v`,
/// and each `[v0 < … < vd] × [l, l+1]` is split into the staircase simplices
/// `{(v0,l), …, (vi,l), (vi,l+1), …, (vd,l+1)}`.
pub fn staircase_prism(x: &CellComplex, n: usize) -> Result<CellComplex, ConstructionError> {
    if !x.is_simplicial() {
        return Err(ConstructionError::NotSimplicial("staircase prism of a cell-mode complex".into()));
    }
    let nv = x.n_vertices();
    let mut gens = Vec::new();
    for s in x.maximal_simplices() {
        for l in 0..n {
            for i in 0..s.len() {
                let mut g: Vec<usize> = s[..=i].iter().map(|&v| l * nv + v).collect();
                g.extend(s[i..].iter().map(|&v| (l + 1) * nv + v));
                gens.push(g);
            }
        }
        if n == 0 {
            gens.push(s);
        }
    }
    Ok(CellComplex::from_simplices((n + 1) * nv, &gens)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{circle, simplex};

    #[test]
    fn xi_collapses_all_but_the_last_edge() {
        let xi = collapse_map_xi(3).unwrap();
        assert_eq!(xi.vertex_map().unwrap(), &[0, 0, 0, 1]);
        let img = xi.chain(1).mul_vec_i64(&[1, 1, 1]);
        assert_eq!(img, vec![1]);
        assert_eq!(collapse_map_xi(1).unwrap().vertex_map().unwrap(), &[0, 1]);
    }

    #[test]
    fn prisms_telescope_to_gamma() {
        let x = Arc::new(circle(3).unwrap());
        let g = Cochain::from_integers(x.clone(), 1, Ring::Z, &[3, 0, -2]).unwrap();
        let out = build_beta(&g, 6).unwrap();
        let v = out.beta.integer_values().unwrap();
        let row: Vec<i64> = (0..6).map(|l| v[out.layout.prism_cell(1, 0, l)]).collect();
        assert_eq!(row, vec![1, 0, 1, 0, 1, 0]);
        let row: Vec<i64> = (0..6).map(|l| v[out.layout.prism_cell(1, 2, l)]).collect();
        assert_eq!(row.iter().sum::<i64>(), -2);
        assert!(matches!(build_beta(&g, 4), Err(ConstructionError::DivisibilityViolated { value: 3, .. })));
        assert_eq!(NMode::Lcm.n_for(&g, 100), Some(6));
        assert_eq!(NMode::Factorial.n_for(&g, 100), Some(6));
    }

    #[test]
    fn beta_solves_the_prism_obstruction_on_a_triangle() {
        let x = Arc::new(simplex(2));
        let g = Cochain::from_integers(x.clone(), 1, Ring::Z, &[0, 0, 0]).unwrap();
        let out = build_beta(&g, 2).unwrap();
        assert!(out.beta.is_zero());
        let staircase = staircase_prism(&x, 2).unwrap();
        assert_eq!(staircase.euler_characteristic(), 1);
        assert_eq!(staircase.count(3), 6);
    }
}
