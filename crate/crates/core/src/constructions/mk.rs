#![allow(non_snake_case)]

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{circuit_label, simplicial_approx_identity, ConstructionError, DEFAULT_BUDGET};
use crate::cochain::{fundamental_class, is_prime, pullback_cochain, Cochain};
use crate::complex::{circle, mapping_cylinder, midpoint_subdivision, simplex, CellComplex, CellMap, Label, Subdivision};
use crate::degree::checked_pow;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MkParams {
    pub p: u64,
    pub q: u64,
    pub k: u32,
    #[serde(default = "default_edge_scale")]
    pub edge_scale: usize,
    #[serde(default)]
    pub reduce: bool,
    #[serde(default = "default_budget")]
    pub budget: usize,
}

fn default_edge_scale() -> usize {
    3
}

fn default_budget() -> usize {
    DEFAULT_BUDGET
}

impl MkParams {
    pub fn new(p: u64, q: u64, k: u32) -> MkParams {
        MkParams { p, q, k, edge_scale: 3, reduce: false, budget: DEFAULT_BUDGET }
    }

    pub fn reduced(p: u64, q: u64, k: u32) -> MkParams {
        MkParams { reduce: true, ..MkParams::new(p, q, k) }
    }

    pub fn validate(&self) -> Result<(), ConstructionError> {
        let bad = |m: String| Err(ConstructionError::InvalidParams(m));
        if !is_prime(self.p) {
            return bad(format!("p = {} is not prime", self.p));
        }
        if !is_prime(self.q) {
            return bad(format!("q = {} is not prime", self.q));
        }
        if self.p == self.q {
            return bad("p and q must differ".into());
        }
        if self.k < 1 {
            return bad("k must be at least 1".into());
        }
        if self.edge_scale < 3 {
            return bad(format!("edge_scale = {} must be at least 3", self.edge_scale));
        }
        Ok(())
    }

    /// Whether `p > q²`. Builders still run when this fails.
    pub fn hypothesis_holds(&self) -> bool {
        self.q.checked_mul(self.q).is_some_and(|q2| self.p > q2)
    }

    /// Like this one, at a different level.
    pub fn at_level(&self, k: u32) -> MkParams {
        MkParams { k, ..self.clone() }
    }

    /// Vertex count of the stage circle `i` of the tower for `prime`.
    /// Circle `i + 1` wraps onto circle `i` with degree `prime`.
    pub fn circle_size(&self, prime: u64, i: u32) -> Result<usize, ConstructionError> {
        let e = self.edge_scale as u64;
        let overflow = || ConstructionError::SizeGuardExceeded { needed: usize::MAX, budget: self.budget };
        let n = if self.reduce || i == 0 {
            checked_pow(prime as i64, i).ok().and_then(|v| (v as u64).checked_mul(e)).ok_or_else(overflow)?
        } else {
            checked_pow((e * prime) as i64, i).map_err(|_| overflow())? as u64
        };
        let n = usize::try_from(n).map_err(|_| overflow())?;
        if n > self.budget {
            return Err(ConstructionError::SizeGuardExceeded { needed: n, budget: self.budget });
        }
        Ok(n)
    }

    /// Collapse factor `r` of stage `i`: vertex `j` of circle `i + 1` goes to `(j div r) mod s_i`.
    fn collapse_factor(&self, prime: u64, i: u32) -> Result<usize, ConstructionError> {
        Ok(self.circle_size(prime, i + 1)? / (prime as usize * self.circle_size(prime, i)?))
    }
}

/// One annulus stage: the mapping cylinder of the degree-`p` wrap of circle
/// `i + 1` onto circle `i`. Rims are labeled `"domain-rim"` and
/// `"target-rim"`; the returned map collapses onto the target circle.
pub fn build_Tp(p: u64, i: u32, params: &MkParams) -> Result<(CellComplex, CellMap), ConstructionError> {
    if !is_prime(p) {
        return Err(ConstructionError::InvalidParams(format!("p = {p} is not prime")));
    }
    let a = params.circle_size(p, i + 1)?;
    let b = params.circle_size(p, i)?;
    let r = params.collapse_factor(p, i)?;
    let wrap = CellMap::simplicial(Arc::new(circle(a)?), Arc::new(circle(b)?), (0..a).map(|j| (j / r) % b).collect())?;
    let cyl = mapping_cylinder(&wrap)?;
    let mut cx = (*cyl.complex).clone();
    cx.rename_label("domain", "domain-rim")?;
    cx.rename_label("target", "target-rim")?;
    cx.check_size(params.budget)?;
    let cx = Arc::new(cx);
    let collapse = CellMap::simplicial(cx.clone(), wrap.target().clone(), cyl.retraction.vertex_map().expect("simplicial").to_vec())?;
    Ok(((*cx).clone(), collapse))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValenceReport {
    pub max_valence: usize,
    pub limit: usize,
    /// Vertices with more than `limit` edges.
    pub violations: usize,
}

impl ValenceReport {
    pub fn ok(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone)]
pub struct MkBundle {
    pub complex: Arc<CellComplex>,
    pub boundary_circle: Label,
    pub p_hole: Label,
    pub q_hole: Label,
    /// Into the midpoint-subdivided 2-simplex `tau`; the complement of `D` goes to `m01`.
    pub phi: CellMap,
    pub tau: Subdivision,
    /// Into `tau_cone`, the subdivision with an extra cone vertex `6` over the
    /// middle face; the complement of `D` goes to the cone vertex.
    pub phi_cone: CellMap,
    pub tau_cone: Subdivision,
    pub params: MkParams,
    pub valence: ValenceReport,
}

impl MkBundle {
    /// Lowest-carrier approximation `τ → Δ` of the identity.
    pub fn rho(&self) -> CellMap {
        simplicial_approx_identity(&self.tau).expect("midpoint subdivision has carriers")
    }

    /// `q_k = ρ ∘ φ : M_k → Δ`.
    pub fn q_map(&self) -> CellMap {
        self.phi.then(&self.rho()).expect("composable")
    }

    /// `q_k^*(1_Δ)`.
    pub fn obstruction_cocycle(&self) -> Result<Cochain, ConstructionError> {
        let q = self.q_map();
        let mu = fundamental_class(q.target(), 2)?;
        Ok(pullback_cochain(&q, &mu)?)
    }
}

struct Gens {
    gens: Vec<Vec<usize>>,
    next: usize,
}

impl Gens {
    fn alloc(&mut self, n: usize) -> Vec<usize> {
        let v: Vec<usize> = (self.next..self.next + n).collect();
        self.next += n;
        v
    }

    /// Mapping cylinder of `j ↦ f(j)` from the cycle `src` onto vertices already present.
    fn cylinder(&mut self, src: &[usize], f: impl Fn(usize) -> usize) {
        let n = src.len();
        for j in 0..n {
            let (a, b) = (src[j], src[(j + 1) % n]);
            let (fa, fb) = (f(j), f((j + 1) % n));
            for mut g in [vec![a, fa, fb], vec![a, b, fb]] {
                g.sort_unstable();
                g.dedup();
                self.gens.push(g);
            }
        }
    }

    /// Tower of wrap stages below the cycle `top` at level `k`; returns the bottom circle.
    fn tower(&mut self, top: Vec<usize>, prime: u64, params: &MkParams) -> Result<Vec<usize>, ConstructionError> {
        let mut upper = top;
        for i in (0..params.k).rev() {
            let s = params.circle_size(prime, i)?;
            let r = params.collapse_factor(prime, i)?;
            let lower = self.alloc(s);
            self.cylinder(&upper, |j| lower[(j / r) % s]);
            upper = lower;
        }
        Ok(upper)
    }
}

/// Midpoint-subdivided 2-simplex with a cone vertex `6` over the middle face.
fn coned_tau() -> Result<Subdivision, ConstructionError> {
    let faces = vec![vec![0, 3, 5], vec![1, 3, 4], vec![2, 4, 5], vec![3, 4, 6], vec![4, 5, 6], vec![3, 5, 6]];
    let mut cx = CellComplex::from_simplices(7, &faces)?;
    let bl = circuit_label(&cx, &[0, 3, 1, 4, 2, 5])?;
    cx.set_label("boundary", bl)?;
    let support = vec![vec![0], vec![1], vec![2], vec![0, 1], vec![1, 2], vec![0, 2], vec![0, 1, 2]];
    Ok(Subdivision { complex: Arc::new(cx), base: Arc::new(simplex(2)), vertex_support: support })
}

/// `M_k`: the midpoint-subdivided 2-simplex with its middle face removed
/// (vertices `0..6`, outer circuit `0 → 3 → 1 → 4 → 2 → 5`), a collar
/// cylinder from `∂σ = (3, 4, 5)` to a waist circle, the pair of pants
/// collapsing the waist onto the wedge of the two cuff circles, and below
/// each cuff a tower of wrap stages of degree `p` (resp. `q`) ending in a
/// triangle hole.
pub fn build_Mk(params: &MkParams) -> Result<MkBundle, ConstructionError> {
    params.validate()?;
    let na = params.circle_size(params.p, params.k)?;
    let nb = params.circle_size(params.q, params.k)?;
    let mut g = Gens { gens: vec![vec![0, 3, 5], vec![1, 3, 4], vec![2, 4, 5]], next: 6 };
    let n = na + nb;
    let waist = g.alloc(n);
    let sigma = [3usize, 4, 5];
    g.cylinder(&waist, |j| sigma[3 * j / n]);
    let a = g.alloc(na);
    let mut b = vec![a[0]];
    b.extend(g.alloc(nb - 1));
    g.cylinder(&waist, |j| if j < na { a[j] } else { b[j - na] });
    let p_hole = g.tower(a.clone(), params.p, params)?;
    let q_hole = g.tower(b.clone(), params.q, params)?;
    let est = 3 * g.gens.len();
    if est > params.budget {
        return Err(ConstructionError::SizeGuardExceeded { needed: est, budget: params.budget });
    }
    let mut cx = CellComplex::from_simplices(g.next, &g.gens)?;
    cx.check_size(params.budget)?;
    let boundary = circuit_label(&cx, &[0, 3, 1, 4, 2, 5])?;
    let ph = circuit_label(&cx, &p_hole)?;
    let qh = circuit_label(&cx, &q_hole)?;
    let d_faces = [[0, 3, 5], [1, 3, 4], [2, 4, 5]].iter().map(|f| cx.simplex_index(f).expect("corner")).collect();
    for (name, l) in [
        ("boundary", boundary.clone()),
        ("p-hole", ph.clone()),
        ("q-hole", qh.clone()),
        ("sigma-boundary", circuit_label(&cx, &sigma)?),
        ("waist", circuit_label(&cx, &waist)?),
        ("p-cuff", circuit_label(&cx, &a)?),
        ("q-cuff", circuit_label(&cx, &b)?),
        ("D", cx.closure(vec![vec![], vec![], d_faces])),
    ] {
        cx.set_label(name, l)?;
    }
    let valence = {
        let deg = cx.vertex_edges();
        let limit = params.p as usize;
        ValenceReport {
            max_valence: deg.iter().map(Vec::len).max().unwrap_or(0),
            limit,
            violations: deg.iter().filter(|e| e.len() > limit).count(),
        }
    };
    let cx = Arc::new(cx);
    let tau = midpoint_subdivision(&Arc::new(simplex(2)))?;
    let nv = cx.n_vertices();
    let phi = CellMap::simplicial(cx.clone(), tau.complex.clone(), (0..nv).map(|v| if v < 6 { v } else { 3 }).collect())?;
    let tau_cone = coned_tau()?;
    let phi_cone = CellMap::simplicial(cx.clone(), tau_cone.complex.clone(), (0..nv).map(|v| v.min(6)).collect())?;
    Ok(MkBundle {
        complex: cx,
        boundary_circle: boundary,
        p_hole: ph,
        q_hole: qh,
        phi,
        tau,
        phi_cone,
        tau_cone,
        params: params.clone(),
        valence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::homology;
    use crate::degree::label_degree;

    #[test]
    fn stage_circles_match_reduce_semantics() {
        let p = MkParams::reduced(2, 3, 2);
        let (t, collapse) = build_Tp(2, 1, &p).unwrap();
        assert_eq!(t.label("domain-rim").unwrap().cells_in(0).len(), 12);
        assert_eq!(t.label("target-rim").unwrap().cells_in(0).len(), 6);
        assert_eq!(t.euler_characteristic(), 0);
        assert_eq!(label_degree(&collapse, "domain-rim", "circle").unwrap().abs(), 2);
        let full = MkParams::new(5, 2, 2);
        assert_eq!(full.circle_size(5, 2).unwrap(), 225);
        assert_eq!(full.circle_size(5, 0).unwrap(), 3);
    }

    #[test]
    fn m1_has_two_triangle_holes() {
        let b = build_Mk(&MkParams::reduced(5, 2, 1)).unwrap();
        assert_eq!(b.p_hole.cells_in(1).len(), 3);
        assert_eq!(b.q_hole.cells_in(1).len(), 3);
        let h: Vec<_> = (0..=2).map(|k| homology(&b.complex, k).unwrap()).collect();
        assert_eq!((h[0].free_rank, h[1].free_rank, h[2].free_rank), (1, 2, 0));
        assert!(h.iter().all(|s| s.torsion.is_empty()));
        let c = b.obstruction_cocycle().unwrap();
        assert_eq!(c.support().len(), 1);
        assert!(c.vanishes_on(&b.boundary_circle));
    }

    #[test]
    fn invalid_params_are_rejected() {
        assert!(matches!(build_Mk(&MkParams::new(4, 2, 1)), Err(ConstructionError::InvalidParams(_))));
        assert!(!MkParams::new(3, 2, 1).hypothesis_holds());
    }
}
