use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{build_Mk, ConstructionError, MkParams};
use crate::complex::{CellComplex, CellMap, ComplexError, Label, Subdivision};

/// Sends every subdivision vertex to the lowest vertex of its carrier.
/// The result maps each simplex into its carrier, so it is a simplicial
/// approximation of the identity.
pub fn simplicial_approx_identity(sd: &Subdivision) -> Result<CellMap, ConstructionError> {
    let mut vm = Vec::with_capacity(sd.complex.n_vertices());
    for (v, s) in sd.vertex_support.iter().enumerate() {
        vm.push(*s.iter().min().ok_or(ConstructionError::NoValidAssignment(v))?);
    }
    let rho = CellMap::simplicial(sd.complex.clone(), sd.base.clone(), vm.clone())?;
    for k in 0..=sd.complex.dim() {
        for s in sd.complex.simplices(k) {
            let carrier = sd.carrier_vertices(s);
            if let Some(&v) = s.iter().find(|&&v| carrier.binary_search(&vm[v]).is_err()) {
                return Err(ConstructionError::NoValidAssignment(v));
            }
        }
    }
    Ok(rho)
}

/// Midpoint subdivision of a simplicial complex of dimension ≤ 2. Vertex
/// `v` is kept and edge `e` gets the midpoint `n_vertices + e`. Labels of
/// dimension ≤ 1 are carried over, with circuits refined.
pub fn midpoint_subdivide(x: &Arc<CellComplex>) -> Result<Subdivision, ConstructionError> {
    if !x.is_simplicial() {
        return Err(ConstructionError::NotSimplicial("midpoint subdivision of a cell-mode complex".into()));
    }
    if x.dim() > 2 {
        return Err(ComplexError::DimensionTooHigh { found: x.dim(), max: 2 }.into());
    }
    let nv = x.n_vertices();
    let mid = |a: usize, b: usize| nv + x.simplex_index(&[a.min(b), a.max(b)]).expect("edge");
    let mut gens = Vec::new();
    if x.dim() >= 1 {
        let co = x.cofaces(1);
        for (e, s) in x.simplices(1).iter().enumerate() {
            if co[e].is_empty() {
                gens.push(vec![s[0], nv + e]);
                gens.push(vec![s[1], nv + e]);
            }
        }
    }
    if x.dim() == 2 {
        for t in x.simplices(2) {
            let (a, b, c) = (t[0], t[1], t[2]);
            let (ab, bc, ac) = (mid(a, b), mid(b, c), mid(a, c));
            gens.extend([vec![a, ab, ac], vec![b, ab, bc], vec![c, ac, bc], vec![ab, bc, ac]]);
        }
    }
    let mut cx = CellComplex::from_simplices(nv + x.count(1), &gens)?;
    for (name, l) in x.labels() {
        if l.cells.len() > 2 && !l.cells[2].is_empty() {
            continue;
        }
        let mut edges = Vec::new();
        let mut verts: Vec<usize> = l.cells_in(0).to_vec();
        for &e in l.cells_in(1) {
            let s = x.simplex(1, e);
            let m = nv + e;
            verts.push(m);
            edges.push(cx.simplex_index(&[s[0], m]).expect("half edge"));
            edges.push(cx.simplex_index(&[s[1], m]).expect("half edge"));
        }
        let mut nl = cx.closure(vec![verts, edges]);
        nl.circuit = l.circuit.as_ref().map(|c| {
            let n = c.len();
            (0..n).flat_map(|i| [c[i], mid(c[i], c[(i + 1) % n])]).collect()
        });
        cx.set_label(name, nl)?;
    }
    let mut support: Vec<Vec<usize>> = (0..nv).map(|v| vec![v]).collect();
    support.extend(x.simplices(1).iter().cloned());
    Ok(Subdivision { complex: Arc::new(cx), base: x.clone(), vertex_support: support })
}

#[derive(Debug, Clone)]
pub struct TowerStage {
    pub complex: Arc<CellComplex>,
    /// Level of the bundle inserted at this stage.
    pub level: u32,
    /// Into `subdivision`: the midpoint subdivision of the previous stage,
    /// or of the 2-simplex for the first stage.
    pub projection: CellMap,
    pub subdivision: Subdivision,
    /// `ρ ∘ projection`, onto the previous stage.
    pub approximation: CellMap,
    /// Lipschitz bound of `projection` for the half-scaled target metric.
    pub lipschitz_bound: BigRational,
    /// Bound for the composite projection down to the first stage.
    pub composite_bound: BigRational,
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

/// Stages `M_k, M_{k,k−1}, …` down to `depth` replacements. At each step
/// the previous stage is midpoint-subdivided and the four small triangles of
/// every original triangle are replaced by a copy of the next-level bundle,
/// glued along its boundary hexagon.
pub fn build_tower(params: &MkParams, depth: u32) -> Result<Vec<TowerStage>, ConstructionError> {
    params.validate()?;
    if depth >= params.k {
        return Err(ConstructionError::InvalidParams(format!("depth {depth} must be below k = {}", params.k)));
    }
    let first = build_Mk(params)?;
    let approximation = first.q_map();
    let mut stages = vec![TowerStage {
        complex: first.complex.clone(),
        level: params.k,
        projection: first.phi.clone(),
        subdivision: first.tau.clone(),
        approximation,
        lipschitz_bound: half(),
        composite_bound: BigRational::one(),
    }];
    for i in 0..depth {
        let level = params.k - i - 1;
        let copy = build_Mk(&params.at_level(level))?;
        let prev = stages.last().expect("nonempty").complex.clone();
        let need = prev.count(2).saturating_mul(copy.complex.total_cells());
        if need > params.budget {
            return Err(ConstructionError::SizeGuardExceeded { needed: need, budget: params.budget });
        }
        let stage = replace_faces(&prev, &copy)?;
        let composite = &stages.last().expect("nonempty").composite_bound * half();
        stages.push(TowerStage { level, composite_bound: composite, ..stage });
    }
    Ok(stages)
}

fn replace_faces(prev: &Arc<CellComplex>, copy: &super::MkBundle) -> Result<TowerStage, ConstructionError> {
    let sd = midpoint_subdivide(prev)?;
    let nsd = sd.complex.n_vertices();
    let inner = copy.complex.n_vertices() - 6;
    let cvm = copy.phi.vertex_map().expect("simplicial");
    let mut gens: Vec<Vec<usize>> = sd.complex.maximal_simplices().into_iter().filter(|s| s.len() < 3).collect();
    let mut proj: Vec<usize> = (0..nsd).collect();
    let copy_max = copy.complex.maximal_simplices();
    let nv = prev.n_vertices();
    for (t, tri) in prev.simplices(2).iter().enumerate() {
        let (a, b, c) = (tri[0], tri[1], tri[2]);
        let m = |u: usize, w: usize| nv + prev.simplex_index(&[u, w]).expect("edge");
        let hex = [a, b, c, m(a, b), m(b, c), m(a, c)];
        let off = nsd + t * inner;
        let place = |x: usize| if x < 6 { hex[x] } else { off + x - 6 };
        for s in &copy_max {
            gens.push(s.iter().map(|&x| place(x)).collect());
        }
        proj.extend((6..copy.complex.n_vertices()).map(|x| hex[cvm[x]]));
    }
    let total = nsd + prev.count(2) * inner;
    let mut cx = CellComplex::from_simplices(total, &gens)?;
    let labels: Vec<(String, Label)> = sd.complex.labels().iter().map(|(n, l)| (n.clone(), l.clone())).collect();
    for (name, l) in labels {
        let sets = crate::complex::label_vertex_sets(&sd.complex, &l);
        let mut nl = crate::complex::label_from_vertex_sets(&cx, &sets);
        nl.circuit = l.circuit;
        cx.set_label(&name, nl)?;
    }
    let cx = Arc::new(cx);
    let projection = CellMap::simplicial(cx.clone(), sd.complex.clone(), proj)?;
    let rho = simplicial_approx_identity(&sd)?;
    let approximation = projection.then(&rho)?;
    Ok(TowerStage {
        complex: cx,
        level: 0,
        projection,
        subdivision: sd,
        approximation,
        lipschitz_bound: half(),
        composite_bound: BigRational::one(),
    })
}

/// For every vertex `v` of the source of `projection`, a vertex `u` of the
/// base of `sd` with `projection(Ost v) ⊂ Ost u`: `u` lies in the carrier of
/// the image of every simplex containing `v`. `None` where no such `u` exists.
pub fn refinement_witnesses(projection: &CellMap, sd: &Subdivision) -> Vec<Option<usize>> {
    let src = projection.source();
    let vm = projection.vertex_map().expect("simplicial");
    let mut cand: HashMap<usize, Vec<usize>> = HashMap::new();
    for k in 0..=src.dim() {
        for s in src.simplices(k) {
            let img: Vec<usize> = s.iter().map(|&v| vm[v]).collect();
            let carrier = sd.carrier_vertices(&img);
            for &v in s {
                let e = cand.entry(v).or_insert_with(|| carrier.clone());
                e.retain(|u| carrier.binary_search(u).is_ok());
            }
        }
    }
    (0..src.n_vertices()).map(|v| cand.get(&v).and_then(|c| c.first().copied())).collect()
}

/// Whether `approximation` sends every simplex `s` of the source into the
/// carrier of `projection(s)` in `sd`.
pub fn carrier_containment(projection: &CellMap, approximation: &CellMap, sd: &Subdivision) -> bool {
    let (Some(pm), Some(am)) = (projection.vertex_map(), approximation.vertex_map()) else { return false };
    let src = projection.source();
    (0..=src.dim()).all(|k| {
        src.simplices(k).iter().all(|s| {
            let img: Vec<usize> = s.iter().map(|&v| pm[v]).collect();
            let carrier = sd.carrier_vertices(&img);
            s.iter().all(|&v| carrier.binary_search(&am[v]).is_ok())
        })
    })
}

/// Whether `w[v]` is a refinement witness for every vertex `v`, in the sense
/// of [`refinement_witnesses`]. One pass over the simplices.
pub fn witnesses_valid(projection: &CellMap, sd: &Subdivision, w: &[usize]) -> bool {
    let src = projection.source();
    let Some(vm) = projection.vertex_map() else { return false };
    if w.len() != src.n_vertices() {
        return false;
    }
    (0..=src.dim()).all(|k| {
        src.simplices(k).iter().all(|s| {
            let img: Vec<usize> = s.iter().map(|&v| vm[v]).collect();
            let carrier = sd.carrier_vertices(&img);
            s.iter().all(|&v| carrier.binary_search(&w[v]).is_ok())
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{barycentric_subdivision, midpoint_subdivision, simplex};

    #[test]
    fn approximations_exist_for_standard_subdivisions() {
        let d = Arc::new(simplex(2));
        let mid = midpoint_subdivision(&d).unwrap();
        let rho = simplicial_approx_identity(&mid).unwrap();
        assert_eq!(rho.vertex_map().unwrap(), &[0, 1, 2, 0, 1, 0]);
        assert!(simplicial_approx_identity(&barycentric_subdivision(&d).unwrap()).is_ok());
        let ident = Subdivision { complex: d.clone(), base: d.clone(), vertex_support: vec![vec![0], vec![1], vec![2]] };
        assert_eq!(simplicial_approx_identity(&ident).unwrap().vertex_map().unwrap(), &[0, 1, 2]);
    }

    #[test]
    fn general_midpoint_subdivision_of_a_triangle_matches_the_special_one() {
        let d = Arc::new(simplex(2));
        let sd = midpoint_subdivide(&d).unwrap();
        assert_eq!(sd.complex.counts(), &[6, 9, 4]);
        assert!(sd.carriers_valid());
    }

    #[test]
    fn one_step_tower() {
        let stages = build_tower(&MkParams::reduced(5, 2, 2), 1).unwrap();
        assert_eq!(stages.len(), 2);
        let s = &stages[1];
        assert!(s.complex.validate().is_ok());
        assert_eq!(s.composite_bound, half());
        assert!(refinement_witnesses(&s.projection, &s.subdivision).iter().all(Option::is_some));
        assert_eq!(s.complex.label("boundary").unwrap().cells_in(1).len(), 12);
        assert!(carrier_containment(&s.projection, &s.approximation, &s.subdivision));
    }
}
