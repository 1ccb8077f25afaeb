use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{build_Mk, simplicial_approx_identity, ConstructionError, MkParams};
use crate::complex::{barycentric_subdivision, simplex, CellComplex, CellMap, Subdivision};

/// Fibre product of a light simplicial `χ : M → B` and a simplicial
/// `φ : M' → τ` into a subdivision `τ` of `B`. Vertices are pairs `(σ, v)`
/// with `σ` a simplex of `M` and `χ(σ)` the carrier of `φ(v)`.
#[derive(Debug, Clone)]
pub struct Pullback {
    pub complex: Arc<CellComplex>,
    /// `(dim, index)` of `σ` and the vertex `v` of `M'`, per vertex.
    pub pairs: Vec<((usize, usize), usize)>,
    /// `P → M'`, light.
    pub proj_m_prime: CellMap,
    /// `P → sd_χ(M)`, into the subdivision of `M` induced by `τ`.
    pub proj_m: CellMap,
    pub induced: Subdivision,
    /// `sd_χ(M) → τ`.
    pub chi_tilde: CellMap,
    pub phi: CellMap,
}

impl Pullback {
    /// `χ̃ ∘ proj_M = φ ∘ proj_M'` as chain maps into `τ`.
    pub fn commutes(&self) -> bool {
        let (Ok(a), Ok(b)) = (self.proj_m.then(&self.chi_tilde), self.proj_m_prime.then(&self.phi)) else {
            return false;
        };
        (0..=self.complex.dim()).all(|k| a.chain(k) == b.chain(k))
    }
}

struct Core {
    complex: CellComplex,
    pairs: Vec<((usize, usize), usize)>,
    ids: HashMap<((usize, usize), usize), usize>,
}

fn over_table(chi: &CellMap) -> HashMap<Vec<usize>, Vec<(usize, usize)>> {
    let m = chi.source();
    let mut over: HashMap<Vec<usize>, Vec<(usize, usize)>> = HashMap::new();
    for k in 0..=m.dim() {
        for i in 0..m.count(k) {
            over.entry(chi.image_vertices(k, i)).or_default().push((k, i));
        }
    }
    over
}

fn fibre_product(chi: &CellMap, phi: &CellMap, tau: &Subdivision, budget: usize) -> Result<Core, ConstructionError> {
    let m = chi.source();
    let mp = phi.source();
    let cvm = chi.vertex_map().expect("simplicial");
    let pvm = phi.vertex_map().ok_or_else(|| ConstructionError::NotSimplicial("φ must be simplicial".into()))?;
    let over = over_table(chi);
    let carrier_of = |s: &[usize]| {
        let img: Vec<usize> = s.iter().map(|&v| pvm[v]).collect();
        tau.carrier_vertices(&img)
    };
    let mut work = 0usize;
    for k in 0..=mp.dim() {
        for s in mp.simplices(k) {
            work = work.saturating_add(over.get(&carrier_of(s)).map_or(0, Vec::len) * (k + 1));
        }
    }
    if work > budget {
        return Err(ConstructionError::SizeGuardExceeded { needed: work, budget });
    }
    let mut ids: HashMap<((usize, usize), usize), usize> = HashMap::new();
    let mut pairs = Vec::new();
    let mut gens = Vec::new();
    for k in 0..=mp.dim() {
        for s in mp.simplices(k) {
            let cs = carrier_of(s);
            let Some(sigmas) = over.get(&cs) else { continue };
            let cvs: Vec<Vec<usize>> = s.iter().map(|&v| tau.vertex_support[pvm[v]].clone()).collect();
            for &(d, i) in sigmas {
                let sig = m.simplex(d, i);
                let mut lifted = Vec::with_capacity(s.len());
                for (j, &v) in s.iter().enumerate() {
                    let face: Vec<usize> = sig.iter().copied().filter(|&x| cvs[j].binary_search(&cvm[x]).is_ok()).collect();
                    let fi = m.simplex_index(&face).expect("face of a simplex");
                    let key = ((face.len() - 1, fi), v);
                    let id = *ids.entry(key).or_insert_with(|| {
                        pairs.push(key);
                        pairs.len() - 1
                    });
                    lifted.push(id);
                }
                gens.push(lifted);
            }
        }
    }
    let complex = CellComplex::from_simplices(pairs.len(), &gens)?;
    Ok(Core { complex, pairs, ids })
}

/// The fibre product with its two projections. `proj_m` lands in the
/// subdivision of `M` obtained by pulling `τ` back along `χ`.
pub fn pullback_complex(chi: &CellMap, phi: &CellMap, tau: &Subdivision) -> Result<Pullback, ConstructionError> {
    pullback_with(chi, phi, tau, super::DEFAULT_BUDGET)
}

pub fn pullback_with(chi: &CellMap, phi: &CellMap, tau: &Subdivision, budget: usize) -> Result<Pullback, ConstructionError> {
    if chi.vertex_map().is_none() {
        return Err(ConstructionError::NotSimplicial("χ must be simplicial".into()));
    }
    if !chi.is_light() {
        return Err(ConstructionError::NotLight("χ collapses a simplex".into()));
    }
    if **chi.target() != *tau.base || **phi.target() != *tau.complex {
        return Err(ConstructionError::NotSimplicial("χ, φ and τ do not share a base".into()));
    }
    let core = fibre_product(chi, phi, tau, budget)?;
    let ident = CellMap::identity(tau.complex.clone());
    let sd = fibre_product(chi, &ident, tau, budget)?;
    let m = chi.source();
    let support: Vec<Vec<usize>> = sd.pairs.iter().map(|&((d, i), _)| m.simplex(d, i).to_vec()).collect();
    let sd_cx = Arc::new(sd.complex);
    let induced = Subdivision { complex: sd_cx.clone(), base: m.clone(), vertex_support: support };
    let pvm = phi.vertex_map().expect("simplicial");
    let p = Arc::new(core.complex);
    let to_mp: Vec<usize> = core.pairs.iter().map(|&(_, v)| v).collect();
    let to_sd: Vec<usize> = core.pairs.iter().map(|&(s, v)| sd.ids[&(s, pvm[v])]).collect();
    let proj_m_prime = CellMap::simplicial(p.clone(), phi.source().clone(), to_mp)?;
    let proj_m = CellMap::simplicial(p.clone(), sd_cx.clone(), to_sd)?;
    let chi_tilde = CellMap::simplicial(sd_cx, tau.complex.clone(), sd.pairs.iter().map(|&(_, t)| t).collect())?;
    Ok(Pullback { complex: p, pairs: core.pairs, proj_m_prime, proj_m, induced, chi_tilde, phi: phi.clone() })
}

/// The section `M' → P` induced by a section `s` of `χ` (a vertex map `B → M`).
pub fn pullback_section(pb: &Pullback, chi: &CellMap, s: &[usize], tau: &Subdivision) -> Result<CellMap, ConstructionError> {
    let m = chi.source();
    let cvm = chi.vertex_map().expect("simplicial");
    if s.iter().enumerate().any(|(b, &x)| cvm[x] != b) {
        return Err(ConstructionError::InvalidParams("s is not a section of χ".into()));
    }
    let ids: HashMap<((usize, usize), usize), usize> = pb.pairs.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let pvm = pb.phi.vertex_map().expect("simplicial");
    let mp = pb.phi.source();
    let mut vm = Vec::with_capacity(mp.n_vertices());
    for v in 0..mp.n_vertices() {
        let mut face: Vec<usize> = tau.vertex_support[pvm[v]].iter().map(|&b| s[b]).collect();
        face.sort_unstable();
        let fi = m
            .simplex_index(&face)
            .ok_or_else(|| ConstructionError::NotSimplicial("section image is not a simplex".into()))?;
        let id = ids
            .get(&((face.len() - 1, fi), v))
            .ok_or_else(|| ConstructionError::NotSimplicial(format!("vertex {v} has no lift")))?;
        vm.push(*id);
    }
    Ok(CellMap::simplicial(mp.clone(), pb.complex.clone(), vm)?)
}

/// One column of the finite fibre-product diagram.
#[derive(Debug, Clone)]
pub struct YStage {
    pub level: u32,
    pub complex: Arc<CellComplex>,
    /// Light map onto the previous stage of the top row.
    pub horizontal: Option<CellMap>,
    /// Section of `horizontal`, from the previous stage.
    pub section: Option<CellMap>,
    /// Into `subdivision`, a subdivision of the stage below in the same column.
    pub vertical: Option<CellMap>,
    pub subdivision: Option<Subdivision>,
    /// `ρ ∘ vertical`.
    pub approximation: Option<CellMap>,
    /// Per-simplex Lipschitz bound of the composite projection from this stage.
    pub lipschitz_bound: BigRational,
}

struct Base {
    complex: Arc<CellComplex>,
    phi: CellMap,
    tau: Subdivision,
    chi: Option<CellMap>,
    section: Option<Vec<usize>>,
}

/// `M_1` with the cone map, or for `j ≥ 2` the barycentric subdivision of
/// `M_j` with the dimension colouring as light map and the induced map into
/// the barycentric subdivision of the coned 2-simplex.
fn base(params: &MkParams, j: u32) -> Result<Base, ConstructionError> {
    let b = build_Mk(&params.at_level(j))?;
    if j == 1 {
        return Ok(Base { complex: b.complex.clone(), phi: b.phi_cone.clone(), tau: b.tau_cone.clone(), chi: None, section: None });
    }
    let mbar = barycentric_subdivision(&b.complex)?;
    let tbar = barycentric_subdivision(&b.tau_cone.complex)?;
    let m = &b.complex;
    let t = &b.tau_cone.complex;
    let mut moff = vec![0usize];
    for k in 0..=m.dim() {
        moff.push(moff[k] + m.count(k));
    }
    let mut toff = vec![0usize];
    for k in 0..=t.dim() {
        toff.push(toff[k] + t.count(k));
    }
    let mut phi_v = Vec::with_capacity(mbar.complex.n_vertices());
    for d in 0..=m.dim() {
        for i in 0..m.count(d) {
            let img = b.phi_cone.image_vertices(d, i);
            phi_v.push(toff[img.len() - 1] + t.simplex_index(&img).expect("image simplex"));
        }
    }
    let delta = Arc::new(simplex(2));
    let support: Vec<Vec<usize>> = tbar.vertex_support.iter().map(|s| b.tau_cone.carrier_vertices(s)).collect();
    let tau = Subdivision { complex: tbar.complex.clone(), base: delta.clone(), vertex_support: support };
    let phi = CellMap::simplicial(mbar.complex.clone(), tau.complex.clone(), phi_v)?;
    let colour: Vec<usize> = mbar.vertex_support.iter().map(|s| s.len() - 1).collect();
    let chi = CellMap::simplicial(mbar.complex.clone(), delta, colour)?;
    let bdry = m.label_vertices(&b.boundary_circle);
    let tri = m
        .simplices(2)
        .iter()
        .rposition(|s| s.iter().all(|v| !bdry.contains(v)))
        .ok_or_else(|| ConstructionError::InvalidParams("no interior triangle for a section".into()))?;
    let ts = m.simplex(2, tri);
    let section = vec![
        moff[0] + ts[0],
        moff[1] + m.simplex_index(&ts[..2]).expect("edge"),
        moff[2] + tri,
    ];
    Ok(Base { complex: mbar.complex.clone(), phi, tau, chi: Some(chi), section: Some(section) })
}

/// The top row `M_1, M_{2,1}, …` of the fibre-product diagram up to `stages`
/// columns, with horizontal light maps, induced sections, and vertical maps
/// into subdivisions of the second row.
#[allow(non_snake_case)]
pub fn build_Y_stage(params: &MkParams, stages: u32) -> Result<Vec<YStage>, ConstructionError> {
    params.validate()?;
    if stages == 0 {
        return Err(ConstructionError::InvalidParams("stages must be at least 1".into()));
    }
    let s = stages as usize;
    let bases: Vec<Base> = (1..=stages).map(|j| base(params, j)).collect::<Result<_, _>>()?;
    // cells[j][k] for row j ≤ column k (0-based): complex, horizontal, section, vertical.
    struct Cell {
        complex: Arc<CellComplex>,
        phi: CellMap,
        tau: Subdivision,
        horizontal: Option<CellMap>,
        section: Option<CellMap>,
        section_vm: Option<Vec<usize>>,
    }
    let mut cells: Vec<Vec<Option<Cell>>> = (0..s).map(|_| (0..s).map(|_| None).collect()).collect();
    for (j, b) in bases.iter().enumerate() {
        cells[j][j] = Some(Cell {
            complex: b.complex.clone(),
            phi: b.phi.clone(),
            tau: b.tau.clone(),
            horizontal: None,
            section: None,
            section_vm: None,
        });
    }
    for k in 1..s {
        for j in (0..k).rev() {
            let (chi, sec, phi, tau) = if j + 1 == k {
                let b = &bases[k];
                let c = cells[j][k - 1].as_ref().expect("built");
                (b.chi.clone().expect("χ"), b.section.clone().expect("section"), c.phi.clone(), c.tau.clone())
            } else {
                let below = cells[j + 1][k].as_ref().expect("built");
                let c = cells[j][k - 1].as_ref().expect("built");
                (
                    below.horizontal.clone().expect("horizontal"),
                    below.section_vm.clone().expect("section"),
                    c.phi.clone(),
                    c.tau.clone(),
                )
            };
            let pb = pullback_with(&chi, &phi, &tau, params.budget)?;
            let section = pullback_section(&pb, &chi, &sec, &tau)?;
            let section_vm = section.vertex_map().expect("simplicial").to_vec();
            cells[j][k] = Some(Cell {
                complex: pb.complex.clone(),
                phi: pb.proj_m.clone(),
                tau: pb.induced.clone(),
                horizontal: Some(pb.proj_m_prime.clone()),
                section: Some(section),
                section_vm: Some(section_vm),
            });
        }
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut out = Vec::with_capacity(s);
    let mut bound = BigRational::one();
    for k in 0..s {
        let c = cells[0][k].take().expect("built");
        let rho = simplicial_approx_identity(&c.tau)?;
        let approximation = c.phi.then(&rho)?;
        out.push(YStage {
            level: k as u32 + 1,
            complex: c.complex,
            horizontal: c.horizontal,
            section: c.section,
            vertical: Some(c.phi),
            subdivision: Some(c.tau),
            approximation: Some(approximation),
            lipschitz_bound: bound.clone(),
        });
        bound = &bound * &half;
    }
    Ok(out)
}
