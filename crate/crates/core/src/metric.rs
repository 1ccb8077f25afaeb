//! Vertex-level metric geometry of finite complexes: unit-edge graph
//! distances, Lipschitz constants, covers, Lebesgue numbers and nerves.
//!
//! Every quantity is evaluated exactly on vertices of the 1-skeleton.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{barycentric_subdivision, CellComplex, CellMap, ComplexError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("1-skeleton has {components} components")]
    Disconnected { components: usize },
    #[error("vertex {0} is not covered")]
    NotACover(usize),
    #[error("vertex {0} lies in no cover set")]
    Uncovered(usize),
    #[error("dimension {0} exceeds the supported maximum 3")]
    DimensionTooHigh(usize),
    #[error("cover sets must be nonempty vertex sets of the carrier")]
    BadCover,
    #[error("map is not simplicial")]
    NotSimplicial,
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

const INF: u32 = u32::MAX;

/// All-pairs unit-edge distances on the vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceTable {
    dist: Vec<Vec<u32>>,
}

impl DistanceTable {
    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    /// `None` between different components.
    pub fn get(&self, u: usize, v: usize) -> Option<u32> {
        let d = self.dist[u][v];
        (d != INF).then_some(d)
    }

    pub fn diameter(&self) -> Option<u32> {
        let mut best = 0;
        for row in &self.dist {
            for &d in row {
                if d == INF {
                    return None;
                }
                best = best.max(d);
            }
        }
        Some(best)
    }
}

fn bfs_from(adj: &[Vec<usize>], sources: impl IntoIterator<Item = usize>) -> Vec<u32> {
    let mut d = vec![INF; adj.len()];
    let mut queue = VecDeque::new();
    for s in sources {
        if d[s] == INF {
            d[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if d[w] == INF {
                d[w] = d[u] + 1;
                queue.push_back(w);
            }
        }
    }
    d
}

/// Distances within each component; fails on a disconnected skeleton with the component count.
pub fn skeleton_metric(x: &CellComplex) -> Result<DistanceTable, MetricError> {
    let t = all_pairs(x);
    let comps = component_count(x);
    if comps > 1 {
        return Err(MetricError::Disconnected { components: comps });
    }
    Ok(t)
}

/// Like [`skeleton_metric`] but accepts disconnected skeleta; cross-component entries are `None`.
pub fn all_pairs(x: &CellComplex) -> DistanceTable {
    let adj = x.adjacency();
    DistanceTable { dist: (0..adj.len()).map(|v| bfs_from(&adj, [v])).collect() }
}

pub fn component_count(x: &CellComplex) -> usize {
    let adj = x.adjacency();
    let mut seen = vec![false; adj.len()];
    let mut n = 0;
    for v in 0..adj.len() {
        if !seen[v] {
            n += 1;
            for (w, d) in bfs_from(&adj, [v]).into_iter().enumerate() {
                if d != INF {
                    seen[w] = true;
                }
            }
        }
    }
    n
}

/// `max` over edges `(u, v)` of `d(f(u), f(v))` in the target skeleton,
/// multiplied by `scale` (the target edge length).
pub fn lipschitz_constant_scaled(f: &CellMap, scale: &BigRational) -> Result<BigRational, MetricError> {
    let vm = f.vertex_map().ok_or(MetricError::NotSimplicial)?;
    let src = f.source();
    let tgt = f.target();
    let adj = tgt.adjacency();
    let mut best = 0u32;
    let mut far: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for e in 0..src.count(1) {
        let (u, v) = src.edge_endpoints(e).expect("simplicial edge");
        let (a, b) = (vm[u], vm[v]);
        if a == b {
            continue;
        }
        if adj[a].binary_search(&b).is_ok() {
            best = best.max(1);
        } else {
            far.entry(a).or_default().push(b);
        }
    }
    for (a, bs) in far {
        let d = bfs_from(&adj, [a]);
        for b in bs {
            if d[b] == INF {
                return Err(MetricError::Disconnected { components: component_count(tgt) });
            }
            best = best.max(d[b]);
        }
    }
    Ok(BigRational::from_integer(best.into()) * scale)
}

/// Vertex-level Lipschitz constant for unit edges on both sides.
pub fn lipschitz_constant(f: &CellMap) -> Result<BigRational, MetricError> {
    lipschitz_constant_scaled(f, &BigRational::one())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverKind {
    OpenStar,
    Ball,
    Explicit,
}

/// A finite cover of the vertex set of `carrier` by vertex sets.
#[derive(Debug, Clone)]
pub struct CoverSpec {
    pub carrier: Arc<CellComplex>,
    pub sets: Vec<BTreeSet<usize>>,
    pub kind: CoverKind,
}

impl CoverSpec {
    pub fn explicit(carrier: Arc<CellComplex>, sets: Vec<BTreeSet<usize>>) -> Result<CoverSpec, MetricError> {
        let n = carrier.n_vertices();
        if sets.iter().any(|s| s.is_empty() || s.iter().any(|&v| v >= n)) {
            return Err(MetricError::BadCover);
        }
        Ok(CoverSpec { carrier, sets, kind: CoverKind::Explicit })
    }

    /// Balls of radius `r` around the given centres.
    pub fn balls(carrier: Arc<CellComplex>, centres: &[usize], r: u32) -> Result<CoverSpec, MetricError> {
        let adj = carrier.adjacency();
        let mut sets = Vec::with_capacity(centres.len());
        for &c in centres {
            if c >= adj.len() {
                return Err(MetricError::BadCover);
            }
            let d = bfs_from(&adj, [c]);
            sets.push((0..adj.len()).filter(|&v| d[v] <= r).collect());
        }
        Ok(CoverSpec { carrier, sets, kind: CoverKind::Ball })
    }

    /// Open stars of the vertices of `x`, sampled at the barycentres of its
    /// simplices: the carrier is the barycentric subdivision, and the set of
    /// vertex `v` holds the barycentres of the simplices containing `v`.
    pub fn open_stars(x: &Arc<CellComplex>) -> Result<CoverSpec, MetricError> {
        let sd = barycentric_subdivision(x)?;
        let mut sets = vec![BTreeSet::new(); x.n_vertices()];
        for (b, support) in sd.vertex_support.iter().enumerate() {
            for &v in support {
                sets[v].insert(b);
            }
        }
        Ok(CoverSpec { carrier: sd.complex.clone(), sets, kind: CoverKind::OpenStar })
    }

    fn check(&self) -> Result<(), MetricError> {
        let mut covered = vec![false; self.carrier.n_vertices()];
        for s in &self.sets {
            for &v in s {
                covered[v] = true;
            }
        }
        match covered.iter().position(|&c| !c) {
            Some(v) => Err(MetricError::NotACover(v)),
            None => Ok(()),
        }
    }

    /// Indices of the sets containing `v`.
    pub fn containing(&self, v: usize) -> Vec<usize> {
        (0..self.sets.len()).filter(|&i| self.sets[i].contains(&v)).collect()
    }

    /// `d(x, X ∖ U)` for every vertex and set; `None` for an empty complement.
    fn complement_distances(&self) -> Vec<Option<Vec<u32>>> {
        let adj = self.carrier.adjacency();
        let n = adj.len();
        self.sets
            .iter()
            .map(|s| {
                if s.len() == n {
                    None
                } else {
                    Some(bfs_from(&adj, (0..n).filter(|v| !s.contains(v))))
                }
            })
            .collect()
    }
}

/// A rational or `+∞`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extended {
    Finite(BigRational),
    Infinite,
}

/// `min_x max_U d(x, X ∖ U)` over vertices, with `d(x, ∅) = ∞`.
pub fn lebesgue_number(cover: &CoverSpec) -> Result<Extended, MetricError> {
    cover.check()?;
    let dists = cover.complement_distances();
    let mut best: Option<u32> = None;
    for x in 0..cover.carrier.n_vertices() {
        let mut sup = Some(0u32);
        for d in &dists {
            match d {
                None => sup = None,
                Some(d) => {
                    if let Some(s) = sup {
                        sup = Some(s.max(d[x]));
                    }
                }
            }
            if sup.is_none() {
                break;
            }
        }
        if let Some(s) = sup {
            best = Some(best.map_or(s, |b| b.min(s)));
        }
    }
    Ok(best.map_or(Extended::Infinite, |b| Extended::Finite(BigRational::from_integer(b.into()))))
}

/// Largest number of sets sharing a vertex.
pub fn multiplicity(cover: &CoverSpec) -> usize {
    (0..cover.carrier.n_vertices()).map(|v| cover.containing(v).len()).max().unwrap_or(0)
}

/// Largest diameter of a cover set in the carrier metric; `None` if some set spans components.
pub fn mesh(cover: &CoverSpec) -> Option<u32> {
    let adj = cover.carrier.adjacency();
    let mut best = 0;
    for s in &cover.sets {
        for &u in s {
            let d = bfs_from(&adj, [u]);
            for &v in s {
                if d[v] == INF {
                    return None;
                }
                best = best.max(d[v]);
            }
        }
    }
    Some(best)
}

/// One vertex per set and one simplex for every family of sets with a common vertex.
pub fn nerve(cover: &CoverSpec) -> Result<CellComplex, MetricError> {
    cover.check()?;
    let mut gens: BTreeSet<Vec<usize>> = BTreeSet::new();
    for v in 0..cover.carrier.n_vertices() {
        gens.insert(cover.containing(v));
    }
    let gens: Vec<Vec<usize>> = gens.into_iter().collect();
    Ok(CellComplex::from_simplices(cover.sets.len(), &gens)?)
}

/// Barycentric coordinates on the nerve: nonnegative rationals summing to 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BarycentricPoint {
    pub weights: BTreeMap<usize, BigRational>,
}

impl BarycentricPoint {
    pub fn is_normalized(&self) -> bool {
        self.weights.values().all(|w| *w >= BigRational::zero())
            && self.weights.values().fold(BigRational::zero(), |a, w| a + w) == BigRational::one()
    }

    pub fn support(&self) -> Vec<usize> {
        self.weights.iter().filter(|(_, w)| !w.is_zero()).map(|(&i, _)| i).collect()
    }
}

/// `φ_U(x) = d(x, X ∖ U) / Σ_V d(x, X ∖ V)`. Sets whose complement is empty
/// are at infinite distance; when present they share the weight equally.
pub fn canonical_projection(cover: &CoverSpec, x: usize) -> Result<BarycentricPoint, MetricError> {
    if x >= cover.carrier.n_vertices() {
        return Err(MetricError::Uncovered(x));
    }
    let containing = cover.containing(x);
    if containing.is_empty() {
        return Err(MetricError::Uncovered(x));
    }
    let dists = cover.complement_distances();
    let infinite: Vec<usize> = containing.iter().copied().filter(|&i| dists[i].is_none()).collect();
    let mut weights = BTreeMap::new();
    if !infinite.is_empty() {
        let w = BigRational::new(BigInt::one(), BigInt::from(infinite.len()));
        for i in infinite {
            weights.insert(i, w.clone());
        }
        return Ok(BarycentricPoint { weights });
    }
    let raw: Vec<(usize, u32)> = containing.iter().map(|&i| (i, dists[i].as_ref().expect("finite")[x])).collect();
    let total: u64 = raw.iter().map(|&(_, d)| u64::from(d)).sum();
    for (i, d) in raw {
        weights.insert(i, BigRational::new(BigInt::from(d), BigInt::from(total)));
    }
    Ok(BarycentricPoint { weights })
}

/// Outcome of a refinement check; `witness[i]` is a set of the coarse cover
/// that contains set `i` of the fine one (or its star).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub holds: bool,
    pub witness: Vec<Option<usize>>,
}

fn first_superset(u: &CoverSpec, s: &BTreeSet<usize>) -> Option<usize> {
    u.sets.iter().position(|t| s.is_subset(t))
}

/// Every set of `v` lies in some set of `u`.
pub fn refines(v: &CoverSpec, u: &CoverSpec) -> RefinementReport {
    let witness: Vec<Option<usize>> = v.sets.iter().map(|s| first_superset(u, s)).collect();
    RefinementReport { holds: witness.iter().all(Option::is_some), witness }
}

/// For every `V`, the star `St(V, 𝒱)` (the union of the sets of `𝒱` meeting `V`) lies in some set of `u`.
pub fn star_refines(v: &CoverSpec, u: &CoverSpec) -> RefinementReport {
    let witness: Vec<Option<usize>> = v
        .sets
        .iter()
        .map(|s| {
            let star: BTreeSet<usize> =
                v.sets.iter().filter(|t| !t.is_disjoint(s)).flat_map(|t| t.iter().copied()).collect();
            first_superset(u, &star)
        })
        .collect();
    RefinementReport { holds: witness.iter().all(Option::is_some), witness }
}

/// Smallest rational `r ≥ 0` with `r ≥ √a`, on the grid `1/den`.
fn sqrt_upper(a: &BigRational, den: u64) -> BigRational {
    let d = BigInt::from(den);
    let scaled = (a * BigRational::from_integer(&d * &d)).ceil().to_integer();
    let mut s = scaled.sqrt();
    while &s * &s < scaled {
        s += 1;
    }
    BigRational::new(s, d)
}

/// Upper bound for the ℓ2-to-intrinsic Lipschitz constant of two standard
/// simplices of dimension ≤ `2n + 1` glued along a common face: routing
/// through the midpoint of the shared face gives
/// `|J| ≤ √(1 + 2(√(2n+1) + 1)²) · ‖x − x'‖`.
pub fn doubled_simplex_constant(n: usize) -> BigRational {
    let m = BigRational::from_integer(BigInt::from(2 * n + 1));
    let s = sqrt_upper(&m, 1000) + BigRational::one();
    let two = BigRational::from_integer(2.into());
    sqrt_upper(&(BigRational::one() + two * &s * &s), 1000)
}

/// Global Lipschitz bound `c·λ` for a map that is `λ`-Lipschitz on every
/// simplex of a complex of dimension ≤ `n` into a `b`-bounded space, with
/// `c = max(1, b)·√(n+1)·c̄`. Values `0 < λ < 1` are treated as `1`.
pub fn per_simplex_lipschitz_bound(
    f: &CellMap,
    lambda: &BigRational,
    b: &BigRational,
    n: usize,
) -> Result<BigRational, MetricError> {
    if n > 3 {
        return Err(MetricError::DimensionTooHigh(n));
    }
    if f.source().dim() > n {
        return Err(MetricError::DimensionTooHigh(f.source().dim()));
    }
    if lambda.is_zero() {
        return Ok(BigRational::zero());
    }
    let one = BigRational::one();
    let lam = if *lambda < one { one.clone() } else { lambda.clone() };
    let bb = if *b < one { one } else { b.clone() };
    let root = sqrt_upper(&BigRational::from_integer(BigInt::from(n + 1)), 1000);
    Ok(bb * root * doubled_simplex_constant(n) * lam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{circle, simplex};

    fn arc(n: usize, start: usize, len: usize) -> BTreeSet<usize> {
        (0..len).map(|i| (start + i) % n).collect()
    }

    #[test]
    fn circle_distances() {
        let t = skeleton_metric(&circle(6).unwrap()).unwrap();
        assert_eq!(t.get(0, 3), Some(3));
        assert_eq!(t.diameter(), Some(3));
        let tri = skeleton_metric(&simplex(2)).unwrap();
        assert_eq!(tri.diameter(), Some(1));
    }

    #[test]
    fn lebesgue_of_two_arcs() {
        let c = Arc::new(circle(6).unwrap());
        let cover = CoverSpec::explicit(c.clone(), vec![arc(6, 0, 4), arc(6, 3, 4)]).unwrap();
        // Brute force over vertices and sets.
        let t = all_pairs(&c);
        let mut inf = u32::MAX;
        for x in 0..6 {
            let mut sup = 0;
            for s in &cover.sets {
                let d = (0..6).filter(|v| !s.contains(v)).map(|v| t.get(x, v).unwrap()).min().unwrap();
                sup = sup.max(d);
            }
            inf = inf.min(sup);
        }
        assert_eq!(lebesgue_number(&cover).unwrap(), Extended::Finite(BigRational::from_integer(inf.into())));
        let whole = CoverSpec::explicit(c.clone(), vec![(0..6).collect()]).unwrap();
        assert_eq!(lebesgue_number(&whole).unwrap(), Extended::Infinite);
        let singles = CoverSpec::explicit(c, (0..6).map(|v| BTreeSet::from([v])).collect()).unwrap();
        assert_eq!(lebesgue_number(&singles).unwrap(), Extended::Finite(BigRational::one()));
    }

    #[test]
    fn nerve_of_three_arcs_is_a_circle() {
        let c = Arc::new(circle(6).unwrap());
        let cover = CoverSpec::explicit(c, vec![arc(6, 0, 3), arc(6, 2, 3), arc(6, 4, 3)]).unwrap();
        let n = nerve(&cover).unwrap();
        assert_eq!(n.counts(), &[3, 3]);
        assert_eq!(multiplicity(&cover), 2);
    }

    #[test]
    fn open_star_nerve_recovers_the_complex() {
        let x = Arc::new(simplex(2));
        let cover = CoverSpec::open_stars(&x).unwrap();
        assert_eq!(nerve(&cover).unwrap().counts(), x.counts());
    }

    #[test]
    fn projection_weights() {
        let c = Arc::new(circle(6).unwrap());
        let cover = CoverSpec::explicit(c, vec![arc(6, 0, 4), arc(6, 3, 4)]).unwrap();
        let w = canonical_projection(&cover, 1).unwrap();
        assert_eq!(w.support(), vec![0]);
        let w = canonical_projection(&cover, 3).unwrap();
        assert!(w.is_normalized());
        assert_eq!(w.weights[&0], w.weights[&1]);
    }

    #[test]
    fn lipschitz_of_constant_and_identity() {
        let c = Arc::new(circle(5).unwrap());
        assert_eq!(lipschitz_constant(&CellMap::identity(c.clone())).unwrap(), BigRational::one());
        let k = CellMap::simplicial(c.clone(), c.clone(), vec![0; 5]).unwrap();
        assert!(lipschitz_constant(&k).unwrap().is_zero());
        let b = per_simplex_lipschitz_bound(&k, &BigRational::zero(), &BigRational::one(), 1).unwrap();
        assert!(b.is_zero());
        assert!(matches!(per_simplex_lipschitz_bound(&k, &BigRational::one(), &BigRational::one(), 4), Err(MetricError::DimensionTooHigh(4))));
    }

    #[test]
    fn sqrt_upper_is_an_upper_bound() {
        for a in 0..50i64 {
            let r = BigRational::from_integer(a.into());
            let s = sqrt_upper(&r, 1000);
            assert!(&s * &s >= r);
            assert!(&(&s - BigRational::new(1.into(), 1000.into())) * &(&s - BigRational::new(1.into(), 1000.into())) < r || s.is_zero());
        }
    }
}
