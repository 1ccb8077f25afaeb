//! Minimal sup-norm primitives `δγ = c`.
//!
//! For 1-cochains on a complex whose relative first cohomology has rank at
//! most one the search runs on potentials: after fixing a particular
//! primitive `g` and a generator `h` of the relative cocycles modulo
//! coboundaries, every primitive is `g + αh + δφ`, and for fixed `α` the
//! bound `‖γ‖∞ ≤ B` is a system of difference constraints on `φ`, decided by
//! Bellman–Ford. Violated constraints come back as relative 1-cycles `z` with
//! `|⟨g, z⟩ + α⟨h, z⟩| > B·‖z‖₁`; two such cycles certify infeasibility for
//! every `α`. Everything else goes to the branch-and-bound solver.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::cohomology::{free_cells, relative_cohomology};
use super::{CochainError, Cochain, Ring};
use crate::complex::{CellComplex, Label};
use crate::linalg::ilp::{verify_certificate, DEFAULT_NODE_LIMIT};
use crate::linalg::{
    ilp_min_linf_with, solve_integer, IlpOptions, InfeasibilityProof, LinalgError, NormCertificate, SolveOutcome,
    SparseMatrix,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Potentials when applicable, branch and bound otherwise.
    Auto,
    Ilp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinNormOptions {
    pub node_limit: u64,
    pub method: Method,
}

impl Default for MinNormOptions {
    fn default() -> Self {
        MinNormOptions { node_limit: DEFAULT_NODE_LIMIT, method: Method::Auto }
    }
}

/// Infeasibility of `‖γ‖∞ ≤ bound` for 1-cochain primitives, by cycles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleProof {
    pub bound: i64,
    /// A primitive, one value per edge.
    pub particular: Vec<i64>,
    /// Relative cocycle generating `H^1(X, A)`, if that group is nonzero.
    pub generator: Option<Vec<i64>>,
    /// Relative cycle pairing to `±1` with the generator.
    pub dual_cycle: Option<Vec<(usize, i64)>>,
    pub cycles: Vec<Vec<(usize, i64)>>,
    pub relative_h1_rank: usize,
}

/// `δ` restricted to cochains vanishing on `a`, with `c` restricted likewise.
fn reduced_system(c: &Cochain, a: Option<&Label>) -> Result<(SparseMatrix, Vec<BigInt>, Vec<usize>), CochainError> {
    let x = c.complex();
    let k = c.degree().checked_sub(1).ok_or(CochainError::DegreeOutOfRange { degree: 0, dim: x.dim() })?;
    if c.ring() != Ring::Z {
        return Err(CochainError::WrongShape("primitives are searched over Z".into()));
    }
    if let Some(a) = a {
        if !x.is_closed(a) {
            return Err(crate::complex::ComplexError::NotASubcomplex("relative subcomplex".into()).into());
        }
        if !c.vanishes_on(a) {
            return Err(CochainError::NotRelative);
        }
    }
    let rows = free_cells(x, a, k + 1);
    let cols = free_cells(x, a, k);
    let m = super::coboundary_operator(x, k).select(&rows, &cols);
    let b = rows.iter().map(|&r| c.values()[r].to_integer()).collect();
    Ok((m, b, cols))
}

fn expand(n: usize, cols: &[usize], v: &[i64]) -> Vec<i64> {
    let mut out = vec![0; n];
    for (&c, &x) in cols.iter().zip(v) {
        out[c] = x;
    }
    out
}

fn linalg_err(e: LinalgError) -> CochainError {
    match e {
        LinalgError::NoIntegerSolution(o) => CochainError::NotACoboundary(o),
        e => CochainError::Linalg(e),
    }
}

/// Some integral primitive `γ` vanishing on `relative` with `δγ = c`, from
/// the Smith normal form, or the obstruction when none exists.
pub fn integer_primitive(c: &Cochain, relative: Option<&Label>) -> Result<Cochain, CochainError> {
    let (m, b, cols) = reduced_system(c, relative)?;
    let n = c.complex().count(c.degree() - 1);
    match solve_integer(&m, &b).map_err(linalg_err)? {
        SolveOutcome::Solution { x, .. } => {
            let mut out = vec![BigRational::from_integer(BigInt::from(0)); n];
            for (&col, v) in cols.iter().zip(x) {
                out[col] = BigRational::from_integer(v);
            }
            Cochain::new(c.complex().clone(), c.degree() - 1, Ring::Z, out)
        }
        SolveOutcome::NoSolution(o) => Err(CochainError::NotACoboundary(o)),
    }
}

/// Exact `min ‖γ‖∞` over integral `γ` vanishing on `relative` with `δγ = c`,
/// with a witness and a proof that `optimum − 1` is infeasible.
pub fn min_norm_primitive(
    c: &Cochain,
    relative: Option<&Label>,
    opts: &MinNormOptions,
) -> Result<NormCertificate, CochainError> {
    let (m, b, cols) = reduced_system(c, relative)?;
    let n = c.complex().count(c.degree() - 1);
    if opts.method == Method::Auto && c.degree() == 2 {
        if let Some(graph) = Graph::new(c.complex(), relative) {
            if let Some(res) = potential_search(c, &graph, &m, &b, &cols)? {
                return Ok(res);
            }
        }
    }
    let ilp = IlpOptions { node_limit: opts.node_limit, ..IlpOptions::default() };
    let mut cert = ilp_min_linf_with(&m, &b, &ilp).map_err(linalg_err)?;
    cert.witness = expand(n, &cols, &cert.witness);
    Ok(cert)
}

/// Re-validates a certificate from [`min_norm_primitive`] without searching.
pub fn verify_norm_certificate(c: &Cochain, relative: Option<&Label>, cert: &NormCertificate) -> bool {
    let Ok((m, b, cols)) = reduced_system(c, relative) else { return false };
    let n = c.complex().count(c.degree() - 1);
    if cert.witness.len() != n {
        return false;
    }
    if (0..n).any(|i| cert.witness[i] != 0 && cols.binary_search(&i).is_err()) {
        return false;
    }
    if let InfeasibilityProof::Cycles(p) = &cert.infeasibility_proof {
        let x: Vec<BigInt> = cols.iter().map(|&i| BigInt::from(cert.witness[i])).collect();
        return m.mul_vec(&x) == b
            && cert.witness.iter().map(|v| v.abs()).max().unwrap_or(0) == cert.optimum
            && p.bound == cert.optimum - 1
            && verify_cycle_proof(c, relative, p);
    }
    let reduced = NormCertificate { witness: cols.iter().map(|&i| cert.witness[i]).collect(), ..cert.clone() };
    verify_certificate(&m, &b, &reduced)
}

/// Checks that no primitive of `c` vanishing on `relative` has norm at most
/// `proof.bound`.
pub fn verify_cycle_proof(c: &Cochain, relative: Option<&Label>, proof: &CycleProof) -> bool {
    let x = c.complex();
    if c.degree() != 2 || c.ring() != Ring::Z || proof.bound < 0 {
        return false;
    }
    let ne = x.count(1);
    let free = |e: usize| relative.map_or(true, |a| !a.contains(1, e));
    let relative_ok = |v: &[i64]| v.len() == ne && (0..ne).all(|e| v[e] == 0 || free(e));
    if !relative_ok(&proof.particular) {
        return false;
    }
    let d1 = x.boundary(2).transpose();
    let cvals: Vec<BigInt> = c.values().iter().map(|v| v.to_integer()).collect();
    if d1.mul_vec(&to_big(&proof.particular)) != cvals {
        return false;
    }
    let empty = Label::default();
    let rank = match relative_cohomology(x, relative.unwrap_or(&empty), 1, Ring::Z) {
        Ok(s) => s.free_rank,
        Err(_) => return false,
    };
    if rank != proof.relative_h1_rank || rank > 1 || proof.generator.is_some() != (rank == 1) {
        return false;
    }
    let is_rel_cycle = |z: &[(usize, i64)]| {
        let mut bd = vec![0i64; x.count(0)];
        for &(e, v) in z {
            if e >= ne || !free(e) {
                return false;
            }
            for &(u, s) in x.boundary(1).col(e) {
                bd[u] += s * v;
            }
        }
        (0..bd.len()).all(|u| bd[u] == 0 || relative.map_or(false, |a| a.contains(0, u)))
    };
    let pair = |g: &[i64], z: &[(usize, i64)]| z.iter().map(|&(e, v)| g[e] as i128 * v as i128).sum::<i128>();
    let h = match &proof.generator {
        Some(h) => {
            let Some(y) = &proof.dual_cycle else { return false };
            if !relative_ok(h) || !d1.mul_vec_i64(h).iter().all(|&v| v == 0) || !is_rel_cycle(y) {
                return false;
            }
            if pair(h, y).abs() != 1 {
                return false;
            }
            Some(h)
        }
        None => None,
    };
    let b = proof.bound as i128;
    let (mut lo, mut hi) = (i128::MIN, i128::MAX);
    for z in &proof.cycles {
        if !is_rel_cycle(z) {
            return false;
        }
        let s = pair(&proof.particular, z);
        let eta = h.map_or(0, |h| pair(h, z));
        let len: i128 = z.iter().map(|&(_, v)| v.abs() as i128).sum();
        match alpha_interval(s, eta, b * len) {
            None => return true,
            Some((l, u)) => {
                lo = lo.max(l);
                hi = hi.min(u);
            }
        }
    }
    lo > hi
}

/// Integers `α` with `|s + αη| ≤ r`; `None` for none, infinite ends as `i128` extremes.
fn alpha_interval(s: i128, eta: i128, r: i128) -> Option<(i128, i128)> {
    if eta == 0 {
        return (s.abs() <= r).then_some((i128::MIN, i128::MAX));
    }
    let (num_lo, num_hi) = (-r - s, r - s);
    let (l, u) = if eta > 0 {
        (Integer::div_ceil(&num_lo, &eta), Integer::div_floor(&num_hi, &eta))
    } else {
        (Integer::div_ceil(&num_hi, &eta), Integer::div_floor(&num_lo, &eta))
    };
    (l <= u).then_some((l, u))
}

fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// The 1-skeleton with the relative vertices collapsed to node 0.
struct Graph {
    n_nodes: usize,
    /// Non-relative edges with their tail and head nodes.
    edges: Vec<(usize, usize, usize)>,
}

impl Graph {
    fn new(x: &CellComplex, a: Option<&Label>) -> Option<Graph> {
        let mut node = vec![0; x.count(0)];
        let mut n_nodes = 1;
        for (v, slot) in node.iter_mut().enumerate() {
            if a.map_or(true, |a| !a.contains(0, v)) {
                *slot = n_nodes;
                n_nodes += 1;
            }
        }
        let mut edges = Vec::new();
        for e in 0..x.count(1) {
            if a.map_or(false, |a| a.contains(1, e)) {
                continue;
            }
            let col = x.boundary(1).col(e).to_vec();
            let (u, v) = match col.as_slice() {
                [] => (0, 0),
                [(p, s), (q, t)] if s + t == 0 => {
                    if *s < 0 {
                        (node[*p], node[*q])
                    } else {
                        (node[*q], node[*p])
                    }
                }
                _ => return None,
            };
            if col.is_empty() {
                edges.push((e, usize::MAX, usize::MAX));
            } else {
                edges.push((e, u, v));
            }
        }
        Some(Graph { n_nodes, edges })
    }
}

struct Forest {
    /// Tree edge to the parent as `(edge, sign)`: the chain from the root
    /// to `v` is the parent's chain plus `sign·edge`.
    parent: Vec<Option<(usize, usize, i64)>>,
    tree: Vec<bool>,
}

fn spanning_forest(g: &Graph, ne: usize) -> Forest {
    let mut adj = vec![Vec::new(); g.n_nodes];
    for &(e, u, v) in &g.edges {
        if u != usize::MAX && u != v {
            adj[u].push((e, v, 1i64));
            adj[v].push((e, u, -1i64));
        }
    }
    let mut parent = vec![None; g.n_nodes];
    let mut seen = vec![false; g.n_nodes];
    let mut tree = vec![false; ne];
    for root in 0..g.n_nodes {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(e, w, s) in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    tree[e] = true;
                    parent[w] = Some((u, e, s));
                    queue.push_back(w);
                }
            }
        }
    }
    Forest { parent, tree }
}

impl Forest {
    fn path_chain(&self, mut v: usize, sign: i64, out: &mut std::collections::BTreeMap<usize, i64>) {
        while let Some((u, e, s)) = self.parent[v] {
            *out.entry(e).or_default() += sign * s;
            v = u;
        }
    }

    /// Fundamental relative cycle of a non-tree edge.
    fn cycle(&self, e: usize, u: usize, v: usize) -> std::collections::BTreeMap<usize, i64> {
        let mut z = std::collections::BTreeMap::new();
        z.insert(e, 1);
        if u != usize::MAX {
            self.path_chain(u, 1, &mut z);
            self.path_chain(v, -1, &mut z);
        }
        z.retain(|_, c| *c != 0);
        z
    }
}

enum Probe {
    Feasible(Vec<i64>),
    Infeasible(Vec<Vec<(usize, i64)>>),
}

struct Potentials<'a> {
    g: &'a Graph,
    particular: Vec<i64>,
    generator: Option<Vec<i64>>,
    runs: u64,
}

impl Potentials<'_> {
    /// Bellman–Ford on the constraints `|g'_e + φ(head) − φ(tail)| ≤ bound`.
    fn run(&mut self, alpha: i64, bound: i64) -> Result<Vec<i64>, Vec<(usize, i64)>> {
        self.runs += 1;
        let gp = |e: usize| self.particular[e] + self.generator.as_ref().map_or(0, |h| alpha * h[e]);
        let mut arcs = Vec::with_capacity(2 * self.g.edges.len());
        for &(e, u, v) in &self.g.edges {
            let w = gp(e);
            if u == v || u == usize::MAX {
                if w.abs() > bound {
                    return Err(vec![(e, w.signum())]);
                }
                continue;
            }
            arcs.push((u, v, bound - w, e, 1i64));
            arcs.push((v, u, bound + w, e, -1i64));
        }
        let n = self.g.n_nodes;
        let mut dist = vec![0i64; n];
        let mut pred: Vec<Option<usize>> = vec![None; n];
        let mut last = None;
        for _ in 0..n {
            last = None;
            for (i, &(u, v, w, _, _)) in arcs.iter().enumerate() {
                if dist[u] + w < dist[v] {
                    dist[v] = dist[u] + w;
                    pred[v] = Some(i);
                    last = Some(v);
                }
            }
            if last.is_none() {
                break;
            }
        }
        let Some(mut x) = last else {
            let d0 = dist[0];
            let mut gamma = vec![0i64; self.particular.len()];
            for &(e, u, v) in &self.g.edges {
                gamma[e] = if u == usize::MAX { gp(e) } else { gp(e) + (dist[v] - d0) - (dist[u] - d0) };
            }
            return Ok(gamma);
        };
        for _ in 0..n {
            x = arcs[pred[x].expect("on a relaxation chain")].0;
        }
        let mut chain = std::collections::BTreeMap::new();
        let start = x;
        loop {
            let (u, _, _, e, s) = arcs[pred[x].expect("on the cycle")];
            *chain.entry(e).or_insert(0i64) += s;
            x = u;
            if x == start {
                break;
            }
        }
        Err(chain.into_iter().filter(|&(_, c)| c != 0).collect())
    }

    fn pairing(v: &[i64], z: &[(usize, i64)]) -> i128 {
        z.iter().map(|&(e, c)| v[e] as i128 * c as i128).sum()
    }

    fn probe(&mut self, bound: i64) -> Probe {
        let mut alpha = 0i64;
        let (mut lo, mut hi) = (i128::MIN, i128::MAX);
        let mut lo_cycle: Option<Vec<(usize, i64)>> = None;
        let mut hi_cycle: Option<Vec<(usize, i64)>> = None;
        loop {
            match self.run(alpha, bound) {
                Ok(gamma) => return Probe::Feasible(gamma),
                Err(z) => {
                    let s = Self::pairing(&self.particular, &z);
                    let eta = self.generator.as_ref().map_or(0, |h| Self::pairing(h, &z));
                    let len: i128 = z.iter().map(|&(_, c)| c.abs() as i128).sum();
                    let Some((l, u)) = alpha_interval(s, eta, bound as i128 * len) else {
                        return Probe::Infeasible(vec![z]);
                    };
                    if l > lo {
                        lo = l;
                        lo_cycle = Some(z.clone());
                    }
                    if u < hi {
                        hi = u;
                        hi_cycle = Some(z);
                    }
                    if lo > hi {
                        return Probe::Infeasible(lo_cycle.into_iter().chain(hi_cycle).collect());
                    }
                    let mid = if lo == i128::MIN {
                        hi
                    } else if hi == i128::MAX {
                        lo
                    } else {
                        lo + (hi - lo) / 2
                    };
                    alpha = mid as i64;
                }
            }
        }
    }
}

fn potential_search(
    c: &Cochain,
    g: &Graph,
    m: &SparseMatrix,
    b: &[BigInt],
    cols: &[usize],
) -> Result<Option<NormCertificate>, CochainError> {
    let x = c.complex();
    let ne = x.count(1);
    let forest = spanning_forest(g, ne);
    let nontree: Vec<usize> = (0..cols.len()).filter(|&j| !forest.tree[cols[j]]).collect();
    let sub = m.select(&(0..m.nrows()).collect::<Vec<_>>(), &nontree);
    let (xp, kernel) = match solve_integer(&sub, b).map_err(linalg_err)? {
        SolveOutcome::Solution { x, kernel } => (x, kernel),
        SolveOutcome::NoSolution(o) => return Err(CochainError::NotACoboundary(o)),
    };
    if kernel.len() > 1 {
        return Ok(None);
    }
    let lift = |v: &[BigInt]| -> Option<Vec<i64>> {
        let mut out = vec![0i64; ne];
        for (&j, val) in nontree.iter().zip(v) {
            out[cols[j]] = val.to_i64()?;
        }
        Some(out)
    };
    let Some(particular) = lift(&xp) else { return Ok(None) };
    let mut generator = None;
    let mut dual_cycle = None;
    if let Some(h) = kernel.first() {
        let gcd = h.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        let h: Vec<BigInt> = h.iter().map(|v| v / &gcd).collect();
        let Some(h) = lift(&h) else { return Ok(None) };
        // Combine fundamental cycles so the pairing with `h` is ±1.
        let mut y: std::collections::BTreeMap<usize, i64> = std::collections::BTreeMap::new();
        let mut acc = 0i64;
        for &(e, u, v) in &g.edges {
            if forest.tree[e] || h[e] == 0 {
                continue;
            }
            let ext = Integer::extended_gcd(&acc, &h[e]);
            let z = forest.cycle(e, u, v);
            for val in y.values_mut() {
                *val *= ext.x;
            }
            for (f, cf) in z {
                *y.entry(f).or_default() += ext.y * cf;
            }
            acc = ext.gcd;
            if acc == 1 {
                break;
            }
        }
        y.retain(|_, v| *v != 0);
        if acc != 1 {
            return Ok(None);
        }
        generator = Some(h);
        dual_cycle = Some(y.into_iter().collect::<Vec<_>>());
    }
    let rank = usize::from(generator.is_some());
    let mut pot = Potentials { g, particular: particular.clone(), generator: generator.clone(), runs: 0 };
    let zero_rhs = b.iter().all(Zero::is_zero);
    if zero_rhs {
        return Ok(Some(NormCertificate {
            optimum: 0,
            witness: vec![0; ne],
            infeasibility_proof: InfeasibilityProof::ZeroOptimum,
            node_count: 0,
        }));
    }
    let mut upper = particular.iter().map(|v| v.abs()).max().unwrap_or(0);
    let mut best = particular.clone();
    let mut lower = 1i64;
    let mut last_cycles: Option<(i64, Vec<Vec<(usize, i64)>>)> = None;
    while lower < upper {
        let mid = lower + (upper - lower) / 2;
        match pot.probe(mid) {
            Probe::Feasible(gamma) => {
                upper = gamma.iter().map(|v| v.abs()).max().unwrap_or(0).min(mid);
                best = gamma;
            }
            Probe::Infeasible(cycles) => {
                lower = mid + 1;
                last_cycles = Some((mid, cycles));
            }
        }
    }
    let optimum = upper;
    let proof = match last_cycles {
        Some((bound, cycles)) if bound == optimum - 1 => InfeasibilityProof::Cycles(Box::new(CycleProof {
            bound,
            particular,
            generator,
            dual_cycle,
            cycles,
            relative_h1_rank: rank,
        })),
        _ if optimum == 1 => InfeasibilityProof::NonzeroRhs,
        _ => return Err(CochainError::Linalg(LinalgError::Internal("bound search lost its proof".into()))),
    };
    Ok(Some(NormCertificate { optimum, witness: best, infeasibility_proof: proof, node_count: pot.runs }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::Cochain;
    use crate::complex::{annulus_triangulation, simplex};
    use std::sync::Arc;

    #[test]
    fn disk_relative_boundary() {
        let t = Arc::new(simplex(2));
        let bd = t.closure(vec![vec![], vec![0, 1, 2]]);
        let c = Cochain::from_integers(t.clone(), 2, Ring::Z, &[1]).unwrap();
        let err = min_norm_primitive(&c, Some(&bd), &MinNormOptions::default()).unwrap_err();
        assert!(matches!(err, CochainError::NotACoboundary(_)));
        let cert = min_norm_primitive(&c, None, &MinNormOptions::default()).unwrap();
        assert_eq!(cert.optimum, 1);
        assert!(verify_norm_certificate(&c, None, &cert));
    }

    #[test]
    fn potentials_agree_with_branch_and_bound() {
        let (ann, _) = annulus_triangulation(6, 3).unwrap();
        let mut rim = ann.label("domain-rim").unwrap().clone();
        rim.circuit = None;
        let d1 = ann.boundary(2).transpose();
        for seed in 0..6i64 {
            let g0: Vec<i64> = (0..ann.count(1))
                .map(|e| if rim.contains(1, e) { 0 } else { ((e as i64 * 7 + seed * 3) % 5) - 2 })
                .collect();
            let c = Cochain::from_integers(ann.clone(), 2, Ring::Z, &d1.mul_vec_i64(&g0)).unwrap();
            let a = min_norm_primitive(&c, Some(&rim), &MinNormOptions::default()).unwrap();
            let b = min_norm_primitive(&c, Some(&rim), &MinNormOptions { method: Method::Ilp, ..Default::default() })
                .unwrap();
            assert_eq!(a.optimum, b.optimum, "seed {seed}");
            assert!(verify_norm_certificate(&c, Some(&rim), &a));
            assert!(verify_norm_certificate(&c, Some(&rim), &b));
            assert!(a.optimum <= g0.iter().map(|v| v.abs()).max().unwrap());
        }
    }
}
