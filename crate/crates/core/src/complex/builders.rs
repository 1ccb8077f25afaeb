use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use super::map::CellMap;
use super::{CellComplex, ComplexError, Label};
use crate::linalg::SparseMatrix;

pub fn point() -> CellComplex {
    CellComplex::from_simplices(1, &[]).expect("point")
}

/// The full `n`-simplex on vertices `0..=n`.
pub fn simplex(n: usize) -> CellComplex {
    CellComplex::from_simplices(n + 1, &[(0..=n).collect()]).expect("simplex")
}

/// Subdivided interval `[0, n]` with vertices `0..=n`.
pub fn path(n: usize) -> CellComplex {
    let edges: Vec<Vec<usize>> = (0..n).map(|i| vec![i, i + 1]).collect();
    CellComplex::from_simplices(n + 1, &edges).expect("path")
}

/// Circle with vertices `0..n` and circuit `0 → 1 → … → n−1 → 0`, labeled `"circle"`.
pub fn circle(n: usize) -> Result<CellComplex, ComplexError> {
    if n < 3 {
        return Err(ComplexError::TooFewVertices(n));
    }
    let edges: Vec<Vec<usize>> = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    let mut cx = CellComplex::from_simplices(n, &edges)?;
    let mut l = cx.closure(vec![vec![], (0..n).collect()]);
    l.circuit = Some((0..n).collect());
    cx.set_label("circle", l)?;
    Ok(cx)
}

/// Edge coefficients of the 1-chain traversing `circuit` in order.
pub fn circuit_chain(cx: &CellComplex, circuit: &[usize]) -> Result<Vec<i64>, ComplexError> {
    let mut z = vec![0i64; cx.count(1)];
    let n = circuit.len();
    for i in 0..n {
        let (a, b) = (circuit[i], circuit[(i + 1) % n]);
        let (lo, hi, s) = if a < b { (a, b, 1) } else { (b, a, -1) };
        let e = cx
            .simplex_index(&[lo, hi])
            .ok_or_else(|| ComplexError::NotSimplicial(format!("circuit step {a}→{b} is not an edge")))?;
        z[e] += s;
    }
    Ok(z)
}

/// Result of [`mapping_cylinder`]. Source vertices keep their indices; target
/// vertex `w` becomes `n_source + w`.
#[derive(Debug, Clone)]
pub struct Cylinder {
    pub complex: Arc<CellComplex>,
    pub inclusion_domain: CellMap,
    pub inclusion_target: CellMap,
    pub retraction: CellMap,
}

/// Simplicial mapping cylinder: for each source simplex `[v0 < … < vn]` the
/// simplices `{v0, …, vi} ∪ {f(vi), …, f(vn)}`, together with the target.
/// Labels `"domain"` and `"target"` mark the two ends.
pub fn mapping_cylinder(f: &CellMap) -> Result<Cylinder, ComplexError> {
    let vm = f.vertex_map().ok_or_else(|| ComplexError::NotSimplicial("mapping cylinder of a cell map".into()))?;
    let (s, t) = (f.source(), f.target());
    if s.dim() > 2 || t.dim() > 2 {
        return Err(ComplexError::DimensionTooHigh { found: s.dim().max(t.dim()), max: 2 });
    }
    let ns = s.n_vertices();
    let mut gens: Vec<Vec<usize>> = t.maximal_simplices().into_iter().map(|x| x.iter().map(|v| v + ns).collect()).collect();
    for k in 0..=s.dim() {
        for simplex in s.simplices(k) {
            for i in 0..simplex.len() {
                let mut g: Vec<usize> = simplex[..=i].to_vec();
                g.extend(simplex[i..].iter().map(|&v| vm[v] + ns));
                g.sort_unstable();
                g.dedup();
                gens.push(g);
            }
        }
    }
    let mut cx = CellComplex::from_simplices(ns + t.n_vertices(), &gens)?;
    let dom: Vec<Vec<Vec<usize>>> = (0..=s.dim()).map(|k| s.simplices(k).to_vec()).collect();
    let tgt: Vec<Vec<Vec<usize>>> =
        (0..=t.dim()).map(|k| t.simplices(k).iter().map(|x| x.iter().map(|v| v + ns).collect()).collect()).collect();
    let mut dl = label_from_vertex_sets(&cx, &dom);
    dl.circuit = single_circuit(s);
    cx.set_label("domain", dl)?;
    let mut tl = label_from_vertex_sets(&cx, &tgt);
    tl.circuit = single_circuit(t).map(|c| c.iter().map(|v| v + ns).collect());
    cx.set_label("target", tl)?;
    let cx = Arc::new(cx);
    let n = cx.n_vertices();
    let inclusion_domain = CellMap::simplicial(s.clone(), cx.clone(), (0..ns).collect())?;
    let inclusion_target = CellMap::simplicial(t.clone(), cx.clone(), (0..t.n_vertices()).map(|w| w + ns).collect())?;
    let retraction =
        CellMap::simplicial(cx.clone(), t.clone(), (0..n).map(|v| if v < ns { vm[v] } else { v - ns }).collect())?;
    Ok(Cylinder { complex: cx, inclusion_domain, inclusion_target, retraction })
}

fn single_circuit(cx: &CellComplex) -> Option<Vec<usize>> {
    let mut with: Vec<&Label> = cx.labels().values().filter(|l| l.circuit.is_some()).collect();
    with.retain(|l| l.cells_in(0).len() == cx.n_vertices());
    with.first().and_then(|l| l.circuit.clone())
}

/// Annulus between `circle(a)` and `circle(b)` for `a = d·b`, built as the
/// mapping cylinder of the wrap map `j ↦ j mod b`. Rims are labeled
/// `"domain-rim"` and `"target-rim"`; the returned map is the collapse onto
/// `circle(b)`, of degree `d` on the domain rim.
pub fn annulus_triangulation(a: usize, b: usize) -> Result<(Arc<CellComplex>, CellMap), ComplexError> {
    if b < 3 {
        return Err(ComplexError::TooFewVertices(b));
    }
    if a == 0 || a % b != 0 {
        return Err(ComplexError::NotDivisible { a, b });
    }
    let wrap = CellMap::simplicial(Arc::new(circle(a)?), Arc::new(circle(b)?), (0..a).map(|j| j % b).collect())?;
    let cyl = mapping_cylinder(&wrap)?;
    let mut cx = (*cyl.complex).clone();
    cx.rename_label("domain", "domain-rim")?;
    cx.rename_label("target", "target-rim")?;
    let cx = Arc::new(cx);
    let vm = cyl.retraction.vertex_map().expect("simplicial").to_vec();
    let collapse = CellMap::simplicial(cx.clone(), wrap.target().clone(), vm)?;
    Ok((cx, collapse))
}

/// Vertex sets of the cells of a label, per dimension.
pub fn label_vertex_sets(cx: &CellComplex, label: &Label) -> Vec<Vec<Vec<usize>>> {
    label.cells.iter().enumerate().map(|(k, cells)| cells.iter().map(|&i| cx.simplex(k, i).to_vec()).collect()).collect()
}

/// Label of the simplices with the given vertex sets (each sorted on lookup).
pub fn label_from_vertex_sets(cx: &CellComplex, sets: &[Vec<Vec<usize>>]) -> Label {
    let cells = sets
        .iter()
        .map(|l| {
            l.iter()
                .map(|s| {
                    let mut s = s.clone();
                    s.sort_unstable();
                    cx.simplex_index(&s).expect("simplex present")
                })
                .collect()
        })
        .collect();
    Label::from_cells(cells)
}

/// Identification of two labeled subcomplexes by a vertex bijection
/// `(x vertex, y vertex)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub x_label: String,
    pub y_label: String,
    pub pairs: Vec<(usize, usize)>,
}

/// Result of a gluing: the pushout and where each `Y` vertex went. `X`
/// vertices keep their indices.
#[derive(Debug, Clone)]
pub struct Glued {
    pub complex: CellComplex,
    pub y_vertices: Vec<usize>,
}

/// Pushout of `X ← L → Y` for an orientation-preserving simplicial
/// isomorphism between labeled subcomplexes. Labels of both sides are
/// carried over; on a name clash the label of `X` is kept.
pub fn glue(x: &CellComplex, y: &CellComplex, m: &Matching) -> Result<Glued, ComplexError> {
    let lx = x.label(&m.x_label)?;
    let ly = y.label(&m.y_label)?;
    if !x.is_simplicial() || !y.is_simplicial() {
        return Err(ComplexError::NotSimplicial("glue needs simplicial complexes".into()));
    }
    let vx: BTreeSet<usize> = x.label_vertices(lx);
    let vy: BTreeSet<usize> = y.label_vertices(ly);
    let mut fwd: HashMap<usize, usize> = HashMap::new();
    let mut back: HashMap<usize, usize> = HashMap::new();
    for &(a, b) in &m.pairs {
        if !vx.contains(&a) || !vy.contains(&b) || fwd.insert(b, a).is_some() || back.insert(a, b).is_some() {
            return Err(ComplexError::NotIsomorphic(format!("pair ({a},{b}) is not part of a vertex bijection")));
        }
    }
    if fwd.len() != vx.len() || fwd.len() != vy.len() {
        return Err(ComplexError::NotIsomorphic(format!(
            "{} vertices against {} (matched {})",
            vx.len(),
            vy.len(),
            fwd.len()
        )));
    }
    for k in 0..=ly.cells.len().saturating_sub(1) {
        if lx.cells_in(k).len() != ly.cells_in(k).len() {
            return Err(ComplexError::NotIsomorphic(format!("different numbers of {k}-cells")));
        }
        for &c in ly.cells_in(k) {
            let mut img: Vec<usize> = y.simplex(k, c).iter().map(|v| fwd[v]).collect();
            img.sort_unstable();
            if !x.simplex_index(&img).is_some_and(|i| lx.contains(k, i)) {
                return Err(ComplexError::NotIsomorphic(format!("{:?} has no matching cell", y.simplex(k, c))));
            }
        }
    }
    if let (Some(cx_), Some(cy)) = (&lx.circuit, &ly.circuit) {
        let mapped: Vec<usize> = cy.iter().map(|v| fwd[v]).collect();
        if !is_rotation(cx_, &mapped) {
            let mut rev = mapped.clone();
            rev.reverse();
            return Err(if is_rotation(cx_, &rev) {
                ComplexError::OrientationMismatch
            } else {
                ComplexError::NotIsomorphic("circuits do not correspond".into())
            });
        }
    }
    glue_vertices(x, y, &fwd, ly)
}

fn is_rotation(a: &[usize], b: &[usize]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let Some(s) = b.iter().position(|&v| v == a[0]) else { return false };
    (0..a.len()).all(|i| a[i] == b[(s + i) % b.len()])
}

fn glue_vertices(
    x: &CellComplex,
    y: &CellComplex,
    fwd: &HashMap<usize, usize>,
    ly: &Label,
) -> Result<Glued, ComplexError> {
    let mut next = x.n_vertices();
    let y_vertices: Vec<usize> = (0..y.n_vertices())
        .map(|v| {
            fwd.get(&v).copied().unwrap_or_else(|| {
                next += 1;
                next - 1
            })
        })
        .collect();
    for k in 0..=y.dim() {
        for (i, s) in y.simplices(k).iter().enumerate() {
            if ly.contains(k, i) || !s.iter().all(|v| fwd.contains_key(v)) {
                continue;
            }
            let mut img: Vec<usize> = s.iter().map(|&v| y_vertices[v]).collect();
            img.sort_unstable();
            if x.simplex_index(&img).is_some() {
                return Err(ComplexError::NotIsomorphic(format!(
                    "gluing identifies {s:?} with a cell outside the matched locus"
                )));
            }
        }
    }
    let mut gens = x.maximal_simplices();
    gens.extend(y.maximal_simplices().into_iter().map(|s| s.into_iter().map(|v| y_vertices[v]).collect()));
    let mut cx = CellComplex::from_simplices(next, &gens)?;
    let mut labels: BTreeMap<String, Label> = BTreeMap::new();
    for (name, l) in y.labels() {
        labels.insert(name.clone(), map_label(y, &cx, l, &y_vertices));
    }
    let ident: Vec<usize> = (0..x.n_vertices()).collect();
    for (name, l) in x.labels() {
        labels.insert(name.clone(), map_label(x, &cx, l, &ident));
    }
    *cx.labels_mut() = labels;
    Ok(Glued { complex: cx, y_vertices })
}

/// Transports a label along an injective-on-simplices vertex map into `to`.
pub fn map_label(from: &CellComplex, to: &CellComplex, l: &Label, vmap: &[usize]) -> Label {
    let sets: Vec<Vec<Vec<usize>>> = label_vertex_sets(from, l)
        .into_iter()
        .map(|lvl| lvl.into_iter().map(|s| s.into_iter().map(|v| vmap[v]).collect()).collect())
        .collect();
    let mut out = label_from_vertex_sets(to, &sets);
    out.circuit = l.circuit.as_ref().map(|c| c.iter().map(|&v| vmap[v]).collect());
    out
}

/// Wedge `X ∨ Y` identifying `y0` with `x0`.
pub fn wedge(x: &CellComplex, y: &CellComplex, x0: usize, y0: usize) -> Result<Glued, ComplexError> {
    if x0 >= x.n_vertices() {
        return Err(ComplexError::NotAVertex(x0));
    }
    if y0 >= y.n_vertices() {
        return Err(ComplexError::NotAVertex(y0));
    }
    if !x.is_simplicial() || !y.is_simplicial() {
        return Err(ComplexError::NotSimplicial("wedge needs simplicial complexes".into()));
    }
    let fwd = HashMap::from([(y0, x0)]);
    glue_vertices(x, y, &fwd, &Label::from_cells(vec![vec![y0]]))
}

/// Disjoint union; vertices of the `i`-th part are offset by the sizes of the earlier ones.
pub fn disjoint_union(parts: &[&CellComplex]) -> Result<(CellComplex, Vec<usize>), ComplexError> {
    let mut gens = Vec::new();
    let mut offsets = Vec::new();
    let mut off = 0;
    for p in parts {
        if !p.is_simplicial() {
            return Err(ComplexError::NotSimplicial("disjoint union of cell-mode complexes".into()));
        }
        offsets.push(off);
        gens.extend(p.maximal_simplices().into_iter().map(|s| s.into_iter().map(|v| v + off).collect::<Vec<_>>()));
        off += p.n_vertices();
    }
    Ok((CellComplex::from_simplices(off, &gens)?, offsets))
}

/// Cell indexing of `X × [0, n]`: slices `σ × {l}` come first in each
/// dimension, then prisms `τ × [l, l+1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductLayout {
    pub base_counts: Vec<usize>,
    pub n: usize,
}

impl ProductLayout {
    fn base(&self, k: usize) -> usize {
        self.base_counts.get(k).copied().unwrap_or(0)
    }

    /// Index of `σ × {l}` among the `k`-cells, `σ` a `k`-cell of the base.
    pub fn slice_cell(&self, k: usize, sigma: usize, l: usize) -> usize {
        l * self.base(k) + sigma
    }

    /// Index of `τ × [l, l+1]` among the `(k+1)`-cells, `τ` a `k`-cell of the base.
    pub fn prism_cell(&self, k: usize, tau: usize, l: usize) -> usize {
        (self.n + 1) * self.base(k + 1) + l * self.base(k) + tau
    }

    pub fn count(&self, k: usize) -> usize {
        (self.n + 1) * self.base(k) + if k == 0 { 0 } else { self.n * self.base(k - 1) }
    }

    /// Inverse of the indexing: `(base dim, base cell, l, is_prism)`.
    pub fn decode(&self, k: usize, cell: usize) -> (usize, usize, usize, bool) {
        let slices = (self.n + 1) * self.base(k);
        if cell < slices {
            (k, cell % self.base(k), cell / self.base(k), false)
        } else {
            let c = cell - slices;
            (k - 1, c % self.base(k - 1), c / self.base(k - 1), true)
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProductComplex {
    pub complex: CellComplex,
    pub layout: ProductLayout,
}

/// `X × [0, n]` with the interval subdivided into unit pieces. Boundaries
/// follow `∂(τ × I) = ∂τ × I + (−1)^{dim τ} (τ × {l+1} − τ × {l})`.
/// Labels: `"slice-l"` for each `l`, and `"<name>×I"` for each base label.
pub fn product_interval(x: &CellComplex, n: usize) -> Result<ProductComplex, ComplexError> {
    if x.dim() > 2 {
        return Err(ComplexError::DimensionTooHigh { found: x.dim(), max: 2 });
    }
    if n == 0 {
        return Err(ComplexError::Format("product_interval needs n ≥ 1".into()));
    }
    let layout = ProductLayout { base_counts: x.counts().to_vec(), n };
    let top = x.dim() + 1;
    let counts: Vec<usize> = (0..=top).map(|k| layout.count(k)).collect();
    let mut bds = Vec::new();
    for k in 1..=top {
        let mut t = Vec::new();
        if k <= x.dim() {
            let bk = x.boundary(k);
            for l in 0..=n {
                for (s, col) in bk.columns().iter().enumerate() {
                    for &(r, v) in col {
                        t.push((layout.slice_cell(k - 1, r, l), layout.slice_cell(k, s, l), v));
                    }
                }
            }
        }
        let bt = x.boundary(k - 1);
        let sign = if (k - 1) % 2 == 0 { 1 } else { -1 };
        for l in 0..n {
            for tau in 0..x.count(k - 1) {
                let c = layout.prism_cell(k - 1, tau, l);
                if k >= 2 {
                    for &(r, v) in bt.col(tau) {
                        t.push((layout.prism_cell(k - 2, r, l), c, v));
                    }
                }
                t.push((layout.slice_cell(k - 1, tau, l + 1), c, sign));
                t.push((layout.slice_cell(k - 1, tau, l), c, -sign));
            }
        }
        bds.push(SparseMatrix::from_triples(counts[k - 1], counts[k], t));
    }
    let mut cx = CellComplex::new(counts, bds)?;
    for l in 0..=n {
        let cells = (0..=x.dim()).map(|k| (0..x.count(k)).map(|s| layout.slice_cell(k, s, l)).collect()).collect();
        cx.set_label(&format!("slice-{l}"), Label::from_cells(cells))?;
    }
    for (name, lab) in x.labels() {
        let mut cells: Vec<Vec<usize>> = vec![Vec::new(); top + 1];
        for (k, cs) in lab.cells.iter().enumerate() {
            for &s in cs {
                for l in 0..=n {
                    cells[k].push(layout.slice_cell(k, s, l));
                }
                for l in 0..n {
                    cells[k + 1].push(layout.prism_cell(k, s, l));
                }
            }
        }
        cx.set_label(&format!("{name}×I"), Label::from_cells(cells))?;
    }
    Ok(ProductComplex { complex: cx, layout })
}

/// A subdivision together with, for each new vertex, the vertex set of the
/// base simplex it lies in the interior of.
#[derive(Debug, Clone)]
pub struct Subdivision {
    pub complex: Arc<CellComplex>,
    pub base: Arc<CellComplex>,
    pub vertex_support: Vec<Vec<usize>>,
}

impl Subdivision {
    /// Smallest base simplex containing the new simplex `(k, i)`, as `(dim, index)`.
    pub fn carrier(&self, k: usize, i: usize) -> (usize, usize) {
        let s = self.carrier_vertices(self.complex.simplex(k, i));
        (s.len() - 1, self.base.simplex_index(&s).expect("carrier is a base simplex"))
    }

    /// Union of supports of a set of subdivision vertices.
    pub fn carrier_vertices(&self, vertices: &[usize]) -> Vec<usize> {
        let mut s: Vec<usize> = vertices.iter().flat_map(|&v| self.vertex_support[v].iter().copied()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Checks that every new simplex lies in a base simplex.
    pub fn carriers_valid(&self) -> bool {
        (0..=self.complex.dim()).all(|k| {
            self.complex.simplices(k).iter().all(|s| self.base.simplex_index(&self.carrier_vertices(s)).is_some())
        })
    }
}

/// Barycentric subdivision: one vertex per simplex (in dimension-then-index
/// order), one simplex per flag of faces.
pub fn barycentric_subdivision(x: &Arc<CellComplex>) -> Result<Subdivision, ComplexError> {
    if !x.is_simplicial() {
        return Err(ComplexError::NotSimplicial("barycentric subdivision of a cell-mode complex".into()));
    }
    let mut offset = vec![0usize; x.dim() + 2];
    for k in 0..=x.dim() {
        offset[k + 1] = offset[k] + x.count(k);
    }
    let id = |k: usize, i: usize| offset[k] + i;
    let mut support = Vec::with_capacity(offset[x.dim() + 1]);
    for k in 0..=x.dim() {
        support.extend(x.simplices(k).iter().cloned());
    }
    // flags[k][i]: all flags ending at simplex (k, i), as new-vertex lists.
    let mut flags: Vec<Vec<Vec<Vec<usize>>>> = Vec::new();
    let mut gens = Vec::new();
    for k in 0..=x.dim() {
        let bd = x.boundary(k);
        let mut level = Vec::with_capacity(x.count(k));
        for i in 0..x.count(k) {
            let mut fl = vec![vec![id(k, i)]];
            if k > 0 {
                let mut faces: BTreeSet<(usize, usize)> = BTreeSet::new();
                for &(r, _) in bd.col(i) {
                    faces.insert((k - 1, r));
                }
                let mut all_faces: BTreeSet<(usize, usize)> = BTreeSet::new();
                let mut stack: Vec<(usize, usize)> = faces.into_iter().collect();
                while let Some((d, f)) = stack.pop() {
                    if all_faces.insert((d, f)) && d > 0 {
                        for &(r, _) in x.boundary(d).col(f) {
                            stack.push((d - 1, r));
                        }
                    }
                }
                for &(d, f) in &all_faces {
                    let sub: &Vec<Vec<Vec<usize>>> = &flags[d];
                    for chain in &sub[f] {
                        let mut c = chain.clone();
                        c.push(id(k, i));
                        fl.push(c);
                    }
                }
            }
            if k == x.dim() || x.cofaces(k)[i].is_empty() {
                gens.extend(fl.iter().filter(|c| c.len() == k + 1).cloned());
            }
            level.push(fl);
        }
        flags.push(level);
    }
    let mut cx = CellComplex::from_simplices(offset[x.dim() + 1], &gens)?;
    for (name, l) in x.labels() {
        let verts: BTreeSet<usize> =
            l.cells.iter().enumerate().flat_map(|(k, cs)| cs.iter().map(move |&i| id(k, i))).collect();
        let sub = cx.full_subcomplex(&verts);
        cx.set_label(name, sub)?;
    }
    Ok(Subdivision { complex: Arc::new(cx), base: x.clone(), vertex_support: support })
}

/// Midpoint subdivision of a single 2-simplex `[0, 1, 2]` into four
/// triangles. New vertices: `3 = m01`, `4 = m12`, `5 = m02`. Labels:
/// `"middle"` (the central face), `"boundary"` (the six outer edges, with
/// circuit `0 → 3 → 1 → 4 → 2 → 5`), and `"corner-i"` for the corner faces.
pub fn midpoint_subdivision(delta: &Arc<CellComplex>) -> Result<Subdivision, ComplexError> {
    if !delta.is_simplicial() || delta.counts() != [3, 3, 1] {
        return Err(ComplexError::NotASimplex);
    }
    let faces = vec![vec![0, 3, 5], vec![1, 3, 4], vec![2, 4, 5], vec![3, 4, 5]];
    let mut cx = CellComplex::from_simplices(6, &faces)?;
    let mid = cx.simplex_index(&[3, 4, 5]).expect("middle");
    cx.set_label("middle", cx.closure(vec![vec![], vec![], vec![mid]]))?;
    let bd_edges: Vec<usize> =
        [[0, 3], [1, 3], [1, 4], [2, 4], [2, 5], [0, 5]].iter().map(|e| cx.simplex_index(e).expect("edge")).collect();
    let mut bl = cx.closure(vec![vec![], bd_edges]);
    bl.circuit = Some(vec![0, 3, 1, 4, 2, 5]);
    cx.set_label("boundary", bl)?;
    for (i, f) in faces.iter().take(3).enumerate() {
        let fi = cx.simplex_index(f).expect("corner");
        cx.set_label(&format!("corner-{i}"), cx.closure(vec![vec![], vec![], vec![fi]]))?;
    }
    let support = vec![vec![0], vec![1], vec![2], vec![0, 1], vec![1, 2], vec![0, 2]];
    Ok(Subdivision { complex: Arc::new(cx), base: delta.clone(), vertex_support: support })
}

/// Renumbers vertices by a permutation `new = perm[old]`, preserving labels.
pub fn relabel_vertices(x: &CellComplex, perm: &[usize]) -> Result<CellComplex, ComplexError> {
    let gens: Vec<Vec<usize>> = x.maximal_simplices().into_iter().map(|s| s.into_iter().map(|v| perm[v]).collect()).collect();
    let mut cx = CellComplex::from_simplices(x.n_vertices(), &gens)?;
    let labels: BTreeMap<String, Label> = x.labels().iter().map(|(n, l)| (n.clone(), map_label(x, &cx, l, perm))).collect();
    *cx.labels_mut() = labels;
    Ok(cx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_counts() {
        let c = circle(6).unwrap();
        assert_eq!(c.counts(), &[6, 6]);
        assert!(c.vertex_edges().iter().all(|e| e.len() == 2));
        assert_eq!(circle(2).unwrap_err(), ComplexError::TooFewVertices(2));
        let z = circuit_chain(&c, &(0..6).collect::<Vec<_>>()).unwrap();
        let d = c.boundary(1);
        assert!(d.mul_vec_i64(&z).iter().all(|&v| v == 0));
    }

    #[test]
    fn annulus_counts() {
        let (a, f) = annulus_triangulation(6, 3).unwrap();
        assert_eq!(a.euler_characteristic(), 0);
        assert_eq!(a.counts(), &[9, 21, 12]);
        assert!(f.is_chain_map());
        assert_eq!(annulus_triangulation(7, 3).unwrap_err(), ComplexError::NotDivisible { a: 7, b: 3 });
        let (b, _) = annulus_triangulation(3, 3).unwrap();
        assert_eq!(b.euler_characteristic(), 0);
    }

    #[test]
    fn glue_two_triangles() {
        let mut x = simplex(2);
        let e = x.simplex_index(&[1, 2]).unwrap();
        x.set_label("e", x.closure(vec![vec![], vec![e]])).unwrap();
        let mut y = simplex(2);
        let f = y.simplex_index(&[0, 1]).unwrap();
        y.set_label("e", y.closure(vec![vec![], vec![f]])).unwrap();
        let g = glue(&x, &y, &Matching { x_label: "e".into(), y_label: "e".into(), pairs: vec![(1, 0), (2, 1)] })
            .unwrap();
        assert_eq!(g.complex.counts(), &[4, 5, 2]);
        assert_eq!(g.complex.euler_characteristic(), 1);
    }

    #[test]
    fn glue_rejects_mismatch() {
        let x = circle(3).unwrap();
        let y = circle(4).unwrap();
        let m = Matching { x_label: "circle".into(), y_label: "circle".into(), pairs: vec![(0, 0), (1, 1), (2, 2)] };
        assert!(matches!(glue(&x, &y, &m), Err(ComplexError::NotIsomorphic(_))));
        let y = circle(3).unwrap();
        let rev = Matching { x_label: "circle".into(), y_label: "circle".into(), pairs: vec![(0, 0), (1, 2), (2, 1)] };
        assert_eq!(glue(&x, &y, &rev).unwrap_err(), ComplexError::OrientationMismatch);
    }

    #[test]
    fn wedge_euler() {
        let w = wedge(&circle(3).unwrap(), &circle(4).unwrap(), 0, 0).unwrap();
        assert_eq!(w.complex.euler_characteristic(), -1);
        let p = wedge(&point(), &circle(5).unwrap(), 0, 2).unwrap();
        assert_eq!(p.complex.counts(), &[5, 5]);
        assert!(wedge(&point(), &point(), 1, 0).is_err());
    }

    #[test]
    fn product_counts() {
        let p = product_interval(&point(), 3).unwrap();
        assert_eq!(p.complex.counts(), &[4, 3]);
        let q = product_interval(&circle(3).unwrap(), 1).unwrap();
        assert_eq!(q.complex.euler_characteristic(), 0);
        let t = product_interval(&simplex(2), 4).unwrap();
        assert_eq!(t.complex.euler_characteristic(), 1);
        for k in 0..=3 {
            for c in 0..t.complex.count(k) {
                let (bk, s, l, prism) = t.layout.decode(k, c);
                let back = if prism { t.layout.prism_cell(bk, s, l) } else { t.layout.slice_cell(bk, s, l) };
                assert_eq!(back, c);
            }
        }
    }

    #[test]
    fn barycentric_of_triangle() {
        let sd = barycentric_subdivision(&Arc::new(simplex(2))).unwrap();
        assert_eq!(sd.complex.counts(), &[7, 12, 6]);
        assert!(sd.carriers_valid());
        let c = barycentric_subdivision(&Arc::new(circle(3).unwrap())).unwrap();
        assert_eq!(c.complex.counts(), &[6, 6]);
    }

    #[test]
    fn midpoint_of_triangle() {
        let m = midpoint_subdivision(&Arc::new(simplex(2))).unwrap();
        assert_eq!(m.complex.counts(), &[6, 9, 4]);
        assert_eq!(m.complex.euler_characteristic(), 1);
        assert_eq!(m.complex.label("boundary").unwrap().cells_in(1).len(), 6);
        assert!(m.carriers_valid());
        assert_eq!(midpoint_subdivision(&Arc::new(circle(3).unwrap())).unwrap_err(), ComplexError::NotASimplex);
    }
}
