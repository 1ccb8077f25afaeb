//! Oracles shared by the integration tests. Nothing here calls the library's
//! linear algebra: matrices are rebuilt from vertex lists and reduced with
//! plain dense elimination.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use coarse_kit::complex::CellComplex;
use rand::seq::SliceRandom;
use rand::Rng;

pub type Dense = Vec<Vec<i128>>;

/// Signed boundary `∂_k` from the simplex lists, rows indexed by `(k−1)`-simplices.
pub fn boundary_from_simplices(x: &CellComplex, k: usize) -> Dense {
    let faces: HashMap<&[usize], usize> = x.simplices(k - 1).iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let mut m = vec![vec![0i128; x.count(k)]; x.count(k - 1)];
    for (j, s) in x.simplices(k).iter().enumerate() {
        for i in 0..s.len() {
            let mut f = s.clone();
            f.remove(i);
            let r = faces[f.as_slice()];
            m[r][j] += if i % 2 == 0 { 1 } else { -1 };
        }
    }
    m
}

pub fn dense_of(x: &CellComplex, k: usize) -> Dense {
    let b = x.boundary(k);
    let mut m = vec![vec![0i128; b.ncols()]; b.nrows()];
    for (r, c, v) in b.triples() {
        m[r][c] = v as i128;
    }
    m
}

pub fn mat_mul(a: &Dense, b: &Dense) -> Dense {
    let (n, k) = (a.len(), b.len());
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![0i128; m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l] != 0 {
                for j in 0..m {
                    out[i][j] += a[i][l] * b[l][j];
                }
            }
        }
    }
    out
}

/// Nonzero diagonal of the Smith normal form, by dense elimination with
/// smallest-entry pivots. Panics on `i128` overflow.
pub fn dense_snf(mut m: Dense) -> Vec<i128> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if m[i][j] != 0 && best.is_none_or(|(a, b)| m[i][j].abs() < m[a][b].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let p = m[t][t];
            let mut dirty = false;
            for i in t + 1..rows {
                let q = m[i][t] / p;
                if q != 0 {
                    for j in t..cols {
                        m[i][j] = m[i][j].checked_sub(q.checked_mul(m[t][j]).expect("overflow")).expect("overflow");
                    }
                }
                dirty |= m[i][t] != 0;
            }
            for j in t + 1..cols {
                let q = m[t][j] / p;
                if q != 0 {
                    for row in m.iter_mut().skip(t) {
                        row[j] = row[j].checked_sub(q.checked_mul(row[t]).expect("overflow")).expect("overflow");
                    }
                }
                dirty |= m[t][j] != 0;
            }
            if !dirty {
                // Divisibility: fold in any entry not divisible by the pivot.
                let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| m[i][j] % p != 0));
                match bad {
                    Some(i) => {
                        for j in t..cols {
                            m[t][j] += m[i][j];
                        }
                    }
                    None => break,
                }
            }
            // Move the smallest nonzero entry of row/column t to the pivot.
            let mut bi = (t, t);
            for i in t..rows {
                if m[i][t] != 0 && (m[bi.0][bi.1] == 0 || m[i][t].abs() < m[bi.0][bi.1].abs()) {
                    bi = (i, t);
                }
            }
            for j in t..cols {
                if m[t][j] != 0 && (m[bi.0][bi.1] == 0 || m[t][j].abs() < m[bi.0][bi.1].abs()) {
                    bi = (t, j);
                }
            }
            if bi.0 != t {
                m.swap(t, bi.0);
            }
            if bi.1 != t {
                for row in m.iter_mut() {
                    row.swap(t, bi.1);
                }
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    diag
}

/// `(free rank, torsion > 1)` of `H_k` from dense SNF of boundary matrices
/// rebuilt from the simplices.
pub fn oracle_homology(x: &CellComplex, k: usize) -> (usize, Vec<i128>) {
    let n = x.count(k);
    let rank_out = if k >= 1 { dense_snf(boundary_from_simplices(x, k)).len() } else { 0 };
    let d_in = if k < x.dim() { dense_snf(boundary_from_simplices(x, k + 1)) } else { vec![] };
    (n - rank_out - d_in.len(), d_in.into_iter().filter(|&d| d > 1).collect())
}

/// Rank over `F_p` by Gaussian elimination.
pub fn rank_mod_p(m: &Dense, p: i128) -> usize {
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|v| v.rem_euclid(p)).collect()).collect();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let inv = |x: i128| {
        let (mut r, mut e, mut b) = (1i128, p - 2, x);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    };
    let mut rank = 0;
    for c in 0..cols {
        let Some(pr) = (rank..rows).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, pr);
        let iv = inv(a[rank][c]);
        for j in c..cols {
            a[rank][j] = a[rank][j] * iv % p;
        }
        for r in 0..rows {
            if r != rank && a[r][c] != 0 {
                let f = a[r][c];
                for j in c..cols {
                    a[r][j] = (a[r][j] - f * a[rank][j]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// `dim H^k(X; F_p)` from ranks of the transposed boundary matrices.
pub fn oracle_betti_mod_p(x: &CellComplex, k: usize, p: i128) -> usize {
    let r_out = if k < x.dim() { rank_mod_p(&dense_of(x, k + 1), p) } else { 0 };
    let r_in = if k >= 1 { rank_mod_p(&dense_of(x, k), p) } else { 0 };
    x.count(k) - r_out - r_in
}

/// Smallest `b` for which a primitive `γ` with `|γ| ≤ b` exists, by
/// exhaustive backtracking. `free[e]` marks edges outside the relative
/// subcomplex; `tri` lists each triangle's signed edges (coefficients ±1).
/// Edges are visited triangle by triangle; an edge that completes a
/// triangle takes the one value that triangle allows.
pub fn brute_min_norm(free: &[bool], tri: &[Vec<(usize, i64)>], c: &[i64], max_b: i64) -> Option<(i64, Vec<i64>)> {
    let n = free.len();
    let mut order = Vec::new();
    let mut seen = vec![false; n];
    for es in tri {
        for &(e, _) in es {
            if free[e] && !seen[e] {
                seen[e] = true;
                order.push(e);
            }
        }
    }
    order.extend((0..n).filter(|&e| free[e] && !seen[e]));
    let pos: Vec<usize> = {
        let mut p = vec![usize::MAX; n];
        for (i, &e) in order.iter().enumerate() {
            p[e] = i;
        }
        p
    };
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); order.len()];
    for (t, es) in tri.iter().enumerate() {
        match es.iter().filter(|(e, _)| free[*e]).map(|(e, _)| pos[*e]).max() {
            Some(i) => closing[i].push(t),
            None if c[t] != 0 => return None,
            None => {}
        }
    }
    struct Search<'a> {
        order: &'a [usize],
        closing: &'a [Vec<usize>],
        tri: &'a [Vec<(usize, i64)>],
        c: &'a [i64],
        b: i64,
    }
    impl Search<'_> {
        fn residual(&self, t: usize, skip: usize, g: &[i64]) -> (i64, i64) {
            let mut r = self.c[t];
            let mut coef = 0;
            for &(f, s) in &self.tri[t] {
                if f == skip {
                    coef = s;
                } else {
                    r -= s * g[f];
                }
            }
            (r, coef)
        }

        fn go(&self, i: usize, g: &mut Vec<i64>) -> bool {
            let Some(&e) = self.order.get(i) else { return true };
            let cands: Vec<i64> = match self.closing[i].first() {
                Some(&t) => {
                    let (r, coef) = self.residual(t, e, g);
                    assert!(coef.abs() == 1);
                    let v = r * coef;
                    if v.abs() > self.b {
                        return false;
                    }
                    vec![v]
                }
                None => (-self.b..=self.b).collect(),
            };
            for v in cands {
                g[e] = v;
                let ok = self.closing[i].iter().all(|&t| {
                    let (r, coef) = self.residual(t, e, g);
                    r == coef * v
                });
                if ok && self.go(i + 1, g) {
                    return true;
                }
            }
            g[e] = 0;
            false
        }
    }
    for b in 0..=max_b {
        let s = Search { order: &order, closing: &closing, tri, c, b };
        let mut g = vec![0; n];
        if s.go(0, &mut g) {
            return Some((b, g));
        }
    }
    None
}

/// Winding number of a simplicial map between vertex-cycle circles
/// `0, 1, …, n−1`: the signed sum of the steps of the image path.
pub fn winding(vm: &[usize], target_n: usize) -> i64 {
    let n = vm.len();
    let t = target_n as i64;
    let mut total = 0i64;
    for j in 0..n {
        let step = (vm[(j + 1) % n] as i64 - vm[j] as i64).rem_euclid(t);
        total += match step {
            0 => 0,
            1 => 1,
            s if s == t - 1 => -1,
            s => panic!("image step {s} is not an edge"),
        };
    }
    assert_eq!(total % t, 0);
    total / t
}

/// A connected 2-complex grown by gluing triangles onto existing edges,
/// sometimes reusing vertices, plus a few free edges.
pub fn random_complex(rng: &mut impl Rng, triangles: usize) -> CellComplex {
    let mut gens: Vec<Vec<usize>> = vec![vec![0, 1, 2]];
    let mut edges: Vec<(usize, usize)> = vec![(0, 1), (1, 2), (0, 2)];
    let mut nv = 3;
    for _ in 1..triangles {
        let &(a, b) = edges.choose(rng).expect("edges");
        let c = if rng.gen_bool(0.3) && nv > 3 {
            let c = rng.gen_range(0..nv);
            if c == a || c == b {
                continue;
            }
            c
        } else {
            nv += 1;
            nv - 1
        };
        let mut t = vec![a, b, c];
        t.sort();
        if gens.contains(&t) {
            continue;
        }
        edges.extend([(a.min(c), a.max(c)), (b.min(c), b.max(c))]);
        gens.push(t);
    }
    for _ in 0..rng.gen_range(0..3) {
        let a = rng.gen_range(0..nv);
        gens.push(vec![a, nv]);
        nv += 1;
    }
    CellComplex::from_simplices(nv, &gens).expect("valid")
}

/// A cover of the vertices of `x` by `sets` random sets, patched so every
/// vertex is covered.
pub fn random_cover(rng: &mut impl Rng, x: &Arc<CellComplex>, sets: usize) -> Vec<BTreeSet<usize>> {
    let n = x.n_vertices();
    let mut out: Vec<BTreeSet<usize>> = (0..sets)
        .map(|_| {
            let mut s: BTreeSet<usize> = (0..n).filter(|_| rng.gen_bool(0.35)).collect();
            s.insert(rng.gen_range(0..n));
            s
        })
        .collect();
    for v in 0..n {
        if !out.iter().any(|s| s.contains(&v)) {
            let i = rng.gen_range(0..sets);
            out[i].insert(v);
        }
    }
    out
}

/// Six-vertex projective plane.
pub fn rp2() -> CellComplex {
    let faces: Vec<Vec<usize>> = [
        [0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 1, 5],
        [1, 2, 4], [2, 3, 5], [1, 3, 4], [2, 4, 5], [1, 3, 5],
    ]
    .iter()
    .map(|f| f.to_vec())
    .collect();
    CellComplex::from_simplices(6, &faces).expect("valid")
}
