//! One PASS/FAIL line per acceptance criterion.

mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coarse_kit::cochain::{
    cohomology, exactness_check, homology, integer_primitive, min_norm_primitive, verify_norm_certificate, Cochain,
    Method, MinNormOptions, Ring,
};
use coarse_kit::complex::{
    annulus_triangulation, circle, circuit_chain, mapping_cylinder, product_interval, CellComplex, CellMap,
};
use coarse_kit::constructions::{
    build_Mk, build_Tp, build_Y_stage, build_beta, build_tower, carrier_containment, refinement_witnesses,
    witnesses_valid, MkParams, NMode,
};
use coarse_kit::degree::{bezout, circle_map_degree, label_degree, min_m_bound};
use coarse_kit::metric::{canonical_projection, lipschitz_constant_scaled, multiplicity, nerve, CoverSpec};
use coarse_kit::report::{evaluate_hole_samples, hole_cocycles};

use common::*;

const TRIPLES: [(u64, u64, u32); 3] = [(5, 2, 1), (5, 2, 2), (7, 2, 1)];

fn criterion(n: u32, desc: &str, f: impl FnOnce()) {
    let t = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f));
    let tag = if outcome.is_ok() { "PASS" } else { "FAIL" };
    let line = format!("{tag} criterion {n:>2}: {desc} ({} ms)\n", t.elapsed().as_millis());
    let _ = std::io::stdout().write_all(line.as_bytes());
    if let Err(e) = outcome {
        std::panic::resume_unwind(e);
    }
}

fn dd_zero(x: &CellComplex) -> bool {
    (2..=x.dim()).all(|k| x.boundary(k - 1).mul(&x.boundary(k)).is_zero())
}

fn oracle_dd_zero(x: &CellComplex) {
    for k in 1..=x.dim() {
        assert_eq!(dense_of(x, k), boundary_from_simplices(x, k), "library ∂_{k} differs from the oracle");
        if k >= 2 {
            let prod = mat_mul(&boundary_from_simplices(x, k - 1), &boundary_from_simplices(x, k));
            assert!(prod.iter().flatten().all(|&v| v == 0));
        }
    }
}

#[test]
fn criterion_01_chain_complex_validity() {
    criterion(1, "∂∂ = 0 on circles, annuli, cylinders, M_k, towers, products, pull-backs", || {
        let mut all: Vec<Arc<CellComplex>> = Vec::new();
        for n in 3..10 {
            all.push(Arc::new(circle(n).unwrap()));
        }
        for (a, b) in [(6, 3), (12, 4), (10, 5)] {
            all.push(annulus_triangulation(a, b).unwrap().0);
        }
        let wrap = CellMap::simplicial(
            Arc::new(circle(8).unwrap()),
            Arc::new(circle(4).unwrap()),
            (0..8).map(|j| (j / 2) % 4).collect(),
        )
        .unwrap();
        all.push(mapping_cylinder(&wrap).unwrap().complex);
        all.push(Arc::new(build_Tp(3, 1, &MkParams::reduced(3, 2, 2)).unwrap().0));
        for (p, q, k) in TRIPLES {
            all.push(build_Mk(&MkParams::reduced(p, q, k)).unwrap().complex);
        }
        let small: Vec<Arc<CellComplex>> = all.clone();
        all.push(build_tower(&MkParams::reduced(5, 2, 2), 1).unwrap().pop().unwrap().complex);
        let m1 = build_Mk(&MkParams::reduced(5, 2, 1)).unwrap().complex;
        all.push(Arc::new(product_interval(&m1, 3).unwrap().complex));
        all.push(Arc::new(product_interval(&circle(4).unwrap(), 2).unwrap().complex));
        for y in build_Y_stage(&MkParams::reduced(5, 2, 1), 2).unwrap() {
            all.push(y.complex);
        }
        for x in &all {
            assert!(dd_zero(x), "∂∂ ≠ 0 on a complex with counts {:?}", x.counts());
        }
        for x in small.iter().filter(|x| x.total_cells() < 2000) {
            oracle_dd_zero(x);
        }
    });
}

#[test]
fn criterion_02_homology_of_mk() {
    criterion(2, "H_*(M_k) = (Z, Z², 0) against a dense SNF oracle", || {
        for (p, q, k) in TRIPLES {
            let m = build_Mk(&MkParams::reduced(p, q, k)).unwrap().complex;
            let want = [(1, vec![]), (2, vec![]), (0, vec![])];
            for (d, w) in want.iter().enumerate() {
                assert_eq!(oracle_homology(&m, d), *w, "oracle H_{d} of M_{k} for ({p},{q})");
                let h = homology(&m, d).unwrap();
                let tors: Vec<BigInt> = h.torsion.into_iter().filter(|t| !t.is_one()).collect();
                assert_eq!((h.free_rank, tors.is_empty()), (w.0, true), "library H_{d}");
            }
        }
    });
}

#[test]
fn criterion_03_obstruction_is_a_coboundary() {
    criterion(3, "δγ = q_k^*(1_Δ) solvable over Z, relative to ∂M_k", || {
        for (p, q, k) in TRIPLES {
            let b = build_Mk(&MkParams::reduced(p, q, k)).unwrap();
            let c = b.obstruction_cocycle().unwrap();
            let g = integer_primitive(&c, Some(&b.boundary_circle)).unwrap().integer_values().unwrap();
            let d2 = boundary_from_simplices(&b.complex, 2);
            let cv = c.integer_values().unwrap();
            for t in 0..b.complex.count(2) {
                let s: i128 = (0..b.complex.count(1)).map(|e| d2[e][t] * g[e] as i128).sum();
                assert_eq!(s, cv[t] as i128);
            }
            assert!(b.boundary_circle.cells_in(1).iter().all(|&e| g[e] == 0));
            assert_eq!(cv.iter().filter(|&&v| v != 0).count(), 1, "c is supported on one triangle");
        }
    });
}

/// The annulus between a 6-gon and a triangle, with the obstruction-style
/// right-hand side `δγ0`; returns the brute-force inputs too.
fn small_instance(rng: &mut ChaCha8Rng, rel: Option<&str>) -> (Cochain, Option<coarse_kit::complex::Label>, i64) {
    let (x, _) = annulus_triangulation(6, 3).unwrap();
    assert!(x.count(1) <= 30);
    let label = rel.map(|r| x.label(r).unwrap().clone());
    let g0: Vec<i64> = (0..x.count(1))
        .map(|e| if label.as_ref().is_some_and(|l| l.contains(1, e)) { 0 } else { rng.gen_range(-3..=3) })
        .collect();
    let gc = Cochain::from_integers(x.clone(), 1, Ring::Z, &g0).unwrap();
    let c = gc.coboundary().unwrap();
    (c, label, g0.iter().map(|v| v.abs()).max().unwrap())
}

fn brute_for(c: &Cochain, label: Option<&coarse_kit::complex::Label>, max_b: i64) -> i64 {
    let x = c.complex();
    let d2 = boundary_from_simplices(x, 2);
    let free: Vec<bool> = (0..x.count(1)).map(|e| !label.is_some_and(|l| l.contains(1, e))).collect();
    let tri: Vec<Vec<(usize, i64)>> = (0..x.count(2))
        .map(|t| (0..x.count(1)).filter(|&e| d2[e][t] != 0).map(|e| (e, d2[e][t] as i64)).collect())
        .collect();
    brute_min_norm(&free, &tri, &c.integer_values().unwrap(), max_b).expect("δγ0 has a primitive").0
}

#[test]
fn criterion_04_minimal_norms() {
    criterion(4, "m_k ≥ q^k − 1 for (5,2,1), (5,2,2); ILP matches brute force on ≤ 30 edges", || {
        for (k, want) in [(1u32, 1i64), (2, 6)] {
            let b = build_Mk(&MkParams::reduced(5, 2, k)).unwrap();
            let c = b.obstruction_cocycle().unwrap();
            let opts = MinNormOptions { node_limit: 10_000_000, method: Method::Auto };
            let cert = min_norm_primitive(&c, Some(&b.boundary_circle), &opts).unwrap();
            assert!(verify_norm_certificate(&c, Some(&b.boundary_circle), &cert));
            assert!(cert.optimum >= 2i64.pow(k) - 1);
            assert_eq!(cert.optimum, want);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for rel in [Some("domain-rim"), Some("target-rim"), None] {
            for _ in 0..4 {
                let (c, label, max_b) = small_instance(&mut rng, rel);
                let brute = brute_for(&c, label.as_ref(), max_b);
                for method in [Method::Ilp, Method::Auto] {
                    let opts = MinNormOptions { node_limit: 10_000_000, method };
                    let cert = min_norm_primitive(&c, label.as_ref(), &opts).unwrap();
                    assert_eq!(cert.optimum, brute, "{method:?} relative to {rel:?}");
                    assert!(verify_norm_certificate(&c, label.as_ref(), &cert));
                }
            }
        }
    });
}

#[test]
fn criterion_05_beta_certificate() {
    criterion(5, "δβ = (q×ξ)^*(1) and ‖β‖ ≤ 4 for (5,2,1), lcm mode", || {
        let b = build_Mk(&MkParams::reduced(5, 2, 1)).unwrap();
        let c = b.obstruction_cocycle().unwrap();
        let cert = min_norm_primitive(&c, Some(&b.boundary_circle), &MinNormOptions::default()).unwrap();
        let g = Cochain::from_integers(b.complex.clone(), 1, Ring::Z, &cert.witness).unwrap();
        let n = NMode::Lcm.n_for(&g, 1000).unwrap();
        let out = build_beta(&g, n).unwrap();
        let target = out.target_cocycle(&b.q_map()).unwrap();
        assert!(!target.is_zero());
        assert_eq!(out.beta.coboundary().unwrap().values(), target.values());
        assert!(out.beta.norm() <= BigRational::from_integer(4.into()));
        assert!(out.verify(&target, "boundary").unwrap());
    });
}

#[test]
fn criterion_06_bezout_bound() {
    criterion(6, "minimal |m| ≥ (p^k − 1)/q^k for coprime p, q ≤ 13, k ≤ 3; (5,2,2) gives 6", || {
        let gcd = |mut a: i64, mut b: i64| {
            while b != 0 {
                (a, b) = (b, a % b);
            }
            a
        };
        for p in 2..=13i64 {
            for q in 2..=13i64 {
                if p == q || gcd(p, q) != 1 {
                    continue;
                }
                for k in 1..=3u32 {
                    let (pk, qk) = (p.pow(k), q.pow(k));
                    let brute = (0..=pk)
                        .find(|&m| [m, -m].iter().any(|&mm| (1 - mm * qk) % pk == 0))
                        .expect("some m below p^k");
                    let (n, m) = bezout(p, q, k).unwrap();
                    assert_eq!(n * pk + m * qk, 1);
                    assert_eq!(m.abs(), brute, "({p},{q},{k})");
                    assert!(BigRational::from_integer(m.abs().into()) >= min_m_bound(p, q, k).unwrap().bound);
                }
            }
        }
        assert_eq!(bezout(5, 2, 2).unwrap().1.abs(), 6);
        assert_eq!(min_m_bound(5, 2, 2).unwrap().bound, BigRational::from_integer(6.into()));
    });
}

/// Degree-`p` wrap `j ↦ (j div r) mod tgt` with `r = src / (p·tgt)`.
fn wrap_map(src: usize, tgt: usize, p: usize) -> CellMap {
    let r = src / (p * tgt);
    CellMap::simplicial(
        Arc::new(circle(src).unwrap()),
        Arc::new(circle(tgt).unwrap()),
        (0..src).map(|j| (j / r) % tgt).collect(),
    )
    .unwrap()
}

#[test]
fn criterion_07_degree_relation() {
    criterion(7, "d_p·p^k + d_q·q^k = d on candidate data; degree is multiplicative on 50 composites", || {
        for (p, q, k) in TRIPLES {
            let b = build_Mk(&MkParams::reduced(p, q, k)).unwrap();
            let (op, oq) = hole_cocycles(&b).unwrap();
            let (n, m) = bezout(p as i64, q as i64, k).unwrap();
            let mut pairs: Vec<(i64, i64)> = (-3..=3).flat_map(|a| (-3..=3).map(move |c| (a, c))).collect();
            pairs.push((n, m));
            let samples = evaluate_hole_samples(&b, &op, &oq, &pairs).unwrap().unwrap();
            let (pk, qk) = ((p as i64).pow(k), (q as i64).pow(k));
            for s in &samples {
                assert_eq!(s[0] * pk + s[1] * qk, s[2]);
            }
            assert_eq!(samples.last().unwrap()[2], 1);
        }
        for (p, params) in [(2u64, MkParams::reduced(2, 3, 1)), (3, MkParams::new(3, 2, 2)), (5, MkParams::reduced(5, 2, 2))] {
            for i in 0..params.k {
                let (_, collapse) = build_Tp(p, i, &params).unwrap();
                assert_eq!(label_degree(&collapse, "domain-rim", "circle").unwrap(), p as i64);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = [2u64, 3, 5][rng.gen_range(0..3)];
            let params = if rng.gen_bool(0.5) { MkParams::reduced(p, 7, 3) } else { MkParams::new(p, 7, 2) };
            let top = rng.gen_range(1..=params.k);
            let sizes: Vec<usize> = (0..=top).map(|i| params.circle_size(p, i).unwrap()).collect();
            let mut f: Option<CellMap> = None;
            let mut expected = 1i64;
            for i in (0..top as usize).rev() {
                let mut g = wrap_map(sizes[i + 1], sizes[i], p as usize);
                expected *= p as i64;
                if rng.gen_bool(0.3) {
                    let n = sizes[i];
                    let flip = CellMap::simplicial(g.target().clone(), g.target().clone(), (0..n).map(|j| (n - j) % n).collect()).unwrap();
                    g = g.then(&flip).unwrap();
                    expected = -expected;
                }
                f = Some(match f {
                    None => g,
                    Some(h) => h.then(&g).unwrap(),
                });
            }
            let f = f.unwrap();
            let (s, t) = (f.source().clone(), f.target().clone());
            let cs = circuit_chain(&s, &(0..s.n_vertices()).collect::<Vec<_>>()).unwrap();
            let ct = circuit_chain(&t, &(0..t.n_vertices()).collect::<Vec<_>>()).unwrap();
            let deg = circle_map_degree(&f, &cs, &ct).unwrap();
            assert_eq!(deg, expected);
            assert_eq!(winding(f.vertex_map().unwrap(), t.n_vertices()), expected);
        }
    });
}

fn oracle_nerve_dim(sets: &[BTreeSet<usize>]) -> usize {
    let n = sets.len();
    let mut best = 0;
    for mask in 1u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let mut inter = sets[members[0]].clone();
        for &i in &members[1..] {
            inter = inter.intersection(&sets[i]).copied().collect();
        }
        if !inter.is_empty() {
            best = best.max(members.len() - 1);
        }
    }
    best
}

#[test]
fn criterion_08_nerve_identities() {
    criterion(8, "dim nerve + 1 = multiplicity; open-star nerve ≅ complex; projections sum to 1", || {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let x = Arc::new({ let t = rng.gen_range(2..10); random_complex(&mut rng, t) });
            let sets = { let t = rng.gen_range(1..9); random_cover(&mut rng, &x, t) };
            let cover = CoverSpec::explicit(x.clone(), sets.clone()).unwrap();
            let nv = nerve(&cover).unwrap();
            assert_eq!(nv.dim() + 1, multiplicity(&cover));
            assert_eq!(nv.dim(), oracle_nerve_dim(&sets));
        }
        for _ in 0..10 {
            let x = Arc::new({ let t = rng.gen_range(1..7); random_complex(&mut rng, t) });
            let nv = nerve(&CoverSpec::open_stars(&x).unwrap()).unwrap();
            assert_eq!(nv.counts(), x.counts());
            for k in 0..=x.dim() {
                assert_eq!(nv.simplices(k), x.simplices(k));
            }
        }
        for _ in 0..200 {
            let x = Arc::new({ let t = rng.gen_range(2..10); random_complex(&mut rng, t) });
            let cover = if rng.gen_bool(0.5) {
                let centres: Vec<usize> = (0..x.n_vertices()).filter(|_| rng.gen_bool(0.5)).chain([0]).collect();
                let c = CoverSpec::balls(x.clone(), &centres, rng.gen_range(1..3)).unwrap();
                if c.sets.iter().flatten().collect::<BTreeSet<_>>().len() < x.n_vertices() {
                    CoverSpec::balls(x.clone(), &(0..x.n_vertices()).collect::<Vec<_>>(), 1).unwrap()
                } else {
                    c
                }
            } else {
                let n = rng.gen_range(1..6);
                CoverSpec::explicit(x.clone(), random_cover(&mut rng, &x, n)).unwrap()
            };
            let v = rng.gen_range(0..x.n_vertices());
            let pt = canonical_projection(&cover, v).unwrap();
            let sum = pt.weights.values().fold(BigRational::zero(), |a, w| a + w);
            assert_eq!(sum, BigRational::one());
            assert!(pt.weights.values().all(|w| *w >= BigRational::zero()));
            assert!(pt.weights.keys().all(|&i| cover.sets[i].contains(&v)));
        }
    });
}

#[test]
fn criterion_09_tower_regularity() {
    criterion(9, "2-stage tower at (5,2,2): Lip ≤ 1/2, refinement witnesses, carrier containment", || {
        let tower = build_tower(&MkParams::reduced(5, 2, 2), 1).unwrap();
        assert_eq!(tower.len(), 2);
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        for st in &tower {
            assert!(lipschitz_constant_scaled(&st.projection, &half).unwrap() <= half);
            // Unit-metric oracle: every edge goes to a vertex or an edge.
            let vm = st.projection.vertex_map().unwrap();
            let tgt = st.projection.target();
            for s in st.complex.simplices(1) {
                let (a, b) = (vm[s[0]], vm[s[1]]);
                assert!(a == b || tgt.simplex_index(&[a.min(b), a.max(b)]).is_some());
            }
            let w: Vec<usize> = refinement_witnesses(&st.projection, &st.subdivision).into_iter().map(Option::unwrap).collect();
            assert!(witnesses_valid(&st.projection, &st.subdivision, &w));
            assert!(carrier_containment(&st.projection, &st.approximation, &st.subdivision));
        }
        assert_eq!(tower[1].composite_bound, half);
    });
}

fn z_p_family(rng: &mut ChaCha8Rng) -> Vec<CellComplex> {
    let mut v = vec![rp2(), product_interval(&rp2(), 1).unwrap().complex];
    while v.len() < 20 {
        let x = { let t = rng.gen_range(2..12); random_complex(rng, t) };
        if v.len() % 4 == 0 {
            v.push(product_interval(&x, 2).unwrap().complex);
        } else {
            v.push(x);
        }
    }
    v
}

#[test]
fn criterion_10_finite_coefficients() {
    criterion(10, "cohomology over Z_p equals mod-p rank computation on 20 complexes", || {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let family = z_p_family(&mut rng);
        assert_eq!(family.len(), 20);
        for x in &family {
            for p in [2u64, 3, 5] {
                for k in 0..=x.dim() {
                    let h = cohomology(x, k, Ring::Zp(p)).unwrap();
                    assert_eq!(h.free_rank, oracle_betti_mod_p(x, k, p as i128), "H^{k}(·; Z_{p})");
                }
            }
        }
        let h1 = cohomology(&rp2(), 1, Ring::Zp(2)).unwrap();
        assert_eq!(h1.free_rank, 1);
        assert_eq!(cohomology(&rp2(), 1, Ring::Zp(3)).unwrap().free_rank, 0);
    });
}

#[test]
fn criterion_11_pair_sequence_exactness() {
    criterion(11, "long exact sequence of pairs is exact on 20 random pairs and (M_1, ∂M_1)", || {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut n = 0;
        while n < 20 {
            let x = { let t = rng.gen_range(2..10); random_complex(&mut rng, t) };
            let picks: Vec<Vec<usize>> = (0..=x.dim())
                .map(|k| (0..x.count(k)).filter(|_| rng.gen_bool(0.25)).collect())
                .collect();
            let a = x.closure(picks);
            for ring in [Ring::Q, Ring::Zp(2), Ring::Z] {
                let r = exactness_check(&x, &a, ring).unwrap();
                assert!(r.exact, "{ring}");
                assert!(r.nodes.iter().all(|c| c.composite_zero && c.rank_in + c.rank_out == c.dim));
            }
            let r = exactness_check(&x, &a, Ring::Zp(2)).unwrap();
            for node in r.nodes.iter().filter(|c| c.name.ends_with("(X)")) {
                assert_eq!(node.dim, oracle_betti_mod_p(&x, node.degree, 2));
            }
            n += 1;
        }
        let b = build_Mk(&MkParams::reduced(5, 2, 1)).unwrap();
        for ring in [Ring::Q, Ring::Zp(2), Ring::Zp(5)] {
            assert!(exactness_check(&b.complex, &b.boundary_circle, ring).unwrap().exact);
        }
    });
}
