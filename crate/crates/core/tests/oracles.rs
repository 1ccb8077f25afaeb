mod common;

use std::sync::Arc;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use coarse_kit::cochain::{homology, min_norm_primitive, Cochain, MinNormOptions, Ring};
use coarse_kit::complex::io::{from_json, to_json};
use coarse_kit::complex::circle;
use coarse_kit::linalg::{invariant_factors, solve_integer, SolveOutcome, SparseMatrix};

use common::*;

fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..6, 1usize..6).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-4i64..=4, c), r))
}

fn sparse(m: &[Vec<i64>]) -> SparseMatrix {
    let cols = m[0].len();
    let t = m.iter().enumerate().flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &v)| (i, j, v)));
    SparseMatrix::from_triples(m.len(), cols, t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn invariant_factors_match_dense_elimination(m in small_matrix()) {
        let lib: Vec<i128> = invariant_factors(&sparse(&m)).unwrap().iter().map(|d| i128::try_from(d.clone()).unwrap()).collect();
        let dense: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
        let mut oracle = dense_snf(dense);
        oracle.sort();
        let mut sorted = lib.clone();
        sorted.sort();
        prop_assert_eq!(sorted, oracle);
        prop_assert!(lib.windows(2).all(|w| w[1] % w[0] == 0));
    }

    #[test]
    fn integer_solutions_solve(m in small_matrix(), seed in 0u64..1000) {
        let a = sparse(&m);
        let x0: Vec<i64> = (0..a.ncols()).map(|j| ((seed as i64 + 3 * j as i64) % 7) - 3).collect();
        let b: Vec<BigInt> = a.mul_vec_i64(&x0).into_iter().map(BigInt::from).collect();
        match solve_integer(&a, &b).unwrap() {
            SolveOutcome::Solution { x, .. } => prop_assert_eq!(a.mul_vec(&x), b),
            SolveOutcome::NoSolution(_) => prop_assert!(false, "consistent system reported unsolvable"),
        }
    }

    #[test]
    fn homology_matches_oracle(seed in 0u64..10_000, size in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_complex(&mut rng, size);
        for k in 0..=x.dim() {
            let h = homology(&x, k).unwrap();
            let (rank, tors) = oracle_homology(&x, k);
            prop_assert_eq!(h.free_rank, rank);
            let lib: Vec<i128> = h.torsion.iter().map(|t| i128::try_from(t.clone()).unwrap()).filter(|&t| t > 1).collect();
            prop_assert_eq!(lib, tors);
        }
    }

    #[test]
    fn interchange_round_trip(seed in 0u64..10_000, size in 1usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_complex(&mut rng, size);
        let s = to_json(&x);
        let back = from_json(&s).unwrap();
        prop_assert_eq!(to_json(&back), s);
        prop_assert_eq!(back.counts(), x.counts());
    }
}

#[test]
fn projective_plane_torsion() {
    let x = rp2();
    assert_eq!(oracle_homology(&x, 1), (0, vec![2]));
    let h = homology(&x, 1).unwrap();
    assert_eq!(h.free_rank, 0);
    assert!(h.torsion.contains(&BigInt::from(2)));
    assert_eq!(homology(&x, 2).unwrap().free_rank, 0);
}

#[test]
fn brute_force_oracle_on_a_hand_instance() {
    // Triangle [0,1,2] with edges 01, 02, 12: ∂ = 01 − 02 + 12.
    let tri = vec![vec![(0, 1), (1, -1), (2, 1)]];
    assert_eq!(brute_min_norm(&[true; 3], &tri, &[3], 5).unwrap().0, 1);
    assert_eq!(brute_min_norm(&[true, false, false], &tri, &[3], 5).unwrap().0, 3);
    assert_eq!(brute_min_norm(&[false; 3], &tri, &[3], 5), None);
}

#[test]
fn min_norm_matches_brute_force_on_prisms() {
    let base = Arc::new(circle(3).unwrap());
    let prism = Arc::new(coarse_kit::constructions::staircase_prism(&base, 1).unwrap());
    assert!(prism.count(1) <= 30);
    let d2 = boundary_from_simplices(&prism, 2);
    let tri: Vec<Vec<(usize, i64)>> = (0..prism.count(2))
        .map(|t| (0..prism.count(1)).filter(|&e| d2[e][t] != 0).map(|e| (e, d2[e][t] as i64)).collect())
        .collect();
    for seed in 0..6i64 {
        let g0: Vec<i64> = (0..prism.count(1) as i64).map(|e| ((e * 5 + seed * 3) % 5) - 2).collect();
        let c = Cochain::from_integers(prism.clone(), 1, Ring::Z, &g0).unwrap().coboundary().unwrap();
        let cert = min_norm_primitive(&c, None, &MinNormOptions::default()).unwrap();
        let free = vec![true; prism.count(1)];
        let brute = brute_min_norm(&free, &tri, &c.integer_values().unwrap(), 2).unwrap().0;
        assert_eq!(cert.optimum, brute);
    }
}
