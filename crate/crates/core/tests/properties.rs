mod common;

use common::oracle;
use lsnet_core::admm::{self, consensus_project, prox_l, prox_s};
use lsnet_core::linalg;
use lsnet_core::matching::min_mismatches;
use lsnet_core::model::smooth_gradient;
use lsnet_core::selection::information_criteria;
use lsnet_core::{AdjacencyMatrix, Hyperparams, Matrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_network(n: usize, rng: &mut ChaCha8Rng) -> AdjacencyMatrix {
    let p: f64 = rng.random_range(0.2..0.8);
    let mut edges = Vec::new();
    for j in 0..n {
        for i in 0..j {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    AdjacencyMatrix::from_edges(n, edges).unwrap()
}

fn random_matrix(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(n, n, |_, _| rng.random_range(-scale..scale))
}

fn random_symmetric(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> Matrix {
    linalg::symmetrize(&random_matrix(n, scale, rng))
}

fn max_diff(a: &Matrix, b: &Matrix) -> f64 {
    linalg::max_abs(&(a - b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gradient_matches_central_differences(n in 2usize..=10, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_network(n, &mut rng);
        let alpha = rng.random_range(-2.0..2.0);
        let m = random_matrix(n, 2.0, &mut rng);
        let (ga, g) = smooth_gradient(&x, alpha, &m).unwrap();
        let (fa, f) = oracle::smooth_gradient_fd(x.matrix(), alpha, &m, 1e-5);
        let err = ((ga - fa).powi(2) + (&g - &f).norm_squared()).sqrt();
        let scale = (fa * fa + f.norm_squared()).sqrt();
        prop_assert!(err <= 1e-5 * scale, "err {err} scale {scale}");
    }

    #[test]
    fn prox_l_matches_eigen_threshold(n in 1usize..=9, t in 0.0f64..2.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_symmetric(n, 3.0, &mut rng);
        let out = prox_l(&v, t).unwrap();
        let j = oracle::centering(n);
        prop_assert!((&j * &out * &j - &out).norm() <= 1e-10);
        let min_eig = oracle::jacobi_eigen(&out).0.last().copied().unwrap();
        prop_assert!(min_eig >= -1e-10, "min eigenvalue {min_eig}");
        prop_assert!(max_diff(&out, &oracle::prox_l_bruteforce(&v, t)) <= 1e-10);
    }

    #[test]
    fn prox_s_is_scalar_soft_threshold(n in 1usize..=9, t in 0.0f64..1.5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_matrix(n, 2.0, &mut rng);
        let out = prox_s(&v, t);
        for i in 0..n {
            for j in 0..n {
                let a = v[(i, j)];
                let expect = if i == j { a } else { a.signum() * (a.abs() - t).max(0.0) };
                prop_assert_eq!(out[(i, j)], expect);
            }
        }
    }

    #[test]
    fn proxes_are_nonexpansive(n in 1usize..=8, t in 0.0f64..1.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_symmetric(n, 2.0, &mut rng), random_symmetric(n, 2.0, &mut rng));
        let d = (&a - &b).norm();
        prop_assert!((prox_l(&a, t).unwrap() - prox_l(&b, t).unwrap()).norm() <= d + 1e-12);
        prop_assert!((prox_s(&a, t) - prox_s(&b, t)).norm() <= d + 1e-12);
    }

    #[test]
    fn consensus_matches_kkt(n in 1usize..=8, alpha in -3.0f64..3.0, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(n, 2.0, &mut rng);
        let l = random_symmetric(n, 2.0, &mut rng);
        let s = random_symmetric(n, 2.0, &mut rng);
        let z = consensus_project(alpha, &m, &l, &s).unwrap();
        prop_assert_eq!(z.alpha, alpha);
        prop_assert!(max_diff(&z.m, &(&z.l + &z.s)) <= 1e-12);
        let (zm, zl, zs) = oracle::consensus_kkt(&m, &l, &s);
        prop_assert!(max_diff(&z.m, &zm) <= 1e-10);
        prop_assert!(max_diff(&z.l, &zl) <= 1e-10);
        prop_assert!(max_diff(&z.s, &zs) <= 1e-10);
    }

    #[test]
    fn model_size_matches_parameter_count(n in 6usize..=50, k in 0usize..=5, s in 0usize..=20) {
        let (_, _, m) = information_criteria(-1.0, k, s, n);
        // K orthonormal columns in R^n: nK - K(K+1)/2, plus K eigenvalues,
        // plus the intercept, plus the sparse pairs
        let count = (n * k - k * (k + 1) / 2) + k + 1 + s;
        prop_assert_eq!(m, count);
        prop_assert!(information_criteria(-1.0, k, s + 1, n).2 > m);
        prop_assert!(information_criteria(-1.0, k + 1, s, n).2 > m);
    }

    #[test]
    fn mismatch_count_ignores_label_names(seed in any::<u64>(), k in 1usize..=6, n in 1usize..=40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let truth: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let found: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let mut perm: Vec<usize> = (0..k).collect();
        for i in (1..k).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let renamed: Vec<usize> = found.iter().map(|&l| perm[l]).collect();
        prop_assert_eq!(min_mismatches(&found, &truth), min_mismatches(&renamed, &truth));
    }
}

#[test]
fn iterates_stay_centered_psd_and_runs_repeat_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = random_network(8, &mut rng);
    let mut h = Hyperparams::new(0.05, 0.05);
    h.max_outer_iters = 300;
    let j = oracle::centering(8);
    let mut checked = 0;
    let first = admm::fit_with_observer(&x, &h, None, |state| {
        let l = &state.x.l;
        assert!((&j * l * &j - l).norm() <= 1e-10);
        assert!(oracle::jacobi_eigen(l).0[7] >= -1e-10);
        checked += 1;
    })
    .unwrap();
    assert_eq!(checked, first.iters);
    let second = admm::fit(&x, &h, None).unwrap();
    assert_eq!(first, second);
}

#[test]
fn objective_settles_before_convergence() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let x = random_network(7, &mut rng);
    let fit = admm::fit(&x, &Hyperparams::new(0.02, 0.03), None).unwrap();
    assert!(fit.converged);
    let hist = &fit.objective_history;
    let last = *hist.last().unwrap();
    for v in &hist[hist.len().saturating_sub(100)..] {
        assert!((v - last).abs() <= 1e-5);
    }
}
