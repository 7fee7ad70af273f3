//! Module-level invariants exercised on seeded randomized inputs.

use lqhv_core::lqhv::{
    build_scenario_distribution, total_variation, MixedRadix, Scenario,
};
use lqhv_core::qlinalg::{
    hermitian_eig, partial_trace, pos_neg_parts, random_density, random_hermitian,
    spectral_measure, sym_product, tensor_embed, CMat, HermitianMatrix, Observable,
    DEFAULT_CLUSTER_TOL,
};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn obs(h: HermitianMatrix) -> Observable {
    Observable::new(h, DEFAULT_CLUSTER_TOL).unwrap()
}

#[test]
fn spectral_projectors_reconstruct_the_source() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for trial in 0..50 {
        let dim = 2 + (trial % 8);
        let h = random_hermitian(dim, &mut rng);
        let sd = spectral_measure(&h, DEFAULT_CLUSTER_TOL).unwrap();
        let resid = (sd.reconstruct() - h.entries()).norm();
        let scale = h.entries().norm().max(1.0);
        assert!(resid <= 1e-9 * scale, "dim {dim}: residual {resid:.3e}");
        // Projector algebra: idempotent, mutually orthogonal, complete.
        let mut sum = CMat::zeros(dim, dim);
        for (i, p) in sd.projectors.iter().enumerate() {
            assert!((p * p - p).norm() <= 1e-9);
            for q in sd.projectors.iter().skip(i + 1) {
                assert!((p * q).norm() <= 1e-9);
            }
            sum += p;
        }
        assert!((sum - CMat::identity(dim, dim)).norm() <= 1e-9);
    }
}

#[test]
fn partial_trace_preserves_trace_and_positivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for trial in 0..30 {
        let (n, d) = if trial % 2 == 0 { (3, 2) } else { (2, 3) };
        let rho = random_density(n, d, &mut rng);
        let keep = vec![trial % n];
        let reduced = partial_trace(&rho, &keep).unwrap();
        assert!((reduced.entries().trace().re - 1.0).abs() <= 1e-10);
        let min_eig = reduced
            .entries()
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |m, &v| m.min(v));
        assert!(min_eig >= -1e-10);
    }
}

#[test]
fn sym_product_is_order_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let factors: Vec<HermitianMatrix> = (0..3).map(|_| random_hermitian(3, &mut rng)).collect();
    let reference = sym_product(&factors).unwrap();
    let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for order in orders {
        let shuffled: Vec<HermitianMatrix> = order.iter().map(|&k| factors[k].clone()).collect();
        let v = sym_product(&shuffled).unwrap();
        assert!((v.entries() - reference.entries()).norm() <= 1e-12);
    }
}

#[test]
fn embedded_operators_on_distinct_sites_commute() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..20 {
        let x = tensor_embed(&random_hermitian(2, &mut rng), 0, 3, 2).unwrap();
        let y = tensor_embed(&random_hermitian(2, &mut rng), 2, 3, 2).unwrap();
        let xy = x.entries() * y.entries();
        let yx = y.entries() * x.entries();
        assert!((xy - yx).norm() <= 1e-10);
    }
}

#[test]
fn tv_norm_cache_matches_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    for _ in 0..10 {
        let rho = random_density(2, 2, &mut rng);
        let observables: Vec<Vec<Observable>> = (0..2)
            .map(|_| (0..2).map(|_| obs(random_hermitian(2, &mut rng))).collect())
            .collect();
        let scenario = Scenario::new(2, observables, 0).unwrap();
        let dist = build_scenario_distribution(&rho, &scenario).unwrap();
        let recomputed = total_variation(dist.values());
        assert!((dist.tv_norm() - recomputed).abs() <= 1e-12);
        assert!((dist.sum() - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn hermitian_part_split_identities_quick() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for _ in 0..20 {
        let z = random_hermitian(5, &mut rng);
        let parts = pos_neg_parts(&z);
        assert!((&parts.positive_part * &parts.negative_part).norm() <= 1e-9);
        let diff = &parts.positive_part - &parts.negative_part;
        assert!((diff - z.entries()).norm() <= 1e-9);
    }
}

#[test]
fn eigenvectors_are_orthonormal() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for dim in [2usize, 4, 9, 16] {
        let h = random_hermitian(dim, &mut rng);
        let eig = hermitian_eig(&h);
        let q = &eig.eigenvectors;
        assert!((q.adjoint() * q - CMat::identity(dim, dim)).norm() <= 1e-10);
    }
}

proptest! {
    #[test]
    fn mixed_radix_round_trips(radices in proptest::collection::vec(1usize..5, 1..6), salt in 0usize..1_000_000) {
        let radix = MixedRadix::new(radices);
        let index = salt % radix.total();
        let digits = radix.decode(index);
        prop_assert_eq!(radix.index(&digits), index);
    }

    #[test]
    fn total_variation_bounds_the_sum(values in proptest::collection::vec(-1.0f64..1.0, 1..64)) {
        let tv = total_variation(&values);
        let sum: f64 = values.iter().sum();
        prop_assert!(tv + 1e-12 >= sum.abs());
    }

    #[test]
    fn asymmetric_matrices_are_rejected(dev in 1e-9f64..1.0) {
        let mut m = CMat::identity(2, 2);
        m[(0, 1)] = C64::new(dev, 0.0);
        prop_assert!(HermitianMatrix::new(m).is_err());
    }
}
