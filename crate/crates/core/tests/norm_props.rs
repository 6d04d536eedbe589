//! Property tests for the norm layer: TV conventions, Sobolev duality, and
//! pseudo-inverse behavior, all checked against brute-force oracles.

mod common;

use common::*;
use nalgebra::DVector;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tdp_core::{Distribution, GraphLaplacian, TangentVector};

/// Brute force over all 2^n subsets: the factor-2 subset form of total
/// variation equals the L1 norm on zero-sum vectors.
fn subset_tv(values: &[f64]) -> f64 {
    let n = values.len();
    let mut best = 0.0f64;
    for mask in 0u32..(1 << n) {
        let s: f64 = (0..n)
            .filter(|i| (mask >> i) & 1 == 1)
            .map(|i| values[i])
            .sum();
        best = best.max(s.abs());
    }
    2.0 * best
}

proptest! {
    #[test]
    fn tv_norm_matches_subset_enumeration(raw in prop::collection::vec(-1.0f64..1.0, 2..=10)) {
        let n = raw.len();
        let mean = raw.iter().sum::<f64>() / n as f64;
        let values: Vec<f64> = raw.iter().map(|v| v - mean).collect();
        let eps = TangentVector::new(space("x", n), values.clone()).unwrap();
        prop_assert!((eps.tv_norm() - subset_tv(&values)).abs() <= 1e-9);
    }

    #[test]
    fn normalized_distribution_is_a_distribution(raw in prop::collection::vec(0.0f64..5.0, 1..=12)) {
        prop_assume!(raw.iter().any(|&w| w > 0.0));
        let d = Distribution::normalized(space("x", raw.len()), &raw).unwrap();
        let sum: f64 = d.weights().iter().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12);
        prop_assert!(d.weights().iter().all(|&w| w >= 0.0));
    }

    #[test]
    fn hm1_scales_linearly(seed in 0u64..500, c in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = random_instance(&mut rng, 8, 1.0);
        let eps = random_unit_tangent(&mut rng, inst.base.space());
        let base = inst.laplacian.hm1_norm(&eps).unwrap();
        let scaled = inst.laplacian.hm1_norm(&eps.scaled(c)).unwrap();
        prop_assert!((scaled - c.abs() * base).abs() <= 1e-9 * (1.0 + base));
    }
}

#[test]
fn duality_inequality_and_equality_case() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..300 {
        let inst = random_instance(&mut rng, 8, 1.0);
        let lap = &inst.laplacian;
        let n = inst.base.len();

        // Arbitrary potential g and independent tangent direction.
        let g = DVector::from_iterator(n, (0..n).map(|_| rand::Rng::random::<f64>(&mut rng) - 0.5));
        let eps = random_unit_tangent(&mut rng, inst.base.space());
        let pairing = g.dot(eps.values()).abs();
        let bound = lap.h1_norm(&g).unwrap() * lap.hm1_norm(&eps).unwrap();
        assert!(pairing <= bound + 1e-9, "pairing {pairing} bound {bound}");

        // Equality when eps = L g.
        let image = lap.matrix() * &g;
        let eps_g = TangentVector::new(inst.base.space().clone(), image.iter().cloned().collect())
            .unwrap();
        let pairing = g.dot(eps_g.values()).abs();
        let h1 = lap.h1_norm(&g).unwrap();
        let hm1 = lap.hm1_norm(&eps_g).unwrap();
        assert!((pairing - h1 * hm1).abs() <= 1e-8 * (1.0 + pairing));
        // And the dual norm collapses to the primal one.
        assert!((hm1 - h1).abs() <= 1e-8 * (1.0 + h1));
    }
}

#[test]
fn pseudo_inverse_inverts_on_zero_sum_subspace() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..200 {
        let inst = random_instance(&mut rng, 8, 1.0);
        let lap = &inst.laplacian;
        let eps = random_unit_tangent(&mut rng, inst.base.space());
        let u = lap.pseudo_inverse() * eps.values();
        let back = lap.matrix() * u;
        let err = (&back - eps.values()).norm() / eps.values().norm();
        assert!(err <= 1e-8, "relative reconstruction error {err}");
    }
}

#[test]
fn laplacian_rank_is_n_minus_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let inst = random_instance(&mut rng, 8, 1.0);
        let eigen = inst.laplacian.matrix().clone().symmetric_eigen();
        let max = eigen.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let near_zero = eigen
            .eigenvalues
            .iter()
            .filter(|&&l| l <= max * 1e-10)
            .count();
        assert_eq!(near_zero, 1);
    }
}

#[test]
fn loo_direction_has_expected_sobolev_norm_on_two_nodes() {
    // At N = 2 the direction is (-1/2, 1/2); with unit length and uniform p
    // the Sobolev dual norm is 1/2 * sqrt(2).
    let sp = space("x", 2);
    let p = Distribution::normalized(sp.clone(), &[1.0, 1.0]).unwrap();
    let graph = tdp_core::MetricGraph::new(sp, vec![(0, 1, 1.0)]).unwrap();
    let lap = GraphLaplacian::new(graph, &p).unwrap();
    let (_, eps) = p.leave_one_out(0).unwrap();
    let expected = 0.5 * 2f64.sqrt();
    assert!((lap.hm1_norm(&eps).unwrap() - expected).abs() <= 1e-12);
}
