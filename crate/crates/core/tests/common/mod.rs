//! Shared random-instance generators for the oracle test suites.
//
// Each test binary compiles this module separately and uses a different
// subset of it.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tdp_core::{Distribution, FiniteSpace, GibbsMechanism, GraphLaplacian, MetricGraph, RiskTable, TangentVector};

pub fn space(prefix: &str, n: usize) -> FiniteSpace {
    FiniteSpace::indexed(prefix, n).unwrap()
}

/// Random spanning tree plus a few extra edges; lengths in [0.5, 2].
pub fn random_connected_graph(rng: &mut ChaCha8Rng, sp: &FiniteSpace) -> MetricGraph {
    let n = sp.len();
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        seen.insert((u, v));
        edges.push((u, v, 0.5 + 1.5 * rng.random::<f64>()));
    }
    for _ in 0..rng.random_range(0..=n) {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b && seen.insert((a.min(b), a.max(b))) {
            edges.push((a.min(b), a.max(b), 0.5 + 1.5 * rng.random::<f64>()));
        }
    }
    MetricGraph::new(sp.clone(), edges).unwrap()
}

/// Interior distribution with all weights at least ~0.1/n.
pub fn random_interior_distribution(rng: &mut ChaCha8Rng, sp: &FiniteSpace) -> Distribution {
    let raw: Vec<f64> = (0..sp.len()).map(|_| 0.1 + rng.random::<f64>()).collect();
    Distribution::normalized(sp.clone(), &raw).unwrap()
}

/// Mechanism with risk entries in [0, 1] and beta in (0, max_beta].
pub fn random_mechanism(
    rng: &mut ChaCha8Rng,
    outputs: usize,
    data: &FiniteSpace,
    max_beta: f64,
) -> GibbsMechanism {
    let entries: Vec<f64> = (0..outputs * data.len()).map(|_| rng.random()).collect();
    let table = RiskTable::new(
        space("w", outputs),
        data.clone(),
        DMatrix::from_row_slice(outputs, data.len(), &entries),
    )
    .unwrap();
    let beta = max_beta * (0.02 + 0.98 * rng.random::<f64>());
    GibbsMechanism::new(table, beta).unwrap()
}

/// A full random instance: sizes in [2, max], graph, Laplacian.
pub struct Instance {
    pub mechanism: GibbsMechanism,
    pub base: Distribution,
    pub laplacian: GraphLaplacian,
}

pub fn random_instance(rng: &mut ChaCha8Rng, max_size: usize, max_beta: f64) -> Instance {
    let n = rng.random_range(2..=max_size);
    let m = rng.random_range(2..=max_size);
    let sp = space("x", n);
    let base = random_interior_distribution(rng, &sp);
    let graph = random_connected_graph(rng, &sp);
    let laplacian = GraphLaplacian::new(graph, &base).unwrap();
    let mechanism = random_mechanism(rng, m, &sp, max_beta);
    Instance {
        mechanism,
        base,
        laplacian,
    }
}

/// Zero-sum direction with unit L1 norm.
pub fn random_unit_tangent(rng: &mut ChaCha8Rng, sp: &FiniteSpace) -> TangentVector {
    loop {
        let mut v: Vec<f64> = (0..sp.len()).map(|_| rng.random::<f64>() - 0.5).collect();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        for t in &mut v {
            *t -= mean;
        }
        let norm: f64 = v.iter().map(|t| t.abs()).sum();
        if norm > 1e-6 {
            for t in &mut v {
                *t /= norm;
            }
            return TangentVector::new(sp.clone(), v).unwrap();
        }
    }
}
