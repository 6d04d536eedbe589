//! Metric graphs and the weighted graph Laplacian carrying the discrete
//! Sobolev norms.
//!
//! The continuous seminorm `∫ |∇g|² p` is discretized on a metric graph as
//! `g' L_p g` with `L_p = G' diag(w) G`, where `G` is the edge-vertex
//! incidence operator scaled by `1/length` and the weight of edge `(u, v)`
//! is `(p(u) + p(v)) / 2`. The dual norm on tangent vectors is
//! `sqrt(eps' L_p^+ eps)` with the pseudo-inverse taken on the zero-sum
//! subspace; it is finite exactly when the support-weighted graph is
//! connected.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::space::{Distribution, FiniteSpace, TangentVector};

/// Relative eigenvalue threshold below which a mode counts as the kernel.
const KERNEL_TOL: f64 = 1e-12;
/// Maximum relative residual accepted from the pseudo-inverse solve.
const RESIDUAL_TOL: f64 = 1e-10;

/// An undirected edge with a positive length, endpoints given as indices
/// into the space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

/// A connected undirected graph with edge lengths over a [`FiniteSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    space: FiniteSpace,
    edges: Vec<Edge>,
}

impl MetricGraph {
    pub fn new(space: FiniteSpace, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let n = space.len();
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (u, v, length) in edges {
            if u >= n || v >= n {
                return Err(Error::BadEdge {
                    u,
                    v,
                    reason: "endpoint out of range",
                });
            }
            if u == v {
                return Err(Error::BadEdge {
                    u,
                    v,
                    reason: "self loop",
                });
            }
            if !(length.is_finite() && length > 0.0) {
                return Err(Error::BadEdge {
                    u,
                    v,
                    reason: "length must be positive and finite",
                });
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::BadEdge {
                    u,
                    v,
                    reason: "duplicate undirected edge",
                });
            }
            out.push(Edge { u, v, length });
        }
        let graph = Self { space, edges: out };
        if !graph.spans(|_| true) {
            return Err(Error::Disconnected);
        }
        Ok(graph)
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// True when the edges accepted by `keep` connect every vertex.
    fn spans<F: Fn(&Edge) -> bool>(&self, keep: F) -> bool {
        let n = self.space.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for e in self.edges.iter().filter(|e| keep(e)) {
            let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        (1..n).all(|i| find(&mut parent, i) == root)
    }
}

/// The `p`-weighted graph Laplacian together with its pseudo-inverse on the
/// zero-sum subspace.
#[derive(Debug, Clone)]
pub struct GraphLaplacian {
    graph: MetricGraph,
    base: Distribution,
    matrix: DMatrix<f64>,
    pinv: DMatrix<f64>,
}

impl GraphLaplacian {
    /// Builds `L_p` for the given graph and base distribution.
    ///
    /// Edges whose endpoints both carry zero mass get weight zero; the
    /// remaining weighted graph must still connect all vertices, otherwise
    /// the dual norm is infinite on some tangent vector and the constructor
    /// refuses with [`Error::Disconnected`].
    pub fn new(graph: MetricGraph, base: &Distribution) -> Result<Self> {
        if graph.space() != base.space() {
            return Err(Error::SpaceMismatch {
                context: "graph and base distribution live on different spaces".into(),
            });
        }
        if !graph.spans(|e| Self::weight(base, e) > 0.0) {
            return Err(Error::Disconnected);
        }
        let n = graph.space().len();
        let mut matrix = DMatrix::zeros(n, n);
        for e in graph.edges() {
            let c = Self::weight(base, e) / (e.length * e.length);
            matrix[(e.u, e.u)] += c;
            matrix[(e.v, e.v)] += c;
            matrix[(e.u, e.v)] -= c;
            matrix[(e.v, e.u)] -= c;
        }

        let eigen = matrix.clone().symmetric_eigen();
        let max_eig = eigen.eigenvalues.iter().cloned().fold(0.0, f64::max);
        let cutoff = max_eig * KERNEL_TOL;
        let mut kernel_dim = 0;
        let inv = DVector::from_iterator(
            n,
            eigen.eigenvalues.iter().map(|&l| {
                if l <= cutoff {
                    kernel_dim += 1;
                    0.0
                } else {
                    1.0 / l
                }
            }),
        );
        if kernel_dim != 1 {
            // Numerical backstop: a connected weighted graph has a simple
            // kernel spanned by the constants.
            return Err(Error::Disconnected);
        }
        let scaled = {
            let mut m = eigen.eigenvectors.clone();
            for (j, col) in inv.iter().enumerate() {
                m.column_mut(j).scale_mut(*col);
            }
            m
        };
        let pinv = &scaled * eigen.eigenvectors.transpose();

        Ok(Self {
            graph,
            base: base.clone(),
            matrix,
            pinv,
        })
    }

    fn weight(base: &Distribution, e: &Edge) -> f64 {
        (base.weight(e.u) + base.weight(e.v)) / 2.0
    }

    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    pub fn base(&self) -> &Distribution {
        &self.base
    }

    pub fn space(&self) -> &FiniteSpace {
        self.graph.space()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn pseudo_inverse(&self) -> &DMatrix<f64> {
        &self.pinv
    }

    /// Weight of edge `e` under the base distribution.
    pub fn edge_weight(&self, e: &Edge) -> f64 {
        Self::weight(&self.base, e)
    }

    /// Discrete Sobolev seminorm `sqrt(g' L_p g)`; zero on constants.
    pub fn h1_norm(&self, g: &DVector<f64>) -> Result<f64> {
        if g.len() != self.matrix.nrows() {
            return Err(Error::LengthMismatch {
                expected: self.matrix.nrows(),
                got: g.len(),
            });
        }
        Ok(self.quadratic(&self.matrix, g).max(0.0).sqrt())
    }

    /// Dual norm `sqrt(eps' L_p^+ eps)` of a tangent vector, computed by
    /// solving `L_p u = eps` on the zero-sum subspace.
    pub fn hm1_norm(&self, eps: &TangentVector) -> Result<f64> {
        if eps.space() != self.space() {
            return Err(Error::SpaceMismatch {
                context: "tangent vector lives on a different space than the Laplacian".into(),
            });
        }
        // Rank-deficiency guard: project the right-hand side onto the
        // zero-sum subspace before solving.
        let mean = eps.values().mean();
        let rhs = eps.values().add_scalar(-mean);
        let rhs_norm = rhs.norm();
        if rhs_norm == 0.0 {
            return Ok(0.0);
        }
        let u = &self.pinv * &rhs;
        let residual = (&self.matrix * &u - &rhs).norm() / rhs_norm;
        if residual > RESIDUAL_TOL {
            return Err(Error::SolverFailure { residual });
        }
        Ok(rhs.dot(&u).max(0.0).sqrt())
    }

    /// Quadratic form `g' M g` without forming the full product.
    fn quadratic(&self, m: &DMatrix<f64>, g: &DVector<f64>) -> f64 {
        g.dot(&(m * g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::FiniteSpace;

    fn two_node(length: f64) -> (MetricGraph, Distribution) {
        let space = FiniteSpace::indexed("x", 2).unwrap();
        let graph = MetricGraph::new(space.clone(), vec![(0, 1, length)]).unwrap();
        let p = Distribution::uniform(space);
        (graph, p)
    }

    #[test]
    fn two_node_laplacian_unit_length() {
        let (graph, p) = two_node(1.0);
        let lap = GraphLaplacian::new(graph, &p).unwrap();
        let m = lap.matrix();
        assert_eq!(m[(0, 0)], 0.5);
        assert_eq!(m[(0, 1)], -0.5);
        assert_eq!(m[(1, 0)], -0.5);
        assert_eq!(m[(1, 1)], 0.5);
    }

    #[test]
    fn two_node_laplacian_length_two() {
        let (graph, p) = two_node(2.0);
        let lap = GraphLaplacian::new(graph, &p).unwrap();
        let m = lap.matrix();
        assert_eq!(m[(0, 0)], 0.125);
        assert_eq!(m[(0, 1)], -0.125);
    }

    #[test]
    fn row_sums_vanish() {
        let space = FiniteSpace::indexed("x", 5).unwrap();
        let graph = MetricGraph::new(
            space.clone(),
            vec![(0, 1, 1.0), (1, 2, 0.5), (2, 3, 2.0), (3, 4, 1.5), (0, 4, 1.0)],
        )
        .unwrap();
        let p = Distribution::normalized(space, &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let lap = GraphLaplacian::new(graph, &p).unwrap();
        for i in 0..5 {
            let row_sum: f64 = lap.matrix().row(i).iter().sum();
            assert!(row_sum.abs() < 1e-15);
        }
    }

    #[test]
    fn h1_norm_examples() {
        let (graph, p) = two_node(1.0);
        let lap = GraphLaplacian::new(graph, &p).unwrap();
        let constant = DVector::from_element(2, 3.7);
        assert_eq!(lap.h1_norm(&constant).unwrap(), 0.0);
        let g = DVector::from_vec(vec![0.0, 1.0]);
        assert!((lap.h1_norm(&g).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        let shifted = g.add_scalar(2.5);
        assert!((lap.h1_norm(&shifted).unwrap() - lap.h1_norm(&g).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn hm1_norm_two_node() {
        let (graph, p) = two_node(1.0);
        let space = p.space().clone();
        let lap = GraphLaplacian::new(graph, &p).unwrap();
        let zero = TangentVector::zero(space.clone());
        assert_eq!(lap.hm1_norm(&zero).unwrap(), 0.0);
        for a in [0.25, -0.8, 1.0] {
            let eps = TangentVector::new(space.clone(), vec![a, -a]).unwrap();
            // Nonzero eigenvalue of the 2-node Laplacian is 2w = 1.
            let expected = a.abs() * 2f64.sqrt();
            assert!((lap.hm1_norm(&eps).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn hm1_scales_linearly() {
        let (graph, p) = two_node(1.0);
        let space = p.space().clone();
        let lap = GraphLaplacian::new(graph, &p).unwrap();
        let eps = TangentVector::new(space, vec![0.3, -0.3]).unwrap();
        let base = lap.hm1_norm(&eps).unwrap();
        for c in [2.0, -1.5, 0.0] {
            let scaled = eps.scaled(c);
            assert!((lap.hm1_norm(&scaled).unwrap() - c.abs() * base).abs() < 1e-12);
        }
    }

    #[test]
    fn disconnected_graph_rejected() {
        let space = FiniteSpace::indexed("x", 4).unwrap();
        assert!(matches!(
            MetricGraph::new(space, vec![(0, 1, 1.0), (2, 3, 1.0)]),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn zero_mass_cut_rejected() {
        // Structurally connected, but the only path between the two massive
        // vertices runs through an edge whose endpoints both have p = 0.
        let space = FiniteSpace::indexed("x", 4).unwrap();
        let graph = MetricGraph::new(
            space.clone(),
            vec![(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)],
        )
        .unwrap();
        let p = Distribution::normalized(space, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            GraphLaplacian::new(graph, &p),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn self_loops_and_duplicates_rejected() {
        let space = FiniteSpace::indexed("x", 3).unwrap();
        assert!(MetricGraph::new(space.clone(), vec![(0, 0, 1.0)]).is_err());
        assert!(MetricGraph::new(
            space.clone(),
            vec![(0, 1, 1.0), (1, 0, 2.0), (1, 2, 1.0)]
        )
        .is_err());
        assert!(MetricGraph::new(space, vec![(0, 1, -1.0), (1, 2, 1.0)]).is_err());
    }
}
