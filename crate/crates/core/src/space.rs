//! Finite spaces, probability distributions, and tangent vectors.
//!
//! A tangent vector at a distribution is a signed measure with zero total
//! mass; its TV norm is the plain L1 norm (the factor-2 subset definition of
//! total variation coincides with L1 on finite spaces).

use nalgebra::DVector;

use crate::error::{Error, Result};

/// Tolerance for the simplex and zero-sum invariants.
pub const MASS_TOL: f64 = 1e-12;

/// An ordered finite set of labelled elements. The label order fixes the
/// vector indexing used everywhere else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSpace {
    labels: Vec<String>,
}

impl FiniteSpace {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptySpace);
        }
        let mut seen = std::collections::HashSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { labels })
    }

    /// Space with labels `e0, e1, ..`; handy for tests and generated tables.
    pub fn indexed(prefix: &str, n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| format!("{prefix}{i}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// A probability vector over a [`FiniteSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    space: FiniteSpace,
    weights: DVector<f64>,
}

impl Distribution {
    /// Validating constructor: weights must be non-negative and sum to 1
    /// within [`MASS_TOL`].
    pub fn new(space: FiniteSpace, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                got: weights.len(),
            });
        }
        for (index, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFinite {
                    context: format!("weight at index {index}"),
                });
            }
            if w < 0.0 {
                return Err(Error::NegativeWeight { index });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > MASS_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self {
            space,
            weights: DVector::from_vec(weights),
        })
    }

    /// Normalizes a raw non-negative weight vector to total mass 1.
    pub fn normalized(space: FiniteSpace, raw: &[f64]) -> Result<Self> {
        if raw.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                got: raw.len(),
            });
        }
        for (index, &w) in raw.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFinite {
                    context: format!("weight at index {index}"),
                });
            }
            if w < 0.0 {
                return Err(Error::NegativeWeight { index });
            }
        }
        let sum: f64 = raw.iter().sum();
        if sum == 0.0 {
            return Err(Error::ZeroMass);
        }
        let weights = raw.iter().map(|w| w / sum).collect();
        Ok(Self {
            space,
            weights: DVector::from_vec(weights),
        })
    }

    pub fn uniform(space: FiniteSpace) -> Self {
        let n = space.len();
        Self {
            space,
            weights: DVector::from_element(n, 1.0 / n as f64),
        }
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }

    pub fn weight(&self, index: usize) -> f64 {
        self.weights[index]
    }

    /// Indices carrying positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.weights[i] > 0.0).collect()
    }

    /// If the distribution is uniform over its support (weight `1/N` on
    /// exactly `N` atoms, `0.0` elsewhere), returns `N`.
    pub fn empirical_count(&self) -> Result<usize> {
        let support = self.support();
        let n = support.len();
        if n < 2 {
            return Err(Error::NotEmpirical);
        }
        let expected = 1.0 / n as f64;
        for &i in &support {
            if (self.weights[i] - expected).abs() > MASS_TOL {
                return Err(Error::NotEmpirical);
            }
        }
        Ok(n)
    }

    /// Removes the atom `k` from a uniform empirical distribution, returning
    /// the reweighted distribution over the remaining `N-1` atoms together
    /// with the perturbation direction `p' - p`. The TV norm of that
    /// direction is `2/N`.
    pub fn leave_one_out(&self, k: usize) -> Result<(Distribution, TangentVector)> {
        let n_atoms = self.empirical_count()?;
        if k >= self.len() || self.weights[k] == 0.0 {
            return Err(Error::BadIndex { index: k });
        }
        let w = 1.0 / (n_atoms - 1) as f64;
        let mut weights = DVector::zeros(self.len());
        for i in 0..self.len() {
            if i != k && self.weights[i] > 0.0 {
                weights[i] = w;
            }
        }
        let perturbed = Distribution {
            space: self.space.clone(),
            weights,
        };
        let direction = TangentVector {
            space: self.space.clone(),
            values: &perturbed.weights - &self.weights,
        };
        Ok((perturbed, direction))
    }
}

/// A signed measure with zero total mass: a direction in which a
/// distribution can be perturbed.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    space: FiniteSpace,
    values: DVector<f64>,
}

impl TangentVector {
    /// Validating constructor: values must sum to 0 within [`MASS_TOL`].
    pub fn new(space: FiniteSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::LengthMismatch {
                expected: space.len(),
                got: values.len(),
            });
        }
        for (index, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    context: format!("tangent value at index {index}"),
                });
            }
        }
        let sum: f64 = values.iter().sum();
        if sum.abs() > MASS_TOL {
            return Err(Error::NotZeroSum { sum });
        }
        Ok(Self {
            space,
            values: DVector::from_vec(values),
        })
    }

    pub fn zero(space: FiniteSpace) -> Self {
        let n = space.len();
        Self {
            space,
            values: DVector::zeros(n),
        }
    }

    /// The difference `to - from` as a tangent vector.
    pub fn between(from: &Distribution, to: &Distribution) -> Result<Self> {
        if from.space() != to.space() {
            return Err(Error::SpaceMismatch {
                context: "tangent difference of distributions over different spaces".into(),
            });
        }
        Ok(Self {
            space: from.space.clone(),
            values: to.weights() - from.weights(),
        })
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    /// Total variation norm, i.e. the L1 norm of the values. For zero-sum
    /// vectors this equals `2 * max_S |eps(S)|` over all subsets `S`.
    pub fn tv_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            space: self.space.clone(),
            values: &self.values * factor,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(n: usize) -> FiniteSpace {
        FiniteSpace::indexed("x", n).unwrap()
    }

    #[test]
    fn normalized_splits_equal_weights() {
        let d = Distribution::normalized(space(2), &[2.0, 2.0]).unwrap();
        assert_eq!(d.weights().as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn normalized_handles_zero_entries() {
        let d = Distribution::normalized(space(3), &[1.0, 0.0, 3.0]).unwrap();
        assert_eq!(d.weights().as_slice(), &[0.25, 0.0, 0.75]);
    }

    #[test]
    fn normalized_rejects_zero_mass() {
        assert!(matches!(
            Distribution::normalized(space(2), &[0.0, 0.0]),
            Err(Error::ZeroMass)
        ));
    }

    #[test]
    fn normalized_rejects_negative_weight() {
        assert!(matches!(
            Distribution::normalized(space(2), &[1.0, -0.5]),
            Err(Error::NegativeWeight { index: 1 })
        ));
    }

    #[test]
    fn normalized_rejects_length_mismatch() {
        assert!(matches!(
            Distribution::normalized(space(3), &[1.0, 1.0]),
            Err(Error::LengthMismatch {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(matches!(
            FiniteSpace::new(["a", "b", "a"]),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn leave_one_out_two_atoms() {
        let p = Distribution::normalized(space(2), &[1.0, 1.0]).unwrap();
        let (p2, eps) = p.leave_one_out(0).unwrap();
        assert_eq!(p2.weights().as_slice(), &[0.0, 1.0]);
        assert_eq!(eps.values().as_slice(), &[-0.5, 0.5]);
        assert_eq!(eps.tv_norm(), 1.0);
    }

    #[test]
    fn leave_one_out_four_atoms() {
        let p = Distribution::normalized(space(4), &[1.0; 4]).unwrap();
        let (p2, eps) = p.leave_one_out(2).unwrap();
        let third = 1.0 / 3.0;
        assert_eq!(p2.weights().as_slice(), &[third, third, 0.0, third]);
        // Direct evaluation of sum |eps| = 1/N + (N-1)(1/(N-1) - 1/N) = 2/N.
        assert!((eps.tv_norm() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn leave_one_out_tv_is_two_over_n() {
        for n in 2..=100usize {
            let p = Distribution::normalized(space(n), &vec![1.0; n]).unwrap();
            for k in [0, n / 2, n - 1] {
                let (_, eps) = p.leave_one_out(k).unwrap();
                assert!(
                    (eps.tv_norm() - 2.0 / n as f64).abs() <= 1e-15,
                    "n={n} k={k}"
                );
            }
        }
    }

    #[test]
    fn leave_one_out_rejects_non_empirical() {
        let p = Distribution::normalized(space(2), &[1.0, 3.0]).unwrap();
        assert!(matches!(p.leave_one_out(0), Err(Error::NotEmpirical)));
    }

    #[test]
    fn leave_one_out_rejects_zero_mass_atom() {
        let p = Distribution::normalized(space(3), &[1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            p.leave_one_out(1),
            Err(Error::BadIndex { index: 1 })
        ));
    }

    #[test]
    fn tv_norm_examples() {
        let eps = TangentVector::new(space(3), vec![0.0, 0.0, 0.0]).unwrap();
        assert_eq!(eps.tv_norm(), 0.0);
        let eps = TangentVector::new(space(2), vec![-0.5, 0.5]).unwrap();
        assert_eq!(eps.tv_norm(), 1.0);
        let p = Distribution::normalized(space(5), &[1.0; 5]).unwrap();
        let (_, eps) = p.leave_one_out(3).unwrap();
        assert!((eps.tv_norm() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn tangent_vector_must_sum_to_zero() {
        assert!(matches!(
            TangentVector::new(space(2), vec![0.5, 0.0]),
            Err(Error::NotZeroSum { .. })
        ));
    }

    #[test]
    fn distribution_constructor_checks_sum() {
        assert!(matches!(
            Distribution::new(space(2), vec![0.5, 0.4]),
            Err(Error::NotNormalized { .. })
        ));
    }
}
