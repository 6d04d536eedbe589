//! The entropically regularized risk-minimization mechanism.
//!
//! Given a non-negative risk table `r(w, x)` and an inverse regularization
//! strength `beta`, the mechanism maps a data distribution `p` to the Gibbs
//! distribution `q(w) ∝ exp(-beta * sum_x r(w, x) p(x))` over outputs. The
//! exponentials are max-shifted before normalization so that `beta * max
//! risk` products far beyond the overflow threshold of doubles stay finite.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::space::{Distribution, FiniteSpace};

/// A dense non-negative risk table indexed by (output, data point).
#[derive(Debug, Clone, PartialEq)]
pub struct RiskTable {
    outputs: FiniteSpace,
    data: FiniteSpace,
    values: DMatrix<f64>,
}

impl RiskTable {
    /// `values` has one row per output label and one column per data label.
    pub fn new(outputs: FiniteSpace, data: FiniteSpace, values: DMatrix<f64>) -> Result<Self> {
        if values.nrows() != outputs.len() {
            return Err(Error::LengthMismatch {
                expected: outputs.len(),
                got: values.nrows(),
            });
        }
        if values.ncols() != data.len() {
            return Err(Error::LengthMismatch {
                expected: data.len(),
                got: values.ncols(),
            });
        }
        for w in 0..values.nrows() {
            for x in 0..values.ncols() {
                let v = values[(w, x)];
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        context: format!("risk entry ({w}, {x})"),
                    });
                }
                if v < 0.0 {
                    return Err(Error::NegativeRisk { w, x });
                }
            }
        }
        Ok(Self {
            outputs,
            data,
            values,
        })
    }

    /// Builds the 0/1-loss table for one-dimensional threshold classifiers.
    ///
    /// Outputs enumerate `(threshold, orientation)` pairs in the order
    /// `t0+, t0-, t1+, t1-, ..`; orientation `+` predicts label 1 on
    /// `feature > threshold`, orientation `-` predicts the complement.
    /// `r(w, x)` is 1 when classifier `w` mislabels point `x`, else 0.
    pub fn zero_one(points: &[(f64, bool)], thresholds: &[f64]) -> Result<Self> {
        let data = FiniteSpace::indexed("x", points.len())?;
        let mut labels = Vec::with_capacity(2 * thresholds.len());
        for i in 0..thresholds.len() {
            labels.push(format!("t{i}+"));
            labels.push(format!("t{i}-"));
        }
        let outputs = FiniteSpace::new(labels)?;
        let mut values = DMatrix::zeros(2 * thresholds.len(), points.len());
        for (i, &t) in thresholds.iter().enumerate() {
            for (j, &(feature, label)) in points.iter().enumerate() {
                let positive_side = feature > t;
                values[(2 * i, j)] = if positive_side != label { 1.0 } else { 0.0 };
                values[(2 * i + 1, j)] = if positive_side == label { 1.0 } else { 0.0 };
            }
        }
        Self::new(outputs, data, values)
    }

    pub fn outputs(&self) -> &FiniteSpace {
        &self.outputs
    }

    pub fn data(&self) -> &FiniteSpace {
        &self.data
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn value(&self, w: usize, x: usize) -> f64 {
        self.values[(w, x)]
    }

    pub fn max_entry(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }
}

/// The Gibbs mechanism `p -> q(w) ∝ exp(-beta <r(w,·), p>)`.
#[derive(Debug, Clone)]
pub struct GibbsMechanism {
    risk: RiskTable,
    beta: f64,
}

impl GibbsMechanism {
    /// `beta` must be finite and non-negative; `beta = 0` yields the uniform
    /// output regardless of the risk.
    pub fn new(risk: RiskTable, beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(Error::InvalidBeta { beta });
        }
        Ok(Self { risk, beta })
    }

    pub fn risk(&self) -> &RiskTable {
        &self.risk
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn outputs(&self) -> &FiniteSpace {
        self.risk.outputs()
    }

    pub fn data(&self) -> &FiniteSpace {
        self.risk.data()
    }

    fn check_space(&self, p: &Distribution) -> Result<()> {
        if p.space() != self.risk.data() {
            return Err(Error::SpaceMismatch {
                context: "distribution lives on a different space than the risk table".into(),
            });
        }
        Ok(())
    }

    /// Expected risk per output: `v(w) = sum_x r(w, x) p(x)`.
    pub fn expected_risk(&self, p: &Distribution) -> Result<DVector<f64>> {
        self.check_space(p)?;
        Ok(&self.risk.values * p.weights())
    }

    /// Log densities `log q(w) = -beta v(w) - log Z`, with `log Z` computed
    /// by max-shifted log-sum-exp.
    pub fn log_output(&self, p: &Distribution) -> Result<DVector<f64>> {
        let v = self.expected_risk(p)?;
        let u = -self.beta * v;
        let shift = u.max();
        let log_z = shift + u.iter().map(|&t| (t - shift).exp()).sum::<f64>().ln();
        Ok(u.add_scalar(-log_z))
    }

    /// The Gibbs output distribution over `W`.
    pub fn output(&self, p: &Distribution) -> Result<Distribution> {
        let v = self.expected_risk(p)?;
        let u = -self.beta * v;
        let shift = u.max();
        let exps: Vec<f64> = u.iter().map(|&t| (t - shift).exp()).collect();
        Distribution::normalized(self.risk.outputs().clone(), &exps)
    }

    /// Draws `count` i.i.d. samples from the output distribution by
    /// inverse-CDF lookup; deterministic for a fixed seed.
    pub fn sample(&self, p: &Distribution, count: usize, seed: u64) -> Result<Vec<usize>> {
        let q = self.output(p)?;
        let mut cdf = Vec::with_capacity(q.len());
        let mut acc = 0.0;
        for i in 0..q.len() {
            acc += q.weight(i);
            cdf.push(acc);
        }
        let last = q.len() - 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut samples = Vec::with_capacity(count);
        for _ in 0..count {
            let u: f64 = rng.random();
            let idx = cdf.partition_point(|&c| c <= u).min(last);
            samples.push(idx);
        }
        Ok(samples)
    }

    /// As [`sample`](Self::sample), but returning output labels.
    pub fn sample_labels(&self, p: &Distribution, count: usize, seed: u64) -> Result<Vec<String>> {
        let outputs = self.risk.outputs();
        Ok(self
            .sample(p, count, seed)?
            .into_iter()
            .map(|i| outputs.label(i).to_owned())
            .collect())
    }
}
