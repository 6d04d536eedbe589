//! Exact differentials of the mechanism at a base distribution.
//!
//! With `q` the Gibbs output at `p` and `r` the risk matrix, the differential
//! of `p -> q` is `-beta (diag(q) - q q') r` and the differential of
//! `p -> log q` is `-beta (I - 1 q') r`. Both are computed here with the risk
//! centered per column (subtracting the column minimum first), which leaves
//! the kernels unchanged in exact arithmetic and makes them vanish exactly
//! for risks that are constant in `w`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fit::log_log_slope;
use crate::mechanism::GibbsMechanism;
use crate::space::{Distribution, FiniteSpace, TangentVector};

/// Which tangent map a kernel represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// Differential of `p -> q`: perturbations of the output density.
    Density,
    /// Differential of `p -> log q`: perturbations of the log density.
    LogDensity,
}

/// A dense `(w, x)` kernel representing one of the two tangent maps at a
/// fixed base distribution.
#[derive(Debug, Clone)]
pub struct TangentMapKernel {
    kind: KernelKind,
    table: DMatrix<f64>,
    data: FiniteSpace,
    outputs: FiniteSpace,
    beta: f64,
    output: Distribution,
}

impl TangentMapKernel {
    /// Kernel of the density map, `-beta (diag(q) - q q') r`. Every column
    /// sums to zero: the image of any direction is a tangent vector at `q`.
    pub fn density(mechanism: &GibbsMechanism, base: &Distribution) -> Result<Self> {
        Self::build(mechanism, base, KernelKind::Density)
    }

    /// Kernel of the log-density map, `-beta (I - 1 q') r`. Rows have
    /// `q`-weighted mean zero.
    pub fn log_density(mechanism: &GibbsMechanism, base: &Distribution) -> Result<Self> {
        Self::build(mechanism, base, KernelKind::LogDensity)
    }

    fn build(mechanism: &GibbsMechanism, base: &Distribution, kind: KernelKind) -> Result<Self> {
        let q = mechanism.output(base)?;
        let r = mechanism.risk().values();
        let beta = mechanism.beta();
        let (rows, cols) = (r.nrows(), r.ncols());

        // Column-centered risk: identical kernels in exact arithmetic, and
        // columns constant in w drop to exact zeros.
        let mut centered = r.clone();
        for x in 0..cols {
            let min = r.column(x).min();
            for w in 0..rows {
                centered[(w, x)] -= min;
            }
        }
        let averaged = {
            let mut avg = vec![0.0; cols];
            for x in 0..cols {
                let mut acc = 0.0;
                for w in 0..rows {
                    acc += q.weight(w) * centered[(w, x)];
                }
                avg[x] = acc;
            }
            avg
        };
        let mut table = DMatrix::zeros(rows, cols);
        for w in 0..rows {
            for x in 0..cols {
                let deviation = centered[(w, x)] - averaged[x];
                table[(w, x)] = match kind {
                    KernelKind::Density => -beta * (q.weight(w) * deviation),
                    KernelKind::LogDensity => -beta * deviation,
                };
            }
        }
        Ok(Self {
            kind,
            table,
            data: mechanism.data().clone(),
            outputs: mechanism.outputs().clone(),
            beta,
            output: q,
        })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn table(&self) -> &DMatrix<f64> {
        &self.table
    }

    pub fn data(&self) -> &FiniteSpace {
        &self.data
    }

    pub fn outputs(&self) -> &FiniteSpace {
        &self.outputs
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Gibbs output at the base distribution.
    pub fn output(&self) -> &Distribution {
        &self.output
    }

    /// Applies the kernel to a tangent direction, yielding the first-order
    /// response over `W`.
    pub fn apply(&self, direction: &TangentVector) -> Result<DVector<f64>> {
        if direction.space() != &self.data {
            return Err(Error::SpaceMismatch {
                context: "tangent direction lives on a different space than the kernel".into(),
            });
        }
        Ok(&self.table * direction.values())
    }
}

/// One finite-difference probe of the linearizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdSample {
    pub h: f64,
    /// `‖A(p + h eps) - A(p) - h dA eps‖_1`
    pub err_density: f64,
    /// `‖log A(p + h eps) - log A(p) - h dlogA eps‖_inf`
    pub err_log: f64,
}

/// Finite-difference convergence report; the fitted slopes are 2 when the
/// kernels are the exact differentials (the remainder is second order).
#[derive(Debug, Clone, PartialEq)]
pub struct FdReport {
    pub samples: Vec<FdSample>,
    pub slope_density: Option<f64>,
    pub slope_log: Option<f64>,
}

impl FdReport {
    /// Slopes below this threshold flag a failed validation.
    pub const MIN_SLOPE: f64 = 1.8;

    /// True when every fitted slope is at least [`MIN_SLOPE`](Self::MIN_SLOPE).
    /// Vanishing errors leave a slope unfitted, which counts as passing.
    pub fn passes(&self) -> bool {
        self.slope_density.is_none_or(|s| s >= Self::MIN_SLOPE)
            && self.slope_log.is_none_or(|s| s >= Self::MIN_SLOPE)
    }
}

/// Compares `A(p + h eps) - A(p)` (and the log variant) against the tangent
/// prediction for each step size, reporting the error norms and their
/// log-log slopes. Steps are reported in increasing order.
pub fn fd_validate(
    mechanism: &GibbsMechanism,
    base: &Distribution,
    direction: &TangentVector,
    steps: &[f64],
) -> Result<FdReport> {
    if base.space() != direction.space() {
        return Err(Error::SpaceMismatch {
            context: "base distribution and direction live on different spaces".into(),
        });
    }
    let density = TangentMapKernel::density(mechanism, base)?;
    let log_density = TangentMapKernel::log_density(mechanism, base)?;
    let predicted_density = density.apply(direction)?;
    let predicted_log = log_density.apply(direction)?;
    let q0 = mechanism.output(base)?;
    let log_q0 = mechanism.log_output(base)?;

    let mut ordered: Vec<f64> = steps.to_vec();
    ordered.sort_by(|a, b| a.partial_cmp(b).expect("steps must not be NaN"));

    let mut samples = Vec::with_capacity(ordered.len());
    for &h in &ordered {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::StepTooLarge { h });
        }
        let weights: Vec<f64> = base
            .weights()
            .iter()
            .zip(direction.values().iter())
            .map(|(p, e)| p + h * e)
            .collect();
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::StepTooLarge { h });
        }
        let stepped = Distribution::new(base.space().clone(), weights)?;

        let q_h = mechanism.output(&stepped)?;
        let err_density = (0..q_h.len())
            .map(|w| (q_h.weight(w) - q0.weight(w) - h * predicted_density[w]).abs())
            .sum();

        let log_q_h = mechanism.log_output(&stepped)?;
        let err_log = (0..log_q_h.len())
            .map(|w| (log_q_h[w] - log_q0[w] - h * predicted_log[w]).abs())
            .fold(0.0, f64::max);

        samples.push(FdSample {
            h,
            err_density,
            err_log,
        });
    }

    let slope_density = log_log_slope(
        &samples
            .iter()
            .map(|s| (s.h, s.err_density))
            .collect::<Vec<_>>(),
    );
    let slope_log = log_log_slope(
        &samples
            .iter()
            .map(|s| (s.h, s.err_log))
            .collect::<Vec<_>>(),
    );
    Ok(FdReport {
        samples,
        slope_density,
        slope_log,
    })
}
