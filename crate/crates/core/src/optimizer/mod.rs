//! BFGS minimization with a strong-Wolfe line search.
//!
//! Maximization is expressed by minimizing the negated cost; there is a
//! single code path.

mod bfgs;
mod gradient;
mod line_search;
mod multistart;

pub use bfgs::minimize;
pub use gradient::{central_difference_gradient, parameter_shift_gradient};
pub use multistart::{initial_angles, multistart, Multistart, StartOutcome};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A differentiable cost. `metrics` lets callers attach per-iteration
/// diagnostics (fidelities, for instance) to the trace.
pub trait Objective {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
    fn metrics(&self, _x: &[f64]) -> Vec<f64> {
        Vec::new()
    }
}

/// An [`Objective`] assembled from closures.
pub struct FnObjective<F, G> {
    pub value: F,
    pub gradient: G,
}

impl<F, G> Objective for FnObjective<F, G>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        (self.gradient)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GradientMode {
    #[default]
    ParameterShift,
    CentralDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Stop once `max_i |df/dx_i|` falls below this.
    pub gradient_tolerance: f64,
    pub max_iterations: usize,
    pub wolfe_c1: f64,
    pub wolfe_c2: f64,
    pub gradient_mode: GradientMode,
    /// Step for [`GradientMode::CentralDifference`].
    pub fd_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            gradient_tolerance: 1e-6,
            max_iterations: 10_000,
            wolfe_c1: 1e-4,
            wolfe_c2: 0.9,
            gradient_mode: GradientMode::ParameterShift,
            fd_step: 1e-4,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(0.0 < self.wolfe_c1 && self.wolfe_c1 < self.wolfe_c2 && self.wolfe_c2 < 1.0) {
            problems.push(format!(
                "Wolfe constants must satisfy 0 < c1 < c2 < 1 (got c1 = {}, c2 = {})",
                self.wolfe_c1, self.wolfe_c2
            ));
        }
        if self.gradient_tolerance.is_nan() || self.gradient_tolerance <= 0.0 {
            problems.push(format!("gradient_tolerance must be positive, got {}", self.gradient_tolerance));
        }
        if self.fd_step.is_nan() || self.fd_step <= 0.0 {
            problems.push(format!("fd_step must be positive, got {}", self.fd_step));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIterations,
    LineSearchFailure,
}

/// Something the optimizer did to its inverse-Hessian estimate at an iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceEvent {
    /// `s . y <= 0`; the BFGS update was skipped.
    UpdateSkipped,
    /// Non-descent direction or failed line search; restarted from identity.
    HessianReset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub cost: f64,
    pub gradient_norm: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub metrics: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event: Option<TraceEvent>,
}

/// One record per accepted iterate, the starting point included as iteration 0.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub records: Vec<TraceRecord>,
}

impl OptimizationTrace {
    /// Accepted costs never increase.
    pub fn is_monotone(&self) -> bool {
        self.records.windows(2).all(|w| w[1].cost <= w[0].cost)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient_norm: f64,
    pub status: Status,
    pub iterations: usize,
    /// Objective plus gradient evaluations.
    pub evaluations: usize,
    pub trace: OptimizationTrace,
}

pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
