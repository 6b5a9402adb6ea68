use super::line_search::{check_finite, LineSearch, Outcome, Sample};
use super::{dot, inf_norm, Minimum, Objective, OptimizationTrace, OptimizerConfig, Status, TraceEvent, TraceRecord};
use crate::error::Result;

/// Dense row-major inverse-Hessian approximation.
struct InverseHessian {
    n: usize,
    data: Vec<f64>,
    is_identity: bool,
}

impl InverseHessian {
    fn identity(n: usize) -> Self {
        let mut h = Self { n, data: vec![0.0; n * n], is_identity: false };
        h.reset(1.0);
        h
    }

    fn reset(&mut self, scale: f64) {
        self.data.fill(0.0);
        for i in 0..self.n {
            self.data[i * self.n + i] = scale;
        }
        self.is_identity = scale == 1.0;
    }

    /// `-H g`
    fn descent_direction(&self, g: &[f64]) -> Vec<f64> {
        self.data.chunks_exact(self.n.max(1)).take(self.n).map(|row| -dot(row, g)).collect()
    }

    /// `H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T` with `rho = 1 / (y . s)`.
    fn update(&mut self, s: &[f64], y: &[f64], sy: f64) {
        let n = self.n;
        let rho = 1.0 / sy;
        let hy: Vec<f64> = self.data.chunks_exact(n).map(|row| dot(row, y)).collect();
        let yhy = dot(y, &hy);
        let coef = (1.0 + rho * yhy) * rho;
        for i in 0..n {
            for j in 0..n {
                self.data[i * n + j] += coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
            }
        }
        self.is_identity = false;
    }
}

/// Minimizes `objective` from `start` with BFGS.
///
/// Returns the final iterate with [`Status::Converged`] once the gradient
/// infinity-norm drops to `config.gradient_tolerance`; otherwise the last
/// accepted iterate, which is also the best one since accepted steps descend.
pub fn minimize(objective: &impl Objective, start: &[f64], config: &OptimizerConfig) -> Result<Minimum> {
    config.validate()?;
    let n = start.len();
    let mut evaluations = 0usize;
    let mut eval = |x: Vec<f64>| -> Result<Sample> {
        evaluations += 1;
        let sample = Sample { f: objective.value(&x), g: objective.gradient(&x), x };
        check_finite(&sample)?;
        Ok(sample)
    };

    let mut current = eval(start.to_vec())?;
    let mut hessian = InverseHessian::identity(n);
    let mut first_update = true;
    let mut trace = OptimizationTrace::default();
    trace.records.push(TraceRecord {
        iteration: 0,
        cost: current.f,
        gradient_norm: inf_norm(&current.g),
        metrics: objective.metrics(&current.x),
        event: None,
    });

    let mut status = Status::MaxIterations;
    let mut iteration = 0;
    while iteration < config.max_iterations {
        if inf_norm(&current.g) <= config.gradient_tolerance {
            status = Status::Converged;
            break;
        }
        let mut event = None;
        let mut direction = hessian.descent_direction(&current.g);
        let slope = dot(&direction, &current.g);
        if slope.is_nan() || slope >= 0.0 {
            hessian.reset(1.0);
            event = Some(TraceEvent::HessianReset);
            direction = hessian.descent_direction(&current.g);
        }
        // Unit steps are natural once H carries curvature; before that,
        // cap the first trial step length at 1.
        let initial = if hessian.is_identity { (1.0 / dot(&direction, &direction).sqrt()).min(1.0) } else { 1.0 };
        let search = LineSearch {
            eval: &mut eval,
            origin: &current,
            direction: &direction,
            c1: config.wolfe_c1,
            c2: config.wolfe_c2,
        };
        let (alpha, next) = match search.run(initial)? {
            Outcome::Accepted { alpha, sample } => (alpha, sample),
            Outcome::Failed if !hessian.is_identity => {
                hessian.reset(1.0);
                first_update = true;
                if let Some(last) = trace.records.last_mut() {
                    last.event = Some(TraceEvent::HessianReset);
                }
                continue;
            }
            Outcome::Failed => {
                status = Status::LineSearchFailure;
                break;
            }
        };

        let s: Vec<f64> = direction.iter().map(|p| alpha * p).collect();
        let y: Vec<f64> = next.g.iter().zip(&current.g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > f64::EPSILON * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if first_update {
                hessian.reset(sy / dot(&y, &y));
                first_update = false;
            }
            hessian.update(&s, &y, sy);
        } else {
            event = Some(TraceEvent::UpdateSkipped);
        }

        current = next;
        iteration += 1;
        trace.records.push(TraceRecord {
            iteration,
            cost: current.f,
            gradient_norm: inf_norm(&current.g),
            metrics: objective.metrics(&current.x),
            event,
        });
    }
    if status == Status::MaxIterations && inf_norm(&current.g) <= config.gradient_tolerance {
        status = Status::Converged;
    }

    Ok(Minimum {
        gradient_norm: inf_norm(&current.g),
        value: current.f,
        x: current.x,
        status,
        iterations: iteration,
        evaluations,
        trace,
    })
}
