//! Strong-Wolfe line search: bracketing followed by a safeguarded cubic
//! interpolation zoom.

use super::dot;
use crate::error::{Error, Result};

const MAX_BRACKET_STEPS: usize = 30;
const MAX_ZOOM_STEPS: usize = 40;
const MAX_STEP: f64 = 1e6;

/// Function value and gradient at one point.
#[derive(Debug, Clone)]
pub(super) struct Sample {
    pub x: Vec<f64>,
    pub f: f64,
    pub g: Vec<f64>,
}

#[derive(Debug)]
pub(super) enum Outcome {
    Accepted { alpha: f64, sample: Sample },
    Failed,
}

/// A point on the search ray with its directional derivative.
#[derive(Debug, Clone, Copy)]
struct Probe {
    alpha: f64,
    f: f64,
    d: f64,
}

pub(super) struct LineSearch<'a, E> {
    pub eval: &'a mut E,
    pub origin: &'a Sample,
    pub direction: &'a [f64],
    pub c1: f64,
    pub c2: f64,
}

impl<E> LineSearch<'_, E>
where
    E: FnMut(Vec<f64>) -> Result<Sample>,
{
    fn sample_at(&mut self, alpha: f64) -> Result<(Probe, Sample)> {
        let x: Vec<f64> = self.origin.x.iter().zip(self.direction).map(|(xi, pi)| xi + alpha * pi).collect();
        let sample = (self.eval)(x)?;
        let probe = Probe { alpha, f: sample.f, d: dot(&sample.g, self.direction) };
        Ok((probe, sample))
    }

    /// Finds a step satisfying the strong Wolfe conditions, starting the
    /// bracket at `initial`.
    pub fn run(mut self, initial: f64) -> Result<Outcome> {
        let f0 = self.origin.f;
        let d0 = dot(&self.origin.g, self.direction);
        if d0.is_nan() || d0 >= 0.0 {
            return Ok(Outcome::Failed);
        }
        let start = Probe { alpha: 0.0, f: f0, d: d0 };
        let mut prev = start;
        let mut alpha = initial;
        for step in 0..MAX_BRACKET_STEPS {
            let (probe, sample) = self.sample_at(alpha)?;
            if probe.f > f0 + self.c1 * alpha * d0 || (step > 0 && probe.f >= prev.f) {
                return self.zoom(start, prev, probe);
            }
            if probe.d.abs() <= -self.c2 * d0 {
                return Ok(Outcome::Accepted { alpha, sample });
            }
            if probe.d >= 0.0 {
                return self.zoom(start, probe, prev);
            }
            prev = probe;
            alpha = (2.0 * alpha).min(MAX_STEP);
            if prev.alpha >= MAX_STEP {
                break;
            }
        }
        Ok(Outcome::Failed)
    }

    /// `lo` always satisfies sufficient decrease and has the lower value of
    /// the bracket; the minimizer lies between `lo` and `hi`.
    fn zoom(&mut self, start: Probe, mut lo: Probe, mut hi: Probe) -> Result<Outcome> {
        let (f0, d0) = (start.f, start.d);
        for _ in 0..MAX_ZOOM_STEPS {
            let width = (hi.alpha - lo.alpha).abs();
            if width <= f64::EPSILON * lo.alpha.abs().max(1.0) {
                break;
            }
            let alpha = interpolate(lo, hi);
            let (probe, sample) = self.sample_at(alpha)?;
            if probe.f > f0 + self.c1 * alpha * d0 || probe.f >= lo.f {
                hi = probe;
            } else {
                if probe.d.abs() <= -self.c2 * d0 {
                    return Ok(Outcome::Accepted { alpha, sample });
                }
                if probe.d * (hi.alpha - lo.alpha) >= 0.0 {
                    hi = lo;
                }
                lo = probe;
            }
        }
        Ok(Outcome::Failed)
    }
}

/// Minimizer of the cubic through both probes, kept at least 10% of the
/// bracket away from either end; bisection when the cubic is unusable.
fn interpolate(a: Probe, b: Probe) -> f64 {
    let (lo, hi) = if a.alpha < b.alpha { (a.alpha, b.alpha) } else { (b.alpha, a.alpha) };
    let margin = 0.1 * (hi - lo);
    let mid = 0.5 * (lo + hi);

    let d1 = a.d + b.d - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
    let disc = d1 * d1 - a.d * b.d;
    if disc.is_nan() || disc < 0.0 {
        return mid;
    }
    let d2 = (b.alpha - a.alpha).signum() * disc.sqrt();
    let denom = b.d - a.d + 2.0 * d2;
    if denom == 0.0 {
        return mid;
    }
    let t = b.alpha - (b.alpha - a.alpha) * (b.d + d2 - d1) / denom;
    if t.is_finite() && t >= lo + margin && t <= hi - margin {
        t
    } else {
        mid
    }
}

pub(super) fn check_finite(sample: &Sample) -> Result<()> {
    if !sample.f.is_finite() {
        return Err(Error::NonFinite { what: "objective", iterate: sample.x.clone() });
    }
    if sample.g.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite { what: "gradient", iterate: sample.x.clone() });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_recovers_exact_minimum() {
        // f(a) = (a - 1)^2 sampled at 0 and 3: the interpolant is exact.
        let a = Probe { alpha: 0.0, f: 1.0, d: -2.0 };
        let b = Probe { alpha: 3.0, f: 4.0, d: 4.0 };
        assert!((interpolate(a, b) - 1.0).abs() < 1e-12);
        assert!((interpolate(b, a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interpolation_is_safeguarded() {
        let a = Probe { alpha: 0.0, f: 0.0, d: -1e-12 };
        let b = Probe { alpha: 1.0, f: 10.0, d: 100.0 };
        let t = interpolate(a, b);
        assert!((0.1..=0.9).contains(&t));
    }

    #[test]
    fn accepted_step_satisfies_strong_wolfe() {
        let f = |x: &[f64]| (x[0] - 3.0).powi(4) + x[1] * x[1];
        let g = |x: &[f64]| vec![4.0 * (x[0] - 3.0).powi(3), 2.0 * x[1]];
        let mut eval = |x: Vec<f64>| Ok(Sample { f: f(&x), g: g(&x), x });
        let origin = eval(vec![0.0, 1.0]).unwrap();
        let direction: Vec<f64> = origin.g.iter().map(|v| -v).collect();
        let (c1, c2) = (1e-4, 0.9);
        let outcome = LineSearch { eval: &mut eval, origin: &origin, direction: &direction, c1, c2 }.run(1.0).unwrap();
        let Outcome::Accepted { alpha, sample } = outcome else { panic!("line search failed") };
        let d0 = dot(&origin.g, &direction);
        assert!(sample.f <= origin.f + c1 * alpha * d0);
        assert!(dot(&sample.g, &direction).abs() <= -c2 * d0);
    }

    #[test]
    fn ascent_direction_fails() {
        let mut eval = |x: Vec<f64>| Ok(Sample { f: x[0], g: vec![1.0], x });
        let origin = eval(vec![0.0]).unwrap();
        let outcome =
            LineSearch { eval: &mut eval, origin: &origin, direction: &[1.0], c1: 1e-4, c2: 0.9 }.run(1.0).unwrap();
        assert!(matches!(outcome, Outcome::Failed));
    }
}
