use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Minimum;
use crate::error::{Error, Result};

/// `dim` angles uniform on `[0, 2 pi)` from ChaCha20 seeded with `seed` on
/// stream `stream`. Each start owns one stream, so adding starts never
/// changes earlier ones.
pub fn initial_angles(seed: u64, stream: u64, dim: usize) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..dim).map(|_| rng.random_range(0.0..TAU)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartOutcome {
    pub start: usize,
    pub initial: Vec<f64>,
    pub result: std::result::Result<Minimum, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Multistart {
    /// Index into `starts` of the lowest final cost.
    pub best: usize,
    pub starts: Vec<StartOutcome>,
}

impl Multistart {
    pub fn best(&self) -> &Minimum {
        self.starts[self.best].result.as_ref().expect("best start succeeded")
    }

    pub fn successes(&self) -> impl Iterator<Item = &Minimum> {
        self.starts.iter().filter_map(|s| s.result.as_ref().ok())
    }
}

/// Runs `runner` from `n_starts` random initializations (streams
/// `stream_base + i`) and keeps the lowest final value, ties broken by start
/// index. Fails only when every start fails.
pub fn multistart<F>(n_starts: usize, seed: u64, stream_base: u64, dim: usize, runner: F) -> Result<Multistart>
where
    F: Fn(&[f64]) -> Result<Minimum> + Sync,
{
    if n_starts == 0 {
        return Err(Error::domain("multistart needs at least one start"));
    }
    let outcomes: Vec<(StartOutcome, Option<Error>)> = (0..n_starts)
        .into_par_iter()
        .map(|start| {
            let initial = initial_angles(seed, stream_base + start as u64, dim);
            let (result, error) = match runner(&initial) {
                Ok(m) => (Ok(m), None),
                Err(e) => (Err(e.to_string()), Some(e)),
            };
            (StartOutcome { start, initial, result }, error)
        })
        .collect();

    let best = outcomes
        .iter()
        .enumerate()
        .filter_map(|(i, (o, _))| o.result.as_ref().ok().map(|m| (i, m.value)))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i);
    match best {
        Some(best) => Ok(Multistart { best, starts: outcomes.into_iter().map(|(o, _)| o).collect() }),
        None => {
            let first = outcomes.into_iter().find_map(|(_, e)| e).expect("every start failed");
            Err(Error::AllStartsFailed { starts: n_starts, first: Box::new(first) })
        }
    }
}
