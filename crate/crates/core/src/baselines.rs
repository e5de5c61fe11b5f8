//! Comparison chains with binomial thinning and one arrival per step:
//! `X_0 = 1`, `X_n = B_{n-1} + 1` with `B_{n-1} ~ Binomial(X_{n-1}, 1 - c_n)`.
//!
//! Either every individual shares a fixed `c`, or all individuals share a
//! fresh `c_n` drawn each step (random environment). Both chains are
//! positive recurrent, unlike the heterogeneous population.

use serde::Serialize;

use crate::distributions::CModel;
use crate::error::{invalid, Result};
use crate::population::Trajectory;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeathMode {
    /// Same c for everyone at every step. `c = 0` (no deaths) is allowed.
    Constant(f64),
    /// Everyone shares `c_n`, drawn afresh from the model at each step.
    RandomEnv(CModel),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FmsConfig {
    pub mode: DeathMode,
    pub horizon: u64,
    pub seed: u64,
    pub stream_id: u64,
}

impl FmsConfig {
    fn validate(&self) -> Result<DeathMode> {
        match self.mode {
            DeathMode::Constant(c) if !(0.0..=1.0).contains(&c) => {
                Err(invalid("c", format!("must lie in [0, 1], got {c}")))
            }
            DeathMode::RandomEnv(m) => Ok(DeathMode::RandomEnv(m.validated()?)),
            mode => Ok(mode),
        }
    }
}

pub fn simulate_fms(config: &FmsConfig) -> Result<Trajectory> {
    let mode = config.validate()?;
    let mut rng = RngStream::new(config.seed, config.stream_id);
    let mut sizes = Vec::with_capacity(config.horizon as usize + 1);
    let mut x = 1u64;
    sizes.push(x);
    for _ in 0..config.horizon {
        let c = match mode {
            DeathMode::Constant(c) => c,
            DeathMode::RandomEnv(model) => model.sample(&mut rng),
        };
        let survivors = (0..x).filter(|_| rng.bernoulli(1.0 - c)).count() as u64;
        x = survivors + 1;
        sizes.push(x);
    }
    Ok(Trajectory::from_sizes(sizes))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RecurrenceStats {
    /// Number of times with size at or below the level (time 0 included).
    pub visits: u64,
    pub max_size: u64,
    pub time_avg: f64,
}

pub fn recurrence_stats(traj: &Trajectory, level: u64) -> Result<RecurrenceStats> {
    recurrence_stats_from(&traj.sizes, level)
}

/// Same statistics over a window of sizes, e.g. the second half of a run.
pub fn recurrence_stats_from(sizes: &[u64], level: u64) -> Result<RecurrenceStats> {
    if sizes.is_empty() {
        return Err(crate::error::Error::EmptyInput("trajectory"));
    }
    if level == 0 {
        return Err(invalid("level", "must be positive"));
    }
    Ok(RecurrenceStats {
        visits: sizes.iter().filter(|&&s| s <= level).count() as u64,
        max_size: sizes.iter().copied().max().unwrap_or(0),
        time_avg: sizes.iter().map(|&s| s as f64).sum::<f64>() / sizes.len() as f64,
    })
}
