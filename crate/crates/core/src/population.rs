//! The immigration population, simulated two ways.
//!
//! [`simulate_forward`] runs the dynamics step by step: one arrival per time
//! step, and at every transition each resident dies independently with its
//! own death probability. An individual is not at risk during the transition
//! right after its birth, so one born at `j` is alive at `t > j` with
//! probability `(1 - c)^(t - j - 1)`.
//!
//! [`simulate_tilde`] builds the equally distributed set that keeps
//! individual `k` iff its lifetime satisfies `G_k >= k`, drawing one
//! Bernoulli per index instead of whole lifetimes.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::distributions::{survival_power, CModel};
use crate::error::{invalid, Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub birth_time: u64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Population size at t = 0..=n.
    pub sizes: Vec<u64>,
    alive: Option<Vec<Individual>>,
}

impl Trajectory {
    pub fn from_sizes(sizes: Vec<u64>) -> Self {
        Self { sizes, alive: None }
    }

    pub fn horizon(&self) -> u64 {
        self.sizes.len().saturating_sub(1) as u64
    }

    pub fn final_size(&self) -> u64 {
        self.sizes.last().copied().unwrap_or(0)
    }

    /// The individuals alive at the horizon, if they were recorded.
    pub fn alive_set(&self) -> Result<&[Individual]> {
        self.alive.as_deref().ok_or(Error::NotRecorded)
    }

    /// Writes `t,size` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,size")?;
        for (t, s) in self.sizes.iter().enumerate() {
            writeln!(out, "{t},{s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub horizon: u64,
    pub initial_size: u64,
    pub seed: u64,
    pub stream_id: u64,
    pub record_alive: bool,
}

impl SimConfig {
    pub fn new(horizon: u64, seed: u64, stream_id: u64) -> Self {
        Self {
            horizon,
            initial_size: 1,
            seed,
            stream_id,
            record_alive: false,
        }
    }

    pub fn with_initial_size(mut self, m: u64) -> Self {
        self.initial_size = m;
        self
    }

    pub fn recording(mut self) -> Self {
        self.record_alive = true;
        self
    }

    fn rng(&self) -> RngStream {
        RngStream::new(self.seed, self.stream_id)
    }

    fn validate(&self) -> Result<()> {
        if self.initial_size == 0 {
            return Err(invalid("initial_size", "must be at least 1"));
        }
        Ok(())
    }
}

pub fn simulate_forward(config: &SimConfig, model: &CModel) -> Result<Trajectory> {
    config.validate()?;
    let model = model.validated()?;
    let mut rng = config.rng();
    let n = config.horizon;

    let mut alive: Vec<Individual> = (0..config.initial_size)
        .map(|_| Individual {
            birth_time: 0,
            c: model.sample(&mut rng),
        })
        .collect();
    let mut sizes = Vec::with_capacity(n as usize + 1);
    sizes.push(alive.len() as u64);

    for t in 1..=n {
        // born at t-1 means exempt from this transition
        alive.retain(|ind| ind.birth_time + 1 == t || !rng.bernoulli(ind.c));
        alive.push(Individual {
            birth_time: t,
            c: model.sample(&mut rng),
        });
        sizes.push(alive.len() as u64);
    }

    Ok(Trajectory {
        sizes,
        alive: config.record_alive.then_some(alive),
    })
}

pub fn simulate_tilde(config: &SimConfig, model: &CModel) -> Result<Trajectory> {
    config.validate()?;
    if config.initial_size != 1 {
        return Err(invalid(
            "initial_size",
            "the lifetime construction starts from a single individual",
        ));
    }
    let model = model.validated()?;
    let mut rng = config.rng();
    let n = config.horizon;

    let mut sizes = Vec::with_capacity(n as usize + 1);
    let mut kept = config.record_alive.then(Vec::new);
    let c0 = model.sample(&mut rng);
    if let Some(kept) = kept.as_mut() {
        kept.push(Individual { birth_time: 0, c: c0 });
    }
    let mut size = 1u64;
    sizes.push(size);

    for k in 1..=n {
        let c = model.sample(&mut rng);
        // P(G_k >= k) = (1 - c)^(k - 1)
        if rng.bernoulli(survival_power(c, k - 1)) {
            size += 1;
            if let Some(kept) = kept.as_mut() {
                kept.push(Individual { birth_time: k, c });
            }
        }
        sizes.push(size);
    }

    Ok(Trajectory { sizes, alive: kept })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_horizon() {
        let cfg = SimConfig::new(0, 1, 0).recording();
        let m = CModel::uniform(0.3).unwrap();
        let f = simulate_forward(&cfg, &m).unwrap();
        let t = simulate_tilde(&cfg, &m).unwrap();
        assert_eq!(f.sizes, vec![1]);
        assert_eq!(t.sizes, vec![1]);
        assert_eq!(f.alive_set().unwrap().len(), 1);
        assert_eq!(f.alive_set().unwrap()[0].birth_time, 0);
    }

    #[test]
    fn certain_death_forward() {
        let cfg = SimConfig::new(5, 1, 0).recording();
        let traj = simulate_forward(&cfg, &CModel::constant(1.0).unwrap()).unwrap();
        assert_eq!(traj.sizes, vec![1, 2, 2, 2, 2, 2]);
        let births: Vec<u64> = traj.alive_set().unwrap().iter().map(|i| i.birth_time).collect();
        assert_eq!(births, vec![4, 5]);
    }

    #[test]
    fn certain_death_tilde() {
        let cfg = SimConfig::new(5, 1, 0).recording();
        let traj = simulate_tilde(&cfg, &CModel::constant(1.0).unwrap()).unwrap();
        assert_eq!(traj.sizes, vec![1, 2, 2, 2, 2, 2]);
        let births: Vec<u64> = traj.alive_set().unwrap().iter().map(|i| i.birth_time).collect();
        assert_eq!(births, vec![0, 1]);
    }

    #[test]
    fn first_step_is_certain() {
        let models = [
            CModel::uniform(0.9).unwrap(),
            CModel::power_law(0.3).unwrap(),
            CModel::constant(1.0).unwrap(),
        ];
        for model in models {
            for s in 0..200 {
                let cfg = SimConfig::new(1, 4, s);
                assert_eq!(simulate_forward(&cfg, &model).unwrap().sizes[1], 2);
                assert_eq!(simulate_tilde(&cfg, &model).unwrap().sizes[1], 2);
            }
        }
    }

    #[test]
    fn tilde_rejects_multiple_founders() {
        let cfg = SimConfig::new(3, 1, 0).with_initial_size(2);
        assert!(simulate_tilde(&cfg, &CModel::uniform(0.5).unwrap()).is_err());
        let cfg = SimConfig::new(3, 1, 0).with_initial_size(0);
        assert!(simulate_forward(&cfg, &CModel::uniform(0.5).unwrap()).is_err());
    }

    #[test]
    fn not_recorded() {
        let cfg = SimConfig::new(3, 1, 0);
        let traj = simulate_forward(&cfg, &CModel::uniform(0.5).unwrap()).unwrap();
        assert!(matches!(traj.alive_set(), Err(Error::NotRecorded)));
    }

    #[test]
    fn csv_layout() {
        let traj = Trajectory::from_sizes(vec![1, 2, 2]);
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,size\n0,1\n1,2\n2,2\n");
    }

    #[test]
    fn multi_founder_forward_growth_bound() {
        let cfg = SimConfig::new(50, 8, 0).with_initial_size(1);
        let traj = simulate_forward(&cfg, &CModel::uniform(0.2).unwrap()).unwrap();
        for w in traj.sizes.windows(2) {
            assert!(w[1] <= w[0] + 1);
        }
    }
}
