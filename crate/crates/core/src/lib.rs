//! Simulation and verification toolkit for an immigration population in
//! which every newcomer carries its own catastrophe (death) probability.
//!
//! One individual arrives per time step with a death probability drawn from
//! a law [`CModel`]; at each later step every resident dies independently
//! with its own probability. The crate provides
//!
//! - samplers for the law and for geometric lifetimes ([`distributions`]),
//! - forward and lifetime-based simulators ([`population`]),
//! - exact moments and the survival dichotomy ([`moments`]),
//! - the limiting point set and its rescaled box counts ([`point_process`]),
//! - goodness-of-fit tools ([`stats`]),
//! - the constant-c and random-environment comparison chains ([`baselines`]),
//! - a config-driven experiment runner ([`cli`]).
//!
//! Replicas are seeded per stream and run in parallel through [`replicas`]
//! when the `parallel` feature (default) is enabled.

pub mod baselines;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod moments;
pub mod point_process;
pub mod population;
pub mod quadrature;
pub mod replicas;
pub mod rng;
pub mod stats;

pub use distributions::CModel;
pub use error::{Error, Result};
pub use population::{SimConfig, Trajectory};
pub use rng::RngStream;
