//! Clock-driven spiking neural network simulation built around work queues.
//!
//! A simulation step runs a fixed pipeline of stages. `Update Neurons`
//! advances every neuron and appends spiking neurons to a spike queue;
//! the queue travels through a delay ring and is consumed `delay` steps
//! later by `Receive Spikes`, which walks each spiker's adjacency row.
//! Models with plastic synapses add an `Update Synapses` stage that brings
//! synapse state current lazily, only when a synapse is about to transmit
//! or about to lose access to its spike history.
//!
//! Neuron and synapse dynamics are supplied by the user through the
//! [`Model`] trait. Model state is declared as a tuple of fields and stored
//! as a structure of arrays.
//!
//! ```
//! use snnq::{models::PingPong, Simulation, SimConfig};
//!
//! let (desc, model) = PingPong::build();
//! let mut sim = Simulation::new(desc, model, SimConfig::default()).unwrap();
//! let mut spikes = Vec::new();
//! sim.run(4, |t, frame| spikes.push((t, frame.len())));
//! assert_eq!(spikes.len(), 4);
//! ```

// `!(x > 0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adjacency;
pub mod analysis;
pub mod cli;
pub mod engine;
mod error;
pub mod models;
pub mod network;
pub mod rng;
pub mod scalar;
pub mod soa;

pub use adjacency::{AdjacencyList, ConstructionJob, JobPlan, SENTINEL};
pub use engine::{ExecMode, Plasticity, SimConfig, Simulation};
pub use error::{Error, Result};
pub use models::{Model, Step};
pub use network::{Connection, NetworkDesc};
pub use scalar::Real;

/// Single-precision benchmark models. The per-synapse layout of
/// [`BrunelPlus32`] is 12 bytes.
pub type Vogels32 = models::Vogels<f32>;
pub type Brunel32 = models::Brunel<f32>;
pub type BrunelPlus32 = models::BrunelPlus<f32>;
pub type Lif32 = models::Lif<f32>;
pub type LifParams32 = models::LifParams<f32>;
pub type StdpParams32 = models::StdpParams<f32>;

pub type Vogels64 = models::Vogels<f64>;
pub type Brunel64 = models::Brunel<f64>;
pub type BrunelPlus64 = models::BrunelPlus<f64>;
pub type Lif64 = models::Lif<f64>;
pub type LifParams64 = models::LifParams<f64>;
pub type StdpParams64 = models::StdpParams<f64>;
