//! Model interface and the shipped models.
//!
//! A model declares its neuron (and optionally synapse) fields as tuples and
//! implements callbacks the engine invokes:
//!
//! * [`Model::init`] once per neuron before the simulation,
//! * [`Model::update`] once per neuron per step, returning whether it spikes,
//! * [`Model::receive`] once per delivered spike and recipient,
//! * [`Model::init_synapse`] / [`Model::update_synapse`] for synapse state.
//!
//! `receive` runs concurrently for different spikes. Writes to the target
//! neuron that may collide with another delivery must use
//! [`Record::add`](crate::soa::Record::add).
//!
//! ```
//! use snnq::models::{Model, Neuron, Step, Synapse};
//!
//! /// Each neuron fires once it has received a spike.
//! struct Relay;
//!
//! impl Model for Relay {
//!     type Neuron = (bool,);
//!     type Synapse = ();
//!
//!     fn init(&self, n: Neuron<'_, (bool,)>, _: &Step) {
//!         n.set::<0>(n.id() == 0);
//!     }
//!     fn update(&self, n: Neuron<'_, (bool,)>, _: &Step) -> bool {
//!         let spike = n.get::<0>();
//!         n.set::<0>(false);
//!         spike
//!     }
//!     fn receive(&self, _: Neuron<'_, (bool,)>, to: Neuron<'_, (bool,)>, _: Synapse<'_, ()>) {
//!         to.set::<0>(true);
//!     }
//! }
//! ```

mod bench;
mod lif;
mod params;
mod pingpong;
mod poisson;
mod stdp;

use rand_xorshift::XorShiftRng;

pub use bench::{Bench, Brunel, BrunelPlus, ModelKind, Vogels};
pub use lif::{Lif, LifParams, LifState};
pub use params::{BenchParams, BrunelParams, VogelsParams, DEFAULTS};
pub use pingpong::PingPong;
pub use poisson::poisson_update;
pub use stdp::{Stdp, StdpParams, StdpState};

use crate::rng::{self, Domain};
use crate::soa::{Layout, Record};

pub type Neuron<'a, L> = Record<'a, L>;
pub type Synapse<'a, L> = Record<'a, L>;

/// Per-step context passed to neuron callbacks.
#[derive(Clone, Copy, Debug)]
pub struct Step {
    /// Index of the step being executed (state `t` → `t + 1`).
    pub t: u64,
    /// Simulated milliseconds per step.
    pub dt: f64,
    seed: u64,
    domain: Domain,
    /// Hash of (seed, domain, t); neuron `i` draws from the SplitMix64
    /// stream position `base + i`.
    base: u64,
}

impl Step {
    /// Context for step `t`.
    pub fn new(t: u64, dt: f64, seed: u64) -> Self {
        Self::with_domain(t, dt, seed, Domain::NeuronStep)
    }

    /// Context for the init callbacks.
    pub fn init(dt: f64, seed: u64) -> Self {
        Self::with_domain(0, dt, seed, Domain::NeuronInit)
    }

    fn with_domain(t: u64, dt: f64, seed: u64, domain: Domain) -> Self {
        Step {
            t,
            dt,
            seed,
            domain,
            base: rng::key(seed, domain, t, 0),
        }
    }

    /// Uniform value in [0, 1) private to neuron `id` at this step. Does not
    /// depend on evaluation order or thread count.
    #[inline]
    pub fn uniform(&self, id: u32) -> f64 {
        rng::unit(rng::mix(self.base.wrapping_add((id as u64).wrapping_mul(rng::GOLDEN))))
    }

    /// Random stream private to neuron `id` at this step.
    pub fn rng(&self, id: u32) -> XorShiftRng {
        rng::stream(self.seed, self.domain, id as u64, self.t)
    }
}

/// Neuron and synapse dynamics.
pub trait Model: Send + Sync {
    /// Neuron fields, e.g. `(f32, f32, i32)`.
    type Neuron: Layout;
    /// Synapse fields, `()` for models without synapse state.
    type Synapse: Layout;

    fn init(&self, neuron: Neuron<'_, Self::Neuron>, step: &Step) {
        let _ = (neuron, step);
    }

    /// Advances one neuron by one step. Returns `true` to spike.
    fn update(&self, neuron: Neuron<'_, Self::Neuron>, step: &Step) -> bool;

    /// Delivers a spike from `from` to `to` over `synapse`.
    fn receive(
        &self,
        from: Neuron<'_, Self::Neuron>,
        to: Neuron<'_, Self::Neuron>,
        synapse: Synapse<'_, Self::Synapse>,
    );

    /// Whether synapses evolve over time. Enables the synapse update stage.
    fn plastic(&self) -> bool {
        false
    }

    fn init_synapse(&self, from: u32, to: u32, synapse: &mut Self::Synapse) {
        let _ = (from, to, synapse);
    }

    /// Advances one synapse of neuron `from` by one step. `pre` tells
    /// whether `from` fired `delay` steps ago, `post` whether the target
    /// fired during this step.
    fn update_synapse(&self, from: u32, synapse: &mut Self::Synapse, pre: bool, post: bool, dt: f64) {
        let _ = (from, synapse, pre, post, dt);
    }
}

impl<M: Model + ?Sized> Model for &M {
    type Neuron = M::Neuron;
    type Synapse = M::Synapse;

    fn init(&self, neuron: Neuron<'_, Self::Neuron>, step: &Step) {
        (**self).init(neuron, step)
    }
    fn update(&self, neuron: Neuron<'_, Self::Neuron>, step: &Step) -> bool {
        (**self).update(neuron, step)
    }
    fn receive(
        &self,
        from: Neuron<'_, Self::Neuron>,
        to: Neuron<'_, Self::Neuron>,
        synapse: Synapse<'_, Self::Synapse>,
    ) {
        (**self).receive(from, to, synapse)
    }
    fn plastic(&self) -> bool {
        (**self).plastic()
    }
    fn init_synapse(&self, from: u32, to: u32, synapse: &mut Self::Synapse) {
        (**self).init_synapse(from, to, synapse)
    }
    fn update_synapse(&self, from: u32, synapse: &mut Self::Synapse, pre: bool, post: bool, dt: f64) {
        (**self).update_synapse(from, synapse, pre, post, dt)
    }
}
