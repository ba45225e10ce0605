//! The simulation pipeline.
//!
//! One call to [`Simulation::step`] moves the network from state `t` to
//! `t + 1` through a fixed sequence of stages, each finishing before the
//! next starts:
//!
//! 1. **Update Neurons** calls [`Model::update`] on every neuron. Spiking
//!    neurons are appended to the queue for step `t` (and flagged in the
//!    matching bitmask). With lazy plasticity, neurons whose synapses would
//!    lose access to spike history go to the expiring queue.
//! 2. **Update Synapses** (plastic models only) brings the outgoing synapses
//!    of every neuron that is about to transmit or expire up to date.
//! 3. **Receive Spikes** delivers the queue emitted `delay - 1` steps ago.
//!    A spike emitted during step `t` therefore reaches its targets during
//!    the step that produces state `t + delay`.
//!
//! Lazy plasticity keeps one age per neuron: all outgoing synapses of a
//! neuron transmit together and therefore share it. A synapse is advanced
//! only when needed, replaying every missed step from the retained
//! bitmasks, which produces the same state as advancing every synapse at
//! every step.

mod queue;
mod ring;

use std::sync::atomic::{AtomicU32, AtomicU64, Ordering::Relaxed};
use std::time::{Duration, Instant};

use rayon::prelude::*;

pub use queue::{Bitmask, SpikeQueue};
pub use ring::SpikeRing;

use crate::adjacency::{expand_jobs, plan_jobs, AdjacencyList, Quantize, DEFAULT_ROW_ALIGN};
use crate::analysis::{Category, MemoryBreakdown};
use crate::error::{Error, Result};
use crate::models::{Model, Step};
use crate::network::NetworkDesc;
use crate::soa::{Layout, Soa};

/// Spike history retained for lazy plasticity, in steps.
pub const LAZY_HISTORY: usize = 50;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExecMode {
    /// Stages iterate sequentially in ascending id order. Bit-reproducible.
    #[default]
    Deterministic,
    /// Stages run on the rayon pool. Spike frames are sorted after each
    /// stage; float accumulation order into a neuron is unspecified.
    Parallel,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Plasticity {
    /// Advance synapses only before they transmit or expire.
    #[default]
    Lazy,
    /// Advance every synapse every step.
    Eager,
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub seed: u64,
    pub mode: ExecMode,
    pub plasticity: Plasticity,
    /// Spike history kept for lazy plasticity; at least `delay + 1` is used.
    pub lazy_history: usize,
    pub row_align: usize,
    pub quantize: Quantize,
    /// Check queue/bitmask coherence and age bounds after every step.
    pub verify: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            seed: 0,
            mode: ExecMode::Deterministic,
            plasticity: Plasticity::Lazy,
            lazy_history: LAZY_HISTORY,
            row_align: DEFAULT_ROW_ALIGN,
            quantize: Quantize::default(),
            verify: cfg!(debug_assertions),
        }
    }
}

impl SimConfig {
    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn mode(mut self, mode: ExecMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn plasticity(mut self, plasticity: Plasticity) -> Self {
        self.plasticity = plasticity;
        self
    }

    pub fn verify(mut self, verify: bool) -> Self {
        self.verify = verify;
        self
    }
}

/// Wall-clock cost of the three setup phases.
#[derive(Clone, Copy, Debug, Default)]
pub struct SetupTimings {
    pub construct: Duration,
    pub neurons: Duration,
    pub synapses: Duration,
}

impl SetupTimings {
    pub fn total(&self) -> Duration {
        self.construct + self.neurons + self.synapses
    }
}

/// Synapse fields plus the bookkeeping of lazy plasticity.
struct SynapseStore<S: Layout> {
    fields: Soa<S>,
    /// Synapses per neuron; slot `k` of neuron `i` is `i * pitch + k`.
    pitch: usize,
    /// First step not yet applied to the neuron's outgoing synapses.
    ages: Vec<AtomicU32>,
    expiring: SpikeQueue,
}

pub struct Simulation<M: Model> {
    desc: NetworkDesc,
    model: M,
    config: SimConfig,
    adjacency: AdjacencyList,
    neurons: Soa<M::Neuron>,
    synapses: SynapseStore<M::Synapse>,
    plastic: bool,
    ring: SpikeRing,
    t: u64,
    synapse_updates: AtomicU64,
    frame: Vec<u32>,
    timings: SetupTimings,
}

impl<M: Model> Simulation<M> {
    /// Validates `desc`, builds the graph and initializes the network.
    pub fn new(desc: NetworkDesc, model: M, config: SimConfig) -> Result<Self> {
        let desc = desc.validate()?;
        let start = Instant::now();
        let plan = plan_jobs(&desc, config.seed, config.row_align)?;
        let adjacency = expand_jobs(&plan, config.quantize)?;
        let construct = start.elapsed();
        let mut sim = Self::with_adjacency(desc, model, adjacency, config)?;
        sim.timings.construct = construct;
        Ok(sim)
    }

    /// Uses a prebuilt graph instead of sampling one.
    pub fn with_adjacency(desc: NetworkDesc, model: M, adjacency: AdjacencyList, config: SimConfig) -> Result<Self> {
        let desc = desc.validate()?;
        let n = desc.neurons();
        if adjacency.neurons() != n {
            return Err(Error::Config(format!(
                "adjacency has {} rows, network has {n} neurons",
                adjacency.neurons()
            )));
        }
        let plastic = model.plastic();
        let d = desc.delay;
        let history = match (plastic, config.plasticity) {
            (false, _) => d,
            (true, Plasticity::Eager) => d + 1,
            (true, Plasticity::Lazy) => config.lazy_history.max(d + 1),
        };
        let pitch = adjacency.deg_max();
        let synapses = SynapseStore {
            fields: Soa::new(n * pitch),
            pitch,
            ages: if plastic {
                (0..n).map(|_| AtomicU32::new(0)).collect()
            } else {
                Vec::new()
            },
            expiring: SpikeQueue::new(if plastic { n } else { 0 }),
        };
        let mut sim = Simulation {
            ring: SpikeRing::new(n, d, history),
            neurons: Soa::new(n),
            synapses,
            plastic,
            adjacency,
            desc,
            model,
            config,
            t: 0,
            synapse_updates: AtomicU64::new(0),
            frame: Vec::new(),
            timings: SetupTimings::default(),
        };
        sim.init();
        Ok(sim)
    }

    /// Resets the network to its initial state: neurons and synapses
    /// re-initialized, history cleared, step counter at zero.
    pub fn init(&mut self) {
        let start = Instant::now();
        let step = Step::init(self.desc.dt, self.config.seed);
        let shared = self.config.mode == ExecMode::Parallel;
        self.neurons.clear();
        for_each_index(self.desc.neurons(), self.config.mode, |i| {
            self.model.init(self.neurons.record(i, shared), &step);
        });
        self.timings.neurons = start.elapsed();

        let start = Instant::now();
        if M::Synapse::FIELDS > 0 {
            let store = &self.synapses;
            let adjacency = &self.adjacency;
            for_each_index(self.desc.neurons(), self.config.mode, |i| {
                for (k, &to) in adjacency.row_at(i).iter().enumerate() {
                    let mut s = M::Synapse::default();
                    self.model.init_synapse(i as u32, to, &mut s);
                    store.fields.store(i * store.pitch + k, s);
                }
            });
        }
        for age in &self.synapses.ages {
            age.store(0, Relaxed);
        }
        self.timings.synapses = start.elapsed();

        self.synapses.expiring.clear();
        self.ring.clear();
        self.frame.clear();
        self.synapse_updates.store(0, Relaxed);
        self.t = 0;
    }

    /// Executes one step.
    pub fn step(&mut self) {
        let t = self.t;
        self.ring.begin(t);
        self.synapses.expiring.clear();
        self.update_neurons(t);
        if self.plastic {
            self.update_synapses(t);
        }
        self.receive_spikes(t);
        if self.config.verify {
            self.check(t);
        }
        self.t += 1;
    }

    /// Executes `steps` steps, handing each step's spikes to `tap`.
    pub fn run<F: FnMut(u64, &[u32])>(&mut self, steps: u64, mut tap: F) {
        for _ in 0..steps {
            self.step();
            self.ring.queue(self.t - 1).copy_into(&mut self.frame);
            tap(self.t - 1, &self.frame);
        }
    }

    fn update_neurons(&mut self, t: u64) {
        let step = Step::new(t, self.desc.dt, self.config.seed);
        let mode = self.config.mode;
        let shared = mode == ExecMode::Parallel;
        let lazy = self.plastic && self.config.plasticity == Plasticity::Lazy;
        // Oldest age whose pre-synaptic history (reaching `delay` steps
        // further back) survives one more step.
        let budget = if lazy {
            (self.ring.history() - 1 - self.desc.delay) as u64
        } else {
            0
        };
        let delay = self.desc.delay as i64;
        {
            let (model, neurons, ring, synapses) = (&self.model, &self.neurons, &self.ring, &self.synapses);
            for_each_index(self.desc.neurons(), mode, |i| {
                if model.update(neurons.record(i, shared), &step) {
                    ring.push(t, i as u32);
                }
                if lazy {
                    let age = synapses.ages[i].load(Relaxed) as u64;
                    let transmitting = ring.fired(i as u32, t as i64 - delay + 1, t);
                    if t - age >= budget && !transmitting {
                        synapses.expiring.push(i as u32);
                    }
                }
            });
        }
        if mode == ExecMode::Parallel {
            self.ring.queue_mut(t).sort();
            self.synapses.expiring.sort();
        }
    }

    fn update_synapses(&self, t: u64) {
        match self.config.plasticity {
            Plasticity::Lazy => {
                let due = self.ring.due(t);
                let expiring = &self.synapses.expiring;
                let work = due.len() + expiring.len();
                let item = |w: usize| {
                    let id = if w < due.len() {
                        due.get(w)
                    } else {
                        expiring.get(w - due.len())
                    };
                    self.advance(id as usize, t);
                };
                match self.config.mode {
                    ExecMode::Deterministic => (0..work).for_each(item),
                    ExecMode::Parallel => (0..work).into_par_iter().for_each(item),
                }
            }
            Plasticity::Eager => {
                for_each_index(self.desc.neurons(), self.config.mode, |i| self.advance_eager(i, t));
            }
        }
    }

    /// Replays steps `ages[i] ..= t` on every outgoing synapse of neuron `i`.
    /// Each synapse is loaded once, advanced locally and stored once.
    fn advance(&self, i: usize, t: u64) {
        let store = &self.synapses;
        let age = store.ages[i].load(Relaxed) as u64;
        if age > t {
            return;
        }
        debug_assert!(t - age < self.ring.history() as u64);
        let delay = self.desc.delay as i64;
        let dt = self.desc.dt;
        let row = self.adjacency.row_at(i);
        for (k, &to) in row.iter().enumerate() {
            let slot = i * store.pitch + k;
            let mut s = store.fields.load(slot);
            for u in age..=t {
                let pre = self.ring.fired(i as u32, u as i64 - delay, t);
                let post = self.ring.fired(to, u as i64, t);
                self.model.update_synapse(i as u32, &mut s, pre, post, dt);
            }
            store.fields.store(slot, s);
        }
        store.ages[i].store((t + 1) as u32, Relaxed);
        self.synapse_updates
            .fetch_add(row.len() as u64 * (t + 1 - age), Relaxed);
    }

    /// Reference schedule: one update per synapse per step.
    fn advance_eager(&self, i: usize, t: u64) {
        let store = &self.synapses;
        let pre = self.ring.fired(i as u32, t as i64 - self.desc.delay as i64, t);
        let row = self.adjacency.row_at(i);
        for (k, &to) in row.iter().enumerate() {
            let slot = i * store.pitch + k;
            let mut s = store.fields.load(slot);
            let post = self.ring.fired(to, t as i64, t);
            self.model.update_synapse(i as u32, &mut s, pre, post, self.desc.dt);
            store.fields.store(slot, s);
        }
        store.ages[i].store((t + 1) as u32, Relaxed);
        self.synapse_updates.fetch_add(row.len() as u64, Relaxed);
    }

    fn receive_spikes(&self, t: u64) {
        let due = self.ring.due(t);
        let shared = self.config.mode == ExecMode::Parallel;
        let pitch = self.synapses.pitch;
        let deliver = |w: usize| {
            let src = due.get(w) as usize;
            let from = self.neurons.record(src, shared);
            for (k, &dst) in self.adjacency.row_at(src).iter().enumerate() {
                self.model.receive(
                    from,
                    self.neurons.record(dst as usize, shared),
                    self.synapses.fields.record(src * pitch + k, shared),
                );
            }
        };
        match self.config.mode {
            ExecMode::Deterministic => (0..due.len()).for_each(deliver),
            ExecMode::Parallel => (0..due.len()).into_par_iter().for_each(deliver),
        }
    }

    fn check(&self, t: u64) {
        let queue = self.ring.queue(t);
        let mask = self.ring.mask(t);
        assert_eq!(
            queue.len(),
            mask.count_ones(),
            "step {t}: spike queue and bitmask disagree (duplicate or missing spike)"
        );
        assert!(
            queue.iter().all(|id| mask.get(id)),
            "step {t}: queued spike missing from bitmask"
        );
        if self.plastic {
            let history = self.ring.history() as u64;
            for (i, age) in self.synapses.ages.iter().enumerate() {
                let age = age.load(Relaxed) as u64;
                assert!(
                    t + 1 - age < history,
                    "step {t}: synapses of neuron {i} outlived spike history"
                );
            }
        }
    }

    /// Brings every synapse up to the current step.
    pub fn flush(&mut self) {
        if !self.plastic || self.t == 0 {
            return;
        }
        let t = self.t - 1;
        match self.config.mode {
            ExecMode::Deterministic => (0..self.desc.neurons()).for_each(|i| self.advance(i, t)),
            ExecMode::Parallel => (0..self.desc.neurons())
                .into_par_iter()
                .for_each(|i| self.advance(i, t)),
        }
    }

    /// Number of steps executed so far.
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn desc(&self) -> &NetworkDesc {
        &self.desc
    }

    pub fn model(&self) -> &M {
        &self.model
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn adjacency(&self) -> &AdjacencyList {
        &self.adjacency
    }

    pub fn ring(&self) -> &SpikeRing {
        &self.ring
    }

    pub fn timings(&self) -> SetupTimings {
        self.timings
    }

    /// Spikes emitted during the most recent step.
    pub fn spikes(&self) -> Vec<u32> {
        match self.t {
            0 => Vec::new(),
            t => self.ring.queue(t - 1).iter().collect(),
        }
    }

    /// Neurons queued for expiry during the most recent step.
    pub fn expiring(&self) -> Vec<u32> {
        self.synapses.expiring.iter().collect()
    }

    /// First step not yet applied to the synapses of each neuron. Empty for
    /// models without plasticity.
    pub fn ages(&self) -> Vec<u32> {
        self.synapses.ages.iter().map(|a| a.load(Relaxed)).collect()
    }

    /// Total synapse update callbacks so far.
    pub fn synapse_updates(&self) -> u64 {
        self.synapse_updates.load(Relaxed)
    }

    pub fn neurons(&self) -> &Soa<M::Neuron> {
        &self.neurons
    }

    pub fn neuron_state(&self) -> Vec<M::Neuron> {
        self.neurons.snapshot()
    }

    /// Synapse state as stored, without flushing. Stale under lazy
    /// plasticity unless [`flush`](Self::flush) was called.
    pub fn synapse_state_raw(&self) -> Vec<Vec<M::Synapse>> {
        (0..self.desc.neurons())
            .map(|i| {
                (0..self.adjacency.degrees()[i] as usize)
                    .map(|k| self.synapses.fields.load(i * self.synapses.pitch + k))
                    .collect()
            })
            .collect()
    }

    /// Current synapse state, one vector per neuron in row order. Flushes
    /// pending lazy updates first.
    pub fn synapse_state(&mut self) -> Vec<Vec<M::Synapse>> {
        self.flush();
        self.synapse_state_raw()
    }

    /// Bytes actually allocated, by category.
    pub fn memory(&self) -> MemoryBreakdown {
        let n = self.desc.neurons() as f64;
        let s = self.adjacency.synapses();
        let per = |bytes: usize, count: f64| if count > 0.0 { bytes as f64 / count } else { 0.0 };
        let mut per_neuron = vec![
            (Category::Fields, per(self.neurons.bytes(), n)),
            (Category::Spikes, per(self.ring.queue_bytes(), n)),
            (Category::Bitmasks, per(self.ring.mask_bytes(), n)),
        ];
        if self.plastic {
            per_neuron.push((Category::Ages, per(self.synapses.ages.len() * 4, n)));
            per_neuron.push((Category::Expirations, per(self.synapses.expiring.bytes(), n)));
        }
        let mut per_synapse = vec![(Category::AdjacencyList, per(self.adjacency.bytes(), s as f64))];
        if M::Synapse::FIELDS > 0 {
            per_synapse.push((Category::SynapseFields, per(self.synapses.fields.bytes(), s as f64)));
        }
        MemoryBreakdown {
            neurons: self.desc.neurons() as u64,
            synapses: s,
            per_neuron,
            per_synapse,
        }
    }
}

fn for_each_index<F: Fn(usize) + Sync + Send>(n: usize, mode: ExecMode, f: F) {
    match mode {
        ExecMode::Deterministic => (0..n).for_each(f),
        ExecMode::Parallel => (0..n).into_par_iter().with_min_len(1024).for_each(f),
    }
}
