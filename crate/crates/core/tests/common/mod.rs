//! Independent reference executors used as test oracles.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use snnq::models::{Model, Neuron, Step, Synapse};
use snnq::soa::Soa;
use snnq::AdjacencyList;

/// Result of a reference run.
pub struct Reference<M: Model> {
    pub raster: Vec<Vec<u32>>,
    pub neurons: Vec<M::Neuron>,
    pub synapses: Vec<Vec<M::Synapse>>,
    pub synapse_updates: u64,
}

/// Straight-line simulation: every neuron updated in id order, the frame
/// emitted `delay - 1` steps ago delivered in id order, and (for plastic
/// models) every synapse updated at every step. Spike history is a plain
/// vector of sets, not a ring.
pub fn reference_run<M: Model>(
    model: &M,
    adjacency: &AdjacencyList,
    dt: f64,
    delay: usize,
    seed: u64,
    steps: u64,
) -> Reference<M> {
    let n = adjacency.neurons();
    let neurons: Soa<M::Neuron> = Soa::new(n);
    let init = Step::init(dt, seed);
    for i in 0..n {
        model.init(neurons.record(i, false), &init);
    }
    let rows: Vec<Vec<u32>> = (0..n as u32).map(|i| adjacency.row(i).unwrap().to_vec()).collect();
    let mut synapses: Vec<Vec<M::Synapse>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .map(|&j| {
                    let mut s = M::Synapse::default();
                    model.init_synapse(i as u32, j, &mut s);
                    s
                })
                .collect()
        })
        .collect();
    let syn_soa: Soa<M::Synapse> = Soa::new(1);
    let mut history: Vec<BTreeSet<u32>> = Vec::new();
    let mut updates = 0;
    let fired = |h: &Vec<BTreeSet<u32>>, id: u32, u: i64| u >= 0 && h[u as usize].contains(&id);
    for t in 0..steps {
        let step = Step::new(t, dt, seed);
        let frame: BTreeSet<u32> = (0..n)
            .filter(|&i| model.update(neurons.record(i, false), &step))
            .map(|i| i as u32)
            .collect();
        history.push(frame);
        if model.plastic() {
            for (i, row) in rows.iter().enumerate() {
                let pre = fired(&history, i as u32, t as i64 - delay as i64);
                for (k, &j) in row.iter().enumerate() {
                    let post = fired(&history, j, t as i64);
                    model.update_synapse(i as u32, &mut synapses[i][k], pre, post, dt);
                    updates += 1;
                }
            }
        }
        let due = t as i64 - delay as i64 + 1;
        if due >= 0 {
            for &i in &history[due as usize] {
                for (k, &j) in rows[i as usize].iter().enumerate() {
                    syn_soa.store(0, synapses[i as usize][k]);
                    model.receive(
                        neurons.record(i as usize, false),
                        neurons.record(j as usize, false),
                        syn_soa.record(0, false),
                    );
                    synapses[i as usize][k] = syn_soa.load(0);
                }
            }
        }
    }
    Reference {
        raster: history.into_iter().map(|f| f.into_iter().collect()).collect(),
        neurons: neurons.snapshot(),
        synapses,
        synapse_updates: updates,
    }
}

/// Ping-pong semantics on plain booleans: a neuron fires iff its flag is
/// set, clearing it; every target of a spike gets its flag set in the same
/// step (delay 1).
pub fn pingpong_reference(adjacency: &AdjacencyList, steps: u64) -> Vec<Vec<u32>> {
    let n = adjacency.neurons();
    let mut flag: Vec<bool> = (0..n).map(|i| i < 100).collect();
    let mut raster = Vec::new();
    for _ in 0..steps {
        let frame: Vec<u32> = (0..n as u32).filter(|&i| flag[i as usize]).collect();
        flag.iter_mut().for_each(|f| *f = false);
        for &i in &frame {
            for &j in adjacency.row(i).unwrap() {
                flag[j as usize] = true;
            }
        }
        raster.push(frame);
    }
    raster
}

/// Neurons fire at random; every receive callback is logged together with
/// the step during which it ran.
#[derive(Clone)]
pub struct Probe {
    pub p_fire: f64,
    pub now: Arc<AtomicU64>,
    pub log: Arc<Mutex<Vec<(u64, u32, u32)>>>,
}

impl Probe {
    pub fn new(p_fire: f64) -> Self {
        Probe {
            p_fire,
            now: Arc::new(AtomicU64::new(0)),
            log: Arc::new(Mutex::new(Vec::new())),
        }
    }
}

impl Model for Probe {
    type Neuron = (u32,);
    type Synapse = ();

    fn update(&self, n: Neuron<'_, (u32,)>, step: &Step) -> bool {
        step.uniform(n.id()) < self.p_fire
    }

    fn receive(&self, from: Neuron<'_, (u32,)>, to: Neuron<'_, (u32,)>, _: Synapse<'_, ()>) {
        to.add::<0>(1);
        let now = self.now.load(Ordering::Relaxed);
        self.log.lock().unwrap().push((now, from.id(), to.id()));
    }
}
