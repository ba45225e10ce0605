use std::fmt;

use crate::error::{Error, Result};
use crate::models::ModelKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Category {
    Fields,
    Spikes,
    Bitmasks,
    Ages,
    Expirations,
    AdjacencyList,
    SynapseFields,
}

impl Category {
    pub fn name(self) -> &'static str {
        match self {
            Category::Fields => "fields",
            Category::Spikes => "spikes",
            Category::Bitmasks => "bitmasks",
            Category::Ages => "ages",
            Category::Expirations => "expirations",
            Category::AdjacencyList => "adjacency",
            Category::SynapseFields => "synapse_fields",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Bytes per neuron and per synapse by category.
#[derive(Clone, Debug, PartialEq)]
pub struct MemoryBreakdown {
    pub neurons: u64,
    pub synapses: u64,
    pub per_neuron: Vec<(Category, f64)>,
    pub per_synapse: Vec<(Category, f64)>,
}

impl MemoryBreakdown {
    pub fn per_neuron_total(&self) -> f64 {
        self.per_neuron.iter().map(|&(_, b)| b).sum()
    }

    pub fn per_synapse_total(&self) -> f64 {
        self.per_synapse.iter().map(|&(_, b)| b).sum()
    }

    pub fn neuron_bytes(&self) -> f64 {
        self.per_neuron_total() * self.neurons as f64
    }

    pub fn synapse_bytes(&self) -> f64 {
        self.per_synapse_total() * self.synapses as f64
    }

    pub fn total_bytes(&self) -> f64 {
        self.neuron_bytes() + self.synapse_bytes()
    }
}

/// Memory use of the reference GPU layout for a benchmark model:
/// neuron fields, a spike queue of 4 B per delay slot, and for plastic
/// models a 50-step bitmask history plus per-neuron age and expiry queue.
pub fn memory_estimate(kind: ModelKind, neurons: u64, synapses: u64) -> Result<MemoryBreakdown> {
    use Category::*;
    let (per_neuron, per_synapse) = match kind {
        ModelKind::Vogels => (vec![(Fields, 16.0), (Spikes, 32.0)], vec![(AdjacencyList, 4.0)]),
        ModelKind::Brunel => (vec![(Fields, 8.0), (Spikes, 60.0)], vec![(AdjacencyList, 4.0)]),
        ModelKind::BrunelPlus => (
            vec![
                (Fields, 8.0),
                (Spikes, 60.0),
                (Bitmasks, 50.0 / 8.0),
                (Ages, 4.0),
                (Expirations, 4.0),
            ],
            vec![(AdjacencyList, 4.0), (SynapseFields, 12.0)],
        ),
        ModelKind::PingPong => return Err(Error::UnknownModel(format!("no memory profile for {kind}"))),
    };
    Ok(MemoryBreakdown {
        neurons,
        synapses,
        per_neuron,
        per_synapse,
    })
}
