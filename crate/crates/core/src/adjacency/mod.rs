//! Padded adjacency table.
//!
//! Row `i` lists the targets of neuron `i` in ascending order, followed by
//! [`SENTINEL`] padding up to a fixed row pitch. A fixed pitch keeps index
//! arithmetic trivial: entry `k` of neuron `i` lives at `i * pitch + k`, and
//! synapse state uses the same `(neuron, k)` addressing with no offset
//! table.

mod jobs;
mod sorted;

use std::io::{Read, Write};

pub use jobs::{expand_jobs, plan_jobs, ConstructionJob, JobPlan, DEFAULT_ROW_ALIGN};
pub use sorted::{sorted_random, trace, Quantize, SortedRandom, Trace};

use crate::error::{Error, Result};

/// Padding value. Sorts after every valid id.
pub const SENTINEL: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyList {
    neurons: usize,
    row_pitch: usize,
    deg_max: usize,
    degrees: Vec<u32>,
    data: Vec<u32>,
}

/// Smallest multiple of `align` that is ≥ `deg_max`.
pub fn row_pitch(deg_max: usize, align: usize) -> usize {
    let align = align.max(1);
    deg_max.div_ceil(align) * align
}

impl AdjacencyList {
    /// Table with no edges.
    pub fn empty(neurons: usize) -> Self {
        AdjacencyList {
            neurons,
            row_pitch: 0,
            deg_max: 0,
            degrees: vec![0; neurons],
            data: Vec::new(),
        }
    }

    pub(crate) fn from_parts(neurons: usize, row_pitch: usize, degrees: Vec<u32>, data: Vec<u32>) -> Self {
        let deg_max = degrees.iter().copied().max().unwrap_or(0) as usize;
        debug_assert_eq!(data.len(), neurons * row_pitch);
        AdjacencyList {
            neurons,
            row_pitch,
            deg_max,
            degrees,
            data,
        }
    }

    /// Builds a table from explicit rows. Rows are sorted; duplicates and
    /// out-of-range ids are rejected.
    pub fn from_rows(rows: &[Vec<u32>], align: usize) -> Result<Self> {
        let neurons = rows.len();
        let deg_max = rows.iter().map(Vec::len).max().unwrap_or(0);
        let pitch = row_pitch(deg_max, align);
        let mut data = vec![SENTINEL; neurons * pitch];
        let mut degrees = Vec::with_capacity(neurons);
        for (i, row) in rows.iter().enumerate() {
            let dst = &mut data[i * pitch..i * pitch + row.len()];
            dst.copy_from_slice(row);
            dst.sort_unstable();
            if let Some(&bad) = dst.iter().find(|&&id| id as usize >= neurons) {
                return Err(Error::NeuronId {
                    id: bad,
                    count: neurons,
                });
            }
            if dst.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Config(format!("row {i} contains a duplicate edge")));
            }
            degrees.push(row.len() as u32);
        }
        Ok(Self::from_parts(neurons, pitch, degrees, data))
    }

    pub fn neurons(&self) -> usize {
        self.neurons
    }

    pub fn row_pitch(&self) -> usize {
        self.row_pitch
    }

    pub fn deg_max(&self) -> usize {
        self.deg_max
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn synapses(&self) -> u64 {
        self.degrees.iter().map(|&d| d as u64).sum()
    }

    /// Valid targets of `neuron`, ascending.
    pub fn row(&self, neuron: u32) -> Result<&[u32]> {
        if neuron as usize >= self.neurons {
            return Err(Error::NeuronId {
                id: neuron,
                count: self.neurons,
            });
        }
        Ok(self.row_at(neuron as usize))
    }

    #[inline]
    pub(crate) fn row_at(&self, neuron: usize) -> &[u32] {
        let start = neuron * self.row_pitch;
        &self.data[start..start + self.degrees[neuron] as usize]
    }

    /// Full padded storage, row-major.
    pub fn raw(&self) -> &[u32] {
        &self.data
    }

    /// Bytes held by the padded table.
    pub fn bytes(&self) -> usize {
        self.data.len() * std::mem::size_of::<u32>()
    }

    /// Checks every structural invariant of the padded table.
    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Dump(msg));
        if self.row_pitch < self.deg_max {
            return bad(format!("row pitch {} < deg_max {}", self.row_pitch, self.deg_max));
        }
        if self.data.len() != self.neurons * self.row_pitch {
            return bad("storage length does not match |N| * row_pitch".into());
        }
        for i in 0..self.neurons {
            let row = &self.data[i * self.row_pitch..(i + 1) * self.row_pitch];
            let deg = self.degrees[i] as usize;
            let (valid, pad) = row.split_at(deg);
            if valid.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("row {i} is not strictly increasing"));
            }
            if valid.iter().any(|&id| id as usize >= self.neurons) {
                return bad(format!("row {i} holds an id outside [0, {})", self.neurons));
            }
            if pad.iter().any(|&id| id != SENTINEL) {
                return bad(format!("row {i} has data after its padding starts"));
            }
        }
        Ok(())
    }

    /// Binary dump: `|N|`, `row_pitch`, `deg_max` as little-endian `u64`,
    /// the sentinel as `u32`, then the padded table as `u32`s, row-major.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(&(self.neurons as u64).to_le_bytes())?;
        w.write_all(&(self.row_pitch as u64).to_le_bytes())?;
        w.write_all(&(self.deg_max as u64).to_le_bytes())?;
        w.write_all(&SENTINEL.to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.row_pitch * 4);
        for row in self.data.chunks(self.row_pitch.max(1)) {
            buf.clear();
            buf.extend(row.iter().flat_map(|v| v.to_le_bytes()));
            w.write_all(&buf)?;
        }
        Ok(())
    }

    /// Reads a dump written by [`write_to`](Self::write_to) and checks it.
    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let io = |e: std::io::Error| Error::Dump(e.to_string());
        let mut word = [0u8; 8];
        let mut header = [0u64; 3];
        for h in header.iter_mut() {
            r.read_exact(&mut word).map_err(io)?;
            *h = u64::from_le_bytes(word);
        }
        let [neurons, pitch, deg_max] = header.map(|v| v as usize);
        let mut half = [0u8; 4];
        r.read_exact(&mut half).map_err(io)?;
        let sentinel = u32::from_le_bytes(half);
        if sentinel != SENTINEL {
            return Err(Error::Dump(format!("unsupported sentinel {sentinel:#x}")));
        }
        let len = neurons
            .checked_mul(pitch)
            .ok_or_else(|| Error::Dump("table size overflows".into()))?;
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes).map_err(io)?;
        if bytes.len() != len * 4 {
            return Err(Error::Dump(format!(
                "expected {} data bytes, found {}",
                len * 4,
                bytes.len()
            )));
        }
        let data: Vec<u32> = bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        let degrees = (0..neurons)
            .map(|i| {
                let row = &data[i * pitch..(i + 1) * pitch];
                row.iter().position(|&v| v == SENTINEL).unwrap_or(pitch) as u32
            })
            .collect();
        let list = Self::from_parts(neurons, pitch, degrees, data);
        if list.deg_max != deg_max {
            return Err(Error::Dump(format!(
                "header deg_max {deg_max} disagrees with data ({})",
                list.deg_max
            )));
        }
        list.check()?;
        Ok(list)
    }
}
