//! Two-step graph construction.
//!
//! [`plan_jobs`] turns a network description into a list of independent
//! jobs `(n, [a, b), o)`: "write `n` sorted uniform integers from `[a, b)`
//! at offset `o`". [`expand_jobs`] runs them, in parallel, each job with its
//! own random stream, so the result does not depend on scheduling.

use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use super::sorted::{Quantize, SortedRandom};
use super::{row_pitch, AdjacencyList, SENTINEL};
use crate::error::{Error, Result};
use crate::network::NetworkDesc;
use crate::rng::{self, Domain};

/// Rows are padded to a multiple of this many entries by default.
pub const DEFAULT_ROW_ALIGN: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstructionJob {
    /// Number of targets to draw.
    pub count: u32,
    /// Target interval `[start, end)`.
    pub start: u32,
    pub end: u32,
    /// Write position in the padded table.
    pub offset: usize,
}

#[derive(Clone, Debug)]
pub struct JobPlan {
    pub neurons: usize,
    pub row_pitch: usize,
    pub deg_max: usize,
    /// Out-degree of every neuron.
    pub degrees: Vec<u32>,
    pub jobs: Vec<ConstructionJob>,
    /// Master seed. Job `j` draws from its own stream derived from it.
    pub seed: u64,
}

impl JobPlan {
    /// Plan from explicit jobs. Degrees are the per-row sums of job counts.
    pub fn from_jobs(neurons: usize, row_pitch: usize, jobs: Vec<ConstructionJob>, seed: u64) -> Self {
        let mut degrees = vec![0u32; neurons];
        for j in &jobs {
            if let Some(d) = j.offset.checked_div(row_pitch).and_then(|r| degrees.get_mut(r)) {
                *d += j.count;
            }
        }
        JobPlan {
            neurons,
            row_pitch,
            deg_max: degrees.iter().copied().max().unwrap_or(0) as usize,
            degrees,
            jobs,
            seed,
        }
    }

    pub fn synapses(&self) -> u64 {
        self.degrees.iter().map(|&d| d as u64).sum()
    }
}

/// Samples every neuron's out-degree toward each target population and lays
/// the resulting jobs out row by row.
///
/// The degree toward a population of size `m` connected with probability
/// `p` is drawn from Binomial(m, p), which together with uniformly chosen
/// targets yields independent Bernoulli edges.
pub fn plan_jobs(desc: &NetworkDesc, seed: u64, align: usize) -> Result<JobPlan> {
    let neurons = desc.neurons();
    let ranges: Vec<_> = (0..desc.populations.len())
        .map(|p| desc.global_id_range(p))
        .collect::<Result<_>>()?;
    let samplers: Vec<Binomial> = desc
        .connections
        .iter()
        .map(|c| {
            Binomial::new(desc.populations[c.to] as u64, c.probability)
                .map_err(|e| Error::Param(format!("connection {} -> {}: {e}", c.from, c.to)))
        })
        .collect::<Result<_>>()?;

    // (count, connection) per neuron, connections in declaration order.
    let counts: Vec<Vec<(u32, usize)>> = (0..neurons as u32)
        .into_par_iter()
        .map(|id| {
            let pop = desc.population_of(id).expect("id within |N|");
            let mut rng = rng::stream(seed, Domain::Degree, id as u64, 0);
            desc.connections
                .iter()
                .enumerate()
                .filter(|(_, c)| c.from == pop)
                .map(|(ci, _)| (samplers[ci].sample(&mut rng) as u32, ci))
                .collect()
        })
        .collect();

    let degrees: Vec<u32> = counts.iter().map(|c| c.iter().map(|x| x.0).sum()).collect();
    let deg_max = degrees.iter().copied().max().unwrap_or(0) as usize;
    let pitch = row_pitch(deg_max, align);

    let mut jobs = Vec::with_capacity(counts.iter().map(Vec::len).sum());
    for (id, row) in counts.iter().enumerate() {
        let mut offset = id * pitch;
        for &(count, ci) in row {
            let target = &ranges[desc.connections[ci].to];
            jobs.push(ConstructionJob {
                count,
                start: target.start,
                end: target.end,
                offset,
            });
            offset += count as usize;
        }
        debug_assert!(offset <= (id + 1) * pitch);
    }

    Ok(JobPlan {
        neurons,
        row_pitch: pitch,
        deg_max,
        degrees,
        jobs,
        seed,
    })
}

/// Runs every job of `plan` and sorts each row.
///
/// Jobs must stay inside their row and must not overlap. Rows whose jobs
/// draw from disjoint intervals are duplicate-free.
pub fn expand_jobs(plan: &JobPlan, quantize: Quantize) -> Result<AdjacencyList> {
    let pitch = plan.row_pitch;
    let mut order: Vec<usize> = (0..plan.jobs.len()).collect();
    order.sort_by_key(|&j| plan.jobs[j].offset);

    let mut end_of_previous = 0usize;
    for &j in &order {
        let job = &plan.jobs[j];
        if job.start >= job.end || job.end as usize > plan.neurons {
            return Err(Error::Config(format!(
                "job {j}: target interval [{}, {}) invalid for {} neurons",
                job.start, job.end, plan.neurons
            )));
        }
        if job.count > job.end - job.start {
            return Err(Error::SampleRange {
                n: job.count as u64,
                a: job.start,
                b: job.end,
            });
        }
        if job.count == 0 {
            continue;
        }
        let row = job.offset / pitch.max(1);
        let end = job.offset + job.count as usize;
        if pitch == 0 || row >= plan.neurons || end > (row + 1) * pitch || job.offset < end_of_previous {
            return Err(Error::OffsetCollision { job: j });
        }
        end_of_previous = end;
    }

    if pitch == 0 {
        return Ok(AdjacencyList::empty(plan.neurons));
    }

    let mut data = vec![SENTINEL; plan.neurons * pitch];
    let mut degrees = vec![0u32; plan.neurons];
    // First job (in offset order) of every row.
    let first: Vec<usize> = (0..=plan.neurons)
        .map(|r| order.partition_point(|&j| plan.jobs[j].offset < r * pitch))
        .collect();

    data.par_chunks_mut(pitch)
        .zip(degrees.par_iter_mut())
        .enumerate()
        .for_each_init(
            || SortedRandom::<f32>::new(quantize),
            |gen, (r, (row, degree))| {
                let jobs = &order[first[r]..first[r + 1]];
                for &j in jobs {
                    let job = &plan.jobs[j];
                    let at = job.offset - r * pitch;
                    let out = &mut row[at..at + job.count as usize];
                    let mut rng = rng::stream(plan.seed, Domain::Job, j as u64, 0);
                    gen.fill(job.start, job.end, &mut rng, out)
                        .expect("job validated above");
                }
                // Gaps between jobs are allowed; move valid ids to the front.
                row.sort_unstable();
                *degree = row.iter().position(|&v| v == SENTINEL).unwrap_or(pitch) as u32;
            },
        );

    Ok(AdjacencyList::from_parts(plan.neurons, pitch, degrees, data))
}
