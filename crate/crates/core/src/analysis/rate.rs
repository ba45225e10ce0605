use std::ops::Range;

use crate::error::Result;
use crate::models::{BenchParams, ModelKind};

use super::SpikeRaster;

/// Average fraction of neurons spiking per step.
pub fn firing_rate(raster: &SpikeRaster, neurons: usize, steps: u64) -> f64 {
    assert!(steps > 0, "firing rate needs at least one step");
    if neurons == 0 {
        return 0.0;
    }
    raster.len() as f64 / (neurons as f64 * steps as f64)
}

/// Streaming firing-rate measurement over a subset of neurons, ignoring
/// a warm-up period. Feed it from the simulation tap.
#[derive(Clone, Debug)]
pub struct RateMeter {
    counted: Range<u32>,
    warmup: u64,
    spikes: u64,
    steps: u64,
}

impl RateMeter {
    pub fn new(counted: Range<u32>, warmup_steps: u64) -> Self {
        RateMeter {
            counted,
            warmup: warmup_steps,
            spikes: 0,
            steps: 0,
        }
    }

    pub fn record(&mut self, t: u64, frame: &[u32]) {
        if t < self.warmup {
            return;
        }
        self.steps += 1;
        self.spikes += frame.iter().filter(|id| self.counted.contains(id)).count() as u64;
    }

    pub fn spikes(&self) -> u64 {
        self.spikes
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Fraction of counted neurons spiking per measured step, 0 if nothing
    /// was measured.
    pub fn rate(&self) -> f64 {
        let n = self.counted.len() as f64 * self.steps as f64;
        if n == 0.0 {
            0.0
        } else {
            self.spikes as f64 / n
        }
    }
}

/// Accepted ratio between a rate and the reference rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RetentionBand {
    pub low: f64,
    pub high: f64,
}

impl RetentionBand {
    /// Band for `kind` from the `analysis.*` parameters.
    pub fn for_kind(kind: ModelKind, params: &BenchParams) -> Result<Self> {
        let prefix = match kind {
            ModelKind::Vogels => "analysis.vogels_band",
            _ => "analysis.brunel_band",
        };
        Ok(RetentionBand {
            low: params.get(&format!("{prefix}_low"))?,
            high: params.get(&format!("{prefix}_high"))?,
        })
    }

    pub fn contains(&self, rate: f64, original: f64) -> bool {
        original > 0.0 && (self.low..=self.high).contains(&(rate / original))
    }
}

/// Whether `rate` stays within the default band of `kind` around
/// `original`: [0.5, 2] for Vogels, [0.75, 1.25] for Brunel.
pub fn rate_retention(kind: ModelKind, rate: f64, original: f64) -> bool {
    RetentionBand::for_kind(kind, &BenchParams::default())
        .expect("shipped defaults define the bands")
        .contains(rate, original)
}
