//! Scaling constant, spike recording, firing rates and memory accounting.

mod memory;
mod raster;
mod rate;

pub use memory::{memory_estimate, Category, MemoryBreakdown};
pub use raster::SpikeRaster;
pub use rate::{firing_rate, rate_retention, RateMeter, RetentionBand};

use crate::error::{Error, Result};
use crate::models::ModelKind;

/// Weight multiplier that keeps a benchmark model's activity comparable
/// across network sizes. Exactly 1 at the sizes the models were tuned for
/// (4000 neurons for Vogels, 20000 for Brunel).
pub fn scaling_constant(kind: ModelKind, neurons: usize) -> Result<f64> {
    if neurons == 0 {
        return Err(Error::Config("network has no neurons".into()));
    }
    let n = neurons as f64;
    match kind {
        ModelKind::Vogels => Ok(16_000_000.0 / (n * n)),
        ModelKind::Brunel | ModelKind::BrunelPlus => Ok(20_000.0 / n),
        ModelKind::PingPong => Err(Error::UnknownModel(format!("{kind} has no scaling constant"))),
    }
}
