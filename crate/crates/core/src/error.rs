use std::path::PathBuf;

use crate::network::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid network description: {0}")]
    Invalid(#[from] ValidationReport),

    #[error("population index {index} out of range ({count} populations)")]
    PopulationIndex { index: usize, count: usize },

    #[error("neuron id {id} out of range ({count} neurons)")]
    NeuronId { id: u32, count: usize },

    #[error("cannot draw {n} distinct values from [{a}, {b})")]
    SampleRange { n: u64, a: u32, b: u32 },

    #[error("construction job {job} overlaps another job or leaves its row")]
    OffsetCollision { job: usize },

    #[error("malformed adjacency dump: {0}")]
    Dump(String),

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
