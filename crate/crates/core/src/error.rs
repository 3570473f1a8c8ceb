use thiserror::Error;

/// Errors produced by the optimization engines, the benchmark suite and the
/// metric/metaoptimization layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite fitness {value} for particle {particle} at {position:?}")]
    NonFiniteFitness {
        particle: usize,
        position: Vec<f64>,
        value: f64,
    },

    #[error("unknown anakatabatic model `{0}`")]
    UnknownModel(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("run on problem {problem} aborted: {source}")]
    InnerRun {
        problem: String,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
