use thiserror::Error;

/// Errors shared across the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid specification: {0}")]
    Spec(String),

    #[error("rate-infeasible point pair: ({t0}, {v0}) -> ({t1}, {v1}) exceeds max_rate {max_rate}")]
    RateInfeasible {
        t0: f64,
        v0: f64,
        t1: f64,
        v1: f64,
        max_rate: f64,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("solver capacity exceeded: {0}")]
    Capacity(String),

    #[error("solver '{solver}' failed on sub-problem {plan}: {source}")]
    SubProblem {
        solver: String,
        plan: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("transport error: {0}")]
    Transport(String),

    #[error("integrity error: sample {index} reports energy {reported} but local evaluation gives {local}")]
    Integrity {
        index: usize,
        reported: f64,
        local: f64,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
