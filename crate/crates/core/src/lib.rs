//! QUBO-based test-case generation for cyber-physical systems.
//!
//! The pipeline runs in three phases: generate bounded, rate-limited input
//! trajectories ([`trajectory`]); score every data point with effectiveness
//! and diversity metrics ([`metrics`]) and identify the most promising
//! points by minimizing a weighted QUBO ([`qubo`], [`solvers`],
//! [`decompose`]); then mutate the selected points and re-embed them
//! smoothly ([`mutate`]). Faulty plant variants ([`sut`]) and the campaign
//! runner ([`experiment`]) close the loop by measuring fault detection.
//! [`embed`] simulates minor-embedding onto an annealer topology to study
//! physical-qubit growth.
//!
//! See the `examples/` directory for one runnable walkthrough per
//! capability.

pub mod decompose;
pub mod embed;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod mutate;
pub mod qubo;
pub mod seed;
pub mod solvers;
pub mod sut;
pub mod trajectory;

pub use error::{Error, Result};
