//! Transport-based dataset reweighing on the boolean hypercube.
//!
//! Everything here works over `{0,1}^d` with the Hamming metric. The crate
//! estimates 1-Wasserstein distances by greedy matching, checks those
//! estimates against an exact min-cost-flow oracle, and uses the transport
//! plan to tilt a source distribution toward a target distribution.
//!
//! The main entry points, roughly bottom-up:
//!
//! * [`hypercube`]: bit-packed points, Hamming distance, dataset files.
//! * [`distribution`]: weighted distributions, normalization, integer
//!   scaling, and the spread statistic.
//! * [`greedy`]: globally-shortest-edge matching, both on explicit unit
//!   multisets and on capacitated (weighted) point sets.
//! * [`exact`]: exact minimum-cost matching and exact 1-Wasserstein via
//!   successive shortest paths.
//! * [`covering`]: greedy covers and packings, used as cluster diagnostics.
//! * [`analysis`]: alternating-cycle decomposition of greedy vs optimal
//!   matchings and the derived approximation-ratio bounds.
//! * [`generators`]: clustered and greedy-hostile instance families.
//! * [`sampler`]: seeded subsampling and concentration experiments.
//! * [`reduce`]: the greedy reweighing step and the scaled greedy
//!   1-Wasserstein estimate.
//! * [`pipeline`]: the end-to-end reweigh run plus its report.
//!
//! Run `cargo run --example reweigh_basic` for a guided tour.

pub mod analysis;
pub mod covering;
pub mod distribution;
pub mod exact;
pub mod generators;
pub mod greedy;
pub mod hypercube;
pub mod pipeline;
pub mod reduce;
pub mod sampler;

mod util;

use thiserror::Error;

/// Unified error type for the whole crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Two points or datasets live in hypercubes of different dimension.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// Text could not be parsed as a point, record, or dataset.
    #[error("parse error: {0}")]
    Parse(String),

    /// A value violates a documented precondition.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Weights summed to zero, so no distribution can be formed.
    #[error("all weights are zero after {context}")]
    AllZero { context: String },

    /// An instance exceeds the configured size cap for exact solves.
    #[error("instance too large for exact solve: {size} units exceeds cap {cap}")]
    SizeCap { size: usize, cap: usize },

    /// A generator could not satisfy its separation constraints.
    #[error("generator gave up: {0}")]
    Generator(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
