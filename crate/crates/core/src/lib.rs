//! Wall detection from quadcopter IMU telemetry.
//!
//! A quadcopter hovering next to a wall experiences an asymmetric
//! ground-effect-like disturbance: rotor downwash reflects off the wall and
//! perturbs the vehicle's attitude. This crate implements the full detection
//! pipeline on top of that signal:
//!
//! - [`model`] — domain types (telemetry samples, flight logs, labels) and
//!   validation.
//! - [`ingest`] — flight-log file parsing and corpus manifests.
//! - [`simulate`] — a seeded synthetic flight generator with a configurable
//!   wall-disturbance model, used to build desk-scale corpora.
//! - [`features`] — the 18-feature sliding-window extractor (per-channel
//!   mean/std/MAD, average gyro resultant, and two attitude-derived angles).
//! - [`classify`] — KNN, random forest, and gradient boosting built from
//!   first principles with a uniform train/predict/serialize interface.
//! - [`eval`] — the four-experiment evaluation harness (repeated 80/20
//!   splits, accuracy aggregation, confusion matrices, reports).
//! - [`pipeline`] — end-to-end reproduction runs wiring all of the above.
//!
//! Everything downstream of a seed is deterministic: the same seeds produce
//! byte-identical corpora, feature files, models, and reports, regardless of
//! thread scheduling.

pub mod classify;
pub mod eval;
pub mod features;
pub mod ingest;
pub mod model;
pub mod pipeline;
pub mod seeds;
pub mod simulate;

mod parallel;

pub use classify::{load_model, save_model, ModelKind, ModelSpec, TrainedModel};
pub use eval::{
    run_experiment, run_suite, ExperimentId, ExperimentReport, ExperimentSpec, SplitMode,
};
pub use features::{extract_features, FeatureVector, FEATURE_NAMES};
pub use ingest::{load_corpus, parse_flight_log, CorpusManifest};
pub use model::{Dataset, FlightLog, ImuSample, WallLabel};
pub use simulate::{generate_corpus, simulate_flight, SimConfig};

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed flight-log or feature file content.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A flight log violated a structural invariant.
    #[error("invalid flight log {flight_id}: {message}")]
    InvalidLog { flight_id: String, message: String },

    /// Bad simulator or experiment configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Training preconditions not met (empty set, k > n, single class, ...).
    #[error("training error: {0}")]
    Train(String),

    /// Prediction-time contract violation.
    #[error("predict error: {0}")]
    Predict(String),

    /// A requested class has no examples, or labels are inconsistent.
    #[error("experiment error: {0}")]
    Experiment(String),

    /// Model (de)serialization failure.
    #[error("model format error: {0}")]
    ModelFormat(String),

    #[error("i/o error{}: {source}", path.as_ref().map(|p| format!(" on {p}")).unwrap_or_default())]
    Io {
        path: Option<String>,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: Some(path.into()),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
