//! Domain types shared by the whole pipeline: wall-position labels, raw
//! telemetry samples, per-flight logs, and the windowed feature dataset.
//!
//! All types are plain immutable data and safe to share across threads.
//! Angles are kept in the units the flight controller logs them in (degrees,
//! degrees/second); trigonometric feature code converts to radians at the
//! point of use.

use crate::features::FeatureVector;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Position of the wall relative to the drone during a flight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WallLabel {
    Left,
    Right,
    Front,
    NoWall,
}

/// Collapsed two-class view of [`WallLabel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryLabel {
    Wall,
    NoWall,
}

impl WallLabel {
    /// All four labels in canonical order. This order is also the tie-break
    /// order used by the classifiers.
    pub const ALL: [WallLabel; 4] = [
        WallLabel::Left,
        WallLabel::Right,
        WallLabel::Front,
        WallLabel::NoWall,
    ];

    /// Canonical text token, bijective with [`WallLabel::decode`].
    pub fn encode(self) -> &'static str {
        match self {
            WallLabel::Left => "left",
            WallLabel::Right => "right",
            WallLabel::Front => "front",
            WallLabel::NoWall => "nowall",
        }
    }

    /// Parse a text token produced by [`WallLabel::encode`].
    pub fn decode(token: &str) -> Option<WallLabel> {
        match token {
            "left" => Some(WallLabel::Left),
            "right" => Some(WallLabel::Right),
            "front" => Some(WallLabel::Front),
            "nowall" => Some(WallLabel::NoWall),
            _ => None,
        }
    }

    /// Two-class view: any wall side collapses to `Wall`.
    pub fn binary(self) -> BinaryLabel {
        match self {
            WallLabel::NoWall => BinaryLabel::NoWall,
            _ => BinaryLabel::Wall,
        }
    }
}

impl fmt::Display for WallLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.encode())
    }
}

impl FromStr for WallLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        WallLabel::decode(s).ok_or_else(|| format!("unknown wall label {s:?}"))
    }
}

/// One telemetry row, logged at a nominal 100 Hz.
///
/// Gyro rates are in degrees/second, attitude angles in degrees,
/// accelerations in g, positions in meters. `yaw`, the accelerometer,
/// position, and pressure channels are retained for ingestion fidelity but
/// the feature extractor only reads the three gyro axes plus roll and pitch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImuSample {
    /// Seconds since flight start. Finite, non-negative, strictly increasing
    /// within a log.
    pub t: f64,
    pub gyro_x: f64,
    pub gyro_y: f64,
    pub gyro_z: f64,
    pub acc_x: f64,
    pub acc_y: f64,
    pub acc_z: f64,
    /// Roll angle, degrees. Hover regime keeps it inside (-90, 90).
    pub roll: f64,
    /// Pitch angle, degrees. Hover regime keeps it inside (-90, 90).
    pub pitch: f64,
    pub yaw: f64,
    pub pos_x: f64,
    pub pos_y: f64,
    pub pos_z: f64,
    pub pressure: f64,
}

/// Ordered telemetry from one flight, with its wall-position label.
#[derive(Debug, Clone, PartialEq)]
pub struct FlightLog {
    pub samples: Vec<ImuSample>,
    pub label: WallLabel,
    pub flight_id: String,
    /// Nominal logging rate; the window length is one second of samples.
    pub sample_rate_hz: f64,
}

impl FlightLog {
    /// Window length for this log: one second of samples.
    pub fn window_len(&self) -> usize {
        self.sample_rate_hz.round() as usize
    }
}

/// One violation found by [`validate_flight_log`]. Violations are data, not
/// failures: a report is a list of them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// Index of the offending sample, if the rule is sample-local.
    pub sample_index: Option<usize>,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sample_index {
            Some(i) => write!(f, "{} at index {}", self.rule, i),
            None => f.write_str(&self.rule),
        }
    }
}

/// Check every structural invariant of a flight log and report violations.
///
/// Rules checked:
/// - `t` finite and non-negative on every sample;
/// - `t` strictly increasing;
/// - roll and pitch inside the open (-90, 90) degree hover envelope;
/// - at least one full window of samples;
/// - mean inter-sample gap within ±20% of the nominal period (timing is
///   advisory: logs are never resampled, just flagged).
pub fn validate_flight_log(log: &FlightLog) -> Vec<Violation> {
    let mut report = Vec::new();
    let mut prev_t: Option<f64> = None;
    for (i, s) in log.samples.iter().enumerate() {
        if !s.t.is_finite() {
            report.push(Violation {
                sample_index: Some(i),
                rule: "non-finite t".into(),
            });
        } else if s.t < 0.0 {
            report.push(Violation {
                sample_index: Some(i),
                rule: "negative t".into(),
            });
        }
        if let Some(p) = prev_t {
            if !(s.t > p) {
                report.push(Violation {
                    sample_index: Some(i),
                    rule: "non-monotonic t".into(),
                });
            }
        }
        prev_t = Some(s.t);
        if !(s.roll > -90.0 && s.roll < 90.0) {
            report.push(Violation {
                sample_index: Some(i),
                rule: format!("roll {} outside (-90, 90)", s.roll),
            });
        }
        if !(s.pitch > -90.0 && s.pitch < 90.0) {
            report.push(Violation {
                sample_index: Some(i),
                rule: format!("pitch {} outside (-90, 90)", s.pitch),
            });
        }
    }
    let window = log.window_len();
    if log.samples.len() < window {
        report.push(Violation {
            sample_index: None,
            rule: format!(
                "too short for one window ({} samples, need {window})",
                log.samples.len()
            ),
        });
    }
    if log.samples.len() >= 2 {
        let n = log.samples.len();
        let span = log.samples[n - 1].t - log.samples[0].t;
        let mean_gap = span / (n - 1) as f64;
        let nominal = 1.0 / log.sample_rate_hz;
        if span.is_finite() && (mean_gap < 0.8 * nominal || mean_gap > 1.2 * nominal) {
            report.push(Violation {
                sample_index: None,
                rule: format!(
                    "mean inter-sample gap {mean_gap:.6} s outside ±20% of nominal {nominal:.6} s"
                ),
            });
        }
    }
    report
}

/// One extracted window: its features plus provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRow {
    pub features: FeatureVector,
    pub label: WallLabel,
    pub flight_id: String,
    pub window_start: usize,
}

/// The windowed feature table the classifiers and experiments consume.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub rows: Vec<DatasetRow>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Count of rows per label, in canonical label order.
    pub fn class_counts(&self) -> [(WallLabel, usize); 4] {
        let mut counts = WallLabel::ALL.map(|l| (l, 0usize));
        for row in &self.rows {
            for c in counts.iter_mut() {
                if c.0 == row.label {
                    c.1 += 1;
                }
            }
        }
        counts
    }

    /// Check the dataset invariants: every feature finite and no duplicate
    /// (flight_id, window_start) pair.
    pub fn validate(&self) -> crate::Result<()> {
        let mut seen = std::collections::HashSet::with_capacity(self.rows.len());
        for row in &self.rows {
            if !row.features.as_array().iter().all(|v| v.is_finite()) {
                return Err(crate::Error::Experiment(format!(
                    "non-finite feature in flight {} window {}",
                    row.flight_id, row.window_start
                )));
            }
            if !seen.insert((row.flight_id.as_str(), row.window_start)) {
                return Err(crate::Error::Experiment(format!(
                    "duplicate row for flight {} window {}",
                    row.flight_id, row.window_start
                )));
            }
        }
        Ok(())
    }
}
