//! Synthetic flight generator.
//!
//! The unpublished flight dataset is replaced by a seeded simulator built
//! around the artificial-ground-effect hypothesis: downwash reflecting off a
//! nearby wall produces a one-sided, oscillatory disturbance of the vehicle
//! pose. A wall to the left or right drives the roll axis (with opposite
//! mean sign), a wall to the front drives the pitch axis, and 10% of the
//! dominant-axis disturbance bleeds onto the other axis so side-vs-side is
//! harder than wall-vs-no-wall.
//!
//! Per axis the disturbance is a sinusoid at `disturbance_freq_hz` with a
//! per-flight random phase plus band-limited noise, with amplitude scaled by
//! the inverse wall distance. A constant-sign attitude nudge
//! (`attitude_gain`) encodes which side the wall is on. Roll and pitch are
//! integrated from the disturbed gyro rates with a proportional stabilizer
//! pull toward level, so rate and attitude channels stay consistent.
//!
//! Base sensor noise is white gyro jitter plus a fixed-fraction frame
//! vibration tone (rotor/frame resonance) with a per-flight random phase on
//! each axis. The tone is label-independent; it is what keeps window
//! features from being trivially matchable across overlapping windows.
//!
//! Determinism: every flight's noise stream derives from
//! `(config seed, flight id)`, so corpora are byte-identical across runs and
//! generation order.

use crate::ingest::{render_flight_log, CorpusManifest, ManifestEntry};
use crate::model::{FlightLog, ImuSample, WallLabel};
use crate::seeds;
use crate::{Error, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::path::Path;

/// Wall distance over the course of a flight, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DistanceProfile {
    /// Fly parallel to the wall at a fixed distance.
    Constant { meters: f64 },
    /// Linear drift from `start_m` to `end_m` over the flight.
    Linear { start_m: f64, end_m: f64 },
}

impl DistanceProfile {
    fn at(&self, t: f64, duration_s: f64) -> f64 {
        match *self {
            DistanceProfile::Constant { meters } => meters,
            DistanceProfile::Linear { start_m, end_m } => {
                let frac = (t / duration_s).clamp(0.0, 1.0);
                start_m + (end_m - start_m) * frac
            }
        }
    }

    fn min_value(&self) -> f64 {
        match *self {
            DistanceProfile::Constant { meters } => meters,
            DistanceProfile::Linear { start_m, end_m } => start_m.min(end_m),
        }
    }
}

/// Simulator configuration. The shipped defaults are calibrated so the
/// evaluation suite on the generated corpus reproduces the qualitative
/// accuracy structure of the real flights (see the acceptance tests).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Seconds per flight.
    pub duration_s: f64,
    /// Samples per second.
    pub sample_rate_hz: f64,
    /// Total std of the wall-independent gyro noise, degrees/second.
    pub base_noise_std: f64,
    /// Wall-induced oscillation amplitude at one meter, degrees/second.
    pub disturbance_amp: f64,
    /// Dominant oscillation frequency of the wall disturbance, Hz.
    pub disturbance_freq_hz: f64,
    /// Degrees of steady attitude bias per degree/second of disturbance
    /// amplitude; its sign encodes the wall side.
    pub attitude_gain: f64,
    /// Wall distance over time.
    pub distance_profile: DistanceProfile,
    /// Master seed for the whole corpus.
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            duration_s: 30.0,
            sample_rate_hz: 100.0,
            base_noise_std: 6.0,
            disturbance_amp: 0.9,
            disturbance_freq_hz: 2.0,
            attitude_gain: 0.035,
            distance_profile: DistanceProfile::Constant { meters: 0.1 },
            seed: 42,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate_hz > 0.0) {
            return Err(Error::Config(format!(
                "sample_rate_hz must be positive, got {}",
                self.sample_rate_hz
            )));
        }
        if !(self.duration_s >= 1.0) {
            return Err(Error::Config(format!(
                "duration_s must be at least 1 (one window), got {}",
                self.duration_s
            )));
        }
        for (name, v) in [
            ("base_noise_std", self.base_noise_std),
            ("disturbance_amp", self.disturbance_amp),
            ("disturbance_freq_hz", self.disturbance_freq_hz),
            ("attitude_gain", self.attitude_gain),
            ("distance", self.distance_profile.min_value()),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be non-negative, got {v}")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn from_json(content: &str) -> Result<Self> {
        let cfg: SimConfig = serde_json::from_str(content)
            .map_err(|e| Error::Config(format!("bad sim config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

// Fixed model constants (not part of the configurable surface).
/// Proportional stabilizer pull toward level, 1/s.
const STABILIZER_PULL_HZ: f64 = 2.0;
/// Fraction of base-noise variance carried by the frame-vibration tone.
const VIBRATION_FRACTION: f64 = 0.85;
/// Frame-vibration frequency, Hz. Deliberately incommensurate with the
/// one-second window so window means of the tone rotate in phase.
const VIBRATION_FREQ_HZ: f64 = 7.37;
/// Cross-axis bleed of the dominant-axis disturbance.
const CROSS_AXIS_BLEED: f64 = 0.1;
/// Band-limited noise share of the wall disturbance, relative to amplitude.
const DISTURBANCE_NOISE_SHARE: f64 = 0.5;
/// Distance floor for the 1/distance amplitude law, meters.
const MIN_DISTANCE_M: f64 = 0.05;
/// Nominal translation speed along the wall, m/s.
const FLIGHT_SPEED_MPS: f64 = 0.1;
/// Hover altitude, m.
const FLIGHT_ALTITUDE_M: f64 = 0.25;

/// Disturbance increments for one sample: additive terms for the gyro rates
/// (degrees/second) and the attitude integrator (degrees).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Disturbance {
    pub gyro_x: f64,
    pub gyro_y: f64,
    pub gyro_z: f64,
    pub roll: f64,
    pub pitch: f64,
}

/// Per-flight noise source. Constructed from `(cfg.seed, flight_id)`; the
/// draw sequence is identical for every label so streams stay aligned when
/// only the label changes.
pub struct DisturbanceSource {
    rng: ChaCha8Rng,
    phase_wall: f64,
    phase_bleed: f64,
    vib_phase: [f64; 3],
    band_wall: f64,
    band_bleed: f64,
    band_alpha: f64,
}

impl DisturbanceSource {
    pub fn for_flight(cfg: &SimConfig, flight_id: &str) -> Self {
        let seed = seeds::mix3(cfg.seed, seeds::SALT_FLIGHT, seeds::hash_str(flight_id));
        let mut rng = seeds::rng(seed);
        let phase_wall = rng.random_range(0.0..TAU);
        let phase_bleed = rng.random_range(0.0..TAU);
        let vib_phase = [
            rng.random_range(0.0..TAU),
            rng.random_range(0.0..TAU),
            rng.random_range(0.0..TAU),
        ];
        let dt = 1.0 / cfg.sample_rate_hz;
        DisturbanceSource {
            rng,
            phase_wall,
            phase_bleed,
            vib_phase,
            band_wall: 0.0,
            band_bleed: 0.0,
            band_alpha: (-TAU * cfg.disturbance_freq_hz * dt).exp(),
        }
    }

    fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Advance the two AR(1) band-noise states, keeping unit variance.
    fn step_bands(&mut self) {
        let a = self.band_alpha;
        let scale = (1.0 - a * a).max(0.0).sqrt();
        let w1 = self.normal();
        let w2 = self.normal();
        self.band_wall = a * self.band_wall + scale * w1;
        self.band_bleed = a * self.band_bleed + scale * w2;
    }
}

/// Wall-disturbance amplitude at time `t`, degrees/second: the configured
/// amplitude divided by the (floored) wall distance, so it never increases
/// with distance.
pub fn amplitude_at(cfg: &SimConfig, t: f64) -> f64 {
    cfg.disturbance_amp / cfg.distance_profile.at(t, cfg.duration_s).max(MIN_DISTANCE_M)
}

/// One sample of the wall-induced disturbance.
///
/// Left and right walls drive the roll axis with opposite sign; a front wall
/// drives the pitch axis; no wall contributes nothing. The source's draw
/// sequence advances identically for every label.
pub fn disturbance_at(
    label: WallLabel,
    t: f64,
    cfg: &SimConfig,
    src: &mut DisturbanceSource,
) -> Disturbance {
    src.step_bands();
    if label == WallLabel::NoWall {
        return Disturbance::default();
    }
    let amp = amplitude_at(cfg, t);
    let osc = TAU * cfg.disturbance_freq_hz * t;
    let main = amp * ((osc + src.phase_wall).sin() + DISTURBANCE_NOISE_SHARE * src.band_wall);
    let bleed = CROSS_AXIS_BLEED
        * amp
        * ((osc + src.phase_bleed).sin() + DISTURBANCE_NOISE_SHARE * src.band_bleed);
    let dt = 1.0 / cfg.sample_rate_hz;
    let nudge = cfg.attitude_gain * amp * dt;
    match label {
        WallLabel::Left | WallLabel::Right => {
            let side = if label == WallLabel::Left { 1.0 } else { -1.0 };
            Disturbance {
                gyro_x: side * main,
                gyro_y: bleed,
                gyro_z: 0.0,
                roll: side * nudge,
                pitch: CROSS_AXIS_BLEED * nudge,
            }
        }
        WallLabel::Front => Disturbance {
            gyro_x: bleed,
            gyro_y: main,
            gyro_z: 0.0,
            roll: CROSS_AXIS_BLEED * nudge,
            pitch: nudge,
        },
        WallLabel::NoWall => unreachable!(),
    }
}

/// Generate one labeled flight. Deterministic in
/// `(label, cfg, cfg.seed, flight_id)`; the sample count is exactly
/// `duration_s * sample_rate_hz` (rounded).
pub fn simulate_flight(label: WallLabel, cfg: &SimConfig, flight_id: &str) -> Result<FlightLog> {
    cfg.validate()?;
    let n = (cfg.duration_s * cfg.sample_rate_hz).round() as usize;
    let dt = 1.0 / cfg.sample_rate_hz;
    // The roll axis of a right-wall flight is the mirror image of the same
    // left-wall flight: the whole roll-axis noise stream carries the sign.
    let mirror = if label == WallLabel::Right { -1.0 } else { 1.0 };

    let white_std = cfg.base_noise_std * (1.0 - VIBRATION_FRACTION).sqrt();
    let vib_amp = cfg.base_noise_std * (2.0 * VIBRATION_FRACTION).sqrt();

    let mut src = DisturbanceSource::for_flight(cfg, flight_id);
    let vib_phase = src.vib_phase;

    let mut samples = Vec::with_capacity(n);
    let mut roll = 0.0f64;
    let mut pitch = 0.0f64;
    for k in 0..n {
        let t = k as f64 * dt;
        let dist = disturbance_at(label, t, cfg, &mut src);
        let vib = TAU * VIBRATION_FREQ_HZ * t;
        let base_x = white_std * src.normal() + vib_amp * (vib + vib_phase[0]).sin();
        let base_y = white_std * src.normal() + vib_amp * (vib + vib_phase[1]).sin();
        let base_z = white_std * src.normal() + vib_amp * (vib + vib_phase[2]).sin();

        let gyro_x = mirror * base_x + dist.gyro_x;
        let gyro_y = base_y + dist.gyro_y;
        let gyro_z = base_z;

        roll += dt * gyro_x - STABILIZER_PULL_HZ * dt * roll + dist.roll;
        pitch += dt * gyro_y - STABILIZER_PULL_HZ * dt * pitch + dist.pitch;

        let acc_x = 0.02 * src.normal();
        let acc_y = 0.02 * src.normal();
        let acc_z = 1.0 + 0.02 * src.normal();
        let yaw = 0.3 * src.normal();
        let pos_z = FLIGHT_ALTITUDE_M + 0.005 * src.normal();
        let pressure = 1013.25 + 0.05 * src.normal();
        let (pos_x, pos_y) = if label == WallLabel::Front {
            (0.0, FLIGHT_SPEED_MPS * t)
        } else {
            (FLIGHT_SPEED_MPS * t, 0.0)
        };
        samples.push(ImuSample {
            t,
            gyro_x,
            gyro_y,
            gyro_z,
            acc_x,
            acc_y,
            acc_z,
            roll,
            pitch,
            yaw,
            pos_x,
            pos_y,
            pos_z,
            pressure,
        });
    }
    Ok(FlightLog {
        samples,
        label,
        flight_id: flight_id.to_string(),
        sample_rate_hz: cfg.sample_rate_hz,
    })
}

/// Generate a labeled corpus on disk: `flights_per_class` flights for each
/// of the four labels, in the ingest file format, plus `manifest.json`.
/// On failure every file written so far is removed.
pub fn generate_corpus(
    cfg: &SimConfig,
    flights_per_class: usize,
    out_dir: &Path,
) -> Result<CorpusManifest> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir.display().to_string(), e))?;
    let mut written: Vec<std::path::PathBuf> = Vec::new();
    let mut entries = Vec::new();
    let result = (|| -> Result<()> {
        for label in WallLabel::ALL {
            for i in 0..flights_per_class {
                let flight_id = format!("{}-{i:02}", label.encode());
                let log = simulate_flight(label, cfg, &flight_id)?;
                let file_name = format!("{flight_id}.csv");
                let path = out_dir.join(&file_name);
                std::fs::write(&path, render_flight_log(&log))
                    .map_err(|e| Error::io(path.display().to_string(), e))?;
                written.push(path);
                entries.push(ManifestEntry {
                    path: file_name,
                    label,
                    flight_id,
                });
            }
        }
        Ok(())
    })();
    if let Err(e) = result {
        for path in &written {
            let _ = std::fs::remove_file(path);
        }
        return Err(e);
    }
    let manifest = CorpusManifest { entries };
    let manifest_path = out_dir.join("manifest.json");
    if let Err(e) = std::fs::write(&manifest_path, manifest.to_json()) {
        for path in &written {
            let _ = std::fs::remove_file(path);
        }
        return Err(Error::io(manifest_path.display().to_string(), e));
    }
    Ok(manifest)
}
