//! Sliding-window feature extraction.
//!
//! A flight log is cut into one-second windows (100 samples at the nominal
//! rate) advancing one sample at a time. Each window becomes 18 features:
//!
//! - mean, sample standard deviation, and mean absolute deviation of the
//!   three gyro axes plus roll and pitch (15 features, raw logged units);
//! - the window-averaged Euclidean norm of the gyro vector
//!   (`average_resultant`);
//! - two attitude-derived angles, `theta` and `omega`, computed from the
//!   window-mean roll and pitch after converting degrees to radians.
//!
//! The extractor keeps rolling sums per channel so the stride-1 sweep does
//! not re-add 100 samples per window. Mean absolute deviation depends on the
//! current window mean, so it alone takes an O(window) pass.

use crate::model::{Dataset, DatasetRow, FlightLog, ImuSample};
use crate::{parallel, Error, Result};
use std::f64::consts::FRAC_PI_2;

/// The five channels the extractor reads, in feature order.
pub const CHANNEL_NAMES: [&str; 5] = ["gyro_x", "gyro_y", "gyro_z", "roll", "pitch"];

/// All 18 feature names in column order.
pub const FEATURE_NAMES: [&str; 18] = [
    "mean_gyro_x",
    "mean_gyro_y",
    "mean_gyro_z",
    "mean_roll",
    "mean_pitch",
    "std_gyro_x",
    "std_gyro_y",
    "std_gyro_z",
    "std_roll",
    "std_pitch",
    "mad_gyro_x",
    "mad_gyro_y",
    "mad_gyro_z",
    "mad_roll",
    "mad_pitch",
    "average_resultant",
    "theta",
    "omega",
];

/// The 18 per-window features.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    /// Per-channel arithmetic means, channel order as in [`CHANNEL_NAMES`].
    pub mean: [f64; 5],
    /// Per-channel sample standard deviations (divisor n-1).
    pub std: [f64; 5],
    /// Per-channel mean absolute deviations from the window mean.
    pub mad: [f64; 5],
    /// Window mean of per-sample sqrt(gx^2 + gy^2 + gz^2).
    pub average_resultant: f64,
    /// Wall-relation angle, radians in [0, pi/2].
    pub theta: f64,
    /// Cosine-ratio angle, radians in (0, pi/2) for in-envelope attitudes.
    pub omega: f64,
}

impl FeatureVector {
    pub fn as_array(&self) -> [f64; 18] {
        let mut out = [0.0; 18];
        out[..5].copy_from_slice(&self.mean);
        out[5..10].copy_from_slice(&self.std);
        out[10..15].copy_from_slice(&self.mad);
        out[15] = self.average_resultant;
        out[16] = self.theta;
        out[17] = self.omega;
        out
    }

    pub fn from_array(a: [f64; 18]) -> Self {
        FeatureVector {
            mean: [a[0], a[1], a[2], a[3], a[4]],
            std: [a[5], a[6], a[7], a[8], a[9]],
            mad: [a[10], a[11], a[12], a[13], a[14]],
            average_resultant: a[15],
            theta: a[16],
            omega: a[17],
        }
    }
}

/// A view over one window of consecutive samples within a single flight.
#[derive(Debug, Clone, Copy)]
pub struct Window<'a> {
    pub samples: &'a [ImuSample],
    pub flight_id: &'a str,
    pub start_index: usize,
}

/// Window-averaged roll and pitch, in radians, ready for the angle features.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSummary {
    /// Mean roll angle phi, radians.
    pub mean_phi: f64,
    /// Mean pitch angle psi, radians.
    pub mean_psi: f64,
}

/// The 16 statistical features of one window (everything except the angles).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowStats {
    pub mean: [f64; 5],
    pub std: [f64; 5],
    pub mad: [f64; 5],
    pub average_resultant: f64,
}

fn channel_value(s: &ImuSample, c: usize) -> f64 {
    match c {
        0 => s.gyro_x,
        1 => s.gyro_y,
        2 => s.gyro_z,
        3 => s.roll,
        _ => s.pitch,
    }
}

/// Cut a log into stride-1 windows. A log of n samples yields exactly
/// n - (window - 1) windows; trailing partial windows are never emitted.
pub fn sliding_windows(log: &FlightLog) -> Result<Vec<Window<'_>>> {
    let w = log.window_len();
    if w < 2 {
        return Err(Error::Config(format!(
            "sample rate {} gives a window of {} samples; need at least 2",
            log.sample_rate_hz, w
        )));
    }
    if log.samples.len() < w {
        return Err(Error::InvalidLog {
            flight_id: log.flight_id.clone(),
            message: format!(
                "too short for one window: {} samples, need {w}",
                log.samples.len()
            ),
        });
    }
    Ok((0..=log.samples.len() - w)
        .map(|i| Window {
            samples: &log.samples[i..i + w],
            flight_id: &log.flight_id,
            start_index: i,
        })
        .collect())
}

/// Direct (per-window) computation of the 16 statistical features.
///
/// Mean is the arithmetic mean, std the sample standard deviation with
/// divisor n-1, MAD the mean of absolute deviations from the window mean,
/// and the average resultant the mean per-sample gyro vector norm.
pub fn summarize_window(w: &Window<'_>) -> WindowStats {
    let n = w.samples.len() as f64;
    let mut mean = [0.0; 5];
    let mut std = [0.0; 5];
    let mut mad = [0.0; 5];
    for c in 0..5 {
        let mut sum = 0.0;
        for s in w.samples {
            sum += channel_value(s, c);
        }
        let m = sum / n;
        let mut dev_sq = 0.0;
        let mut dev_abs = 0.0;
        for s in w.samples {
            let d = channel_value(s, c) - m;
            dev_sq += d * d;
            dev_abs += d.abs();
        }
        mean[c] = m;
        std[c] = (dev_sq / (n - 1.0)).sqrt();
        mad[c] = dev_abs / n;
    }
    let mut norm_sum = 0.0;
    for s in w.samples {
        norm_sum += (s.gyro_x * s.gyro_x + s.gyro_y * s.gyro_y + s.gyro_z * s.gyro_z).sqrt();
    }
    WindowStats {
        mean,
        std,
        mad,
        average_resultant: norm_sum / n,
    }
}

/// Window-mean attitude in radians. Logged angles are degrees; this is the
/// single point where the angle features convert units.
pub fn window_summary(w: &Window<'_>) -> WindowSummary {
    let n = w.samples.len() as f64;
    let mut roll_sum = 0.0;
    let mut pitch_sum = 0.0;
    for s in w.samples {
        roll_sum += s.roll;
        pitch_sum += s.pitch;
    }
    WindowSummary {
        mean_phi: (roll_sum / n).to_radians(),
        mean_psi: (pitch_sum / n).to_radians(),
    }
}

/// Wall-relation angle: arctan(|sin psi| / |sin phi|), in [0, pi/2].
///
/// The roll and pitch unit vectors are summed and projected onto the xy
/// plane, leaving (sin psi, sin phi); the angle of that 2-D vector is theta.
/// Degenerate conventions are the limits of the formula: both sines zero
/// gives 0, a zero denominator alone gives pi/2.
pub fn wall_angle_theta(s: &WindowSummary) -> f64 {
    let num = s.mean_psi.sin().abs();
    let den = s.mean_phi.sin().abs();
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            FRAC_PI_2
        }
    } else {
        (num / den).atan()
    }
}

/// Cosine-ratio angle: arctan2(cos psi, cos phi).
///
/// The cosines are the z components of the roll and pitch unit vectors, so
/// the result encodes which attitude axis is tilted more. In-envelope
/// attitudes keep both cosines positive, putting omega in (0, pi/2).
pub fn cosine_angle_omega(s: &WindowSummary) -> f64 {
    s.mean_psi.cos().atan2(s.mean_phi.cos())
}

/// Full 18-feature vector for one window, computed directly. The batch
/// extractor below is the fast path; this one is the per-window reference.
pub fn window_features(w: &Window<'_>) -> FeatureVector {
    let stats = summarize_window(w);
    let summary = window_summary(w);
    FeatureVector {
        mean: stats.mean,
        std: stats.std,
        mad: stats.mad,
        average_resultant: stats.average_resultant,
        theta: wall_angle_theta(&summary),
        omega: cosine_angle_omega(&summary),
    }
}

/// Streaming per-flight extractor: rolling sums for mean/std/resultant, one
/// O(window) pass per step for MAD.
fn extract_flight(log: &FlightLog) -> Result<Vec<DatasetRow>> {
    let w = log.window_len();
    if log.samples.len() < w {
        return Err(Error::InvalidLog {
            flight_id: log.flight_id.clone(),
            message: format!(
                "too short for one window: {} samples, need {w}",
                log.samples.len()
            ),
        });
    }
    let n = log.samples.len();
    let wf = w as f64;

    // Column layout: channels[c][k], plus per-sample gyro norms.
    let mut channels: [Vec<f64>; 5] = Default::default();
    for (c, col) in channels.iter_mut().enumerate() {
        col.reserve(n);
        for s in &log.samples {
            col.push(channel_value(s, c));
        }
    }
    let norms: Vec<f64> = log
        .samples
        .iter()
        .map(|s| (s.gyro_x * s.gyro_x + s.gyro_y * s.gyro_y + s.gyro_z * s.gyro_z).sqrt())
        .collect();

    let mut sum = [0.0f64; 5];
    let mut sum_sq = [0.0f64; 5];
    let mut norm_sum = 0.0f64;
    for k in 0..w {
        for c in 0..5 {
            let v = channels[c][k];
            sum[c] += v;
            sum_sq[c] += v * v;
        }
        norm_sum += norms[k];
    }

    let mut rows = Vec::with_capacity(n - w + 1);
    for start in 0..=n - w {
        let mut mean = [0.0; 5];
        let mut std = [0.0; 5];
        let mut mad = [0.0; 5];
        for c in 0..5 {
            let m = sum[c] / wf;
            // Centered second moment from rolling sums; clamp tiny negative
            // round-off before the sqrt.
            let var = ((sum_sq[c] - sum[c] * sum[c] / wf) / (wf - 1.0)).max(0.0);
            let mut dev_abs = 0.0;
            for k in start..start + w {
                dev_abs += (channels[c][k] - m).abs();
            }
            mean[c] = m;
            std[c] = var.sqrt();
            mad[c] = dev_abs / wf;
        }
        let summary = WindowSummary {
            mean_phi: mean[3].to_radians(),
            mean_psi: mean[4].to_radians(),
        };
        rows.push(DatasetRow {
            features: FeatureVector {
                mean,
                std,
                mad,
                average_resultant: norm_sum / wf,
                theta: wall_angle_theta(&summary),
                omega: cosine_angle_omega(&summary),
            },
            label: log.label,
            flight_id: log.flight_id.clone(),
            window_start: start,
        });
        if start + w < n {
            for c in 0..5 {
                let out = channels[c][start];
                let inc = channels[c][start + w];
                sum[c] += inc - out;
                sum_sq[c] += inc * inc - out * out;
            }
            norm_sum += norms[start + w] - norms[start];
        }
    }
    Ok(rows)
}

/// Extract the feature dataset from a set of flight logs.
///
/// Flights are processed independently (in parallel when enabled) and rows
/// are ordered by flight id then window start, so output never depends on
/// input or scheduling order.
pub fn extract_features(logs: &[FlightLog]) -> Result<Dataset> {
    let per_flight = parallel::map_slice(logs, extract_flight);
    let mut rows = Vec::new();
    for flight_rows in per_flight {
        rows.extend(flight_rows?);
    }
    rows.sort_by(|a, b| {
        a.flight_id
            .cmp(&b.flight_id)
            .then(a.window_start.cmp(&b.window_start))
    });
    let dataset = Dataset { rows };
    dataset.validate()?;
    Ok(dataset)
}

/// Render a dataset to the feature-file format: a header line
/// `flight_id,start_index,label,<18 feature names>` followed by one row per
/// window at full float round-trip precision.
pub fn render_feature_file(dataset: &Dataset) -> Result<String> {
    let mut out = String::with_capacity(dataset.rows.len() * 200 + 256);
    out.push_str("flight_id,start_index,label");
    for name in FEATURE_NAMES {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for row in &dataset.rows {
        if row.flight_id.contains(',') || row.flight_id.contains('\n') {
            return Err(Error::Config(format!(
                "flight id {:?} contains a delimiter",
                row.flight_id
            )));
        }
        out.push_str(&row.flight_id);
        out.push(',');
        out.push_str(&row.window_start.to_string());
        out.push(',');
        out.push_str(row.label.encode());
        for v in row.features.as_array() {
            out.push(',');
            out.push_str(&format!("{v}"));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Parse a feature file produced by [`render_feature_file`].
pub fn parse_feature_file(content: &str) -> Result<Dataset> {
    let mut lines = content.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty feature file".into(),
    })?;
    let expected_header = {
        let mut h = String::from("flight_id,start_index,label");
        for name in FEATURE_NAMES {
            h.push(',');
            h.push_str(name);
        }
        h
    };
    if header.trim_end() != expected_header {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header {header:?}"),
        });
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 21 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 21 fields, found {}", fields.len()),
            });
        }
        let window_start: usize = fields[1].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad start_index {:?}", fields[1]),
        })?;
        let label = crate::model::WallLabel::decode(fields[2]).ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("bad label {:?}", fields[2]),
        })?;
        let mut values = [0.0f64; 18];
        for (j, v) in values.iter_mut().enumerate() {
            *v = fields[3 + j].parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("bad float in column {}", 4 + j),
            })?;
        }
        rows.push(DatasetRow {
            features: FeatureVector::from_array(values),
            label,
            flight_id: fields[0].to_string(),
            window_start,
        });
    }
    let dataset = Dataset { rows };
    dataset.validate()?;
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::WallLabel;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn constant_log(n: usize, gyro: (f64, f64, f64), roll: f64, pitch: f64) -> FlightLog {
        let samples = (0..n)
            .map(|k| ImuSample {
                t: k as f64 * 0.01,
                gyro_x: gyro.0,
                gyro_y: gyro.1,
                gyro_z: gyro.2,
                acc_x: 0.0,
                acc_y: 0.0,
                acc_z: 1.0,
                roll,
                pitch,
                yaw: 0.0,
                pos_x: 0.0,
                pos_y: 0.0,
                pos_z: 0.25,
                pressure: 1013.25,
            })
            .collect();
        FlightLog {
            samples,
            label: WallLabel::Left,
            flight_id: "const".into(),
            sample_rate_hz: 100.0,
        }
    }

    #[test]
    fn window_counts_match_geometry() {
        for (n, want) in [(100usize, 1usize), (101, 2), (1000, 901), (3000, 2901)] {
            let log = constant_log(n, (0.0, 0.0, 0.0), 0.0, 0.0);
            assert_eq!(sliding_windows(&log).unwrap().len(), want, "n = {n}");
        }
        let short = constant_log(99, (0.0, 0.0, 0.0), 0.0, 0.0);
        assert!(matches!(
            sliding_windows(&short),
            Err(Error::InvalidLog { .. })
        ));
    }

    #[test]
    fn constant_window_stats_are_exact() {
        // Pythagorean gyro triple: the resultant is exactly 5.
        let log = constant_log(100, (3.0, 4.0, 0.0), 4.0, 5.0);
        let windows = sliding_windows(&log).unwrap();
        let stats = summarize_window(&windows[0]);
        assert_eq!(stats.mean, [3.0, 4.0, 0.0, 4.0, 5.0]);
        assert_eq!(stats.std, [0.0; 5]);
        assert_eq!(stats.mad, [0.0; 5]);
        assert_eq!(stats.average_resultant, 5.0);
    }

    #[test]
    fn alternating_gyro_x_matches_closed_form() {
        // 50 samples at +1 and 50 at -1: mean 0, MAD 1, std sqrt(100/99).
        let mut log = constant_log(100, (0.0, 0.0, 0.0), 0.0, 0.0);
        for (k, s) in log.samples.iter_mut().enumerate() {
            s.gyro_x = if k % 2 == 0 { 1.0 } else { -1.0 };
        }
        let windows = sliding_windows(&log).unwrap();
        let stats = summarize_window(&windows[0]);
        assert!(stats.mean[0].abs() < 1e-15);
        assert!((stats.mad[0] - 1.0).abs() < 1e-15);
        let expected_std = (100.0f64 / 99.0).sqrt(); // 1.00504...
        assert!((stats.std[0] - expected_std).abs() < 1e-12);
        assert!((stats.std[0] - 1.00504).abs() < 1e-5);
    }

    #[test]
    fn theta_matches_hand_values() {
        // Equal attitude excitation lands exactly on pi/4.
        let s = WindowSummary {
            mean_phi: 0.3,
            mean_psi: 0.3,
        };
        assert!((wall_angle_theta(&s) - FRAC_PI_4).abs() < 1e-15);

        // Degenerate conventions.
        let roll_only = WindowSummary {
            mean_phi: 0.3,
            mean_psi: 0.0,
        };
        assert_eq!(wall_angle_theta(&roll_only), 0.0);
        let pitch_only = WindowSummary {
            mean_phi: 0.0,
            mean_psi: 0.3,
        };
        assert_eq!(wall_angle_theta(&pitch_only), FRAC_PI_2);
        let level = WindowSummary {
            mean_phi: 0.0,
            mean_psi: 0.0,
        };
        assert_eq!(wall_angle_theta(&level), 0.0);

        // phi = 30 deg, psi = 45 deg: atan(sin 45 / sin 30) = atan(sqrt 2).
        let s = WindowSummary {
            mean_phi: 30.0_f64.to_radians(),
            mean_psi: 45.0_f64.to_radians(),
        };
        let expected = (45.0_f64.to_radians().sin() / 30.0_f64.to_radians().sin()).atan();
        assert!((wall_angle_theta(&s) - expected).abs() < 1e-15);
        assert!((expected - 0.95532).abs() < 1e-5);
    }

    #[test]
    fn omega_matches_hand_values() {
        let equal = WindowSummary {
            mean_phi: 0.27,
            mean_psi: 0.27,
        };
        assert!((cosine_angle_omega(&equal) - FRAC_PI_4).abs() < 1e-15);
        let level = WindowSummary {
            mean_phi: 0.0,
            mean_psi: 0.0,
        };
        assert!((cosine_angle_omega(&level) - FRAC_PI_4).abs() < 1e-15);

        // phi = 60 deg, psi = 30 deg: atan2(cos 30, cos 60) = pi/3.
        let s = WindowSummary {
            mean_phi: 60.0_f64.to_radians(),
            mean_psi: 30.0_f64.to_radians(),
        };
        let expected = 30.0_f64.to_radians().cos().atan2(60.0_f64.to_radians().cos());
        assert!((cosine_angle_omega(&s) - expected).abs() < 1e-15);
        assert!((expected - 1.04720).abs() < 1e-5);
    }

    #[test]
    fn rolling_extractor_matches_direct_computation() {
        use rand::Rng;
        let mut rng = crate::seeds::rng(11);
        let mut log = constant_log(700, (0.0, 0.0, 0.0), 0.0, 0.0);
        for s in log.samples.iter_mut() {
            s.gyro_x = rng.random_range(-40.0..40.0);
            s.gyro_y = rng.random_range(-40.0..40.0);
            s.gyro_z = rng.random_range(-40.0..40.0);
            s.roll = rng.random_range(-10.0..10.0);
            s.pitch = rng.random_range(-10.0..10.0);
        }
        let dataset = extract_features(std::slice::from_ref(&log)).unwrap();
        let windows = sliding_windows(&log).unwrap();
        assert_eq!(dataset.rows.len(), windows.len());
        for (row, w) in dataset.rows.iter().zip(&windows) {
            let direct = window_features(w);
            for (a, b) in row.features.as_array().iter().zip(direct.as_array()) {
                assert!(
                    (a - b).abs() <= 1e-9 * (1.0 + b.abs()),
                    "rolling {a} vs direct {b}"
                );
            }
        }
    }

    #[test]
    fn extraction_row_counts_and_order() {
        let logs: Vec<FlightLog> = (0..5)
            .map(|i| {
                let mut log = constant_log(3000, (1.0, 2.0, 2.0), 1.0, -1.0);
                log.flight_id = format!("f{i}");
                log
            })
            .collect();
        let dataset = extract_features(&logs).unwrap();
        assert_eq!(dataset.rows.len(), 5 * 2901);

        // three paper-length no-wall flights land close to the reported count
        let dataset3 = extract_features(&logs[..3]).unwrap();
        assert_eq!(dataset3.rows.len(), 3 * 2901); // 8703, on the order of 8888

        // rows sorted by flight then start
        let mut prev: Option<(&str, usize)> = None;
        for row in &dataset.rows {
            let key = (row.flight_id.as_str(), row.window_start);
            if let Some(p) = prev {
                assert!(key > p);
            }
            prev = Some(key);
        }
    }

    #[test]
    fn appending_samples_keeps_existing_rows_bit_identical() {
        use rand::Rng;
        let mut rng = crate::seeds::rng(5);
        let mut log = constant_log(400, (0.0, 0.0, 0.0), 0.0, 0.0);
        for s in log.samples.iter_mut() {
            s.gyro_x = rng.random_range(-5.0..5.0);
            s.roll = rng.random_range(-3.0..3.0);
        }
        let before = extract_features(std::slice::from_ref(&log)).unwrap();
        let mut longer = log.clone();
        for k in 0..250 {
            let mut s = log.samples[k % 400];
            s.t = 4.0 + k as f64 * 0.01;
            longer.samples.push(s);
        }
        let after = extract_features(std::slice::from_ref(&longer)).unwrap();
        for (a, b) in before.rows.iter().zip(after.rows.iter()) {
            assert_eq!(a.features.as_array(), b.features.as_array());
        }
    }

    #[test]
    fn feature_file_round_trips() {
        let log = constant_log(120, (0.5, -0.25, 1.5), 2.0, -1.0);
        let dataset = extract_features(std::slice::from_ref(&log)).unwrap();
        let text = render_feature_file(&dataset).unwrap();
        let parsed = parse_feature_file(&text).unwrap();
        assert_eq!(dataset, parsed);
        let again = render_feature_file(&parsed).unwrap();
        assert_eq!(text, again);
    }

    #[test]
    fn feature_file_errors_name_the_line() {
        let log = constant_log(101, (0.0, 0.0, 0.0), 0.0, 0.0);
        let text = render_feature_file(&extract_features(std::slice::from_ref(&log)).unwrap())
            .unwrap();
        let mut lines: Vec<&str> = text.lines().collect();
        let broken = lines[2].rsplit_once(',').unwrap().0;
        lines[2] = broken;
        let joined = lines.join("\n");
        match parse_feature_file(&joined) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
