//! Flight-log files and corpus manifests.
//!
//! One flight is one UTF-8 comma-delimited file with an explicit header:
//!
//! ```text
//! t,gyro_x,gyro_y,gyro_z,acc_x,acc_y,acc_z,roll,pitch,yaw,pos_x,pos_y,pos_z,pressure
//! ```
//!
//! Floats are written at full round-trip precision, so rendering a log and
//! re-parsing it reproduces the log exactly. Wall-position labels are never
//! embedded in the telemetry: they live in a corpus manifest (a JSON array of
//! `{path, label, flight_id}` objects), mirroring a per-wall-position file
//! organization.

use crate::model::{FlightLog, ImuSample, WallLabel};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Nominal logging rate assumed for ingested files. Timing is validated
/// against this but logs are never resampled.
pub const NOMINAL_SAMPLE_RATE_HZ: f64 = 100.0;

/// Column order of the flight-log file format.
pub const LOG_COLUMNS: [&str; 14] = [
    "t", "gyro_x", "gyro_y", "gyro_z", "acc_x", "acc_y", "acc_z", "roll", "pitch", "yaw",
    "pos_x", "pos_y", "pos_z", "pressure",
];

/// One manifest entry: where a flight's telemetry lives and how it is
/// labeled. `path` is relative to the manifest file's directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub label: WallLabel,
    pub flight_id: String,
}

/// The corpus manifest: the full list of flights in a dataset.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusManifest {
    pub entries: Vec<ManifestEntry>,
}

impl CorpusManifest {
    /// Flight ids must be unique; they key every downstream artifact.
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for e in &self.entries {
            if !seen.insert(e.flight_id.as_str()) {
                return Err(Error::Config(format!(
                    "duplicate flight_id {:?} in manifest",
                    e.flight_id
                )));
            }
        }
        Ok(())
    }

    /// Serialize as the manifest file format (a JSON array).
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.entries).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(content: &str) -> Result<Self> {
        let entries: Vec<ManifestEntry> = serde_json::from_str(content)
            .map_err(|e| Error::Config(format!("bad manifest: {e}")))?;
        let manifest = CorpusManifest { entries };
        manifest.validate()?;
        Ok(manifest)
    }
}

fn header_line() -> String {
    LOG_COLUMNS.join(",")
}

/// Parse one flight-log file.
///
/// The label and flight id come from the caller (i.e. the manifest), never
/// from file content. Errors carry 1-based line numbers. Timestamps must be
/// finite, non-negative, and strictly increasing; everything else about the
/// log (length, attitude envelope, timing drift) is reported by
/// [`crate::model::validate_flight_log`] rather than failing the parse.
pub fn parse_flight_log(content: &str, label: WallLabel, flight_id: &str) -> Result<FlightLog> {
    let mut lines = content.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    if header.trim_end() != header_line() {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header {header:?}"),
        });
    }
    let mut samples: Vec<ImuSample> = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut values = [0.0f64; 14];
        let mut count = 0;
        for field in line.split(',') {
            if count == 14 {
                count += 1;
                break;
            }
            values[count] = field.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("non-numeric field {:?} in column {}", field, count + 1),
            })?;
            count += 1;
        }
        if count != 14 {
            return Err(Error::Parse {
                line: line_no,
                message: format!(
                    "expected 14 columns, found {}",
                    if count > 14 { "more".to_string() } else { count.to_string() }
                ),
            });
        }
        let t = values[0];
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("bad timestamp {t}"),
            });
        }
        if let Some(prev) = samples.last() {
            if t <= prev.t {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("non-monotonic t: {} after {}", t, prev.t),
                });
            }
        }
        samples.push(ImuSample {
            t,
            gyro_x: values[1],
            gyro_y: values[2],
            gyro_z: values[3],
            acc_x: values[4],
            acc_y: values[5],
            acc_z: values[6],
            roll: values[7],
            pitch: values[8],
            yaw: values[9],
            pos_x: values[10],
            pos_y: values[11],
            pos_z: values[12],
            pressure: values[13],
        });
    }
    if samples.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "no samples".into(),
        });
    }
    Ok(FlightLog {
        samples,
        label,
        flight_id: flight_id.to_string(),
        sample_rate_hz: NOMINAL_SAMPLE_RATE_HZ,
    })
}

/// Render a flight log back to the file format at full precision.
pub fn render_flight_log(log: &FlightLog) -> String {
    let mut out = String::with_capacity(log.samples.len() * 120 + 128);
    out.push_str(&header_line());
    out.push('\n');
    for s in &log.samples {
        let row = [
            s.t, s.gyro_x, s.gyro_y, s.gyro_z, s.acc_x, s.acc_y, s.acc_z, s.roll, s.pitch,
            s.yaw, s.pos_x, s.pos_y, s.pos_z, s.pressure,
        ];
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("{v}"));
        }
        out.push('\n');
    }
    out
}

/// Load every flight named by a manifest. `base` anchors the manifest's
/// relative paths (normally the manifest file's directory). Labels are taken
/// from the manifest. The first flight that fails to read or parse aborts the
/// load, naming the flight.
pub fn load_corpus(manifest: &CorpusManifest, base: &Path) -> Result<Vec<FlightLog>> {
    manifest.validate()?;
    let mut logs = Vec::with_capacity(manifest.entries.len());
    for entry in &manifest.entries {
        let path: PathBuf = base.join(&entry.path);
        let content = std::fs::read_to_string(&path).map_err(|e| {
            Error::io(format!("{} (flight {})", path.display(), entry.flight_id), e)
        })?;
        let log = parse_flight_log(&content, entry.label, &entry.flight_id).map_err(|e| {
            match e {
                Error::Parse { line, message } => Error::Parse {
                    line,
                    message: format!("{message} (flight {}, {})", entry.flight_id, path.display()),
                },
                other => other,
            }
        })?;
        logs.push(log);
    }
    Ok(logs)
}

/// Read a manifest file and load its corpus.
pub fn load_corpus_from_path(manifest_path: &Path) -> Result<(CorpusManifest, Vec<FlightLog>)> {
    let content = std::fs::read_to_string(manifest_path)
        .map_err(|e| Error::io(manifest_path.display().to_string(), e))?;
    let manifest = CorpusManifest::from_json(&content)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let logs = load_corpus(&manifest, base)?;
    Ok((manifest, logs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const HEADER: &str =
        "t,gyro_x,gyro_y,gyro_z,acc_x,acc_y,acc_z,roll,pitch,yaw,pos_x,pos_y,pos_z,pressure";

    #[test]
    fn parses_small_well_formed_file() {
        let text = format!(
            "{HEADER}\n\
             0,1,2,3,0.1,0.2,1.0,4,5,0,0,0,0.25,1013\n\
             0.01,1.5,2.5,3.5,0.1,0.2,1.0,4.5,5.5,0,0.001,0,0.25,1013\n\
             0.02,-1,-2,-3,0.1,0.2,1.0,-4,-5,0,0.002,0,0.25,1013\n"
        );
        let log = parse_flight_log(&text, WallLabel::Front, "f1").unwrap();
        assert_eq!(log.samples.len(), 3);
        assert_eq!(log.label, WallLabel::Front);
        assert_eq!(log.flight_id, "f1");
        assert_eq!(log.samples[0].gyro_x, 1.0);
        assert_eq!(log.samples[1].roll, 4.5);
        assert_eq!(log.samples[2].pitch, -5.0);
        assert_eq!(log.samples[2].t, 0.02);
    }

    #[test]
    fn header_only_means_no_samples() {
        let err = parse_flight_log(&format!("{HEADER}\n"), WallLabel::Left, "f").unwrap_err();
        assert!(err.to_string().contains("no samples"));
    }

    #[test]
    fn short_row_names_the_line() {
        let text = format!(
            "{HEADER}\n\
             0,1,2,3,0.1,0.2,1.0,4,5,0,0,0,0.25,1013\n\
             0.01,1,2,3,0.1,0.2,1.0,4,5,0,0,0,0.25\n"
        );
        match parse_flight_log(&text, WallLabel::Left, "f") {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("14 columns"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_field_names_the_line() {
        let text = format!("{HEADER}\n0,1,2,x,0.1,0.2,1.0,4,5,0,0,0,0.25,1013\n");
        match parse_flight_log(&text, WallLabel::Left, "f") {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("non-numeric"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn non_monotonic_t_is_rejected() {
        let text = format!(
            "{HEADER}\n\
             0,0,0,0,0,0,1,0,0,0,0,0,0.25,1013\n\
             0.02,0,0,0,0,0,1,0,0,0,0,0,0.25,1013\n\
             0.01,0,0,0,0,0,1,0,0,0,0,0,0.25,1013\n"
        );
        match parse_flight_log(&text, WallLabel::Left, "f") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn manifest_round_trip_and_duplicate_ids() {
        let manifest = CorpusManifest {
            entries: vec![
                ManifestEntry {
                    path: "left-00.csv".into(),
                    label: WallLabel::Left,
                    flight_id: "left-00".into(),
                },
                ManifestEntry {
                    path: "nowall-00.csv".into(),
                    label: WallLabel::NoWall,
                    flight_id: "nowall-00".into(),
                },
            ],
        };
        let json = manifest.to_json();
        assert_eq!(CorpusManifest::from_json(&json).unwrap(), manifest);

        let mut dup = manifest.clone();
        dup.entries[1].flight_id = "left-00".into();
        assert!(CorpusManifest::from_json(&dup.to_json()).is_err());
    }

    #[test]
    fn load_corpus_reports_missing_files() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = CorpusManifest {
            entries: vec![ManifestEntry {
                path: "nope.csv".into(),
                label: WallLabel::Left,
                flight_id: "gone".into(),
            }],
        };
        let err = load_corpus(&manifest, dir.path()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("nope.csv"), "{msg}");
        assert!(msg.contains("gone"), "{msg}");
    }

    #[test]
    fn load_corpus_reads_labels_from_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let mut entries = Vec::new();
        for (i, label) in WallLabel::ALL.iter().enumerate() {
            let name = format!("flight-{i}.csv");
            let text = format!(
                "{HEADER}\n0,0,0,0,0,0,1,0,0,0,0,0,0.25,1013\n0.01,0,0,0,0,0,1,0,0,0,0,0,0.25,1013\n"
            );
            std::fs::write(dir.path().join(&name), text).unwrap();
            entries.push(ManifestEntry {
                path: name,
                label: *label,
                flight_id: format!("flight-{i}"),
            });
        }
        let logs = load_corpus(&CorpusManifest { entries }, dir.path()).unwrap();
        assert_eq!(logs.len(), 4);
        for (log, label) in logs.iter().zip(WallLabel::ALL) {
            assert_eq!(log.label, label);
        }

        let empty = load_corpus(&CorpusManifest::default(), dir.path()).unwrap();
        assert!(empty.is_empty());
    }

    proptest! {
        // Render/parse is the identity on well-formed logs, at full precision.
        #[test]
        fn render_parse_round_trip(
            rows in proptest::collection::vec(
                (
                    proptest::array::uniform4(-1.0e3f64..1.0e3),
                    proptest::array::uniform4(-1.0e3f64..1.0e3),
                    proptest::array::uniform5(-89.0f64..89.0),
                ),
                1..40,
            )
        ) {
            let samples: Vec<ImuSample> = rows
                .iter()
                .enumerate()
                .map(|(k, (a, b, c))| ImuSample {
                    t: k as f64 * 0.01 + a[0].abs() * 1e-6,
                    gyro_x: a[1],
                    gyro_y: a[2],
                    gyro_z: a[3],
                    acc_x: b[0],
                    acc_y: b[1],
                    acc_z: b[2],
                    roll: c[0],
                    pitch: c[1],
                    yaw: c[2],
                    pos_x: c[3],
                    pos_y: c[4],
                    pos_z: b[3],
                    pressure: 1013.25,
                })
                .collect();
            let log = FlightLog {
                samples,
                label: WallLabel::Right,
                flight_id: "prop".into(),
                sample_rate_hz: NOMINAL_SAMPLE_RATE_HZ,
            };
            let text = render_flight_log(&log);
            let parsed = parse_flight_log(&text, log.label, &log.flight_id)?;
            prop_assert_eq!(parsed, log);
        }
    }
}
