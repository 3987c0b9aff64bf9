//! JSON-lines trajectories: one snapshot per line, run metadata repeated on
//! the first line and the outcome on the last.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CatenoidSpec, CurveMode, Dimension, Orientation, ProfileCurve};
use crate::integrator::{Diagnostics, EscapeEvent, FlowTrajectory, Snapshot, StopReason};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SnapshotLine {
    schema: u32,
    t: f64,
    n: Dimension,
    mode: CurveMode,
    points: Vec<[f64; 2]>,
    orientation: Orientation,
    #[serde(default)]
    symmetric: bool,
    diag: Diagnostics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scheme: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reference: Option<CatenoidSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outcome: Option<Outcome>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Outcome {
    stop_reason: Option<StopReason>,
    escape: Option<EscapeEvent>,
    steps: usize,
    remeshes: usize,
}

/// The trajectory as JSON lines, newline terminated.
pub fn trajectory_to_jsonl(traj: &FlowTrajectory) -> Result<String> {
    let mut out = String::new();
    let last = traj.snapshots.len().saturating_sub(1);
    for (i, s) in traj.snapshots.iter().enumerate() {
        let line = SnapshotLine {
            schema: SCHEMA_VERSION,
            t: s.t,
            n: traj.n,
            mode: s.curve.mode,
            points: s.curve.points.clone(),
            orientation: s.curve.orientation,
            symmetric: s.curve.symmetric,
            diag: s.diag.clone(),
            scheme: (i == 0).then(|| traj.scheme.clone()),
            reference: if i == 0 { traj.reference } else { None },
            outcome: (i == last).then_some(Outcome {
                stop_reason: traj.stop_reason,
                escape: traj.escape,
                steps: traj.steps,
                remeshes: traj.remeshes,
            }),
        };
        out.push_str(&serde_json::to_string(&line)?);
        out.push('\n');
    }
    Ok(out)
}

/// Parses JSON lines; errors name the 1-based line.
pub fn trajectory_from_jsonl(text: &str) -> Result<FlowTrajectory> {
    parse_lines(text.lines().map(|l| Ok(l.to_string())))
}

pub fn save_trajectory(traj: &FlowTrajectory, path: &Path) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(trajectory_to_jsonl(traj)?.as_bytes())?;
    Ok(())
}

pub fn load_trajectory(path: &Path) -> Result<FlowTrajectory> {
    let f = fs::File::open(path)?;
    parse_lines(BufReader::new(f).lines().map(|l| l.map_err(Error::from)))
}

fn parse_lines(lines: impl Iterator<Item = Result<String>>) -> Result<FlowTrajectory> {
    let mut traj: Option<FlowTrajectory> = None;
    for (i, line) in lines.enumerate() {
        let line = line?;
        let number = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: number,
            message: e.to_string(),
        })?;
        let found = value.get("schema").and_then(|v| v.as_u64());
        if found != Some(SCHEMA_VERSION as u64) {
            return Err(Error::Schema {
                found: found.map_or(0, |v| v as u32),
                expected: SCHEMA_VERSION,
            });
        }
        let rec: SnapshotLine = serde_json::from_value(value).map_err(|e| Error::Parse {
            line: number,
            message: e.to_string(),
        })?;
        let curve = ProfileCurve::new(rec.mode, rec.points)
            .map_err(|e| Error::Parse {
                line: number,
                message: e.to_string(),
            })?
            .with_orientation(rec.orientation)
            .with_symmetry(rec.symmetric);
        let t = traj.get_or_insert_with(|| FlowTrajectory {
            n: rec.n,
            mode: rec.mode,
            scheme: String::new(),
            reference: None,
            snapshots: Vec::new(),
            stop_reason: None,
            escape: None,
            steps: 0,
            remeshes: 0,
        });
        if rec.n != t.n {
            return Err(Error::Parse {
                line: number,
                message: format!("dimension {} differs from {}", rec.n.get(), t.n.get()),
            });
        }
        if let Some(prev) = t.snapshots.last() {
            if !(rec.t >= prev.t) {
                return Err(Error::Parse {
                    line: number,
                    message: format!("time {} precedes {}", rec.t, prev.t),
                });
            }
        }
        if let Some(scheme) = rec.scheme {
            t.scheme = scheme;
        }
        if rec.reference.is_some() {
            t.reference = rec.reference;
        }
        if let Some(o) = rec.outcome {
            t.stop_reason = o.stop_reason;
            t.escape = o.escape;
            t.steps = o.steps;
            t.remeshes = o.remeshes;
        }
        t.snapshots.push(Snapshot {
            t: rec.t,
            curve,
            diag: rec.diag,
        });
    }
    traj.ok_or(Error::Parse {
        line: 1,
        message: "no snapshots".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{normal_offset, Sampling, Truncation};
    use crate::integrator::{run_flow, BoundaryCondition, FlowConfig, FlowState, StopCriteria};

    fn short_run() -> FlowTrajectory {
        let spec = CatenoidSpec::new(2, 1.0).unwrap();
        let sampling = Sampling {
            mode: CurveMode::Graph,
            spacing: 0.05,
            truncation: Truncation::Abscissa(2.0),
        };
        let curve = normal_offset(&spec, &sampling, 0.1).unwrap();
        let mut cfg = FlowConfig::new("graphical", 0.05, BoundaryCondition::pinned(spec, true));
        cfg.snapshot_interval = 0.02;
        let state = FlowState::new(curve, spec.n, cfg).unwrap();
        run_flow(state, &StopCriteria::until(0.1).with_escape(0.5, spec)).unwrap()
    }

    #[test]
    fn round_trip_is_lossless() {
        let traj = short_run();
        assert!(traj.snapshots.len() > 3);
        let text = trajectory_to_jsonl(&traj).unwrap();
        assert_eq!(text.lines().count(), traj.snapshots.len());
        let back = trajectory_from_jsonl(&text).unwrap();
        assert_eq!(back, traj);
        assert_eq!(trajectory_to_jsonl(&back).unwrap(), text);
    }

    #[test]
    fn file_round_trip_and_replayed_diagnostics() {
        let traj = short_run();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.jsonl");
        save_trajectory(&traj, &path).unwrap();
        let back = load_trajectory(&path).unwrap();
        assert_eq!(back, traj);
        for (d, s) in back
            .recompute_diagnostics()
            .unwrap()
            .iter()
            .zip(&back.snapshots)
        {
            assert!((d.min_h - s.diag.min_h).abs() <= 1e-12);
            assert!((d.sup_a2 - s.diag.sup_a2).abs() <= 1e-12);
            assert!((d.tip_height - s.diag.tip_height).abs() <= 1e-12);
            let (a, b) = (d.sup_distance.unwrap(), s.diag.sup_distance.unwrap());
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn truncated_file_names_the_line() {
        let text = trajectory_to_jsonl(&short_run()).unwrap();
        let cut = &text[..text.len() - 40];
        let lines = cut.lines().count();
        match trajectory_from_jsonl(cut) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, lines),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn schema_mismatch_is_versioned() {
        let text = trajectory_to_jsonl(&short_run()).unwrap();
        let bumped = text.replacen("\"schema\":1", "\"schema\":7", 1);
        assert!(matches!(
            trajectory_from_jsonl(&bumped),
            Err(Error::Schema {
                found: 7,
                expected: 1
            })
        ));
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(matches!(
            trajectory_from_jsonl(""),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
