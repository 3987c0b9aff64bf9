use serde::{Deserialize, Serialize};

use super::{remesh, spacing_ratio, FlowState, SchemeRegistry};
use crate::error::{Error, Result};
use crate::geometry::pointwise::interior_geometry;
use crate::geometry::CatenoidReference;
use crate::geometry::{CatenoidSpec, CurveMode, Dimension, ProfileCurve};

/// Per-snapshot summary, recomputable from the snapshot curves alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub min_h: f64,
    pub max_h: f64,
    pub sup_a2: f64,
    pub tip_x: f64,
    pub tip_height: f64,
    /// Backward difference of the tip height against the previous snapshot.
    pub tip_speed: Option<f64>,
    pub sup_distance: Option<f64>,
    pub max_v: f64,
    /// Largest `|H|` next to the held ends: the normal speed the clamp suppresses.
    pub collar_speed: f64,
}

/// Samples next to each end that form the clamp collar.
const COLLAR: usize = 5;

pub fn compute_diagnostics(
    curve: &ProfileCurve,
    n: Dimension,
    t: f64,
    previous: Option<(f64, f64)>,
    reference: Option<&CatenoidReference>,
) -> Result<Diagnostics> {
    let geo = interior_geometry(curve, n)?;
    let mut d = Diagnostics {
        min_h: f64::INFINITY,
        max_h: f64::NEG_INFINITY,
        sup_a2: 0.0,
        tip_x: 0.0,
        tip_height: 0.0,
        tip_speed: None,
        sup_distance: None,
        max_v: 0.0,
        collar_speed: 0.0,
    };
    for (i, g) in geo.iter().enumerate() {
        d.min_h = d.min_h.min(g.h);
        d.max_h = d.max_h.max(g.h);
        d.sup_a2 = d.sup_a2.max(g.a2);
        d.max_v = d.max_v.max(g.v);
        if i < COLLAR || i + COLLAR >= geo.len() {
            d.collar_speed = d.collar_speed.max(g.h.abs());
        }
    }
    let (tx, th) = curve.tip();
    d.tip_x = tx;
    d.tip_height = th;
    d.tip_speed = previous.and_then(|(tp, hp)| (t > tp).then(|| (th - hp) / (t - tp)));
    d.sup_distance = reference.map(|r| r.sup_distance(curve).0);
    Ok(d)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub curve: ProfileCurve,
    pub diag: Diagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    TimeReached,
    Escape,
    TipHeight,
    AxisCollision,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeCriterion {
    pub eps1: f64,
    pub spec: CatenoidSpec,
}

/// First crossing of the escape threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeEvent {
    /// Crossing time, linearly interpolated between the bracketing tests.
    pub t: f64,
    /// Distance at the first test at or above the threshold.
    pub sup_distance: f64,
    /// Profile location attaining it.
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopCriteria {
    /// Horizon; always enforced.
    pub t_end: f64,
    pub escape: Option<EscapeCriterion>,
    pub tip_height: Option<f64>,
    /// Treat reaching the axis floor as a stop rather than an abort.
    pub stop_on_axis: bool,
}

impl StopCriteria {
    pub fn until(t_end: f64) -> Self {
        Self {
            t_end,
            escape: None,
            tip_height: None,
            stop_on_axis: false,
        }
    }

    pub fn with_escape(mut self, eps1: f64, spec: CatenoidSpec) -> Self {
        self.escape = Some(EscapeCriterion { eps1, spec });
        self
    }

    pub fn with_tip_height(mut self, height: f64) -> Self {
        self.tip_height = Some(height);
        self
    }

    pub fn stopping_on_axis(mut self) -> Self {
        self.stop_on_axis = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrajectory {
    pub n: Dimension,
    pub mode: CurveMode,
    pub scheme: String,
    /// Catenoid the distances are measured against.
    pub reference: Option<CatenoidSpec>,
    pub snapshots: Vec<Snapshot>,
    pub stop_reason: Option<StopReason>,
    pub escape: Option<EscapeEvent>,
    pub steps: usize,
    pub remeshes: usize,
}

impl FlowTrajectory {
    pub fn final_time(&self) -> f64 {
        self.snapshots.last().map_or(f64::NAN, |s| s.t)
    }

    pub fn first(&self) -> &Snapshot {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &Snapshot {
        &self.snapshots[self.snapshots.len() - 1]
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    /// Shifts every time by `shift`.
    pub fn shifted(mut self, shift: f64) -> Self {
        for s in &mut self.snapshots {
            s.t += shift;
        }
        if let Some(e) = &mut self.escape {
            e.t += shift;
        }
        self
    }

    /// Curve at time `t`: linear interpolation between bracketing snapshots
    /// when they share a sample count, otherwise the nearer snapshot.
    pub fn curve_at(&self, t: f64) -> Option<ProfileCurve> {
        let snaps = &self.snapshots;
        if snaps.is_empty() || t < snaps[0].t || t > snaps[snaps.len() - 1].t {
            return None;
        }
        let i = snaps.partition_point(|s| s.t <= t);
        if i == 0 {
            return Some(snaps[0].curve.clone());
        }
        if i == snaps.len() {
            return Some(snaps[i - 1].curve.clone());
        }
        let (a, b) = (&snaps[i - 1], &snaps[i]);
        if a.t == t {
            return Some(a.curve.clone());
        }
        let w = (t - a.t) / (b.t - a.t);
        if a.curve.len() != b.curve.len() {
            return Some(if w < 0.5 {
                a.curve.clone()
            } else {
                b.curve.clone()
            });
        }
        let points = a
            .curve
            .points
            .iter()
            .zip(&b.curve.points)
            .map(|(p, q)| [p[0] + w * (q[0] - p[0]), p[1] + w * (q[1] - p[1])])
            .collect();
        Some(ProfileCurve {
            points,
            ..a.curve.clone()
        })
    }

    /// Reference polyline used for the distance diagnostics.
    pub fn reference_polyline(&self) -> Result<Option<CatenoidReference>> {
        match (&self.reference, self.snapshots.first()) {
            (Some(spec), Some(first)) => Ok(Some(CatenoidReference::covering(spec, &first.curve)?)),
            _ => Ok(None),
        }
    }

    /// Diagnostics recomputed from the stored curves.
    pub fn recompute_diagnostics(&self) -> Result<Vec<Diagnostics>> {
        let reference = self.reference_polyline()?;
        let mut out = Vec::with_capacity(self.snapshots.len());
        let mut prev = None;
        for s in &self.snapshots {
            let d = compute_diagnostics(&s.curve, self.n, s.t, prev, reference.as_ref())?;
            prev = Some((s.t, d.tip_height));
            out.push(d);
        }
        Ok(out)
    }

    pub fn tip_series(&self) -> Vec<(f64, f64)> {
        self.snapshots
            .iter()
            .map(|s| (s.t, s.diag.tip_height))
            .collect()
    }
}

/// Evolves `initial` until a stop criterion fires, using the scheme named in
/// its configuration.
pub fn run_flow(initial: FlowState, stop: &StopCriteria) -> Result<FlowTrajectory> {
    run_flow_with(SchemeRegistry::global(), initial, stop)
}

pub fn run_flow_with(
    registry: &SchemeRegistry,
    initial: FlowState,
    stop: &StopCriteria,
) -> Result<FlowTrajectory> {
    let scheme = registry.get(&initial.config.scheme)?;
    if scheme.mode() != initial.curve.mode {
        return Err(Error::Precondition(format!(
            "scheme `{}` evolves {:?} curves, got {:?}",
            scheme.name(),
            scheme.mode(),
            initial.curve.mode
        )));
    }
    if !(stop.t_end > initial.t) {
        return Err(Error::Precondition(
            "stop time must exceed the start time".into(),
        ));
    }
    let cfg = initial.config.clone();
    let n = initial.n;
    let spec = stop.escape.map(|e| e.spec).or(cfg.boundary.catenoid);
    let mut state = initial;
    if state.curve.mode == CurveMode::Parametric
        && needs_remesh(&state.curve, cfg.dx, cfg.remesh_ratio)
    {
        state.curve = remesh(&state.curve, cfg.dx)?;
    }
    let reference = match spec {
        Some(s) => Some(CatenoidReference::covering(&s, &state.curve)?),
        None => None,
    };
    let mut traj = FlowTrajectory {
        n,
        mode: state.curve.mode,
        scheme: scheme.name().to_string(),
        reference: spec,
        snapshots: Vec::new(),
        stop_reason: None,
        escape: None,
        steps: 0,
        remeshes: 0,
    };

    let record = |traj: &mut FlowTrajectory, state: &FlowState| -> Result<()> {
        let prev = traj.snapshots.last().map(|s| (s.t, s.diag.tip_height));
        let diag = compute_diagnostics(&state.curve, n, state.t, prev, reference.as_ref())?;
        traj.snapshots.push(Snapshot {
            t: state.t,
            curve: state.curve.clone(),
            diag,
        });
        Ok(())
    };
    let abort = |mut traj: FlowTrajectory, state: &FlowState, cause: Error| -> Error {
        if traj.snapshots.last().is_none_or(|s| s.t < state.t) {
            let prev = traj.snapshots.last().map(|s| (s.t, s.diag.tip_height));
            if let Ok(diag) =
                compute_diagnostics(&state.curve, n, state.t, prev, reference.as_ref())
            {
                traj.snapshots.push(Snapshot {
                    t: state.t,
                    curve: state.curve.clone(),
                    diag,
                });
            }
        }
        Error::Aborted {
            partial: Box::new(traj),
            cause: Box::new(cause),
        }
    };

    record(&mut traj, &state)?;
    let mut last_test = match (&stop.escape, &reference) {
        (Some(e), Some(r)) => {
            let (d, i) = r.sup_distance(&state.curve);
            if d >= e.eps1 {
                let p = state.curve.points[i];
                traj.escape = Some(EscapeEvent {
                    t: state.t,
                    sup_distance: d,
                    x: p[0],
                    y: p[1],
                });
                traj.stop_reason = Some(StopReason::Escape);
                return Ok(traj);
            }
            Some((state.t, d))
        }
        _ => None,
    };
    let mut next_snapshot = state.t + cfg.snapshot_interval;

    loop {
        if state.curve.mode == CurveMode::Parametric
            && needs_remesh(&state.curve, cfg.dx, cfg.remesh_ratio)
        {
            match remesh(&state.curve, cfg.dx) {
                Ok(c) => {
                    state.curve = c;
                    traj.remeshes += 1;
                }
                Err(e) => return Err(abort(traj, &state, e)),
            }
        }
        let remaining = stop.t_end - state.t;
        if remaining <= 1e-12 * stop.t_end.abs().max(1.0) {
            traj.stop_reason = Some(StopReason::TimeReached);
            break;
        }
        if traj.steps >= cfg.max_steps {
            return Err(abort(
                traj,
                &state,
                Error::NonConvergence {
                    iterations: cfg.max_steps,
                    history: vec![],
                },
            ));
        }
        let dt = scheme.max_dt(&state).min(remaining);
        match scheme.step(&state, dt) {
            Ok(next) => state = next,
            Err(Error::AxisCollision { .. }) if stop.stop_on_axis => {
                traj.stop_reason = Some(StopReason::AxisCollision);
                break;
            }
            Err(e) => return Err(abort(traj, &state, e)),
        }
        traj.steps += 1;

        if let (Some(e), Some(r), Some((t_prev, d_prev))) = (&stop.escape, &reference, last_test) {
            let at_end = stop.t_end - state.t <= 1e-12 * stop.t_end.abs().max(1.0);
            if state.t >= t_prev + cfg.escape_interval || at_end {
                let (d, i) = r.sup_distance(&state.curve);
                if d >= e.eps1 {
                    let t_cross = if d > d_prev {
                        t_prev + (e.eps1 - d_prev) / (d - d_prev) * (state.t - t_prev)
                    } else {
                        state.t
                    };
                    let p = state.curve.points[i];
                    traj.escape = Some(EscapeEvent {
                        t: t_cross,
                        sup_distance: d,
                        x: p[0],
                        y: p[1],
                    });
                    traj.stop_reason = Some(StopReason::Escape);
                    break;
                }
                last_test = Some((state.t, d));
            }
        }
        if let Some(h) = stop.tip_height {
            if state.curve.tip().1 >= h {
                traj.stop_reason = Some(StopReason::TipHeight);
                break;
            }
        }
        if state.t >= next_snapshot - 1e-12 {
            if state.curve.mode == CurveMode::Parametric && !state.curve.is_simple() {
                let t = state.t;
                return Err(abort(traj, &state, Error::Embeddedness { t }));
            }
            if let Err(e) = record(&mut traj, &state) {
                return Err(abort(traj, &state, e));
            }
            while next_snapshot <= state.t + 1e-12 {
                next_snapshot += cfg.snapshot_interval;
            }
        }
    }
    if traj.last().t < state.t {
        if let Err(e) = record(&mut traj, &state) {
            return Err(abort(traj, &state, e));
        }
    }
    Ok(traj)
}

fn needs_remesh(curve: &ProfileCurve, dx: f64, ratio: f64) -> bool {
    let mean = curve.length() / (curve.len() - 1) as f64;
    spacing_ratio(curve) > ratio || mean > 1.5 * dx
}
