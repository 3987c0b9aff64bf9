//! Escape-time construction of ancient flows out of the catenoid, and the
//! long forward run of a slightly perturbed catenoid.
//!
//! Offsets `M + δν` are evolved until their distance to the catenoid first
//! reaches `ε₁`; that time `T_δ` grows without bound as `δ → 0`. Choosing
//! `δ_j` with `T_δ = j` and shifting time by `-T_δ` gives flows defined on
//! `[-j, 0]` that all leave the catenoid at `t = 0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{fit_grim_reaper, flatness, tip_speed, CheckReport, FitInit, ReaperFit};
use crate::error::{Error, Result};
use crate::geometry::polyline::{sup_distance, PolylineIndex};
use crate::geometry::{
    normal_offset, profile_half_width, CatenoidReference, CatenoidSpec, CurveMode, Dimension,
    GrimReaperSpec, ProfileCurve, Sampling, Truncation,
};
use crate::integrator::{
    compute_diagnostics, run_flow, BoundaryCondition, EscapeEvent, FlowConfig, FlowState,
    FlowTrajectory, Snapshot, StopCriteria, StopReason, TimeScheme,
};

/// Numerical set-up shared by every run of a construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionConfig {
    pub spec: CatenoidSpec,
    pub scheme: String,
    pub mode: CurveMode,
    pub dx: f64,
    pub truncation: Truncation,
    pub time_scheme: TimeScheme,
    pub snapshot_interval: f64,
    /// Escape threshold `ε₁`.
    pub eps1: f64,
    /// Smallest offset tried when bracketing `T_δ = j`.
    pub delta_min: f64,
    pub max_bisections: usize,
    /// Chord-length radius of the grim reaper fit window.
    pub fit_window: f64,
    /// Time between fitted snapshots of a forward run.
    pub fit_interval: f64,
}

impl ConstructionConfig {
    /// Defaults: graphs over `|x| <= 4R` for `n = 2`; parametric curves up to
    /// height `30R` for `n >= 3`.
    pub fn new(spec: CatenoidSpec) -> Self {
        let r = spec.radius;
        let (scheme, mode, dx, truncation, eps1, snapshot_interval) = if spec.n.get() == 2 {
            (
                "graphical",
                CurveMode::Graph,
                0.01 * r,
                Truncation::Abscissa(4.0 * r),
                0.5 * r,
                0.05,
            )
        } else {
            (
                "parametric",
                CurveMode::Parametric,
                0.04 * r,
                Truncation::Height(30.0 * r),
                0.25 * r,
                0.1,
            )
        };
        Self {
            spec,
            scheme: scheme.into(),
            mode,
            dx,
            truncation,
            time_scheme: TimeScheme::Heun,
            snapshot_interval,
            eps1,
            delta_min: 1e-5 * r,
            max_bisections: 40,
            fit_window: 3.0 * r,
            fit_interval: 0.25,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.spec.radius;
        if !(self.eps1 > 0.0 && self.eps1 < r) {
            return Err(Error::Precondition(format!(
                "eps1 = {} must lie in (0, R = {r})",
                self.eps1
            )));
        }
        if !(self.delta_min > 0.0 && self.delta_min < self.eps1) {
            return Err(Error::Precondition(
                "delta_min must lie in (0, eps1)".into(),
            ));
        }
        Ok(())
    }

    pub fn sampling(&self) -> Sampling {
        Sampling {
            mode: self.mode,
            spacing: self.dx,
            truncation: self.truncation,
        }
    }

    /// Flow configuration with the ends held on the initial offset.
    pub fn flow_config(&self) -> FlowConfig {
        let mut cfg = FlowConfig::new(
            &self.scheme,
            self.dx,
            BoundaryCondition::pinned(self.spec, true),
        );
        cfg.truncation = Some(self.truncation);
        cfg.time_scheme = self.time_scheme;
        cfg.snapshot_interval = self.snapshot_interval;
        cfg
    }

    /// Initial state: the offset `M + δν` (inward for negative `δ`).
    pub fn offset_state(&self, delta: f64) -> Result<FlowState> {
        let curve = normal_offset(&self.spec, &self.sampling(), delta)?;
        FlowState::new(curve, self.spec.n, self.flow_config())
    }

    fn timestep(&self) -> f64 {
        self.flow_config().cfl * self.dx * self.dx
    }
}

/// Evolves the offset `M + δν` under `stop`.
pub fn offset_flow(
    delta: f64,
    cfg: &ConstructionConfig,
    stop: &StopCriteria,
) -> Result<FlowTrajectory> {
    run_flow(cfg.offset_state(delta)?, stop)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeResult {
    pub delta: f64,
    pub t_delta: f64,
    pub escape_x: f64,
    pub escape_y: f64,
    /// Distance at the first test past the threshold.
    pub sup_distance: f64,
    pub run_id: String,
}

pub fn run_id(n: Dimension, delta: f64) -> String {
    format!("n{}-delta{:.9e}", n.get(), delta)
}

/// First time the flow of `M + δν` reaches distance `ε₁` from the catenoid,
/// within `horizon`. Offsets at or beyond `ε₁` escape at `t = 0`.
pub fn escape_time(
    delta: f64,
    horizon: f64,
    cfg: &ConstructionConfig,
) -> Result<(EscapeResult, FlowTrajectory)> {
    cfg.validate()?;
    if !(delta > 0.0) {
        return Err(Error::Precondition(format!(
            "offset must be positive, got {delta}"
        )));
    }
    if delta >= cfg.eps1 {
        return already_escaped(delta, cfg);
    }
    let stop = StopCriteria::until(horizon).with_escape(cfg.eps1, cfg.spec);
    let traj = offset_flow(delta, cfg, &stop)?;
    let e = match (traj.stop_reason, traj.escape) {
        (Some(StopReason::Escape), Some(e)) => e,
        _ => return Err(Error::NoEscape { t_max: horizon }),
    };
    let result = EscapeResult {
        delta,
        t_delta: e.t,
        escape_x: e.x,
        escape_y: e.y,
        sup_distance: e.sup_distance,
        run_id: run_id(cfg.spec.n, delta),
    };
    Ok((result, traj))
}

/// An offset starting on or beyond the threshold: a one-snapshot run.
fn already_escaped(delta: f64, cfg: &ConstructionConfig) -> Result<(EscapeResult, FlowTrajectory)> {
    let state = cfg.offset_state(delta)?;
    let reference = CatenoidReference::covering(&cfg.spec, &state.curve)?;
    let (d, i) = reference.sup_distance(&state.curve);
    let p = state.curve.points[i];
    let diag = compute_diagnostics(&state.curve, cfg.spec.n, 0.0, None, Some(&reference))?;
    let traj = FlowTrajectory {
        n: cfg.spec.n,
        mode: cfg.mode,
        scheme: cfg.scheme.clone(),
        reference: Some(cfg.spec),
        snapshots: vec![Snapshot {
            t: 0.0,
            curve: state.curve,
            diag,
        }],
        stop_reason: Some(StopReason::Escape),
        escape: Some(EscapeEvent {
            t: 0.0,
            sup_distance: d,
            x: p[0],
            y: p[1],
        }),
        steps: 0,
        remeshes: 0,
    };
    let result = EscapeResult {
        delta,
        t_delta: 0.0,
        escape_x: p[0],
        escape_y: p[1],
        sup_distance: d,
        run_id: run_id(cfg.spec.n, delta),
    };
    Ok((result, traj))
}

/// Horizon of a bracketing probe for target `j`; probes that do not escape
/// by then count as `T_δ > j`.
fn probe_horizon(j: f64) -> f64 {
    2.0 * j + 1.0
}

/// `δ_j` with `|T_δ - j| <= 0.01 j`, by bisection on `log δ` between
/// `delta_min` and `ε₁`.
pub fn find_delta_for_escape(
    j: f64,
    cfg: &ConstructionConfig,
) -> Result<(EscapeResult, FlowTrajectory)> {
    cfg.validate()?;
    if !(j > 0.0) {
        return Err(Error::Precondition(format!(
            "target time must be positive, got {j}"
        )));
    }
    if j <= cfg.timestep() {
        return escape_time(cfg.eps1, 1.0, cfg);
    }
    let horizon = probe_horizon(j);
    let probe = |delta: f64| -> Result<Option<(EscapeResult, FlowTrajectory)>> {
        match escape_time(delta, horizon, cfg) {
            Ok(r) => Ok(Some(r)),
            Err(Error::NoEscape { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    // T is decreasing in δ: T(lo) > j > T(hi)
    let (mut lo, mut hi) = (cfg.delta_min.ln(), cfg.eps1.ln());
    // the lower end is only trusted once some probe escaped later than j
    let mut bracketed = false;
    let mut history = Vec::new();
    for _ in 0..cfg.max_bisections {
        let mid = 0.5 * (lo + hi);
        match probe(mid.exp())? {
            Some((r, traj)) => {
                history.push(r.t_delta);
                if (r.t_delta - j).abs() <= 0.01 * j {
                    return Ok((r, traj));
                }
                if r.t_delta > j {
                    lo = mid;
                    bracketed = true;
                } else {
                    hi = mid;
                }
            }
            None => {
                history.push(f64::INFINITY);
                lo = mid;
                bracketed = true;
            }
        }
    }
    if !bracketed {
        return Err(Error::BracketNotFound { target: j });
    }
    Err(Error::NonConvergence {
        iterations: cfg.max_bisections,
        history,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AncientMember {
    pub j: f64,
    pub escape: EscapeResult,
    /// Shifted so that the escape happens at `t = 0`.
    pub trajectory: FlowTrajectory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AncientFamily {
    pub eps1: f64,
    /// The common window is `[-window, 0]`.
    pub window: f64,
    pub members: Vec<AncientMember>,
    /// Largest `common_height_distance` between members over the common window.
    pub convergence_matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberSummary {
    pub j: f64,
    pub delta: f64,
    pub t_delta: f64,
    pub sup_distance: f64,
    pub run_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub eps1: f64,
    pub window: f64,
    pub members: Vec<MemberSummary>,
    pub convergence_matrix: Vec<Vec<f64>>,
}

impl AncientFamily {
    pub fn summary(&self) -> FamilySummary {
        FamilySummary {
            eps1: self.eps1,
            window: self.window,
            members: self
                .members
                .iter()
                .map(|m| MemberSummary {
                    j: m.j,
                    delta: m.escape.delta,
                    t_delta: m.escape.t_delta,
                    sup_distance: m.escape.sup_distance,
                    run_id: m.escape.run_id.clone(),
                })
                .collect(),
            convergence_matrix: self.convergence_matrix.clone(),
        }
    }
}

/// Two-sided distance between polylines, measured from their vertices.
pub fn hausdorff(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    sup_distance(a, &PolylineIndex::new(b))
        .0
        .max(sup_distance(b, &PolylineIndex::new(a)).0)
}

/// Two-sided vertex-to-polyline distance over the heights both curves reach.
/// Differently offset profiles are held at different heights at the cut, so
/// the full Hausdorff distance would only measure the truncation.
pub fn common_height_distance(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    let top = |c: &[[f64; 2]]| c.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
    let cap = top(a).min(top(b));
    let one_sided = |c: &[[f64; 2]], other: &[[f64; 2]]| {
        let index = PolylineIndex::new(other);
        c.iter()
            .filter(|p| p[1] <= cap)
            .map(|&p| index.distance(p))
            .fold(0.0, f64::max)
    };
    one_sided(a, b).max(one_sided(b, a))
}

/// Finds `δ_j` for every target (in parallel), recenters each flow to escape
/// at `t = 0`, and compares members over `[-min j, 0]` on the snapshot grid.
/// Spatial recentering is the identity: the profiles stay symmetric.
pub fn build_ancient_family(js: &[f64], cfg: &ConstructionConfig) -> Result<AncientFamily> {
    if js.is_empty() {
        return Err(Error::Precondition("no target times".into()));
    }
    let mut js = js.to_vec();
    js.sort_by(f64::total_cmp);
    let members = js
        .par_iter()
        .map(|&j| {
            let (escape, traj) = find_delta_for_escape(j, cfg)?;
            let shift = -escape.t_delta;
            Ok(AncientMember {
                j,
                escape,
                trajectory: traj.shifted(shift),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let window = js[0];
    let convergence_matrix = convergence_matrix(&members, window, cfg.snapshot_interval)?;
    Ok(AncientFamily {
        eps1: cfg.eps1,
        window,
        members,
        convergence_matrix,
    })
}

fn convergence_matrix(members: &[AncientMember], window: f64, step: f64) -> Result<Vec<Vec<f64>>> {
    let steps = (window / step).round().max(1.0) as usize;
    let times: Vec<f64> = (0..=steps)
        .map(|i| -window + window * i as f64 / steps as f64)
        .collect();
    let curves = members
        .iter()
        .map(|m| {
            times
                .iter()
                .map(|&t| {
                    m.trajectory
                        .curve_at(t.min(m.trajectory.final_time()))
                        .ok_or_else(|| {
                            Error::InsufficientHistory(format!(
                                "member j = {} has no profile at t = {t}",
                                m.j
                            ))
                        })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let k = members.len();
    let mut matrix = vec![vec![0.0; k]; k];
    for a in 0..k {
        for b in a + 1..k {
            let d = (0..times.len())
                .into_par_iter()
                .map(|i| common_height_distance(&curves[a][i].points, &curves[b][i].points))
                .reduce(|| 0.0, f64::max);
            matrix[a][b] = d;
            matrix[b][a] = d;
        }
    }
    Ok(matrix)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EternalRun {
    pub trajectory: FlowTrajectory,
    pub eps1: f64,
    /// First time the distance diagnostic reaches `ε₁`, interpolated between
    /// snapshots.
    pub escape_time: Option<f64>,
    /// Grim reaper fits to the tip region.
    pub fit_series: Vec<(f64, ReaperFit)>,
    /// `(t, tip height, speed)`.
    pub tip_series: Vec<(f64, f64, f64)>,
    /// `(t, max |k| near the tip)`.
    pub flatness_series: Vec<(f64, f64)>,
}

impl EternalRun {
    pub fn final_fit(&self) -> Option<&ReaperFit> {
        self.fit_series.last().map(|(_, f)| f)
    }

    pub fn final_speed(&self) -> Option<f64> {
        self.tip_series.last().map(|t| t.2)
    }

    /// Tip flatness at the snapshot nearest the escape time.
    pub fn flatness_at_escape(&self) -> Option<f64> {
        let te = self.escape_time?;
        self.flatness_series
            .iter()
            .min_by(|a, b| (a.0 - te).abs().total_cmp(&(b.0 - te).abs()))
            .map(|f| f.1)
    }
}

/// Runs `M + δν` forward until the tip reaches `tip_height` (or `t_forward`
/// passes), then fits reapers and measures the tip along the way.
pub fn run_eternal(
    delta: f64,
    t_forward: f64,
    tip_height: f64,
    cfg: &ConstructionConfig,
) -> Result<EternalRun> {
    cfg.validate()?;
    let stop = StopCriteria::until(t_forward).with_tip_height(tip_height);
    let traj = offset_flow(delta, cfg, &stop)?;
    let escape_time = traj.snapshots.windows(2).find_map(|w| {
        let (a, b) = (w[0].diag.sup_distance?, w[1].diag.sup_distance?);
        (a < cfg.eps1 && b >= cfg.eps1)
            .then(|| w[0].t + (cfg.eps1 - a) / (b - a) * (w[1].t - w[0].t))
    });
    let n = cfg.spec.n;
    let init = if n.get() == 2 {
        FitInit::TipCurvature
    } else {
        FitInit::Width(0.9 * profile_half_width(n) * cfg.spec.radius)
    };
    let mut fit_times = Vec::new();
    let mut next = f64::NEG_INFINITY;
    for (i, s) in traj.snapshots.iter().enumerate() {
        if s.t >= next || i + 1 == traj.snapshots.len() {
            fit_times.push(i);
            next = s.t + cfg.fit_interval - 1e-9;
        }
    }
    let fit_series = fit_times
        .par_iter()
        .filter_map(|&i| {
            let s = &traj.snapshots[i];
            fit_grim_reaper(&s.curve, n, cfg.fit_window, init)
                .ok()
                .map(|f| (s.t, f))
        })
        .collect();
    let tip_series = tip_speed(&traj)?
        .into_iter()
        .map(|(t, v)| (t, traj.curve_at(t).map_or(f64::NAN, |c| c.tip().1), v))
        .collect();
    let flatness_series = traj
        .snapshots
        .par_iter()
        .map(|s| Ok((s.t, flatness(&s.curve, n)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EternalRun {
        trajectory: traj,
        eps1: cfg.eps1,
        escape_time,
        fit_series,
        tip_series,
        flatness_series,
    })
}

/// Vertical gap between a translating reaper and each snapshot. The reaper
/// must start strictly above the flow; the check passes iff the gap stays
/// positive.
pub fn barrier_check(traj: &FlowTrajectory, reaper: &GrimReaperSpec) -> Result<CheckReport> {
    let t0 = traj.first().t;
    let series = traj
        .snapshots
        .iter()
        .map(|s| {
            reaper
                .gap_below(&s.curve, s.t - t0)
                .map(|g| [s.t, g])
                .ok_or_else(|| Error::Precondition("curve leaves the reaper's strip".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    if !(series[0][1] > 0.0) {
        return Err(Error::Precondition(format!(
            "reaper starts {} above the flow; must be positive",
            series[0][1]
        )));
    }
    let pass = series.iter().all(|p| p[1] > 0.0);
    Ok(CheckReport::new("barrier", pass, series).threshold("min_gap", 0.0))
}

/// The initial profile of a run, for placing barriers.
pub fn initial_profile(traj: &FlowTrajectory) -> &ProfileCurve {
    &traj.first().curve
}
