//! Polyline form of the flow: every interior vertex moves with velocity
//! `H ν`, plus a tangential component that equalizes the sample spacing.

use super::{check_samples, BoundaryKind, FlowScheme, FlowState, TimeScheme};
use crate::error::{Error, Result};
use crate::geometry::curve::dist;
use crate::geometry::polyline::segments_intersect;
use crate::geometry::{CurveMode, Dimension, ProfileCurve};
use crate::numerics::three_point;

pub struct ParametricScheme;

/// Mean curvature with respect to the left normal at the interior samples
/// (the normal speed of the flow).
pub fn normal_velocity(curve: &ProfileCurve, n: Dimension) -> Result<Vec<f64>> {
    let pts = &curve.points;
    let mut out = Vec::with_capacity(pts.len().saturating_sub(2));
    for i in 1..pts.len().saturating_sub(1) {
        let (h, _, _) = vertex_terms(pts[i - 1], pts[i], pts[i + 1], n.rot())
            .ok_or(Error::DegenerateSpacing { index: i })?;
        out.push(h);
    }
    Ok(out)
}

/// Mean curvature, unit tangent and the index-uniform second difference at `p`.
#[inline]
fn vertex_terms(
    a: [f64; 2],
    p: [f64; 2],
    b: [f64; 2],
    rot: f64,
) -> Option<(f64, [f64; 2], [f64; 2])> {
    let hm = dist(a, p);
    let hp = dist(p, b);
    if !(hm > 1e-14 && hp > 1e-14) {
        return None;
    }
    let (x1, x2) = three_point(a[0], p[0], b[0], hm, hp);
    let (y1, y2) = three_point(a[1], p[1], b[1], hm, hp);
    let sp = (x1 * x1 + y1 * y1).sqrt();
    let tangent = [x1 / sp, y1 / sp];
    let k = (x1 * y2 - y1 * x2) / (sp * sp * sp);
    let h = k - rot * tangent[0] / p[1];
    let hbar = 0.5 * (hm + hp);
    let d2 = [
        (a[0] + b[0] - 2.0 * p[0]) / (hbar * hbar),
        (a[1] + b[1] - 2.0 * p[1]) / (hbar * hbar),
    ];
    Some((h, tangent, d2))
}

fn velocities(
    pts: &[[f64; 2]],
    rot: f64,
    weight: f64,
    kind: BoundaryKind,
    t: f64,
) -> Result<Vec<[f64; 2]>> {
    let m = pts.len();
    let mut out = vec![[0.0; 2]; m];
    let vel = |a, p, b, index| -> Result<[f64; 2]> {
        let (h, tg, d2) = vertex_terms(a, p, b, rot).ok_or(Error::DegenerateSpacing { index })?;
        let along = weight * (d2[0] * tg[0] + d2[1] * tg[1]);
        let v = [-h * tg[1] + along * tg[0], h * tg[0] + along * tg[1]];
        if !(v[0].is_finite() && v[1].is_finite()) {
            return Err(Error::Instability { index, t });
        }
        Ok(v)
    };
    for i in 1..m - 1 {
        out[i] = vel(pts[i - 1], pts[i], pts[i + 1], i)?;
    }
    if kind == BoundaryKind::Reflect {
        let ghost = [2.0 * pts[0][0] - pts[1][0], pts[1][1]];
        out[0] = vel(ghost, pts[0], pts[1], 0)?;
        let ghost = [2.0 * pts[m - 1][0] - pts[m - 2][0], pts[m - 2][1]];
        out[m - 1] = vel(pts[m - 2], pts[m - 1], ghost, m - 1)?;
    }
    Ok(out)
}

/// Tests each segment against its next few neighbours; a step small enough
/// for stability can only fold the polyline locally.
fn locally_simple(pts: &[[f64; 2]]) -> bool {
    let segs = pts.len() - 1;
    for s in 0..segs {
        for o in (s + 2)..(s + 6).min(segs) {
            if segments_intersect(pts[s], pts[s + 1], pts[o], pts[o + 1]) {
                return false;
            }
        }
    }
    true
}

impl FlowScheme for ParametricScheme {
    fn name(&self) -> &'static str {
        "parametric"
    }

    fn mode(&self) -> CurveMode {
        CurveMode::Parametric
    }

    fn step(&self, state: &FlowState, dt: f64) -> Result<FlowState> {
        let cfg = &state.config;
        let rot = state.n.rot();
        let kind = cfg.boundary.kind;
        let pts = &state.curve.points;
        let m = pts.len();
        if m < 3 {
            return Err(Error::Degenerate(
                "polyline needs at least three samples".into(),
            ));
        }
        let t1 = state.t + dt;
        let reaper = if kind == BoundaryKind::GrimReaper {
            cfg.boundary.reaper
        } else {
            None
        };
        let set_ends = |p: &mut [[f64; 2]], t: f64| {
            if let Some(g) = reaper {
                p[0][1] = g.height_unchecked(p[0][0], t);
                p[m - 1][1] = g.height_unchecked(p[m - 1][0], t);
            }
        };
        let k1 = velocities(pts, rot, cfg.tangential_weight, kind, state.t)?;
        let mut next: Vec<[f64; 2]> = pts
            .iter()
            .zip(&k1)
            .map(|(p, v)| [p[0] + dt * v[0], p[1] + dt * v[1]])
            .collect();
        set_ends(&mut next, t1);
        check_samples(&next, cfg.y_floor, t1)?;
        if cfg.time_scheme == TimeScheme::Heun {
            let k2 = velocities(&next, rot, cfg.tangential_weight, kind, t1)?;
            for i in 0..m {
                next[i] = [
                    pts[i][0] + 0.5 * dt * (k1[i][0] + k2[i][0]),
                    pts[i][1] + 0.5 * dt * (k1[i][1] + k2[i][1]),
                ];
            }
            set_ends(&mut next, t1);
            check_samples(&next, cfg.y_floor, t1)?;
        }
        if !locally_simple(&next) {
            return Err(Error::Embeddedness { t: t1 });
        }
        let mut curve = ProfileCurve {
            points: next,
            mode: CurveMode::Parametric,
            ..state.curve.clone()
        };
        if curve.symmetric {
            curve.symmetrize();
        }
        Ok(FlowState {
            t: t1,
            curve,
            n: state.n,
            config: state.config.clone(),
        })
    }
}
