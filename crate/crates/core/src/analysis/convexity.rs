use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CheckReport, TrajectoryCheck};
use crate::error::{Error, Result};
use crate::geometry::curve::dist;
use crate::geometry::pointwise::{interior_geometry, point_geometry};
use crate::geometry::polyline::polyline_distance;
use crate::geometry::{CatenoidReference, Dimension, ProfileCurve};
use crate::integrator::FlowTrajectory;

/// Mean curvature below this counts as a violation of mean convexity.
pub const MEAN_CONVEX_TOL: f64 = -1e-6;
/// Slack allowed in the avoidance principle.
pub const AVOIDANCE_SLACK: f64 = 1e-3;

/// Index of the lowest sample and the samples within chord-length `radius`
/// of it along the curve.
pub(crate) fn tip_window(curve: &ProfileCurve, radius: f64) -> (usize, Range<usize>) {
    let pts = &curve.points;
    let tip = (0..pts.len()).fold(0, |b, i| if pts[i][1] < pts[b][1] { i } else { b });
    let mut lo = tip;
    let mut s = 0.0;
    while lo > 0 {
        s += dist(pts[lo - 1], pts[lo]);
        if s > radius {
            break;
        }
        lo -= 1;
    }
    let mut hi = tip;
    s = 0.0;
    while hi + 1 < pts.len() {
        s += dist(pts[hi], pts[hi + 1]);
        if s > radius {
            break;
        }
        hi += 1;
    }
    (tip, lo..hi + 1)
}

fn min_mean_curvature(curve: &ProfileCurve, n: Dimension) -> Result<f64> {
    Ok(interior_geometry(curve, n)?
        .iter()
        .map(|g| g.h)
        .fold(f64::INFINITY, f64::min))
}

/// Per-snapshot minimum of `H`; passes iff it never drops below `-1e-6`.
pub fn verify_mean_convex(traj: &FlowTrajectory) -> Result<CheckReport> {
    let series = traj
        .snapshots
        .par_iter()
        .map(|s| Ok([s.t, min_mean_curvature(&s.curve, traj.n)?]))
        .collect::<Result<Vec<_>>>()?;
    let pass = series.iter().all(|p| p[1] >= MEAN_CONVEX_TOL);
    Ok(CheckReport::new("mean-convex", pass, series).threshold("min_h", MEAN_CONVEX_TOL))
}

/// Polyline separation of two flows at every snapshot time of either one
/// inside their common time range. Passes iff the separation never falls
/// more than `1e-3` below its initial value; identical flows are flagged as
/// degenerate rather than failed.
pub fn verify_avoidance(a: &FlowTrajectory, b: &FlowTrajectory) -> Result<CheckReport> {
    if a.snapshots.is_empty() || b.snapshots.is_empty() {
        return Err(Error::DisjointTimes);
    }
    let lo = a.first().t.max(b.first().t);
    let hi = a.final_time().min(b.final_time());
    if lo > hi {
        return Err(Error::DisjointTimes);
    }
    let mut times: Vec<f64> = a
        .times()
        .into_iter()
        .chain(b.times())
        .filter(|t| (lo..=hi).contains(t))
        .collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let series = times
        .par_iter()
        .map(|&t| {
            let ca = a.curve_at(t).ok_or(Error::DisjointTimes)?;
            let cb = b.curve_at(t).ok_or(Error::DisjointTimes)?;
            Ok([t, polyline_distance(&ca.points, &cb.points)])
        })
        .collect::<Result<Vec<_>>>()?;
    let initial = series[0][1];
    let report = |pass| {
        CheckReport::new("avoidance", pass, series.clone())
            .threshold("initial", initial)
            .threshold("slack", AVOIDANCE_SLACK)
    };
    if initial <= 1e-14 {
        return Ok(report(true).note("degenerate: zero initial separation"));
    }
    let pass = series.iter().all(|p| p[1] >= initial - AVOIDANCE_SLACK);
    Ok(report(pass))
}

/// Centered differences of the tip height across snapshots.
pub fn tip_speed(traj: &FlowTrajectory) -> Result<Vec<(f64, f64)>> {
    let s = &traj.snapshots;
    if s.len() < 3 {
        return Err(Error::InsufficientHistory(format!(
            "{} snapshots; tip speed needs 3",
            s.len()
        )));
    }
    let h: Vec<f64> = s.iter().map(|s| s.curve.tip().1).collect();
    Ok((1..s.len() - 1)
        .map(|i| (s[i].t, (h[i + 1] - h[i - 1]) / (s[i + 1].t - s[i - 1].t)))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonconvexityReport {
    /// Smallest principal curvature over the samples examined.
    pub min_principal: f64,
    pub min_h: f64,
    /// Largest product of the two principal curvatures.
    pub max_product: f64,
    /// Mean convex, yet not convex.
    pub verdict: bool,
}

/// Principal curvatures over the interior samples, or over those within
/// chord-length `window` of the tip.
pub fn nonconvexity_check(
    curve: &ProfileCurve,
    n: Dimension,
    window: Option<f64>,
) -> Result<NonconvexityReport> {
    let range = match window {
        Some(r) => tip_window(curve, r).1,
        None => 0..curve.len(),
    };
    let lo = range.start.max(1);
    let hi = range.end.min(curve.len() - 1);
    if lo >= hi {
        return Err(Error::Precondition(
            "no interior samples in the window".into(),
        ));
    }
    let mut r = NonconvexityReport {
        min_principal: f64::INFINITY,
        min_h: f64::INFINITY,
        max_product: f64::NEG_INFINITY,
        verdict: false,
    };
    for i in lo..hi {
        let g = point_geometry(curve, i, n)?;
        r.min_principal = r.min_principal.min(g.min_principal());
        r.min_h = r.min_h.min(g.h);
        r.max_product = r.max_product.max(g.k * g.kappa_rot);
    }
    r.verdict = r.min_principal < -1e-6 && r.min_h >= MEAN_CONVEX_TOL;
    Ok(r)
}

/// Largest `|k|` over `|x - x_tip| <= 2`.
pub fn flatness(curve: &ProfileCurve, n: Dimension) -> Result<f64> {
    let (tx, _) = curve.tip();
    let mut m: f64 = 0.0;
    for i in 1..curve.len() - 1 {
        if (curve.points[i][0] - tx).abs() <= 2.0 {
            m = m.max(point_geometry(curve, i, n)?.k.abs());
        }
    }
    Ok(m)
}

pub struct MeanConvexCheck;

impl TrajectoryCheck for MeanConvexCheck {
    fn name(&self) -> &'static str {
        "mean-convex"
    }

    fn run(&self, traj: &FlowTrajectory) -> Result<CheckReport> {
        verify_mean_convex(traj)
    }
}

/// Passes iff some snapshot is mean convex yet nonconvex near its tip.
pub struct NonconvexCheck {
    pub window: f64,
}

impl Default for NonconvexCheck {
    fn default() -> Self {
        Self { window: 2.0 }
    }
}

impl TrajectoryCheck for NonconvexCheck {
    fn name(&self) -> &'static str {
        "nonconvex"
    }

    fn run(&self, traj: &FlowTrajectory) -> Result<CheckReport> {
        let reports = traj
            .snapshots
            .par_iter()
            .map(|s| nonconvexity_check(&s.curve, traj.n, Some(self.window)))
            .collect::<Result<Vec<_>>>()?;
        let pass = reports.iter().any(|r| r.verdict);
        let series = traj
            .snapshots
            .iter()
            .zip(&reports)
            .map(|(s, r)| [s.t, r.min_principal])
            .collect();
        Ok(CheckReport::new("nonconvex", pass, series)
            .threshold("min_principal", -1e-6)
            .threshold("min_h", MEAN_CONVEX_TOL)
            .threshold("window", self.window))
    }
}

/// Profile curvature stays nonnegative near the tip at every snapshot.
pub struct ConvexTipCheck {
    pub window: f64,
}

impl Default for ConvexTipCheck {
    fn default() -> Self {
        Self { window: 1.0 }
    }
}

impl TrajectoryCheck for ConvexTipCheck {
    fn name(&self) -> &'static str {
        "convex-tip"
    }

    fn run(&self, traj: &FlowTrajectory) -> Result<CheckReport> {
        let series = traj
            .snapshots
            .par_iter()
            .map(|s| {
                let range = tip_window(&s.curve, self.window).1;
                let mut m = f64::INFINITY;
                for i in range.start.max(1)..range.end.min(s.curve.len() - 1) {
                    m = m.min(point_geometry(&s.curve, i, traj.n)?.k);
                }
                Ok([s.t, m])
            })
            .collect::<Result<Vec<_>>>()?;
        let pass = series.iter().all(|p| p[1] >= MEAN_CONVEX_TOL);
        Ok(CheckReport::new("convex-tip", pass, series).threshold("min_k", MEAN_CONVEX_TOL))
    }
}

pub struct SymmetryCheck;

impl TrajectoryCheck for SymmetryCheck {
    fn name(&self) -> &'static str {
        "symmetric"
    }

    fn run(&self, traj: &FlowTrajectory) -> Result<CheckReport> {
        let series: Vec<[f64; 2]> = traj
            .snapshots
            .iter()
            .map(|s| [s.t, s.curve.symmetry_defect()])
            .collect();
        let pass = series.iter().all(|p| p[1] <= 1e-9);
        Ok(CheckReport::new("symmetric", pass, series).threshold("max_defect", 1e-9))
    }
}

/// Every sample stays on the outer side of the reference catenoid.
pub struct OutsideCheck;

/// Discretization allowance of the dense reference polyline.
const OUTSIDE_TOL: f64 = -1e-5;

impl TrajectoryCheck for OutsideCheck {
    fn name(&self) -> &'static str {
        "outside"
    }

    fn run(&self, traj: &FlowTrajectory) -> Result<CheckReport> {
        let spec = traj
            .reference
            .ok_or_else(|| Error::Precondition("trajectory has no reference catenoid".into()))?;
        let series = traj
            .snapshots
            .par_iter()
            .map(|s| {
                let reference = CatenoidReference::covering(&spec, &s.curve)?;
                let index = reference.index();
                let m = s
                    .curve
                    .points
                    .iter()
                    .map(|p| index.signed_distance(*p))
                    .fold(f64::INFINITY, f64::min);
                Ok([s.t, m])
            })
            .collect::<Result<Vec<_>>>()?;
        let pass = series.iter().all(|p| p[1] >= OUTSIDE_TOL);
        Ok(CheckReport::new("outside", pass, series).threshold("min_signed_distance", OUTSIDE_TOL))
    }
}

pub struct EmbeddedCheck;

impl TrajectoryCheck for EmbeddedCheck {
    fn name(&self) -> &'static str {
        "embedded"
    }

    fn run(&self, traj: &FlowTrajectory) -> Result<CheckReport> {
        let series: Vec<[f64; 2]> = traj
            .snapshots
            .par_iter()
            .map(|s| [s.t, if s.curve.is_simple() { 1.0 } else { 0.0 }])
            .collect();
        let pass = series.iter().all(|p| p[1] == 1.0);
        Ok(CheckReport::new("embedded", pass, series))
    }
}
