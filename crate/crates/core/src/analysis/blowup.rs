//! Parabolic rescaling of a flow about its point of largest curvature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::pointwise::point_geometry;
use crate::geometry::polyline::PolylineIndex;
use crate::integrator::FlowTrajectory;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledSlice {
    /// Rescaled time `λ² (t - t_m)`.
    pub t: f64,
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupResult {
    /// Snapshot time the rescaling is centered at.
    pub t_m: f64,
    /// Largest `sup |A|` over the snapshots up to `t_m`.
    pub lambda_m: f64,
    /// Sample on `x >= 0` with the largest `|A|` at `t_m`.
    pub base_point: [f64; 2],
    /// `|A|` at the base point over `λ_m`; at most 1.
    pub base_curvature: f64,
    /// `(t, sup |A|)` up to `t_m`.
    pub history: Vec<[f64; 2]>,
    /// Profiles up to `t_m` under `P ↦ λ_m (P - base)`.
    pub rescaled: Vec<RescaledSlice>,
    /// Largest `|V - k| / λ_m` over the window: the rescaled normal speed
    /// measured between snapshots against curve shortening.
    pub csf_residual: f64,
    /// Largest `(n-1) / (λ_m u)` over the window.
    pub correction_max: f64,
    /// `(n-1) / (λ_m min u)` over the window.
    pub correction_bound: f64,
    /// Samples in the window.
    pub window_samples: usize,
}

fn sup_a(
    curve: &crate::geometry::ProfileCurve,
    n: crate::geometry::Dimension,
) -> Result<(f64, usize)> {
    let mut best = (0.0, 0);
    for i in 1..curve.len() - 1 {
        if curve.points[i][0] >= 0.0 {
            let a = point_geometry(curve, i, n)?.a2.sqrt();
            if a > best.0 {
                best = (a, i);
            }
        }
    }
    Ok(best)
}

/// Rescales about the snapshot at or before `t_m`. The residual compares
/// normal speeds measured as signed distances to the neighbouring snapshots
/// (centered when a later snapshot exists) with the profile curvature, over
/// samples within rescaled distance `window` of the base point.
pub fn blowup_rescale(traj: &FlowTrajectory, t_m: f64, window: f64) -> Result<BlowupResult> {
    let snaps = &traj.snapshots;
    let m = snaps.partition_point(|s| s.t <= t_m);
    if m < 2 {
        return Err(Error::InsufficientHistory(format!(
            "need two snapshots up to t = {t_m}"
        )));
    }
    let m = m - 1;
    let n = traj.n;
    let mut history = Vec::with_capacity(m + 1);
    let mut lambda: f64 = 0.0;
    for s in &snaps[..=m] {
        let (a, _) = sup_a(&s.curve, n)?;
        history.push([s.t, a]);
        lambda = lambda.max(a);
    }
    if !(lambda > 0.0) {
        return Err(Error::Degenerate("flat history: sup |A| vanishes".into()));
    }
    let curve = &snaps[m].curve;
    let (a_base, i_base) = sup_a(curve, n)?;
    let base = curve.points[i_base];
    let rescaled = snaps[..=m]
        .iter()
        .map(|s| RescaledSlice {
            t: lambda * lambda * (s.t - snaps[m].t),
            points: s
                .curve
                .points
                .iter()
                .map(|p| [lambda * (p[0] - base[0]), lambda * (p[1] - base[1])])
                .collect(),
        })
        .collect();

    let before = &snaps[m - 1];
    let after = snaps.get(m + 1);
    let idx_before = PolylineIndex::new(&before.curve.points);
    let idx_after = after.map(|s| PolylineIndex::new(&s.curve.points));
    let sign = curve.orientation.sign();
    let (mut residual, mut corr, mut min_u, mut count) = (0.0f64, 0.0f64, f64::INFINITY, 0);
    for i in 1..curve.len() - 1 {
        let p = curve.points[i];
        if lambda * (p[0] - base[0]).hypot(p[1] - base[1]) > window {
            continue;
        }
        let v = match (&idx_after, after) {
            (Some(ia), Some(a)) => {
                (idx_before.signed_distance(p) - ia.signed_distance(p)) / (a.t - before.t)
            }
            _ => idx_before.signed_distance(p) / (snaps[m].t - before.t),
        };
        let k_left = sign * point_geometry(curve, i, n)?.k;
        residual = residual.max((v - k_left).abs() / lambda);
        corr = corr.max(n.rot() / (lambda * p[1]));
        min_u = min_u.min(p[1]);
        count += 1;
    }
    if count == 0 {
        return Err(Error::Precondition(
            "no samples inside the blowup window".into(),
        ));
    }
    Ok(BlowupResult {
        t_m: snaps[m].t,
        lambda_m: lambda,
        base_point: base,
        base_curvature: a_base / lambda,
        history,
        rescaled,
        csf_residual: residual,
        correction_max: corr,
        correction_bound: n.rot() / (lambda * min_u),
        window_samples: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CurveMode, Dimension, GrimReaperSpec, ProfileCurve};
    use crate::integrator::{compute_diagnostics, FlowTrajectory, Snapshot};

    fn trajectory(curves: Vec<(f64, ProfileCurve)>, n: u32) -> FlowTrajectory {
        let n = Dimension::new(n).unwrap();
        FlowTrajectory {
            n,
            mode: curves[0].1.mode,
            scheme: "parametric".into(),
            reference: None,
            snapshots: curves
                .into_iter()
                .map(|(t, curve)| Snapshot {
                    t,
                    diag: compute_diagnostics(&curve, n, t, None, None).unwrap(),
                    curve,
                })
                .collect(),
            stop_reason: None,
            escape: None,
            steps: 0,
            remeshes: 0,
        }
    }

    fn cylinder(y: f64) -> ProfileCurve {
        ProfileCurve::new(
            CurveMode::Parametric,
            (0..=40).map(|i| [-2.0 + 0.1 * i as f64, y]).collect(),
        )
        .unwrap()
    }

    #[test]
    fn constant_curvature_history() {
        let t = trajectory((0..5).map(|i| (0.1 * i as f64, cylinder(2.0))).collect(), 3);
        let b = blowup_rescale(&t, 0.35, 10.0).unwrap();
        assert!((b.t_m - 0.3).abs() < 1e-12);
        assert!((b.lambda_m - 2f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((b.base_curvature - 1.0).abs() < 1e-12);
        assert_eq!(b.rescaled.len(), 4);
    }

    #[test]
    fn shrinking_cylinder_normalizes_to_unit_curvature() {
        // radius √(4 - 2t) for n = 2
        let t = trajectory(
            (0..6)
                .map(|i| (0.2 * i as f64, cylinder((4.0 - 0.4 * i as f64).sqrt())))
                .collect(),
            2,
        );
        let b = blowup_rescale(&t, 0.8, 5.0).unwrap();
        assert!((b.base_curvature - 1.0).abs() < 0.02);
        assert!(b.history.iter().all(|h| h[1] <= b.lambda_m));
        // straight lines have k = 0; the whole speed is the rotational term
        let u = (4.0f64 - 1.6).sqrt();
        assert!((b.correction_max - 1.0 / (b.lambda_m * u)).abs() < 1e-12);
        assert!(b.correction_max <= b.correction_bound + 1e-15);
        assert!((b.csf_residual - 1.0 / (b.lambda_m * u)).abs() < 0.02 * b.csf_residual);
    }

    #[test]
    fn translating_reaper_solves_curve_shortening() {
        let g = GrimReaperSpec::new(1.0, 1000.0).unwrap();
        let curves = (0..5).map(|i| {
            (
                0.01 * i as f64,
                g.sample(CurveMode::Parametric, 0.002, 0.9, 0.01 * i as f64)
                    .unwrap(),
            )
        });
        let t = trajectory(curves.collect(), 2);
        let b = blowup_rescale(&t, 0.02, 0.5).unwrap();
        // far from the axis the rotational correction is negligible
        assert!(b.correction_bound < 1e-3);
        assert!(b.csf_residual < 2e-3, "{}", b.csf_residual);
    }

    #[test]
    fn needs_history() {
        let t = trajectory(vec![(0.0, cylinder(1.0))], 2);
        assert!(matches!(
            blowup_rescale(&t, 0.0, 1.0),
            Err(Error::InsufficientHistory(_))
        ));
    }
}
