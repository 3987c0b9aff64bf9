use super::CheckReport;
use crate::error::{Error, Result};
use crate::geometry::density::{gaussian_density, Probe, DEFAULT_COVERAGE_TOL};
use crate::integrator::FlowTrajectory;

/// Quadrature slack allowed in the monotonicity comparison.
pub const MONOTONICITY_SLACK: f64 = 1e-4;

/// Gaussian density ratios `Θ(M_{t - r²}, X, r)` centered at the spacetime
/// point `(probe, t)` over the radii (sorted ascending). Passes iff the ratio
/// is nondecreasing in `r` up to the slack.
pub fn density_monotonicity(
    traj: &FlowTrajectory,
    probe: Probe,
    t: f64,
    radii: &[f64],
) -> Result<CheckReport> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::Precondition(
            "radii must be positive and nonempty".into(),
        ));
    }
    let mut radii = radii.to_vec();
    radii.sort_by(f64::total_cmp);
    let mut series = Vec::with_capacity(radii.len());
    for &r in &radii {
        let at = t - r * r;
        let curve = traj.curve_at(at).ok_or_else(|| {
            Error::InsufficientHistory(format!("no profile at t = {at} for radius {r}"))
        })?;
        series.push([
            r,
            gaussian_density(&curve, traj.n, probe, r, DEFAULT_COVERAGE_TOL)?.value,
        ]);
    }
    let pass = series
        .windows(2)
        .all(|w| w[1][1] >= w[0][1] - MONOTONICITY_SLACK);
    Ok(CheckReport::new("density-monotone", pass, series).threshold("slack", MONOTONICITY_SLACK))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CatenoidSpec, CurveMode, Dimension, ProfileCurve, Sampling, Truncation};
    use crate::integrator::{compute_diagnostics, Snapshot};

    fn static_traj(curve: ProfileCurve, n: u32) -> FlowTrajectory {
        let n = Dimension::new(n).unwrap();
        FlowTrajectory {
            n,
            mode: curve.mode,
            scheme: "parametric".into(),
            reference: None,
            snapshots: [-100.0, 0.0]
                .iter()
                .map(|&t| Snapshot {
                    t,
                    diag: compute_diagnostics(&curve, n, t, None, None).unwrap(),
                    curve: curve.clone(),
                })
                .collect(),
            stop_reason: None,
            escape: None,
            steps: 0,
            remeshes: 0,
        }
    }

    #[test]
    fn hyperplane_is_constant_one() {
        let plane = ProfileCurve::new(
            CurveMode::Parametric,
            (0..=4000).map(|i| [0.0, 1e-9 + 0.02 * i as f64]).collect(),
        )
        .unwrap();
        let t = static_traj(plane, 2);
        let r =
            density_monotonicity(&t, Probe { x: 0.0, rho: 1.0 }, 0.0, &[0.1, 1.0, 5.0]).unwrap();
        assert!(r.pass);
        assert!(
            r.series.iter().all(|p| (p[1] - 1.0).abs() < 1e-6),
            "{:?}",
            r.series
        );
    }

    #[test]
    fn static_catenoid_neck_is_nondecreasing() {
        let spec = CatenoidSpec::new(2, 1.0).unwrap();
        let c = spec
            .sample(&Sampling {
                mode: CurveMode::Parametric,
                spacing: 0.005,
                truncation: Truncation::Height(60.0),
            })
            .unwrap();
        let t = static_traj(c, 2);
        let r = density_monotonicity(
            &t,
            Probe { x: 0.0, rho: 1.0 },
            0.0,
            &[0.05, 0.2, 0.5, 1.0, 2.0],
        )
        .unwrap();
        assert!(r.pass, "{:?}", r.series);
        assert!((r.series[0][1] - 1.0).abs() < 1e-2);
    }

    #[test]
    fn missing_history_is_reported() {
        let plane = ProfileCurve::new(
            CurveMode::Parametric,
            vec![[0.0, 0.5], [0.0, 1.0], [0.0, 1.5]],
        )
        .unwrap();
        let t = static_traj(plane, 2);
        assert!(matches!(
            density_monotonicity(&t, Probe { x: 0.0, rho: 1.0 }, 0.0, &[20.0]),
            Err(Error::InsufficientHistory(_))
        ));
    }
}
