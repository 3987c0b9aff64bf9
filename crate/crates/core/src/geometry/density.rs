//! Gaussian density ratio of a hypersurface of revolution.
//!
//! A point `(x, y ω)` of the surface, `ω ∈ S^{n-1}`, lies at squared distance
//! `(x - x̄)² + (y - ρ)² + 2 y ρ (1 - ω₁)` from a probe `(x̄, ρ e₁)`, so the
//! surface integral reduces to profile arclength times the azimuthal factor
//! `|S^{n-2}| ∫_0^π exp(-β (1 - cos φ)) sin^{n-2} φ dφ`, `β = y ρ / (2 r²)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;

use super::catenoid::Dimension;
use super::curve::{dist, ProfileCurve};
use crate::error::{Error, Result};
use crate::numerics::{cached_rule, sphere_area};

/// Spatial probe point: abscissa and distance from the rotation axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub x: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub value: f64,
    /// Bound on the Gaussian mass of the surface beyond the sampled ends.
    pub truncation_mass: f64,
}

/// Default admissible truncation mass.
pub const DEFAULT_COVERAGE_TOL: f64 = 1e-6;

/// `∫_0^π exp(-β (1 - cos φ)) sin^{n-2} φ dφ`.
///
/// For large `β` the integrand is concentrated in `φ ≲ β^{-1/2}`, so the
/// range is cut where the weight drops below `e^{-72}`.
pub fn azimuthal_factor(beta: f64, n: Dimension) -> f64 {
    let p = n.get() as i32 - 2;
    let upper = if beta > 0.0 {
        PI.min(12.0 / beta.sqrt())
    } else {
        PI
    };
    let rule = cached_rule(64);
    // 1 - cos φ = 2 sin²(φ/2) avoids cancellation for small φ
    rule.integrate(0.0, upper, |phi| {
        let h = (0.5 * phi).sin();
        (-2.0 * beta * h * h).exp() * phi.sin().powi(p)
    })
}

/// Θ(M, X, r) for the surface of revolution generated by `curve`, with the
/// probe `X = (probe, t)` and the curve taken at time `t - r²`.
pub fn gaussian_density(
    curve: &ProfileCurve,
    n: Dimension,
    probe: Probe,
    r: f64,
    coverage_tol: f64,
) -> Result<DensityReport> {
    if !(r > 0.0) {
        return Err(Error::Precondition(format!(
            "density radius must be positive, got {r}"
        )));
    }
    let nf = n.get() as f64;
    let four_r2 = 4.0 * r * r;
    let pref = sphere_area(n.get() as usize - 2) * (PI * four_r2).powf(-0.5 * nf);
    let rule = cached_rule(12);
    let piece_len = 0.25 * r;
    // pieces whose nearest point is further than this contribute below e^{-60}
    let cutoff2 = 60.0 * four_r2;
    let integrand = |x: f64, y: f64| {
        let d2 = (x - probe.x).powi(2) + (y - probe.rho).powi(2);
        let beta = y * probe.rho / (2.0 * r * r);
        y.powi(n.get() as i32 - 1) * (-d2 / four_r2).exp() * azimuthal_factor(beta, n)
    };
    let mut total = 0.0;
    for w in curve.points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = dist(a, b);
        if len == 0.0 {
            continue;
        }
        let (d, _) = super::polyline::point_segment([probe.x, probe.rho], a, b);
        if d * d > cutoff2 {
            continue;
        }
        let pieces = ((len / piece_len).ceil() as usize).max(1);
        let h = 1.0 / pieces as f64;
        for k in 0..pieces {
            let s0 = k as f64 * h;
            let v = rule.integrate(s0, s0 + h, |s| {
                integrand(a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]))
            });
            total += v * len;
        }
    }
    let truncation_mass = truncation_bound(curve, n, probe, r);
    if truncation_mass > coverage_tol {
        return Err(Error::Coverage {
            mass: truncation_mass,
            tol: coverage_tol,
        });
    }
    Ok(DensityReport {
        value: pref * total,
        truncation_mass,
    })
}

/// Gaussian mass of an `n`-plane outside the ball through each open end,
/// summed over the ends; ends on the axis close the surface and add nothing.
fn truncation_bound(curve: &ProfileCurve, n: Dimension, probe: Probe, r: f64) -> f64 {
    let ends = [curve.points[0], curve.points[curve.len() - 1]];
    ends.iter()
        .filter(|p| p[1] > 1e-6)
        .map(|p| {
            let d = dist(*p, [probe.x, probe.rho]);
            gamma_ur(0.5 * n.get() as f64, d * d / (4.0 * r * r))
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::curve::CurveMode;

    fn bessel_i0(x: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..200 {
            term *= (x / 2.0) * (x / 2.0) / (k as f64 * k as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn azimuthal_factor_closed_forms() {
        let n2 = Dimension::new(2).unwrap();
        let n3 = Dimension::new(3).unwrap();
        for &beta in &[0.0, 0.3, 4.0, 25.0, 300.0, 5e4] {
            let a3 = azimuthal_factor(beta, n3);
            let e3 = if beta == 0.0 {
                2.0
            } else {
                -(-2.0 * beta).exp_m1() / beta
            };
            assert!((a3 - e3).abs() <= 1e-12 * e3, "beta={beta}: {a3} vs {e3}");
            if beta <= 40.0 {
                let a2 = azimuthal_factor(beta, n2);
                let e2 = PI * bessel_i0(beta) * (-beta).exp();
                assert!((a2 - e2).abs() <= 1e-12 * e2, "beta={beta}: {a2} vs {e2}");
            }
        }
    }

    #[test]
    fn hyperplane_has_unit_density() {
        for n in 2..5 {
            let d = Dimension::new(n).unwrap();
            for &r in &[0.1, 1.0, 10.0] {
                let c = ProfileCurve::new(CurveMode::Parametric, vec![[0.3, 1e-9], [0.3, 150.0]])
                    .unwrap();
                for &rho in &[0.0, 0.5] {
                    let v = gaussian_density(&c, d, Probe { x: 0.3, rho }, r, 1e-7).unwrap();
                    assert!(
                        (v.value - 1.0).abs() < 1e-6,
                        "n={n} r={r} rho={rho}: {}",
                        v.value
                    );
                }
            }
        }
    }

    #[test]
    fn short_open_curve_lacks_coverage() {
        let c = ProfileCurve::new(CurveMode::Parametric, vec![[0.0, 1e-9], [0.0, 1.0]]).unwrap();
        let d = Dimension::new(2).unwrap();
        assert!(matches!(
            gaussian_density(&c, d, Probe { x: 0.0, rho: 0.5 }, 1.0, 1e-6),
            Err(Error::Coverage { .. })
        ));
    }
}
