use serde::{Deserialize, Serialize};

use super::catenoid::Dimension;
use super::curve::{dist, CurveMode, ProfileCurve};
use crate::error::{Error, Result};
use crate::numerics::three_point;

/// Curvatures of the surface of revolution at one profile sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointGeometry {
    /// Profile curvature with respect to the chosen normal.
    pub k: f64,
    /// Tangent angle against the positive x-axis.
    pub theta: f64,
    /// Mean curvature `k + (n-1) kappa_rot`.
    pub h: f64,
    /// Rotational principal curvature `-cos(theta)/y` (multiplicity n-1).
    pub kappa_rot: f64,
    /// `|A|^2 = k^2 + (n-1) kappa_rot^2`.
    pub a2: f64,
    /// Graph gradient quantity `sqrt(1 + u_x^2) = 1/|cos theta|`.
    pub v: f64,
}

impl PointGeometry {
    /// Assembles the pointwise quantities from the profile curvature (left
    /// normal), the tangent angle and the height.
    pub fn from_parts(k_left: f64, theta: f64, y: f64, n: Dimension, sign: f64) -> Self {
        let m = n.get() as f64 - 1.0;
        let kappa_left = -theta.cos() / y;
        let k = sign * k_left;
        let kappa_rot = sign * kappa_left;
        let h = k + m * kappa_rot;
        let a2 = k * k + m * kappa_rot * kappa_rot;
        let v = 1.0 / theta.cos().abs().max(1e-300);
        Self {
            k,
            theta,
            h,
            kappa_rot,
            a2,
            v,
        }
    }

    pub fn min_principal(&self) -> f64 {
        self.k.min(self.kappa_rot)
    }
}

/// Second-order finite-difference geometry at an interior sample.
///
/// Graph-mode curves are differentiated in `x`; parametric curves in chord
/// length. The normal follows the curve's stored orientation.
pub fn point_geometry(curve: &ProfileCurve, index: usize, n: Dimension) -> Result<PointGeometry> {
    let pts = &curve.points;
    if index == 0 || index + 1 >= pts.len() {
        return Err(Error::BoundarySample { index });
    }
    let (a, p, b) = (pts[index - 1], pts[index], pts[index + 1]);
    let sign = curve.orientation.sign();
    match curve.mode {
        CurveMode::Graph => {
            let hm = p[0] - a[0];
            let hp = b[0] - p[0];
            if !(hm > 0.0 && hp > 0.0) {
                return Err(Error::DegenerateSpacing { index });
            }
            let (ux, uxx) = three_point(a[1], p[1], b[1], hm, hp);
            Ok(graph_point(ux, uxx, p[1], n, sign))
        }
        CurveMode::Parametric => {
            let hm = dist(a, p);
            let hp = dist(p, b);
            if !(hm > 1e-14 && hp > 1e-14) {
                return Err(Error::DegenerateSpacing { index });
            }
            let (k_left, theta) = parametric_curvature(a, p, b, hm, hp);
            Ok(PointGeometry::from_parts(k_left, theta, p[1], n, sign))
        }
    }
}

/// Geometry of a graph from its first and second derivative.
#[inline]
pub fn graph_point(ux: f64, uxx: f64, y: f64, n: Dimension, sign: f64) -> PointGeometry {
    let v2 = 1.0 + ux * ux;
    let v = v2.sqrt();
    let m = n.get() as f64 - 1.0;
    let k = sign * uxx / (v2 * v);
    let kappa_rot = -sign / (y * v);
    let h = k + m * kappa_rot;
    PointGeometry {
        k,
        theta: ux.atan(),
        h,
        kappa_rot,
        a2: k * k + m * kappa_rot * kappa_rot,
        v,
    }
}

/// Signed curvature (left normal) and tangent angle at `p` from the
/// chord-length parametrized three-point stencil.
#[inline]
pub fn parametric_curvature(a: [f64; 2], p: [f64; 2], b: [f64; 2], hm: f64, hp: f64) -> (f64, f64) {
    let (x1, x2) = three_point(a[0], p[0], b[0], hm, hp);
    let (y1, y2) = three_point(a[1], p[1], b[1], hm, hp);
    let speed2 = x1 * x1 + y1 * y1;
    let k = (x1 * y2 - y1 * x2) / (speed2 * speed2.sqrt());
    (k, y1.atan2(x1))
}

/// Geometry at every interior sample (index `i` of the output is sample `i+1`).
pub fn interior_geometry(curve: &ProfileCurve, n: Dimension) -> Result<Vec<PointGeometry>> {
    (1..curve.len().saturating_sub(1))
        .map(|i| point_geometry(curve, i, n))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::curve::Orientation;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn cylinder_mean_curvature() {
        for n in 2..5 {
            let r = 1.7;
            let pts = (0..5).map(|i| [i as f64 * 0.1, r]).collect();
            let c = ProfileCurve::new(CurveMode::Graph, pts).unwrap();
            let g = point_geometry(&c, 2, dim(n)).unwrap();
            assert!(g.k.abs() < 1e-12);
            assert!((g.h + (n as f64 - 1.0) / r).abs() < 1e-12);
            assert!((g.kappa_rot + 1.0 / r).abs() < 1e-15);
        }
    }

    #[test]
    fn vertical_line_is_minimal() {
        let pts = (1..6).map(|i| [0.5, i as f64 * 0.2]).collect();
        let c = ProfileCurve::new(CurveMode::Parametric, pts).unwrap();
        let g = point_geometry(&c, 2, dim(3)).unwrap();
        assert!(g.k.abs() < 1e-12 && g.h.abs() < 1e-12);
    }

    #[test]
    fn boundary_and_degenerate_samples_error() {
        let c = ProfileCurve::new(
            CurveMode::Parametric,
            vec![[0.0, 1.0], [0.0, 1.0], [1.0, 1.0]],
        )
        .unwrap();
        assert!(matches!(
            point_geometry(&c, 0, dim(2)),
            Err(Error::BoundarySample { .. })
        ));
        assert!(matches!(
            point_geometry(&c, 1, dim(2)),
            Err(Error::DegenerateSpacing { .. })
        ));
    }

    #[test]
    fn inward_orientation_flips_signs() {
        let pts: Vec<[f64; 2]> = (0..5)
            .map(|i| [i as f64 * 0.1, 1.0 + (i as f64 * 0.1).powi(2)])
            .collect();
        let out = ProfileCurve::new(CurveMode::Graph, pts.clone()).unwrap();
        let inw = out.clone().with_orientation(Orientation::Inward);
        let a = point_geometry(&out, 2, dim(2)).unwrap();
        let b = point_geometry(&inw, 2, dim(2)).unwrap();
        assert_eq!(a.h, -b.h);
        assert_eq!(a.k, -b.k);
        assert_eq!(a.a2, b.a2);
    }

    #[test]
    fn circle_curvature_on_uneven_samples() {
        // counter-clockwise arc of radius 2: left-normal curvature +1/2
        let angles = [-0.3, -0.1, 0.05, 0.2, 0.4];
        let pts: Vec<[f64; 2]> = angles
            .iter()
            .map(|t: &f64| [2.0 * t.sin(), 5.0 - 2.0 * t.cos()])
            .collect();
        let c = ProfileCurve::new(CurveMode::Parametric, pts).unwrap();
        for i in 1..4 {
            let g = point_geometry(&c, i, dim(2)).unwrap();
            assert!((g.k - 0.5).abs() < 5e-3, "{}", g.k);
        }
    }
}
