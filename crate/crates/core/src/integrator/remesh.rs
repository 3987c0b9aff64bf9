use crate::error::{Error, Result};
use crate::geometry::curve::dist;
use crate::geometry::{CurveMode, ProfileCurve};
use crate::numerics::CubicSpline;

/// Largest over smallest chord length.
pub fn spacing_ratio(curve: &ProfileCurve) -> f64 {
    let (lo, hi) = curve
        .points
        .windows(2)
        .map(|w| dist(w[0], w[1]))
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| {
            (lo.min(d), hi.max(d))
        });
    hi / lo
}

/// Resamples at uniform spacing close to `target_dx`: uniform chord length
/// for parametric curves, uniform abscissa for graphs. Endpoints are kept,
/// and symmetric curves keep a sample on the mirror line.
pub fn remesh(curve: &ProfileCurve, target_dx: f64) -> Result<ProfileCurve> {
    if !(target_dx > 0.0) {
        return Err(Error::Precondition(
            "remesh spacing must be positive".into(),
        ));
    }
    let pts = &curve.points;
    let first = pts[0];
    let last = pts[pts.len() - 1];
    let (param, span) = match curve.mode {
        CurveMode::Parametric => {
            let s = curve.chord_lengths();
            let total = s[s.len() - 1];
            (s, total)
        }
        CurveMode::Graph => (curve.xs(), last[0] - first[0]),
    };
    if !(span > 0.0) || param.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Degenerate("zero-length segment or curve".into()));
    }
    let mut segments = ((span / target_dx).round() as usize).max(2);
    if curve.symmetric && segments % 2 == 1 {
        segments += 1;
    }
    let ys = CubicSpline::parabolic_ends(&param, &curve.ys());
    let xs = (curve.mode == CurveMode::Parametric)
        .then(|| CubicSpline::parabolic_ends(&param, &curve.xs()));
    let mut out = Vec::with_capacity(segments + 1);
    out.push(first);
    for j in 1..segments {
        let u = param[0] + span * j as f64 / segments as f64;
        let x = xs.as_ref().map_or(u, |s| s.eval(u));
        out.push([x, ys.eval(u)]);
    }
    out.push(last);
    let mut result = ProfileCurve {
        points: out,
        ..curve.clone()
    };
    if result.symmetric {
        result.symmetrize();
    }
    result.validate()?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polyline::PolylineIndex;
    use crate::geometry::{point_geometry, Dimension};
    use proptest::prelude::*;

    fn arc(angles: &[f64], radius: f64) -> ProfileCurve {
        let pts = angles
            .iter()
            .map(|t| [radius * t.sin(), 5.0 - radius * t.cos()])
            .collect();
        ProfileCurve::new(CurveMode::Parametric, pts).unwrap()
    }

    #[test]
    fn uniform_curve_is_unchanged() {
        let pts: Vec<[f64; 2]> = (0..=20)
            .map(|i| [-1.0 + 0.1 * i as f64, 2.0 + 0.3 * (-1.0 + 0.1 * i as f64)])
            .collect();
        let c = ProfileCurve::new(CurveMode::Parametric, pts).unwrap();
        let dx = c.length() / 20.0;
        let r = remesh(&c, dx).unwrap();
        assert_eq!(r.len(), c.len());
        for (a, b) in r.points.iter().zip(&c.points) {
            assert!(dist(*a, *b) <= 1e-9);
        }
    }

    #[test]
    fn arc_curvature_is_kept() {
        let angles: Vec<f64> = (0..=40)
            .map(|i| -0.8 + 1.6 * (i as f64 / 40.0).powf(1.3))
            .collect();
        let c = arc(&angles, 2.0);
        let r = remesh(&c, 0.04).unwrap();
        assert!(spacing_ratio(&r) < 1.01);
        let d = Dimension::new(2).unwrap();
        for i in 1..r.len() - 1 {
            let k = point_geometry(&r, i, d).unwrap().k;
            assert!((k - 0.5).abs() < 0.005, "{k}");
        }
    }

    #[test]
    fn zero_length_is_degenerate() {
        let c = ProfileCurve::new(CurveMode::Parametric, vec![[0.0, 1.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(remesh(&c, 0.1), Err(Error::Degenerate(_))));
    }

    proptest! {
        #[test]
        fn symmetric_input_stays_symmetric(
            half in proptest::collection::vec((0.02f64..0.2, -0.3f64..0.3), 3..15),
            dx in 0.01f64..0.1,
        ) {
            let mut right = vec![[0.0, 1.0]];
            for (step, dy) in &half {
                let p = right[right.len() - 1];
                right.push([p[0] + step, (p[1] + dy).max(0.2)]);
            }
            let mut pts: Vec<[f64; 2]> = right.iter().skip(1).rev().map(|p| [-p[0], p[1]]).collect();
            pts.extend(&right);
            let c = ProfileCurve::new(CurveMode::Parametric, pts).unwrap().with_symmetry(true);
            let r = remesh(&c, dx).unwrap();
            prop_assert!(r.symmetry_defect() <= 1e-12);
            let idx = PolylineIndex::new(&c.points);
            // the spline stays near the input polyline
            let scale = c.length() / (c.len() - 1) as f64;
            prop_assert!(r.points.iter().all(|p| idx.distance(*p) <= 2.0 * scale));
        }
    }
}
