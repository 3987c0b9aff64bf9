//! The grim reaper: the translating solution `y = c t - (1/c) log cos(c x)` of
//! curve shortening flow on `(-ℓ, ℓ)`, `c = π / (2ℓ)`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::curve::{CurveMode, ProfileCurve};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrimReaperSpec {
    pub half_width: f64,
    /// Tip height at `t = 0`.
    pub vertical_offset: f64,
    /// Abscissa of the tip.
    #[serde(default)]
    pub center: f64,
}

impl GrimReaperSpec {
    pub fn new(half_width: f64, vertical_offset: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Precondition(format!(
                "reaper half-width must be positive, got {half_width}"
            )));
        }
        Ok(Self {
            half_width,
            vertical_offset,
            center: 0.0,
        })
    }

    pub fn with_center(mut self, center: f64) -> Self {
        self.center = center;
        self
    }

    pub fn speed(&self) -> f64 {
        FRAC_PI_2 / self.half_width
    }

    /// Height at `(x, t)`; unbounded towards the walls `|x - center| = ℓ`.
    pub fn height(&self, x: f64, t: f64) -> Result<f64> {
        let s = x - self.center;
        if s.abs() >= self.half_width {
            return Err(Error::Domain {
                x,
                limit: self.half_width,
            });
        }
        Ok(self.height_unchecked(x, t))
    }

    #[inline]
    pub(crate) fn height_unchecked(&self, x: f64, t: f64) -> f64 {
        let c = self.speed();
        self.vertical_offset + c * t - (c * (x - self.center)).cos().ln() / c
    }

    /// Samples `|x - center| <= extent` on a uniform grid of spacing about `dx`.
    pub fn sample(&self, mode: CurveMode, dx: f64, extent: f64, t: f64) -> Result<ProfileCurve> {
        if extent >= self.half_width {
            return Err(Error::Domain {
                x: self.center + extent,
                limit: self.half_width,
            });
        }
        let half = ((extent / dx).round() as usize).max(1);
        let h = extent / half as f64;
        let pts = (0..=2 * half)
            .map(|i| {
                let x = self.center - extent + i as f64 * h;
                [x, self.height_unchecked(x, t)]
            })
            .collect();
        Ok(ProfileCurve::new(mode, pts)?.with_symmetry(self.center == 0.0))
    }

    /// A centred reaper of half-width `half_width` lying above `curve` with
    /// smallest vertical clearance exactly `clearance`.
    pub fn above(curve: &ProfileCurve, half_width: f64, clearance: f64) -> Result<Self> {
        let probe = Self::new(half_width, 0.0)?;
        let gap = probe.gap_below(curve, 0.0).ok_or_else(|| {
            Error::Precondition("no part of the curve lies between the reaper walls".into())
        })?;
        Self::new(half_width, clearance - gap)
    }

    /// Smallest vertical gap `reaper(x, t) - y` over the part of the curve's
    /// polyline strictly between the walls. On each segment the gap is convex
    /// in `x`, so its minimum is at an end or where the reaper slope
    /// `tan(c (x - center))` equals the segment slope.
    pub fn gap_below(&self, curve: &ProfileCurve, t: f64) -> Option<f64> {
        let c = self.speed();
        let inside = |x: f64| (x - self.center).abs() < self.half_width;
        let mut best: Option<f64> = None;
        let mut consider = |x: f64, y: f64| {
            if inside(x) {
                let g = self.height_unchecked(x, t) - y;
                best = Some(best.map_or(g, |b: f64| b.min(g)));
            }
        };
        for w in curve.points.windows(2) {
            let (a, b) = (w[0], w[1]);
            consider(a[0], a[1]);
            let run = b[0] - a[0];
            if run != 0.0 {
                let slope = (b[1] - a[1]) / run;
                let x = self.center + slope.atan() / c;
                if (x - a[0]) * (x - b[0]) < 0.0 {
                    consider(x, a[1] + slope * (x - a[0]));
                }
            }
        }
        if let Some(last) = curve.points.last() {
            consider(last[0], last[1]);
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tip_at_origin_and_translation() {
        let g = GrimReaperSpec::new(FRAC_PI_2, 0.0).unwrap();
        assert_eq!(g.height(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(g.speed(), 1.0);
        for &x in &[-1.2, 0.0, 0.7, 1.5] {
            for &t in &[0.3, 2.0] {
                let d = g.height(x, t).unwrap() - g.height(x, 0.0).unwrap();
                assert!((d - g.speed() * t).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn walls_are_domain_errors() {
        let g = GrimReaperSpec::new(1.0, 0.0).unwrap();
        assert!(matches!(g.height(1.0, 0.0), Err(Error::Domain { .. })));
        assert!(g.height(-1.0 - 1e-9, 0.0).is_err());
    }

    #[test]
    fn placement_above_curve_has_requested_clearance() {
        let pts = (-20..=20)
            .map(|i| [i as f64 * 0.05, 2.0 + 0.1 * (i as f64 * 0.05).powi(2)])
            .collect();
        let c = ProfileCurve::new(CurveMode::Graph, pts).unwrap();
        let g = GrimReaperSpec::above(&c, 1.3, 0.2).unwrap();
        let gap = g.gap_below(&c, 0.0).unwrap();
        assert!((gap - 0.2).abs() < 1e-12);
        // dense brute-force evaluation along the polyline
        let mut brute = f64::INFINITY;
        for w in c.points.windows(2) {
            for k in 0..=2000 {
                let s = k as f64 / 2000.0;
                let x = w[0][0] + s * (w[1][0] - w[0][0]);
                let y = w[0][1] + s * (w[1][1] - w[0][1]);
                brute = brute.min(g.height(x, 0.0).unwrap() - y);
            }
        }
        assert!((brute - gap).abs() < 1e-9, "{brute} vs {gap}");
    }
}
