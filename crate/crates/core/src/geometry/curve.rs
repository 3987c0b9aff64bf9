use serde::{Deserialize, Serialize};

use super::polyline;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveMode {
    /// `y = u(x)` sampled on a fixed, strictly increasing abscissa grid.
    Graph,
    /// Free polyline, traversed left to right through the neck.
    Parametric,
}

/// Choice of unit normal. `Outward` is the left normal of the left-to-right
/// traversal, which has positive radial component at the neck.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Outward,
    Inward,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Outward => 1.0,
            Orientation::Inward => -1.0,
        }
    }
}

/// Sampled profile of a surface of revolution about the x-axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    pub mode: CurveMode,
    pub points: Vec<[f64; 2]>,
    pub orientation: Orientation,
    /// Samples are mirror pairs about `x = 0` (point `i` pairs with `len-1-i`).
    pub symmetric: bool,
}

impl ProfileCurve {
    /// Builds a curve and checks the cheap invariants (positivity, graph
    /// monotonicity). Simplicity is checked separately by [`Self::is_simple`].
    pub fn new(mode: CurveMode, points: Vec<[f64; 2]>) -> Result<Self> {
        let curve = Self {
            mode,
            points,
            orientation: Orientation::Outward,
            symmetric: false,
        };
        curve.validate()?;
        Ok(curve)
    }

    pub fn with_symmetry(mut self, symmetric: bool) -> Self {
        self.symmetric = symmetric;
        self
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.len() < 2 {
            return Err(Error::Degenerate("fewer than two samples".into()));
        }
        for (i, p) in self.points.iter().enumerate() {
            if !(p[0].is_finite() && p[1].is_finite()) {
                return Err(Error::Instability {
                    index: i,
                    t: f64::NAN,
                });
            }
            if p[1] <= 0.0 {
                return Err(Error::AxisCollision {
                    index: i,
                    y: p[1],
                    t: f64::NAN,
                });
            }
        }
        if self.mode == CurveMode::Graph {
            for i in 1..self.points.len() {
                if self.points[i][0] <= self.points[i - 1][0] {
                    return Err(Error::NonGraphical);
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p[0]).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.points.iter().map(|p| p[1]).collect()
    }

    pub fn is_simple(&self) -> bool {
        polyline::is_simple(&self.points)
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| dist(w[0], w[1])).sum()
    }

    /// Cumulative chord length, starting at zero.
    pub fn chord_lengths(&self) -> Vec<f64> {
        let mut s = Vec::with_capacity(self.points.len());
        let mut acc = 0.0;
        s.push(0.0);
        for w in self.points.windows(2) {
            acc += dist(w[0], w[1]);
            s.push(acc);
        }
        s
    }

    /// Largest deviation of the samples from mirror symmetry about `x = 0`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| {
                let a = self.points[i];
                let b = self.points[n - 1 - i];
                (a[0] + b[0]).abs().max((a[1] - b[1]).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Replaces each mirror pair by its average.
    pub fn symmetrize(&mut self) {
        let n = self.points.len();
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let x = 0.5 * (self.points[i][0] - self.points[j][0]);
            let y = 0.5 * (self.points[i][1] + self.points[j][1]);
            self.points[i] = [x, y];
            self.points[j] = [-x, y];
        }
        if n % 2 == 1 {
            self.points[n / 2][0] = 0.0;
        }
    }

    /// Tip of a symmetric profile: the lowest sample, refined by the vertex of
    /// the parabola through it and its neighbours. Returns `(x, height)`.
    pub fn tip(&self) -> (f64, f64) {
        let (imin, _) =
            self.points
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |(bi, by), (i, p)| {
                    if p[1] < by {
                        (i, p[1])
                    } else {
                        (bi, by)
                    }
                });
        let p = self.points[imin];
        if imin == 0 || imin + 1 == self.points.len() {
            return (p[0], p[1]);
        }
        let a = self.points[imin - 1];
        let c = self.points[imin + 1];
        // parabola through three points in x
        let d1 = (p[1] - a[1]) / (p[0] - a[0]);
        let d2 = (c[1] - p[1]) / (c[0] - p[0]);
        let curv = (d2 - d1) / (c[0] - a[0]);
        if !(curv > 0.0) || !curv.is_finite() {
            return (p[0], p[1]);
        }
        // y = p + d1 (x - a_x... ) written in Newton form
        // y(x) = a_y + d1 (x - a_x) + curv (x - a_x)(x - p_x)
        let xv = 0.5 * (a[0] + p[0]) - d1 / (2.0 * curv);
        let yv = a[1] + d1 * (xv - a[0]) + curv * (xv - a[0]) * (xv - p[0]);
        if xv < a[0] || xv > c[0] {
            return (p[0], p[1]);
        }
        (xv, yv)
    }

    pub fn bbox(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    /// Height of a graph-mode curve at `x` by linear interpolation.
    pub fn graph_height(&self, x: f64) -> Option<f64> {
        let pts = &self.points;
        if x < pts[0][0] || x > pts[pts.len() - 1][0] {
            return None;
        }
        let i = pts.partition_point(|p| p[0] <= x).clamp(1, pts.len() - 1);
        let (a, b) = (pts[i - 1], pts[i]);
        let t = (x - a[0]) / (b[0] - a[0]);
        Some(a[1] + t * (b[1] - a[1]))
    }

    pub fn to_document(&self, n: u32) -> CurveDocument {
        CurveDocument {
            mode: self.mode,
            n,
            points: self.points.clone(),
            orientation: self.orientation,
            symmetric: self.symmetric,
        }
    }

    pub fn to_json(&self, n: u32) -> Result<String> {
        Ok(serde_json::to_string(&self.to_document(n))?)
    }

    /// Parses the JSON curve document; returns the curve and its dimension.
    pub fn from_json(text: &str) -> Result<(Self, u32)> {
        let doc: CurveDocument = serde_json::from_str(text)?;
        let n = doc.n;
        Ok((doc.into_curve()?, n))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for p in &self.points {
            out.push_str(&format!("{},{}\n", p[0], p[1]));
        }
        out
    }

    pub fn from_csv(text: &str, mode: CurveMode) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "x,y" => {}
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    message: "expected header `x,y`".into(),
                })
            }
        }
        let mut points = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|v| v.trim().parse().ok())
                    .ok_or_else(|| Error::Parse {
                        line: i + 1,
                        message: format!("bad row `{line}`"),
                    })
            };
            let x = parse(it.next())?;
            let y = parse(it.next())?;
            points.push([x, y]);
        }
        Self::new(mode, points)
    }
}

/// On-disk form of a profile curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveDocument {
    pub mode: CurveMode,
    pub n: u32,
    pub points: Vec<[f64; 2]>,
    pub orientation: Orientation,
    #[serde(default)]
    pub symmetric: bool,
}

impl CurveDocument {
    pub fn into_curve(self) -> Result<ProfileCurve> {
        Ok(ProfileCurve::new(self.mode, self.points)?
            .with_orientation(self.orientation)
            .with_symmetry(self.symmetric))
    }
}

#[inline]
pub fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parabola() -> ProfileCurve {
        let pts = (-10..=10).map(|i| {
            let x = i as f64 * 0.1;
            [x, 2.0 + (x - 0.03) * (x - 0.03)]
        });
        ProfileCurve::new(CurveMode::Graph, pts.collect()).unwrap()
    }

    #[test]
    fn rejects_points_on_axis() {
        let err =
            ProfileCurve::new(CurveMode::Parametric, vec![[0.0, 1.0], [1.0, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::AxisCollision { index: 1, .. }));
    }

    #[test]
    fn rejects_non_monotone_graph() {
        let err = ProfileCurve::new(CurveMode::Graph, vec![[0.0, 1.0], [0.0, 2.0]]).unwrap_err();
        assert!(matches!(err, Error::NonGraphical));
    }

    #[test]
    fn tip_interpolates_between_samples() {
        let (x, y) = parabola().tip();
        assert!((x - 0.03).abs() < 1e-12 && (y - 2.0).abs() < 1e-12);
    }

    #[test]
    fn json_and_csv_round_trip() {
        let c = parabola().with_symmetry(false);
        let (back, n) = ProfileCurve::from_json(&c.to_json(3).unwrap()).unwrap();
        assert_eq!(n, 3);
        assert_eq!(back, c);
        let csv = c.to_csv();
        assert!(csv.starts_with("x,y\n"));
        let back = ProfileCurve::from_csv(&csv, CurveMode::Graph).unwrap();
        assert_eq!(back.points, c.points);
    }

    #[test]
    fn csv_reports_bad_line() {
        let err = ProfileCurve::from_csv("x,y\n0,1\n1,zz\n", CurveMode::Graph).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn symmetrize_removes_defect() {
        let mut c = ProfileCurve::new(
            CurveMode::Parametric,
            vec![[-1.0, 2.0], [0.01, 1.0], [1.02, 2.1]],
        )
        .unwrap();
        assert!(c.symmetry_defect() > 0.01);
        c.symmetrize();
        assert_eq!(c.symmetry_defect(), 0.0);
    }
}
