//! Deterministic SVG plots of profile curves.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::integrator::FlowTrajectory;

#[derive(Debug, Clone, PartialEq)]
pub struct Overlay {
    pub label: String,
    pub points: Vec<[f64; 2]>,
    pub color: String,
}

impl Overlay {
    pub fn new(label: &str, points: Vec<[f64; 2]>, color: &str) -> Self {
        Self {
            label: label.into(),
            points,
            color: color.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgOptions {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub overlays: Vec<Overlay>,
    /// Draw the axis of rotation `y = 0`.
    pub rotation_axis: bool,
    /// Draw the symmetry line `x = 0`.
    pub symmetry_axis: bool,
}

impl Default for SvgOptions {
    fn default() -> Self {
        Self {
            width: 800.0,
            height: 600.0,
            margin: 20.0,
            overlays: Vec::new(),
            rotation_axis: true,
            symmetry_axis: false,
        }
    }
}

impl SvgOptions {
    pub fn axis_count(&self) -> usize {
        self.rotation_axis as usize + self.symmetry_axis as usize
    }
}

/// One `<polyline>` per profile and overlay and one `<line>` per axis. The
/// view is symmetric about `x = 0` and always contains the rotation axis.
pub fn export_svg(profiles: &[Vec<[f64; 2]>], opts: &SvgOptions) -> Result<String> {
    if profiles.is_empty() || profiles.iter().any(|p| p.is_empty()) {
        return Err(Error::Precondition("nothing to plot".into()));
    }
    let all = profiles
        .iter()
        .chain(opts.overlays.iter().map(|o| &o.points))
        .flatten();
    let (mut x_max, mut y_max) = (0.0f64, 0.0f64);
    for p in all {
        if !p[0].is_finite() || !p[1].is_finite() {
            return Err(Error::Precondition("non-finite point".into()));
        }
        x_max = x_max.max(p[0].abs());
        y_max = y_max.max(p[1]);
    }
    let x_max = if x_max > 0.0 { x_max } else { 1.0 };
    let y_max = if y_max > 0.0 { y_max } else { 1.0 };
    let plot_w = opts.width - 2.0 * opts.margin;
    let plot_h = opts.height - 2.0 * opts.margin;
    let scale = (plot_w / (2.0 * x_max)).min(plot_h / y_max);
    let cx = opts.width / 2.0;
    let base = opts.height - opts.margin;
    let map = |p: &[f64; 2]| (cx + scale * p[0], base - scale * p[1]);
    let path = |pts: &[[f64; 2]]| {
        let mut s = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = map(p);
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{x:.3},{y:.3}");
        }
        s
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = opts.width,
        h = opts.height
    );
    if opts.rotation_axis {
        let _ = writeln!(
            svg,
            r##"<line class="axis rotation" x1="{:.3}" y1="{base:.3}" x2="{:.3}" y2="{base:.3}" stroke="#888" stroke-dasharray="6 3"/>"##,
            opts.margin,
            opts.width - opts.margin
        );
    }
    if opts.symmetry_axis {
        let _ = writeln!(
            svg,
            r##"<line class="axis symmetry" x1="{cx:.3}" y1="{:.3}" x2="{cx:.3}" y2="{base:.3}" stroke="#bbb" stroke-dasharray="2 3"/>"##,
            opts.margin
        );
    }
    let count = profiles.len();
    for (i, p) in profiles.iter().enumerate() {
        // later profiles darker
        let shade = if count > 1 {
            200 - (180 * i / (count - 1))
        } else {
            20
        };
        let _ = writeln!(
            svg,
            r#"<polyline class="profile" fill="none" stroke="rgb({shade},{shade},{shade})" stroke-width="1" points="{}"/>"#,
            path(p)
        );
    }
    for o in &opts.overlays {
        let _ = writeln!(
            svg,
            r#"<polyline class="overlay" data-label="{}" fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            escape(&o.label),
            escape(&o.color),
            path(&o.points)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Every `stride`-th snapshot of `traj`, always including the last.
pub fn trajectory_svg(traj: &FlowTrajectory, stride: usize, opts: &SvgOptions) -> Result<String> {
    let stride = stride.max(1);
    let n = traj.snapshots.len();
    let profiles: Vec<Vec<[f64; 2]>> = traj
        .snapshots
        .iter()
        .enumerate()
        .filter(|(i, _)| i % stride == 0 || *i + 1 == n)
        .map(|(_, s)| s.curve.points.clone())
        .collect();
    export_svg(&profiles, opts)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CatenoidSpec, CurveMode, Sampling, Truncation};

    fn catenoid_points() -> Vec<[f64; 2]> {
        CatenoidSpec::new(2, 1.0)
            .unwrap()
            .sample(&Sampling {
                mode: CurveMode::Graph,
                spacing: 0.05,
                truncation: Truncation::Abscissa(2.0),
            })
            .unwrap()
            .points
    }

    fn polyline_coords(svg: &str) -> Vec<Vec<(f64, f64)>> {
        svg.lines()
            .filter(|l| l.starts_with("<polyline"))
            .map(|l| {
                let start = l.find("points=\"").unwrap() + 8;
                let end = start + l[start..].find('"').unwrap();
                l[start..end]
                    .split(' ')
                    .map(|pair| {
                        let (x, y) = pair.split_once(',').unwrap();
                        (x.parse().unwrap(), y.parse().unwrap())
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn single_profile_is_one_mirror_symmetric_polyline() {
        let opts = SvgOptions::default();
        let svg = export_svg(&[catenoid_points()], &opts).unwrap();
        let lines = polyline_coords(&svg);
        assert_eq!(lines.len(), 1);
        let cx = opts.width / 2.0;
        let p = &lines[0];
        for (a, b) in p.iter().zip(p.iter().rev()) {
            assert!((a.0 - cx + (b.0 - cx)).abs() <= 1e-3);
            assert_eq!(a.1, b.1);
        }
    }

    #[test]
    fn element_count_is_profiles_plus_overlays_plus_axes() {
        let c = catenoid_points();
        let profiles = vec![c.clone(), c.clone(), c.clone()];
        let opts = SvgOptions {
            overlays: vec![
                Overlay::new("catenoid", c.clone(), "blue"),
                Overlay::new("reaper", c, "red"),
            ],
            symmetry_axis: true,
            ..SvgOptions::default()
        };
        let svg = export_svg(&profiles, &opts).unwrap();
        let elements = svg.matches("<polyline").count() + svg.matches("<line").count();
        assert_eq!(elements, 3 + 2 + opts.axis_count());
        assert_eq!(opts.axis_count(), 2);
    }

    #[test]
    fn output_is_byte_identical() {
        let c = catenoid_points();
        let a = export_svg(std::slice::from_ref(&c), &SvgOptions::default()).unwrap();
        let b = export_svg(&[c], &SvgOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(export_svg(&[], &SvgOptions::default()).is_err());
        assert!(export_svg(&[vec![]], &SvgOptions::default()).is_err());
    }
}
