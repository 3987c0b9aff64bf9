//! Graph form of the flow on a fixed abscissa grid:
//! `u_t = u_xx / (1 + u_x²) - (n-1)/u`, or curve shortening flow without the
//! rotational term.

use super::{check_samples, BoundaryKind, FlowScheme, FlowState, TimeScheme};
use crate::error::{Error, Result};
use crate::geometry::{CurveMode, Dimension, ProfileCurve};
use crate::numerics::three_point;

pub struct GraphicalScheme {
    csf: bool,
}

impl GraphicalScheme {
    pub fn mean_curvature() -> Self {
        Self { csf: false }
    }

    pub fn curve_shortening() -> Self {
        Self { csf: true }
    }
}

/// Right-hand side at the interior samples (entry `i` is sample `i + 1`).
pub fn graphical_rhs(curve: &ProfileCurve, n: Dimension) -> Result<Vec<f64>> {
    interior_rhs(curve, n.rot())
}

/// Curve shortening right-hand side `u_xx / (1 + u_x²)` at the interior samples.
pub fn csf_rhs(curve: &ProfileCurve) -> Result<Vec<f64>> {
    interior_rhs(curve, 0.0)
}

fn interior_rhs(curve: &ProfileCurve, rot: f64) -> Result<Vec<f64>> {
    let (xs, us) = graph_arrays(curve)?;
    if rot > 0.0 {
        if let Some(i) = us.iter().position(|&u| !(u > 0.0)) {
            return Err(Error::AxisCollision {
                index: i,
                y: us[i],
                t: f64::NAN,
            });
        }
    }
    let mut out = vec![0.0; xs.len()];
    velocity(&xs, &us, rot, BoundaryKind::FixedValue, &mut out);
    Ok(out[1..out.len() - 1].to_vec())
}

fn graph_arrays(curve: &ProfileCurve) -> Result<(Vec<f64>, Vec<f64>)> {
    if curve.len() < 3 {
        return Err(Error::Degenerate(
            "graph needs at least three samples".into(),
        ));
    }
    let xs = curve.xs();
    if xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::NonGraphical);
    }
    Ok((xs, curve.ys()))
}

/// Fills `out` with `du/dt`; end entries follow the boundary kind (zero for
/// held ends, mirrored-ghost stencil for reflecting ends).
fn velocity(xs: &[f64], us: &[f64], rot: f64, kind: BoundaryKind, out: &mut [f64]) {
    let m = xs.len();
    for i in 1..m - 1 {
        let (ux, uxx) = three_point(
            us[i - 1],
            us[i],
            us[i + 1],
            xs[i] - xs[i - 1],
            xs[i + 1] - xs[i],
        );
        out[i] = uxx / (1.0 + ux * ux) - rot / us[i];
    }
    if kind == BoundaryKind::Reflect {
        let h0 = xs[1] - xs[0];
        out[0] = 2.0 * (us[1] - us[0]) / (h0 * h0) - rot / us[0];
        let h1 = xs[m - 1] - xs[m - 2];
        out[m - 1] = 2.0 * (us[m - 2] - us[m - 1]) / (h1 * h1) - rot / us[m - 1];
    } else {
        out[0] = 0.0;
        out[m - 1] = 0.0;
    }
}

impl FlowScheme for GraphicalScheme {
    fn name(&self) -> &'static str {
        if self.csf {
            "csf"
        } else {
            "graphical"
        }
    }

    fn mode(&self) -> CurveMode {
        CurveMode::Graph
    }

    fn step(&self, state: &FlowState, dt: f64) -> Result<FlowState> {
        let cfg = &state.config;
        let (xs, us) = graph_arrays(&state.curve)?;
        let rot = if self.csf { 0.0 } else { state.n.rot() };
        let kind = cfg.boundary.kind;
        let m = xs.len();
        let t1 = state.t + dt;
        let reaper = if kind == BoundaryKind::GrimReaper {
            cfg.boundary.reaper
        } else {
            None
        };
        let set_ends = |u: &mut [f64], t: f64| {
            if let Some(g) = reaper {
                u[0] = g.height_unchecked(xs[0], t);
                u[m - 1] = g.height_unchecked(xs[m - 1], t);
            }
        };
        let floor = if self.csf {
            f64::NEG_INFINITY
        } else {
            cfg.y_floor
        };
        let check = |u: &[f64], t: f64| -> Result<()> {
            for (i, &v) in u.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::Instability { index: i, t });
                }
                if v <= floor {
                    return Err(Error::AxisCollision { index: i, y: v, t });
                }
            }
            Ok(())
        };

        let mut k1 = vec![0.0; m];
        velocity(&xs, &us, rot, kind, &mut k1);
        let mut next: Vec<f64> = us.iter().zip(&k1).map(|(u, k)| u + dt * k).collect();
        set_ends(&mut next, t1);
        check(&next, t1)?;
        if cfg.time_scheme == TimeScheme::Heun {
            let mut k2 = vec![0.0; m];
            velocity(&xs, &next, rot, kind, &mut k2);
            for i in 0..m {
                next[i] = us[i] + 0.5 * dt * (k1[i] + k2[i]);
            }
            set_ends(&mut next, t1);
            check(&next, t1)?;
        }
        let points: Vec<[f64; 2]> = xs.iter().zip(&next).map(|(x, u)| [*x, *u]).collect();
        if !self.csf {
            check_samples(&points, cfg.y_floor, t1)?;
        }
        let mut curve = ProfileCurve {
            points,
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::pointwise::point_geometry;
    use crate::integrator::{BoundaryCondition, FlowConfig};
    use proptest::prelude::*;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn graph(f: impl Fn(f64) -> f64, h: f64, m: i32) -> ProfileCurve {
        ProfileCurve::new(
            CurveMode::Graph,
            (-m..=m).map(|i| [i as f64 * h, f(i as f64 * h)]).collect(),
        )
        .unwrap()
    }

    #[test]
    fn constant_height_shrinks_at_rotational_rate() {
        for n in 2..5 {
            let c = graph(|_| 2.5, 0.1, 5);
            for v in graphical_rhs(&c, dim(n)).unwrap() {
                assert!((v + (n as f64 - 1.0) / 2.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn parabola_at_origin() {
        let c = graph(|x| 1.0 + x * x, 0.05, 4);
        for n in 2..5 {
            let v = graphical_rhs(&c, dim(n)).unwrap()[3];
            assert!((v - (2.0 - (n as f64 - 1.0))).abs() < 1e-12);
        }
        assert!((csf_rhs(&c).unwrap()[3] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn straight_line_is_csf_stationary() {
        let c = graph(|x| 3.0 + 0.4 * x, 0.1, 6);
        assert!(csf_rhs(&c).unwrap().iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn non_positive_height_is_axis_collision() {
        let c = ProfileCurve {
            mode: CurveMode::Graph,
            points: vec![[0.0, 1.0], [1.0, -1.0], [2.0, 1.0]],
            ..graph(|_| 1.0, 1.0, 1)
        };
        assert!(matches!(
            graphical_rhs(&c, dim(2)),
            Err(Error::AxisCollision { index: 1, .. })
        ));
        assert!(csf_rhs(&c).is_ok());
    }

    #[test]
    fn euler_step_is_scheme_definition() {
        let c = graph(|x| 1.0 + 0.3 * x * x, 0.1, 8);
        let mut cfg = FlowConfig::new("graphical", 0.1, BoundaryCondition::fixed());
        cfg.time_scheme = TimeScheme::Euler;
        let s = FlowState::new(c.clone().with_symmetry(false), dim(3), cfg).unwrap();
        let dt = 1e-3;
        let next = GraphicalScheme::mean_curvature().step(&s, dt).unwrap();
        let rhs = graphical_rhs(&c, dim(3)).unwrap();
        for i in 1..c.len() - 1 {
            assert_eq!(next.curve.points[i][1], c.points[i][1] + dt * rhs[i - 1]);
        }
        assert_eq!(next.curve.points[0], c.points[0]);
    }

    proptest! {
        // the graph equation is the mean curvature times the gradient factor
        #[test]
        fn rhs_is_mean_curvature_times_v(
            a in 0.5f64..3.0, b in -1.0f64..1.0, c in -0.8f64..0.8, h in 0.01f64..0.2, n in 2u32..6
        ) {
            let curve = graph(|x| a + b * x + c * x * x + 0.1 * (3.0 * x).sin(), h, 3);
            let rhs = graphical_rhs(&curve, dim(n)).unwrap();
            for i in 1..curve.len() - 1 {
                let g = point_geometry(&curve, i, dim(n)).unwrap();
                let other = g.h * g.v;
                prop_assert!((rhs[i - 1] - other).abs() <= 1e-10 * (1.0 + other.abs()));
            }
        }
    }
}
