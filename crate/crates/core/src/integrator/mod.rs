//! Explicit time stepping of rotationally symmetric mean curvature flow and of
//! graphical curve shortening flow.
//!
//! Schemes implement [`FlowScheme`] and are looked up by name in a
//! [`SchemeRegistry`]; a [`FlowConfig`] names the scheme it wants.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    CatenoidSpec, CurveMode, Dimension, GrimReaperSpec, ProfileCurve, Truncation,
};

pub mod graphical;
pub mod parametric;
pub mod remesh;
pub mod run;

pub use graphical::{csf_rhs, graphical_rhs, GraphicalScheme};
pub use parametric::{normal_velocity, ParametricScheme};
pub use remesh::{remesh, spacing_ratio};
pub use run::{
    compute_diagnostics, run_flow, Diagnostics, EscapeCriterion, EscapeEvent, FlowTrajectory,
    Snapshot, StopCriteria, StopReason,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TimeScheme {
    /// Forward Euler; first order in time.
    Euler,
    /// Heun's method (explicit trapezoid); second order in time.
    #[default]
    Heun,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    /// Ends held on the reference catenoid.
    PinToCatenoid,
    /// Ends held on the initial offset of the reference catenoid.
    PinToOffset,
    /// Ends held at their initial values.
    FixedValue,
    /// Mirror ghost samples: zero slope across each end, which moves only
    /// vertically.
    Reflect,
    /// Ends follow the translating grim reaper exactly.
    GrimReaper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCondition {
    pub kind: BoundaryKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catenoid: Option<CatenoidSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reaper: Option<GrimReaperSpec>,
}

impl BoundaryCondition {
    pub fn pinned(spec: CatenoidSpec, offset: bool) -> Self {
        let kind = if offset {
            BoundaryKind::PinToOffset
        } else {
            BoundaryKind::PinToCatenoid
        };
        Self {
            kind,
            catenoid: Some(spec),
            reaper: None,
        }
    }

    pub fn fixed() -> Self {
        Self {
            kind: BoundaryKind::FixedValue,
            catenoid: None,
            reaper: None,
        }
    }

    pub fn reflect() -> Self {
        Self {
            kind: BoundaryKind::Reflect,
            catenoid: None,
            reaper: None,
        }
    }

    pub fn grim_reaper(spec: GrimReaperSpec) -> Self {
        Self {
            kind: BoundaryKind::GrimReaper,
            catenoid: None,
            reaper: Some(spec),
        }
    }

    /// Ends are frozen at their initial positions.
    pub fn is_dirichlet(&self) -> bool {
        matches!(
            self.kind,
            BoundaryKind::PinToCatenoid | BoundaryKind::PinToOffset | BoundaryKind::FixedValue
        )
    }

    /// Checks that a curve's ends agree with the condition's reference.
    pub fn check(&self, curve: &ProfileCurve, t: f64) -> Result<()> {
        match self.kind {
            BoundaryKind::PinToCatenoid => {
                let spec = self.catenoid.ok_or_else(|| {
                    Error::Precondition("pin-to-catenoid needs a catenoid".into())
                })?;
                for p in [curve.points[0], curve.points[curve.len() - 1]] {
                    let y = crate::geometry::catenoid_profile(&spec, p[0])?;
                    if (y - p[1]).abs() > 1e-6 * y.max(1.0) {
                        return Err(Error::Precondition(format!(
                            "end ({}, {}) is not on the catenoid (height {y})",
                            p[0], p[1]
                        )));
                    }
                }
                Ok(())
            }
            BoundaryKind::GrimReaper => {
                let g = self
                    .reaper
                    .ok_or_else(|| Error::Precondition("reaper boundary needs a reaper".into()))?;
                for p in [curve.points[0], curve.points[curve.len() - 1]] {
                    let y = g.height(p[0], t)?;
                    if (y - p[1]).abs() > 1e-9 * y.abs().max(1.0) {
                        return Err(Error::Precondition(
                            "curve ends are not on the reaper".into(),
                        ));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    /// Registered scheme name.
    pub scheme: String,
    pub time_scheme: TimeScheme,
    /// Target sample spacing.
    pub dx: f64,
    /// Timestep factor in `dt = cfl · dx_min²`.
    pub cfl: f64,
    pub boundary: BoundaryCondition,
    /// Clamp location of the pinned ends.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Truncation>,
    /// Samples with `y` at or below this height abort the run.
    pub y_floor: f64,
    /// Time between recorded snapshots.
    pub snapshot_interval: f64,
    /// Time between escape tests; crossings are interpolated linearly.
    pub escape_interval: f64,
    /// Weight of the tangential spacing-equalization velocity (parametric).
    pub tangential_weight: f64,
    /// Remesh once the largest-to-smallest spacing ratio exceeds this.
    pub remesh_ratio: f64,
    pub max_steps: usize,
}

impl FlowConfig {
    pub fn new(scheme: &str, dx: f64, boundary: BoundaryCondition) -> Self {
        Self {
            scheme: scheme.to_string(),
            time_scheme: TimeScheme::Heun,
            dx,
            cfl: 0.2,
            boundary,
            truncation: None,
            y_floor: 1e-3,
            snapshot_interval: 0.05,
            escape_interval: 0.005,
            tangential_weight: 1.0,
            remesh_ratio: 1.6,
            max_steps: 50_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dx > 0.0) {
            return Err(Error::Precondition("dx must be positive".into()));
        }
        if !(self.cfl > 0.0 && self.cfl <= 0.25) {
            return Err(Error::Precondition(format!(
                "cfl must lie in (0, 0.25], got {}",
                self.cfl
            )));
        }
        if !(self.snapshot_interval > 0.0) {
            return Err(Error::Precondition(
                "snapshot interval must be positive".into(),
            ));
        }
        if let (Some(spec), Some(Truncation::Abscissa(x))) =
            (self.boundary.catenoid, self.truncation)
        {
            if x >= spec.domain_half_width() {
                return Err(Error::Domain {
                    x,
                    limit: spec.domain_half_width(),
                });
            }
        }
        Ok(())
    }
}

/// A timeslice under evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub curve: ProfileCurve,
    pub n: Dimension,
    pub config: FlowConfig,
}

impl FlowState {
    pub fn new(curve: ProfileCurve, n: Dimension, config: FlowConfig) -> Result<Self> {
        config.validate()?;
        curve.validate()?;
        config.boundary.check(&curve, 0.0)?;
        Ok(Self {
            t: 0.0,
            curve,
            n,
            config,
        })
    }

    pub fn at_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }
}

/// A time-stepping scheme for profile curves.
pub trait FlowScheme: Send + Sync {
    fn name(&self) -> &'static str;

    /// Curve mode the scheme evolves.
    fn mode(&self) -> CurveMode;

    /// Largest admissible step for `state`.
    fn max_dt(&self, state: &FlowState) -> f64 {
        let h = min_spacing(&state.curve, self.mode());
        state.config.cfl * h * h
    }

    /// Advances `state` by `dt`.
    fn step(&self, state: &FlowState, dt: f64) -> Result<FlowState>;
}

/// Smallest sample spacing: abscissa steps for graphs, chords otherwise.
pub fn min_spacing(curve: &ProfileCurve, mode: CurveMode) -> f64 {
    curve
        .points
        .windows(2)
        .map(|w| match mode {
            CurveMode::Graph => w[1][0] - w[0][0],
            CurveMode::Parametric => crate::geometry::curve::dist(w[0], w[1]),
        })
        .fold(f64::INFINITY, f64::min)
}

/// Schemes available by name.
pub struct SchemeRegistry {
    schemes: BTreeMap<&'static str, Box<dyn FlowScheme>>,
}

impl SchemeRegistry {
    pub fn empty() -> Self {
        Self {
            schemes: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, scheme: Box<dyn FlowScheme>) {
        self.schemes.insert(scheme.name(), scheme);
    }

    pub fn get(&self, name: &str) -> Result<&dyn FlowScheme> {
        self.schemes
            .get(name)
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::Unknown {
                kind: "flow scheme",
                name: name.to_string(),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.schemes.keys().copied().collect()
    }

    /// The process-wide registry with the built-in schemes.
    pub fn global() -> &'static SchemeRegistry {
        static GLOBAL: OnceLock<SchemeRegistry> = OnceLock::new();
        GLOBAL.get_or_init(SchemeRegistry::default)
    }
}

impl Default for SchemeRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(GraphicalScheme::mean_curvature()));
        r.register(Box::new(GraphicalScheme::curve_shortening()));
        r.register(Box::new(ParametricScheme));
        r
    }
}

/// Advances one step with the scheme named in the state's configuration.
pub fn step(state: &FlowState, dt: f64) -> Result<FlowState> {
    SchemeRegistry::global()
        .get(&state.config.scheme)?
        .step(state, dt)
}

/// Checks positivity and finiteness of freshly computed samples.
pub(crate) fn check_samples(points: &[[f64; 2]], y_floor: f64, t: f64) -> Result<()> {
    for (i, p) in points.iter().enumerate() {
        if !(p[0].is_finite() && p[1].is_finite()) {
            return Err(Error::Instability { index: i, t });
        }
        if p[1] <= y_floor {
            return Err(Error::AxisCollision {
                index: i,
                y: p[1],
                t,
            });
        }
    }
    Ok(())
}
