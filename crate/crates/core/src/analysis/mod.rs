//! Verification of simulated flows: convexity properties, avoidance, grim
//! reaper asymptotics, blowup rescaling, density monotonicity and stability
//! of the catenoid.
//!
//! Trajectory checks share the [`TrajectoryCheck`] trait and are selected by
//! name from a [`CheckRegistry`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::FlowTrajectory;

pub mod blowup;
pub mod convexity;
pub mod fit;
pub mod monotonicity;
pub mod stability;

pub use blowup::{blowup_rescale, BlowupResult, RescaledSlice};
pub use convexity::{
    flatness, nonconvexity_check, tip_speed, verify_avoidance, verify_mean_convex,
    NonconvexityReport,
};
pub use fit::{fit_grim_reaper, FitInit, ReaperFit, REAPER_REJECTION};
pub use monotonicity::density_monotonicity;
pub use stability::{jacobi_lambda1, StabilityResult};

/// Verdict of one check: a named pass/fail with the series it was decided on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub pass: bool,
    /// `(time or parameter, value)` pairs.
    pub series: Vec<[f64; 2]>,
    pub thresholds: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    pub fn new(check: &str, pass: bool, series: Vec<[f64; 2]>) -> Self {
        Self {
            check: check.to_string(),
            pass,
            series,
            thresholds: BTreeMap::new(),
            note: None,
        }
    }

    pub fn threshold(mut self, name: &str, value: f64) -> Self {
        self.thresholds.insert(name.to_string(), value);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Smallest value of the series.
    pub fn min_value(&self) -> f64 {
        self.series
            .iter()
            .map(|p| p[1])
            .fold(f64::INFINITY, f64::min)
    }
}

/// A pass/fail property of a single trajectory.
pub trait TrajectoryCheck: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, traj: &FlowTrajectory) -> Result<CheckReport>;
}

pub struct CheckRegistry {
    checks: BTreeMap<&'static str, Box<dyn TrajectoryCheck>>,
}

impl CheckRegistry {
    pub fn empty() -> Self {
        Self {
            checks: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, check: Box<dyn TrajectoryCheck>) {
        self.checks.insert(check.name(), check);
    }

    pub fn get(&self, name: &str) -> Result<&dyn TrajectoryCheck> {
        self.checks
            .get(name)
            .map(|c| c.as_ref())
            .ok_or_else(|| Error::Unknown {
                kind: "check",
                name: name.to_string(),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.checks.keys().copied().collect()
    }
}

impl Default for CheckRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(convexity::MeanConvexCheck));
        r.register(Box::new(convexity::NonconvexCheck::default()));
        r.register(Box::new(convexity::ConvexTipCheck::default()));
        r.register(Box::new(convexity::SymmetryCheck));
        r.register(Box::new(convexity::OutsideCheck));
        r.register(Box::new(convexity::EmbeddedCheck));
        r
    }
}
