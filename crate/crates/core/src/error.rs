use thiserror::Error;

use crate::integrator::FlowTrajectory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("x = {x} lies outside the profile domain |x| < {limit}")]
    Domain { x: f64, limit: f64 },

    #[error("sample {index} is a boundary sample; interior samples only")]
    BoundarySample { index: usize },

    #[error("degenerate sample spacing near sample {index}")]
    DegenerateSpacing { index: usize },

    #[error("offset by {delta} exceeds the reach of the profile (self-intersection)")]
    ReachExceeded { delta: f64 },

    #[error("Gaussian truncation mass {mass:e} exceeds tolerance {tol:e}")]
    Coverage { mass: f64, tol: f64 },

    #[error("curves do not overlap")]
    EmptyOverlap,

    #[error("sample {index} reached the axis (y = {y:e}) at t = {t}")]
    AxisCollision { index: usize, y: f64, t: f64 },

    #[error("non-finite value at sample {index} at t = {t}")]
    Instability { index: usize, t: f64 },

    #[error("polyline self-intersects at t = {t}")]
    Embeddedness { t: f64 },

    #[error("no escape observed before t = {t_max} (inconclusive)")]
    NoEscape { t_max: f64 },

    #[error("could not bracket target escape time {target}")]
    BracketNotFound { target: f64 },

    #[error(
        "iteration did not converge after {iterations} iterations (last changes: {history:?})"
    )]
    NonConvergence {
        iterations: usize,
        history: Vec<f64>,
    },

    #[error("curve is not graphical over the requested window")]
    NonGraphical,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("insufficient history: {0}")]
    InsufficientHistory(String),

    #[error("time ranges do not overlap")]
    DisjointTimes,

    #[error("schema version {found} is not supported (expected {expected})")]
    Schema { found: u32, expected: u32 },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("run aborted at t = {}: {cause}", partial.final_time())]
    Aborted {
        partial: Box<FlowTrajectory>,
        cause: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics themselves (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::AxisCollision { .. }
            | Error::Instability { .. }
            | Error::Embeddedness { .. }
            | Error::NonConvergence { .. }
            | Error::NoEscape { .. }
            | Error::BracketNotFound { .. } => true,
            Error::Aborted { cause, .. } => cause.is_numeric(),
            _ => false,
        }
    }
}
