//! The catenoid of `R^{n+1}` as the rotation of a positive even profile
//! `w_R(x) = R w(x/R)`, `w(0) = 1`, together with its normal offsets.

use serde::{Deserialize, Serialize};

use super::curve::{CurveMode, ProfileCurve};
use super::polyline;
use crate::error::{Error, Result};
use crate::numerics::{adaptive_quad, Rk45};

/// Hypersurface dimension `n >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::Precondition(format!(
                "dimension must be at least 2, got {n}"
            )));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// `n - 1`, the multiplicity of the rotational curvature.
    pub fn rot(self) -> f64 {
        self.0 as f64 - 1.0
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;
    fn try_from(n: u32) -> Result<Self> {
        Self::new(n)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.0
    }
}

/// Half-width constant `W_n = (1/2) ∫_1^∞ ds / sqrt(s^{2(n-1)} - 1)`, with
/// `W_2 = ∞`.
///
/// The unit-neck profile itself is asymptotic to the vertical lines
/// `x = ±2 W_n`; see [`profile_half_width`].
pub fn half_width(n: Dimension) -> f64 {
    if n.get() == 2 {
        return f64::INFINITY;
    }
    0.5 * tail_integral(n, 1.0)
}

/// Distance from the axis of symmetry to the vertical asymptotes of the
/// unit-neck catenoid profile, `∫_1^∞ ds / sqrt(s^{2(n-1)} - 1) = 2 W_n`.
pub fn profile_half_width(n: Dimension) -> f64 {
    2.0 * half_width(n)
}

/// `∫_{y}^{∞} ds / sqrt(s^{2(n-1)} - 1)` for `n >= 3`, `y >= 1`.
///
/// With `t = s^{-(n-1)}` the integral becomes
/// `(1/(n-1)) ∫_0^{t_y} t^{-1/(n-1)} / sqrt(1 - t^2) dt`; the power singularity
/// at `t = 0` is removed by `t = w^m`, `m = (n-1)/(n-2)`, and the inverse square
/// root at `t = 1` by `t = 1 - v^2`.
fn tail_integral(n: Dimension, y: f64) -> f64 {
    let nm1 = n.rot();
    let a = 1.0 / nm1;
    let m = nm1 / (nm1 - 1.0);
    let t_top = y.powf(-nm1);
    let split = 0.5f64.min(t_top);
    let tol = 1e-13;
    // [0, split] in w with t = w^m
    let w_hi = split.powf(1.0 / m);
    let lower = adaptive_quad(&|w: f64| m / (1.0 - w.powf(2.0 * m)).sqrt(), 0.0, w_hi, tol) * a;
    if t_top <= 0.5 {
        return lower;
    }
    // [1/2, t_top] in v with t = 1 - v^2
    let v_hi = 0.5f64.sqrt();
    let v_lo = (1.0 - t_top).max(0.0).sqrt();
    let upper = adaptive_quad(
        &|v: f64| {
            let t = 1.0 - v * v;
            2.0 * t.powf(-a) / (1.0 + t).sqrt()
        },
        v_lo,
        v_hi,
        tol,
    ) * a;
    lower + upper
}

/// Reference catenoid: dimension and neck radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatenoidSpec {
    pub n: Dimension,
    pub radius: f64,
}

/// Where a sampled catenoid profile is cut off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// Keep `|x| <= X`.
    Abscissa(f64),
    /// Keep the profile below height `Y`.
    Height(f64),
}

/// Sampling request for a catenoid profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    pub mode: CurveMode,
    /// Target sample spacing (abscissa spacing in graph mode, arclength in
    /// parametric mode).
    pub spacing: f64,
    pub truncation: Truncation,
}

/// A profile sample with its exact unit tangent angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramedSample {
    pub point: [f64; 2],
    pub theta: f64,
}

impl FramedSample {
    /// Outward (left) unit normal.
    pub fn normal(&self) -> [f64; 2] {
        [-self.theta.sin(), self.theta.cos()]
    }
}

impl CatenoidSpec {
    pub fn new(n: u32, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Precondition(format!(
                "catenoid radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            n: Dimension::new(n)?,
            radius,
        })
    }

    /// Half-width of this catenoid's profile domain (`∞` for `n = 2`).
    pub fn domain_half_width(&self) -> f64 {
        self.radius * profile_half_width(self.n)
    }

    /// Height and slope `(w_R(x), w_R'(x))`. `n = 2` uses the closed form.
    pub fn height_and_slope(&self, x: f64) -> Result<(f64, f64)> {
        if self.n.get() == 2 {
            let s = x / self.radius;
            if !s.is_finite() || s.abs() > 700.0 {
                return Err(Error::Domain {
                    x,
                    limit: 700.0 * self.radius,
                });
            }
            return Ok((self.radius * s.cosh(), s.sinh()));
        }
        self.height_and_slope_ode(x)
    }

    /// Height and slope from the second-order profile equation
    /// `w'' = (n-1) w^{2n-3}`, `w(0) = 1`, `w'(0) = 0`, integrated outward.
    pub fn height_and_slope_ode(&self, x: f64) -> Result<(f64, f64)> {
        let limit = self.domain_half_width();
        if x.abs() >= limit || !x.is_finite() {
            return Err(Error::Domain { x, limit });
        }
        let nm1 = self.n.rot();
        let p = 2 * self.n.get() as i32 - 3;
        let rhs = |_t: f64, s: &[f64; 2]| [s[1], nm1 * s[0].powi(p)];
        let s = x.abs() / self.radius;
        let out = Rk45::default()
            .integrate(&rhs, 0.0, [1.0, 0.0], s)
            .ok_or(Error::Domain { x, limit })?;
        if !out[0].is_finite() {
            return Err(Error::Domain { x, limit });
        }
        Ok((self.radius * out[0], x.signum() * out[1]))
    }

    /// Abscissa `x >= 0` at which the profile reaches height `y >= R`.
    pub fn abscissa(&self, y: f64) -> Result<f64> {
        let s = y / self.radius;
        if s < 1.0 {
            return Err(Error::Precondition(format!(
                "height {y} is below the neck radius"
            )));
        }
        if self.n.get() == 2 {
            return Ok(self.radius * s.acosh());
        }
        Ok(self.radius * (profile_half_width(self.n) - tail_integral(self.n, s)))
    }

    /// Profile samples with exact tangent angles, ordered left to right.
    pub fn framed_samples(&self, sampling: &Sampling) -> Result<Vec<FramedSample>> {
        if !(sampling.spacing > 0.0) {
            return Err(Error::Precondition(
                "sample spacing must be positive".into(),
            ));
        }
        match sampling.mode {
            CurveMode::Graph => self.graph_samples(sampling),
            CurveMode::Parametric => self.arclength_samples(sampling),
        }
    }

    /// Sampled profile with the requested mode and truncation.
    pub fn sample(&self, sampling: &Sampling) -> Result<ProfileCurve> {
        let framed = self.framed_samples(sampling)?;
        Ok(
            ProfileCurve::new(sampling.mode, framed.iter().map(|f| f.point).collect())?
                .with_symmetry(true),
        )
    }

    fn graph_extent(&self, truncation: Truncation) -> Result<f64> {
        let x_max = match truncation {
            Truncation::Abscissa(x) => x,
            Truncation::Height(y) => self.abscissa(y)?,
        };
        let limit = self.domain_half_width();
        if !(x_max > 0.0) || x_max >= limit {
            return Err(Error::Domain { x: x_max, limit });
        }
        Ok(x_max)
    }

    fn graph_samples(&self, sampling: &Sampling) -> Result<Vec<FramedSample>> {
        let x_max = self.graph_extent(sampling.truncation)?;
        let half = ((x_max / sampling.spacing).round() as usize).max(1);
        let h = x_max / half as f64;
        let mut right = Vec::with_capacity(half + 1);
        if self.n.get() == 2 {
            for i in 0..=half {
                let x = i as f64 * h;
                let (y, slope) = self.height_and_slope(x)?;
                right.push(FramedSample {
                    point: [x, y],
                    theta: slope.atan(),
                });
            }
        } else {
            // one outward sweep of the profile equation through all grid points
            let nm1 = self.n.rot();
            let p = 2 * self.n.get() as i32 - 3;
            let rhs = |_t: f64, s: &[f64; 2]| [s[1], nm1 * s[0].powi(p)];
            let solver = Rk45::default();
            let mut state = [1.0, 0.0];
            let mut s_prev = 0.0;
            for i in 0..=half {
                let x = i as f64 * h;
                let s = x / self.radius;
                state = solver
                    .integrate(&rhs, s_prev, state, s)
                    .ok_or(Error::Domain {
                        x,
                        limit: self.domain_half_width(),
                    })?;
                s_prev = s;
                right.push(FramedSample {
                    point: [x, self.radius * state[0]],
                    theta: state[1].atan(),
                });
            }
        }
        Ok(mirror(&right))
    }

    /// Arclength ODE of the profile in neck units:
    /// `x' = cos θ`, `y' = sin θ`, `θ' = (n-1) cos θ / y`.
    fn arclength_samples(&self, sampling: &Sampling) -> Result<Vec<FramedSample>> {
        let s_end = self.arclength_extent(sampling.truncation)?;
        let half = ((s_end * self.radius / sampling.spacing).round() as usize).max(1);
        self.arc_sweep(s_end, half)
    }

    /// Arclength from the neck to the truncation, in neck units.
    fn arclength_extent(&self, truncation: Truncation) -> Result<f64> {
        let nm1 = self.n.rot();
        let rhs =
            move |_s: f64, st: &[f64; 3]| [st[2].cos(), st[2].sin(), nm1 * st[2].cos() / st[1]];
        let solver = Rk45::default();
        let r = self.radius;
        let start = [0.0, 1.0, 0.0];
        let s_cap = 1e6;
        let (s_end, _) = match truncation {
            Truncation::Height(y) => {
                if y <= r {
                    return Err(Error::Precondition(format!(
                        "truncation height {y} is below the neck"
                    )));
                }
                let target = y / r;
                solver.integrate_until(&rhs, 0.0, start, s_cap, |st| st[1] - target)
            }
            Truncation::Abscissa(x) => {
                let limit = self.domain_half_width();
                if !(x > 0.0) || x >= limit {
                    return Err(Error::Domain { x, limit });
                }
                let target = x / r;
                solver.integrate_until(&rhs, 0.0, start, s_cap, |st| st[0] - target)
            }
        }
        .ok_or_else(|| Error::Degenerate("catenoid arclength integration failed".into()))?;
        Ok(s_end)
    }

    /// `|(y/R)^{n-1} cos θ - 1|`: zero on the exact profile.
    pub fn first_integral_residual(&self, sample: &FramedSample) -> f64 {
        ((sample.point[1] / self.radius).powf(self.n.rot()) * sample.theta.cos() - 1.0).abs()
    }

    /// Exactly `count` samples, uniform in arclength (parametric) or abscissa
    /// (graph) and symmetric about the neck. Even counts straddle the neck.
    pub fn sample_count(
        &self,
        mode: CurveMode,
        truncation: Truncation,
        count: usize,
    ) -> Result<Vec<FramedSample>> {
        if count < 3 {
            return Err(Error::Precondition(format!(
                "need at least 3 samples, got {count}"
            )));
        }
        let extent = match mode {
            CurveMode::Graph => self.graph_extent(truncation)? / self.radius,
            CurveMode::Parametric => self.arclength_extent(truncation)?,
        };
        // parameters -extent + 2 extent i / (count - 1) with i >= count / 2
        let right: Vec<f64> = (count / 2..count)
            .map(|i| extent * (2.0 * i as f64 - (count - 1) as f64) / (count - 1) as f64)
            .collect();
        let nm1 = self.n.rot();
        let solver = Rk45::default();
        let r = self.radius;
        let mut samples = Vec::with_capacity(right.len());
        match mode {
            CurveMode::Parametric => {
                let rhs = move |_s: f64, st: &[f64; 3]| {
                    [st[2].cos(), st[2].sin(), nm1 * st[2].cos() / st[1]]
                };
                let (mut state, mut prev) = ([0.0, 1.0, 0.0], 0.0);
                for &s in &right {
                    state = solver.integrate(&rhs, prev, state, s).ok_or_else(|| {
                        Error::Degenerate("catenoid arclength integration failed".into())
                    })?;
                    prev = s;
                    samples.push(FramedSample {
                        point: [r * state[0], r * state[1]],
                        theta: state[2],
                    });
                }
            }
            CurveMode::Graph => {
                let p = 2 * self.n.get() as i32 - 3;
                let rhs = |_t: f64, s: &[f64; 2]| [s[1], nm1 * s[0].powi(p)];
                let (mut state, mut prev) = ([1.0, 0.0], 0.0);
                for &x in &right {
                    state = solver
                        .integrate(&rhs, prev, state, x)
                        .ok_or(Error::Domain {
                            x: x * r,
                            limit: self.domain_half_width(),
                        })?;
                    prev = x;
                    samples.push(FramedSample {
                        point: [r * x, r * state[0]],
                        theta: state[1].atan(),
                    });
                }
            }
        }
        if count % 2 == 1 {
            return Ok(mirror(&samples));
        }
        let mut out: Vec<FramedSample> = samples
            .iter()
            .rev()
            .map(|f| FramedSample {
                point: [-f.point[0], f.point[1]],
                theta: -f.theta,
            })
            .collect();
        out.extend_from_slice(&samples);
        Ok(out)
    }

    /// Samples at uniform arclength steps over `|s| <= half_length`, with
    /// `half` steps on each side of the neck.
    pub fn arclength_grid(&self, half_length: f64, half: usize) -> Result<Vec<FramedSample>> {
        if !(half_length > 0.0) || half == 0 {
            return Err(Error::Precondition(
                "arclength grid needs a positive length and step count".into(),
            ));
        }
        self.arc_sweep(half_length / self.radius, half)
    }

    /// One outward sweep of the arclength ODE to `s_end` (neck units).
    fn arc_sweep(&self, s_end: f64, half: usize) -> Result<Vec<FramedSample>> {
        let nm1 = self.n.rot();
        let rhs =
            move |_s: f64, st: &[f64; 3]| [st[2].cos(), st[2].sin(), nm1 * st[2].cos() / st[1]];
        let solver = Rk45::default();
        let r = self.radius;
        let step = s_end / half as f64;
        let mut right = Vec::with_capacity(half + 1);
        let mut state = [0.0, 1.0, 0.0];
        let mut s_prev = 0.0;
        for j in 0..=half {
            let s = if j == half { s_end } else { j as f64 * step };
            state = solver
                .integrate(&rhs, s_prev, state, s)
                .ok_or_else(|| Error::Degenerate("catenoid arclength integration failed".into()))?;
            s_prev = s;
            right.push(FramedSample {
                point: [r * state[0], r * state[1]],
                theta: state[2],
            });
        }
        Ok(mirror(&right))
    }

    /// Dense parametric polyline of the profile, used as the reference for
    /// distance measurements.
    pub fn reference_polyline(
        &self,
        truncation: Truncation,
        spacing: f64,
    ) -> Result<Vec<[f64; 2]>> {
        let s = Sampling {
            mode: CurveMode::Parametric,
            spacing,
            truncation,
        };
        Ok(self
            .framed_samples(&s)?
            .into_iter()
            .map(|f| f.point)
            .collect())
    }
}

/// Mirrors right-half samples (starting at `x = 0`) into a left-to-right list.
fn mirror(right: &[FramedSample]) -> Vec<FramedSample> {
    let mut out = Vec::with_capacity(2 * right.len() - 1);
    for f in right.iter().skip(1).rev() {
        out.push(FramedSample {
            point: [-f.point[0], f.point[1]],
            theta: -f.theta,
        });
    }
    out.extend_from_slice(right);
    out
}

/// Catenoid profile height `w_R(x)`.
pub fn catenoid_profile(spec: &CatenoidSpec, x: f64) -> Result<f64> {
    let limit = spec.domain_half_width();
    if x.abs() >= limit {
        return Err(Error::Domain { x, limit });
    }
    Ok(spec.height_and_slope(x)?.0)
}

/// The offset `M + δν` of the sampled catenoid along its outward normal.
///
/// Parametric sampling displaces each sample along its exact normal. Graph
/// sampling returns the offset curve evaluated on the same abscissa grid (the
/// foot point of each grid abscissa is found by Newton iteration).
pub fn normal_offset(spec: &CatenoidSpec, sampling: &Sampling, delta: f64) -> Result<ProfileCurve> {
    let framed = spec.framed_samples(sampling)?;
    let points: Vec<[f64; 2]> = match sampling.mode {
        CurveMode::Parametric => framed
            .iter()
            .map(|f| {
                let nu = f.normal();
                [f.point[0] + delta * nu[0], f.point[1] + delta * nu[1]]
            })
            .collect(),
        CurveMode::Graph => {
            let mut pts = Vec::with_capacity(framed.len());
            for f in &framed {
                pts.push(graph_offset_point(spec, f.point[0], delta)?);
            }
            pts
        }
    };
    if points.iter().any(|p| !(p[1] > 0.0)) {
        return Err(Error::ReachExceeded { delta });
    }
    if sampling.mode == CurveMode::Graph && points.windows(2).any(|w| w[1][0] <= w[0][0]) {
        return Err(Error::ReachExceeded { delta });
    }
    if !polyline::is_simple(&points) {
        return Err(Error::ReachExceeded { delta });
    }
    Ok(ProfileCurve::new(sampling.mode, points)?.with_symmetry(true))
}

/// Point of the offset curve lying above abscissa `x`.
fn graph_offset_point(spec: &CatenoidSpec, x: f64, delta: f64) -> Result<[f64; 2]> {
    if delta == 0.0 {
        return Ok([x, spec.height_and_slope(x)?.0]);
    }
    let r = spec.radius;
    let nm1 = spec.n.rot();
    let p = 2 * spec.n.get() as i32 - 3;
    // foot abscissa xi solves xi - delta sin(theta(xi)) = x
    let mut xi = x;
    for _ in 0..100 {
        let (w, slope) = spec.height_and_slope(xi)?;
        let v = (1.0 + slope * slope).sqrt();
        let sin_t = slope / v;
        let second = nm1 * (w / r).powi(p) / r;
        let k = second / (v * v * v);
        let g = xi - delta * sin_t - x;
        let dg = 1.0 - delta * k;
        if dg <= 0.0 {
            return Err(Error::ReachExceeded { delta });
        }
        let step = g / dg;
        xi -= step;
        if step.abs() < 1e-15 * (1.0 + xi.abs()) {
            break;
        }
    }
    let (w, slope) = spec.height_and_slope(xi)?;
    let v = (1.0 + slope * slope).sqrt();
    Ok([x, w + delta / v])
}
