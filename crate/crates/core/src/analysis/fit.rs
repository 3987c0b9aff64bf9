//! Least-squares grim reaper fits to the tip region of a profile.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::convexity::tip_window;
use crate::error::{Error, Result};
use crate::geometry::pointwise::point_geometry;
use crate::geometry::{Dimension, GrimReaperSpec, ProfileCurve};

/// Root-mean-square misfit above which a window is not reaper-like.
pub const REAPER_REJECTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReaperFit {
    pub half_width: f64,
    /// Tip height of the fitted reaper.
    pub vertical_offset: f64,
    /// Abscissa of the fitted tip.
    pub horizontal_offset: f64,
    /// Root-mean-square height misfit over the window.
    pub residual: f64,
    pub samples: usize,
}

impl ReaperFit {
    pub fn speed(&self) -> f64 {
        FRAC_PI_2 / self.half_width
    }

    pub fn reaper(&self) -> Result<GrimReaperSpec> {
        Ok(GrimReaperSpec::new(self.half_width, self.vertical_offset)?
            .with_center(self.horizontal_offset))
    }
}

/// Starting half-width of the fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FitInit {
    Width(f64),
    /// `π / (2 k_tip)`: the reaper with the observed tip curvature.
    TipCurvature,
}

/// Fits `y = b - log cos(c (x - x0)) / c`, `c = π / (2ℓ)`, to the samples
/// within chord-length `window` of the tip by Levenberg–Marquardt, started
/// from three half-widths around the initial guess; the best fit wins.
pub fn fit_grim_reaper(
    curve: &ProfileCurve,
    n: Dimension,
    window: f64,
    init: FitInit,
) -> Result<ReaperFit> {
    let (tip, range) = tip_window(curve, window);
    let pts = &curve.points[range];
    if pts.len() < 4 {
        return Err(Error::Precondition(format!(
            "fit window holds {} samples; need at least 4",
            pts.len()
        )));
    }
    if pts.windows(2).any(|w| !(w[1][0] > w[0][0])) {
        return Err(Error::NonGraphical);
    }
    let (x_tip, y_tip) = (curve.points[tip][0], curve.points[tip][1]);
    let l0 = match init {
        FitInit::Width(l) => l,
        FitInit::TipCurvature => {
            let i = tip.clamp(1, curve.len() - 2);
            let k = point_geometry(curve, i, n)?.k;
            if !(k > 0.0) {
                return Err(Error::Precondition(format!(
                    "tip curvature {k} is not positive"
                )));
            }
            FRAC_PI_2 / k
        }
    };
    let reach = pts.iter().map(|p| (p[0] - x_tip).abs()).fold(0.0, f64::max);
    let mut best: Option<[f64; 4]> = None;
    for scale in [1.0, 0.8, 1.25] {
        let start = [(l0 * scale).max(1.02 * reach), y_tip, x_tip];
        if let Some(p) = levenberg_marquardt(pts, start) {
            if best.is_none_or(|b| p[3] < b[3]) {
                best = Some(p);
            }
        }
    }
    let [half_width, vertical_offset, horizontal_offset, cost] =
        best.ok_or_else(|| Error::NonConvergence {
            iterations: 0,
            history: vec![],
        })?;
    Ok(ReaperFit {
        half_width,
        vertical_offset,
        horizontal_offset,
        residual: (cost / pts.len() as f64).sqrt(),
        samples: pts.len(),
    })
}

/// Residuals and Jacobian rows in `(ℓ, b, x0)`; `None` when a sample lies
/// outside the walls.
fn residuals(pts: &[[f64; 2]], p: [f64; 3]) -> Option<(Vec<f64>, Vec<[f64; 3]>)> {
    let [l, b, x0] = p;
    if !(l > 0.0) {
        return None;
    }
    let c = FRAC_PI_2 / l;
    let mut r = Vec::with_capacity(pts.len());
    let mut jac = Vec::with_capacity(pts.len());
    for q in pts {
        let s = q[0] - x0;
        let a = c * s;
        if a.abs() >= FRAC_PI_2 {
            return None;
        }
        let lc = a.cos().ln();
        let tan = a.tan();
        r.push(b - lc / c - q[1]);
        let d_c = lc / (c * c) + s * tan / c;
        jac.push([d_c * (-c / l), 1.0, -tan]);
    }
    Some((r, jac))
}

fn levenberg_marquardt(pts: &[[f64; 2]], start: [f64; 3]) -> Option<[f64; 4]> {
    let cost = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();
    let mut p = start;
    let (mut r, mut jac) = residuals(pts, p)?;
    let mut f = cost(&r);
    let mut lambda = 1e-3;
    for _ in 0..500 {
        let mut a = [[0.0; 3]; 3];
        let mut g = [0.0; 3];
        for (ri, ji) in r.iter().zip(&jac) {
            for i in 0..3 {
                g[i] += ji[i] * ri;
                for j in 0..3 {
                    a[i][j] += ji[i] * ji[j];
                }
            }
        }
        let mut improved = false;
        while lambda < 1e16 {
            let mut m = a;
            for (i, row) in m.iter_mut().enumerate() {
                row[i] += lambda * a[i][i].max(1e-300);
            }
            let Some(step) = solve3(m, [-g[0], -g[1], -g[2]]) else {
                lambda *= 4.0;
                continue;
            };
            let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
            match residuals(pts, trial) {
                Some((rt, jt)) if cost(&rt) < f => {
                    let ft = cost(&rt);
                    let small = (f - ft) <= 1e-15 * f.max(1e-300)
                        || step
                            .iter()
                            .zip(&trial)
                            .all(|(s, t)| s.abs() <= 1e-14 * t.abs().max(1.0));
                    p = trial;
                    r = rt;
                    jac = jt;
                    f = ft;
                    lambda = (lambda / 3.0).max(1e-12);
                    improved = !small;
                    break;
                }
                _ => lambda *= 4.0,
            }
        }
        if !improved {
            break;
        }
    }
    Some([p[0], p[1], p[2], f])
}

/// Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = (i + 1..3).map(|k| m[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / m[i][i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
