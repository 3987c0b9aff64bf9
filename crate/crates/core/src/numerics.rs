//! Small numerical kernels shared by the geometry, flow and analysis modules:
//! Gauss rules, adaptive quadrature, an embedded Runge–Kutta ODE solver,
//! tridiagonal solves and natural cubic splines.

use std::sync::OnceLock;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let m = order;
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let half = m.div_ceil(2);
    for i in 0..half {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-15 {
                let (_, d) = legendre_with_derivative(m, z);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[m - 1 - i] = z;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// A cached Gauss–Legendre rule.
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        Self { nodes, weights }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (z, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * z);
        }
        acc * half
    }
}

/// Shared rules of a few fixed orders.
pub fn cached_rule(order: usize) -> &'static GaussRule {
    static R8: OnceLock<GaussRule> = OnceLock::new();
    static R12: OnceLock<GaussRule> = OnceLock::new();
    static R24: OnceLock<GaussRule> = OnceLock::new();
    static R32: OnceLock<GaussRule> = OnceLock::new();
    static R64: OnceLock<GaussRule> = OnceLock::new();
    static R128: OnceLock<GaussRule> = OnceLock::new();
    static R256: OnceLock<GaussRule> = OnceLock::new();
    static R512: OnceLock<GaussRule> = OnceLock::new();
    let cell = match order {
        8 => &R8,
        12 => &R12,
        24 => &R24,
        32 => &R32,
        64 => &R64,
        128 => &R128,
        256 => &R256,
        512 => &R512,
        _ => panic!("no cached Gauss rule of order {order}"),
    };
    cell.get_or_init(|| GaussRule::new(order))
}

/// Adaptive Gauss–Legendre quadrature on a finite interval.
///
/// Each panel is estimated with a 12- and a 24-point rule; panels whose two
/// estimates disagree by more than their share of the tolerance are bisected.
pub fn adaptive_quad<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let coarse = cached_rule(12);
    let fine = cached_rule(24);
    let whole = fine.integrate(a, b, f);
    let abs_tol = rel_tol * whole.abs().max(1e-300);
    adaptive_panel(f, a, b, coarse, fine, abs_tol, 0)
}

fn adaptive_panel<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    coarse: &GaussRule,
    fine: &GaussRule,
    tol: f64,
    depth: usize,
) -> f64 {
    let lo = coarse.integrate(a, b, f);
    let hi = fine.integrate(a, b, f);
    if (hi - lo).abs() <= tol || depth >= 48 {
        return hi;
    }
    let mid = 0.5 * (a + b);
    adaptive_panel(f, a, mid, coarse, fine, 0.5 * tol, depth + 1)
        + adaptive_panel(f, mid, b, coarse, fine, 0.5 * tol, depth + 1)
}

/// Dormand–Prince 5(4) coefficients.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive Dormand–Prince integrator for small autonomous-in-form systems
/// `y' = f(t, y)`.
#[derive(Debug, Clone, Copy)]
pub struct Rk45 {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for Rk45 {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

impl Rk45 {
    fn trial<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]>(
        f: &F,
        t: f64,
        y: &[f64; N],
        h: f64,
    ) -> ([f64; N], [f64; N]) {
        let mut k = [[0.0; N]; 7];
        for s in 0..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = DP_A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[s] = f(t + DP_C[s] * h, &ys);
        }
        let mut y5 = *y;
        let mut err = [0.0; N];
        for s in 0..7 {
            for i in 0..N {
                y5[i] += h * DP_B5[s] * k[s][i];
                err[i] += h * (DP_B5[s] - DP_B4[s]) * k[s][i];
            }
        }
        (y5, err)
    }

    /// Integrates from `t0` to `t1` and returns the state at `t1`.
    pub fn integrate<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]>(
        &self,
        f: &F,
        t0: f64,
        y0: [f64; N],
        t1: f64,
    ) -> Option<[f64; N]> {
        if t1 == t0 {
            return Some(y0);
        }
        let dir = (t1 - t0).signum();
        let mut t = t0;
        let mut y = y0;
        let mut h = dir * ((t1 - t0).abs() * 1e-3).max(1e-8).min((t1 - t0).abs());
        for _ in 0..self.max_steps {
            if (t1 - t) * dir <= 0.0 {
                return Some(y);
            }
            if (t + h - t1) * dir > 0.0 {
                h = t1 - t;
            }
            let (y5, err) = Self::trial(f, t, &y, h);
            let mut norm: f64 = 0.0;
            for i in 0..N {
                let sc = self.abs_tol + self.rel_tol * y[i].abs().max(y5[i].abs());
                norm = norm.max((err[i] / sc).abs());
            }
            if !norm.is_finite() {
                h *= 0.25;
                continue;
            }
            if norm <= 1.0 {
                t = if (t + h - t1) * dir >= 0.0 { t1 } else { t + h };
                y = y5;
            }
            let factor = if norm == 0.0 {
                5.0
            } else {
                (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
        }
        None
    }

    /// Integrates until `event(y)` changes sign from negative to nonnegative
    /// (or `t_max` is reached) and returns `(t, y)` at the located event.
    pub fn integrate_until<const N: usize, F, E>(
        &self,
        f: &F,
        t0: f64,
        y0: [f64; N],
        t_max: f64,
        event: E,
    ) -> Option<(f64, [f64; N])>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        E: Fn(&[f64; N]) -> f64,
    {
        let mut t = t0;
        let mut y = y0;
        let mut h = 1e-3;
        for _ in 0..self.max_steps {
            if t >= t_max {
                return Some((t, y));
            }
            if t + h > t_max {
                h = t_max - t;
            }
            let (y5, err) = Self::trial(f, t, &y, h);
            let mut norm: f64 = 0.0;
            for i in 0..N {
                let sc = self.abs_tol + self.rel_tol * y[i].abs().max(y5[i].abs());
                norm = norm.max((err[i] / sc).abs());
            }
            if !norm.is_finite() {
                h *= 0.25;
                continue;
            }
            if norm <= 1.0 {
                if event(&y5) >= 0.0 {
                    // bisect on the step length, re-integrating from the last
                    // accepted state
                    let (mut lo, mut hi) = (0.0, h);
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        let ym = self.integrate(f, t, y, t + mid)?;
                        if event(&ym) >= 0.0 {
                            hi = mid;
                        } else {
                            lo = mid;
                        }
                        if hi - lo <= 1e-15 * (1.0 + t.abs()) {
                            break;
                        }
                    }
                    let ye = self.integrate(f, t, y, t + hi)?;
                    return Some((t + hi, ye));
                }
                t += h;
                y = y5;
            }
            let factor = if norm == 0.0 {
                5.0
            } else {
                (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
        }
        None
    }
}

/// Solves a tridiagonal system in place (Thomas algorithm). `lower[0]` and
/// `upper[n-1]` are ignored. Returns `None` on a zero pivot.
pub fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &[f64],
) -> Option<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut beta = diag[0];
    if beta == 0.0 {
        return None;
    }
    c[0] = upper[0] / beta;
    d[0] = rhs[0] / beta;
    for i in 1..n {
        beta = diag[i] - lower[i] * c[i - 1];
        if beta == 0.0 {
            return None;
        }
        if i + 1 < n {
            c[i] = upper[i] / beta;
        }
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / beta;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    Some(x)
}

/// Natural cubic spline through `(knots[i], values[i])`, knots strictly increasing.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(knots: &[f64], values: &[f64]) -> Self {
        Self::with_end_curvature(knots, values, 0.0, 0.0)
    }

    /// Spline whose end second derivatives are those of the parabolas
    /// through the first and last three knots.
    pub fn parabolic_ends(knots: &[f64], values: &[f64]) -> Self {
        let n = knots.len();
        if n < 3 {
            return Self::natural(knots, values);
        }
        let dd = |i: usize| {
            let d1 = (values[i + 1] - values[i]) / (knots[i + 1] - knots[i]);
            let d2 = (values[i + 2] - values[i + 1]) / (knots[i + 2] - knots[i + 1]);
            2.0 * (d2 - d1) / (knots[i + 2] - knots[i])
        };
        Self::with_end_curvature(knots, values, dd(0), dd(n - 3))
    }

    /// Spline with prescribed second derivatives at the two ends.
    pub fn with_end_curvature(knots: &[f64], values: &[f64], first: f64, last: f64) -> Self {
        let n = knots.len();
        assert!(n >= 2 && values.len() == n);
        let mut second = vec![0.0; n];
        second[0] = first;
        second[n - 1] = last;
        if n > 2 {
            let m = n - 2;
            let mut lower = vec![0.0; m];
            let mut diag = vec![0.0; m];
            let mut upper = vec![0.0; m];
            let mut rhs = vec![0.0; m];
            for j in 0..m {
                let i = j + 1;
                let h0 = knots[i] - knots[i - 1];
                let h1 = knots[i + 1] - knots[i];
                lower[j] = h0 / 6.0;
                diag[j] = (h0 + h1) / 3.0;
                upper[j] = h1 / 6.0;
                rhs[j] = (values[i + 1] - values[i]) / h1 - (values[i] - values[i - 1]) / h0;
            }
            rhs[0] -= lower[0] * first;
            rhs[m - 1] -= upper[m - 1] * last;
            if let Some(sol) = solve_tridiagonal(&lower, &diag, &upper, &rhs) {
                second[1..n - 1].copy_from_slice(&sol);
            }
        }
        Self {
            knots: knots.to_vec(),
            values: values.to_vec(),
            second,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.knots.len();
        let i = match self.knots.partition_point(|&k| k <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - t) / h;
        let b = (t - self.knots[i]) / h;
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h
                / 6.0
    }
}

/// Centered first and second derivative weights on a nonuniform three-point
/// stencil with backward spacing `hm` and forward spacing `hp`.
#[inline]
pub fn three_point(fm: f64, f0: f64, fp: f64, hm: f64, hp: f64) -> (f64, f64) {
    let denom = hm * hp * (hm + hp);
    let d1 = (hm * hm * fp - hp * hp * fm + (hp * hp - hm * hm) * f0) / denom;
    let d2 = 2.0 * (hm * fp - (hm + hp) * f0 + hp * fm) / denom;
    (d1, d2)
}

/// Surface area of the unit sphere `S^k` in `R^{k+1}`.
pub fn sphere_area(k: usize) -> f64 {
    use std::f64::consts::PI;
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * sphere_area(k - 2),
    }
}
