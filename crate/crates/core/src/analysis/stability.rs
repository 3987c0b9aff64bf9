//! Principal Dirichlet eigenvalue of the Jacobi operator `Δ + |A|²` on
//! rotationally invariant functions over an arclength window of the catenoid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::pointwise::point_geometry;
use crate::geometry::{CatenoidSpec, CurveMode, ProfileCurve};
use crate::numerics::solve_tridiagonal;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityResult {
    pub half_length: f64,
    /// Principal eigenvalue of `-(Δ + |A|²)`; negative means unstable.
    pub lambda1: f64,
    /// Principal eigenfunction on the grid `s_i = -L + i h`, ends included,
    /// scaled to maximum 1.
    pub eigenfunction: Vec<f64>,
    /// Number of grid intervals.
    pub grid: usize,
    pub iterations: usize,
}

const MAX_ITERATIONS: usize = 20_000;

/// With weight `w = y^{n-1}` the operator on functions of arclength `s`
/// reads `-(w φ')'/w - |A|² φ`, discretized by conservative central
/// differences on `grid` intervals (rounded up to even) and symmetrized by
/// `W^{1/2}`. The lowest eigenvalue comes from shifted inverse iteration.
pub fn jacobi_lambda1(
    spec: &CatenoidSpec,
    half_length: f64,
    grid: usize,
) -> Result<StabilityResult> {
    if !(half_length > 0.0) {
        return Err(Error::Precondition(format!(
            "half-length must be positive, got {half_length}"
        )));
    }
    if grid < 32 {
        return Err(Error::Precondition(format!(
            "grid must have at least 32 intervals, got {grid}"
        )));
    }
    let grid = grid + grid % 2;
    let half = grid / 2;
    let h = half_length / half as f64;
    // one extra sample past each end so every grid node is an interior sample
    let framed = spec.arclength_grid(half_length + h, half + 1)?;
    let curve = ProfileCurve::new(
        CurveMode::Parametric,
        framed.iter().map(|f| f.point).collect(),
    )?;
    let m = spec.n.rot();
    let y: Vec<f64> = curve.points.iter().map(|p| p[1]).collect();
    let weight = |v: f64| v.powf(m);
    // unknowns are the nodes strictly inside (-L, L): curve samples 2..=grid
    let k = grid - 1;
    let mut diag = vec![0.0; k];
    let mut off = vec![0.0; k];
    let w: Vec<f64> = (0..k).map(|i| weight(y[i + 2])).collect();
    for i in 0..k {
        let c = i + 2;
        let pm = weight(0.5 * (y[c - 1] + y[c]));
        let pp = weight(0.5 * (y[c] + y[c + 1]));
        let a2 = point_geometry(&curve, c, spec.n)?.a2;
        diag[i] = (pm + pp) / (h * h * w[i]) - a2;
        if i + 1 < k {
            off[i] = -pp / (h * h * (w[i] * w[i + 1]).sqrt());
        }
    }
    // Gershgorin bound keeps B - σ positive definite
    let sigma = (0..k)
        .map(|i| diag[i] - off[i].abs() - if i > 0 { off[i - 1].abs() } else { 0.0 })
        .fold(f64::INFINITY, f64::min)
        - 1.0;
    let shifted: Vec<f64> = diag.iter().map(|d| d - sigma).collect();
    let lower: Vec<f64> = (0..k)
        .map(|i| if i > 0 { off[i - 1] } else { 0.0 })
        .collect();
    let rayleigh = |v: &[f64]| {
        let mut num = 0.0;
        for i in 0..k {
            let mut bv = diag[i] * v[i];
            if i > 0 {
                bv += off[i - 1] * v[i - 1];
            }
            if i + 1 < k {
                bv += off[i] * v[i + 1];
            }
            num += v[i] * bv;
        }
        num / v.iter().map(|x| x * x).sum::<f64>()
    };
    let mut v = vec![1.0; k];
    let mut lambda = rayleigh(&v);
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut next = solve_tridiagonal(&lower, &shifted, &off, &v)
            .ok_or_else(|| Error::Degenerate("singular shifted Jacobi matrix".into()))?;
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        next.iter_mut().for_each(|x| *x /= norm);
        let l = rayleigh(&next);
        let change = (l - lambda).abs();
        history.push(change);
        v = next;
        lambda = l;
        if change <= 1e-13 * lambda.abs().max(1.0) && iterations > 2 {
            break;
        }
        if iterations >= MAX_ITERATIONS {
            let tail = history[history.len().saturating_sub(10)..].to_vec();
            return Err(Error::NonConvergence {
                iterations,
                history: tail,
            });
        }
    }
    // back to φ = W^{-1/2} ψ, with the Dirichlet zeros at both ends
    let mut phi = vec![0.0; grid + 1];
    for i in 0..k {
        phi[i + 1] = v[i] / w[i].sqrt();
    }
    let sign = if phi.iter().sum::<f64>() < 0.0 {
        -1.0
    } else {
        1.0
    };
    let max = phi.iter().map(|x| x * sign).fold(0.0, f64::max);
    phi.iter_mut().for_each(|x| *x *= sign / max);
    if phi[1..grid].iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Degenerate(
            "principal eigenfunction changes sign".into(),
        ));
    }
    Ok(StabilityResult {
        half_length,
        lambda1: lambda,
        eigenfunction: phi,
        grid,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn catenoid(n: u32) -> CatenoidSpec {
        CatenoidSpec::new(n, 1.0).unwrap()
    }

    #[test]
    fn small_windows_are_stable_and_large_ones_unstable() {
        let spec = catenoid(2);
        let small = jacobi_lambda1(&spec, 0.1, 200).unwrap();
        assert!(small.lambda1 > 0.0);
        // nearly the flat Dirichlet eigenvalue (π / 2L)² minus |A|² ≈ 2
        let flat = (std::f64::consts::PI / 0.2).powi(2);
        assert!((small.lambda1 - (flat - 2.0)).abs() < 0.05 * flat);
        assert!(jacobi_lambda1(&spec, 2.0, 200).unwrap().lambda1 < 0.0);
    }

    #[test]
    fn lambda1_decreases_with_the_window() {
        for n in [2, 3] {
            let spec = catenoid(n);
            let ls: Vec<f64> = [0.1, 0.5, 1.0, 2.0, 4.0]
                .iter()
                .map(|&l| jacobi_lambda1(&spec, l, 400).unwrap().lambda1)
                .collect();
            assert!(ls.windows(2).all(|w| w[1] < w[0]), "n = {n}: {ls:?}");
        }
    }

    #[test]
    fn matches_dense_eigensolver() {
        let spec = catenoid(2);
        let grid = 64;
        let r = jacobi_lambda1(&spec, 1.3, grid).unwrap();
        // rebuild the symmetric matrix independently and diagonalize densely
        let h = 1.3 / (grid / 2) as f64;
        let s: Vec<f64> = (0..=grid + 2).map(|i| -1.3 - h + i as f64 * h).collect();
        let y: Vec<f64> = s.iter().map(|s| (1.0 + s * s).sqrt()).collect();
        let k = grid - 1;
        let mut b = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            let c = i + 2;
            let (pm, pp) = (0.5 * (y[c - 1] + y[c]), 0.5 * (y[c] + y[c + 1]));
            b[(i, i)] = (pm + pp) / (h * h * y[c]) - 2.0 / y[c].powi(4);
            if i + 1 < k {
                b[(i, i + 1)] = -pp / (h * h * (y[c] * y[c + 1]).sqrt());
                b[(i + 1, i)] = b[(i, i + 1)];
            }
        }
        let dense = b.symmetric_eigenvalues().min();
        // the solver takes |A|² from finite differences of the sampled profile
        assert!(
            (r.lambda1 - dense).abs() < 1e-3 * dense.abs().max(1.0),
            "{} vs {dense}",
            r.lambda1
        );
    }

    #[test]
    fn eigenfunction_is_positive_and_even() {
        let r = jacobi_lambda1(&catenoid(3), 1.0, 128).unwrap();
        let phi = &r.eigenfunction;
        assert_eq!(phi.len(), 129);
        assert_eq!(phi[0], 0.0);
        assert_eq!(phi[128], 0.0);
        assert!(phi[1..128].iter().all(|&x| x > 0.0));
        for i in 0..=64 {
            assert!((phi[i] - phi[128 - i]).abs() < 1e-8);
        }
    }

    #[test]
    fn critical_window_matches_jacobi_field() {
        // x tanh x - 1 is the scaling Jacobi field of cosh; its zero x* gives
        // the marginally stable arclength half-length sinh x*
        let mut x: f64 = 1.2;
        for _ in 0..50 {
            x -= (x * x.tanh() - 1.0) / (x.tanh() + x / x.cosh().powi(2));
        }
        let critical = x.sinh();
        assert!((critical - 1.50888).abs() < 1e-4);
        let r = jacobi_lambda1(&catenoid(2), critical, 1600).unwrap();
        assert!(r.lambda1.abs() < 1e-4, "{}", r.lambda1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(jacobi_lambda1(&catenoid(2), 0.0, 64).is_err());
        assert!(jacobi_lambda1(&catenoid(2), 1.0, 16).is_err());
    }
}
