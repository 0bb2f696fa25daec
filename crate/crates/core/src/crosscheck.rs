//! Brute-force angle search over the quadrature family.
//!
//! Slow but independent of the eigen-decomposition in
//! [`crate::squeezing::minimize`]; used to cross-check it.

use rayon::prelude::*;

use crate::bogoliubov::CovarianceMatrix;
use crate::squeezing::{variance, QuadratureAngles};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub theta_steps: usize,
    pub psi_steps: usize,
    pub phi_steps: usize,
    /// Final step of the pattern search, in radians.
    pub refine_tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            theta_steps: 180,
            psi_steps: 360,
            phi_steps: 180,
            refine_tol: 1e-10,
        }
    }
}

impl GridSpec {
    pub fn points(&self) -> usize {
        self.theta_steps * self.psi_steps * self.phi_steps
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMinimum {
    pub angles: QuadratureAngles<f64>,
    pub var_grid: f64,
    pub var_refined: f64,
}

/// `θ ∈ [−π/2, π/2)`, `ψ ∈ [−π, π)`, `φ ∈ [0, π)` on a uniform grid, then a
/// compass search from the best node.
pub fn grid_minimum(sigma: &CovarianceMatrix<f64>, spec: &GridSpec) -> GridMinimum {
    use std::f64::consts::{FRAC_PI_2, PI};
    let dt = PI / spec.theta_steps as f64;
    let dq = 2.0 * PI / spec.psi_steps as f64;
    let df = PI / spec.phi_steps as f64;
    let phis: Vec<(f64, f64)> = (0..spec.phi_steps)
        .map(|k| (k as f64 * df).sin_cos())
        .collect();
    let s = &sigma.sigma;

    let (var_grid, (t0, q0, f0)) = (0..spec.theta_steps)
        .into_par_iter()
        .map(|i| {
            let theta = -FRAC_PI_2 + i as f64 * dt;
            let (st, ct) = theta.sin_cos();
            let mut best = (f64::INFINITY, (0.0, 0.0, 0.0));
            for j in 0..spec.psi_steps {
                let psi = -PI + j as f64 * dq;
                let (sq, cq) = psi.sin_cos();
                for (k, &(sp, cp)) in phis.iter().enumerate() {
                    // cos(φ+ψ), sin(φ+ψ) by the addition formulas
                    let cb = cp * cq - sp * sq;
                    let sb = sp * cq + cp * sq;
                    let u = [ct * cp, -ct * sp, st * cb, -st * sb];
                    let mut v = 0.0;
                    for (r, row) in s.iter().enumerate() {
                        v += u[r] * (row[0] * u[0] + row[1] * u[1] + row[2] * u[2] + row[3] * u[3]);
                    }
                    if v < best.0 {
                        best = (v, (theta, psi, k as f64 * df));
                    }
                }
            }
            best
        })
        .reduce(
            || (f64::INFINITY, (0.0, 0.0, 0.0)),
            |a, b| if b.0 < a.0 { b } else { a },
        );

    let mut x = [t0, q0, f0];
    let mut fx = variance(sigma, x[0], x[1], x[2]);
    let mut step = dt.max(dq).max(df);
    while step > spec.refine_tol {
        let mut improved = false;
        for axis in 0..3 {
            for dir in [-1.0, 1.0] {
                let mut y = x;
                y[axis] += dir * step;
                let fy = variance(sigma, y[0], y[1], y[2]);
                if fy < fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    GridMinimum {
        angles: QuadratureAngles {
            theta: x[0],
            psi: x[1],
            phi: x[2],
        },
        var_grid,
        var_refined: fx,
    }
}
