//! Two-mode quadrature family and its optimal squeezing.
//!
//! The superposed mode `c = a cos θ + e^{iψ} b sin θ` defines the quadrature
//! `X = (c e^{iφ} + c† e^{−iφ}) / 2`. In the quadrature basis
//! `(x_a, p_a, x_b, p_b)` this is `X = u · v` with
//!
//! ```text
//! u = (cos θ cos φ, −cos θ sin φ, sin θ cos(φ+ψ), −sin θ sin(φ+ψ))
//! ```
//!
//! a unit vector. The family reaches every unit vector up to sign, so the
//! minimal variance is the smallest eigenvalue of `Σ`.

use serde::Serialize;

use crate::bogoliubov::{critical_momentum_covariance, BogoliubovModes, CovarianceMatrix};
use crate::linalg::jacobi_eigen;
use crate::scalar::Real;

/// Optimal quadrature and related variances.
///
/// At the critical point `var_max` is `+∞` and `product` is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqueezingReport<T> {
    pub theta_opt: T,
    pub psi_opt: T,
    pub phi_opt: T,
    pub var_min: T,
    pub var_max: T,
    /// `ΔX_min · ΔX_max`.
    pub product: Option<T>,
    /// `(ΔX_{0,0,π/2})²`, the photon-only variance.
    pub var_photon: T,
    pub critical_flag: bool,
}

/// Angles `(θ, ψ, φ)` of one quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureAngles<T> {
    pub theta: T,
    pub psi: T,
    pub phi: T,
}

pub fn quadrature_vector<T: Real>(theta: T, psi: T, phi: T) -> [T; 4] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let (sq, cq) = (phi + psi).sin_cos();
    [ct * cp, -ct * sp, st * cq, -st * sq]
}

pub fn variance<T: Real>(sigma: &CovarianceMatrix<T>, theta: T, psi: T, phi: T) -> T {
    sigma.quadratic_form(&quadrature_vector(theta, psi, phi))
}

/// Wraps an angle into `[lo, lo + period)`.
fn wrap<T: Real>(x: T, lo: T, period: T) -> T {
    let mut y = x - ((x - lo) / period).floor() * period;
    if y >= lo + period {
        y = y - period;
    }
    if y < lo {
        y = lo;
    }
    y
}

/// Inverts [`quadrature_vector`].
///
/// Conventions: `θ ∈ [−π/2, π/2]`, `φ ∈ [0, π)`, `ψ ∈ [−π, π)`. The
/// overall sign of `u` is fixed by `φ ∈ [0, π)` with `cos θ ≥ 0`; the
/// remaining freedom `θ → −θ, ψ → ψ + π` is resolved toward the smaller
/// `θ`. An undetermined angle (its amplitude vanishes) is reported as 0.
pub fn angles_from_vector<T: Real>(u: &[T; 4]) -> QuadratureAngles<T> {
    let pi = T::PI();
    let rho_a = (u[0] * u[0] + u[1] * u[1]).sqrt();
    let rho_b = (u[2] * u[2] + u[3] * u[3]).sqrt();
    let tiny = T::epsilon() * T::lit(16.0) * (rho_a + rho_b);

    let (phi, sign) = if rho_a > tiny {
        let raw = (-u[1]).atan2(u[0]);
        if raw >= T::zero() && raw < pi {
            (raw, T::one())
        } else {
            (wrap(raw, T::zero(), pi), -T::one())
        }
    } else {
        (T::zero(), T::one())
    };
    if rho_b <= tiny {
        return QuadratureAngles {
            theta: T::zero(),
            psi: T::zero(),
            phi,
        };
    }
    // (u2, u3) = sin θ (cos β, −sin β) with β = φ + ψ and sin θ = −ρ_b
    let (b2, b3) = (sign * u[2], sign * u[3]);
    let beta = b3.atan2(-b2);
    let theta = if rho_a > tiny {
        -(rho_b.atan2(rho_a))
    } else {
        -T::FRAC_PI_2()
    };
    QuadratureAngles {
        theta,
        psi: wrap(beta - phi, -pi, T::two() * pi),
        phi,
    }
}

fn report_from_min<T: Real>(
    sigma: &CovarianceMatrix<T>,
    var_min: T,
    u: &[T; 4],
) -> SqueezingReport<T> {
    let ang = angles_from_vector(u);
    let var_max = variance(sigma, ang.theta, ang.psi, ang.phi - T::FRAC_PI_2());
    SqueezingReport {
        theta_opt: ang.theta,
        psi_opt: ang.psi,
        phi_opt: ang.phi,
        var_min,
        var_max,
        product: Some((var_min * var_max).max(T::zero()).sqrt()),
        var_photon: sigma.sigma[1][1],
        critical_flag: false,
    }
}

/// Global minimum of `uᵀ Σ u` over the quadrature family.
pub fn minimize<T: Real>(sigma: &CovarianceMatrix<T>) -> SqueezingReport<T> {
    let e = sigma.eigen();
    let v = &e.vectors[0];
    let u = [v[0], v[1], v[2], v[3]];
    report_from_min(sigma, e.values[0], &u)
}

/// Report at `Ω₋ = 0`.
///
/// Only the momentum block of `Σ` is finite there; it is rank one and its
/// null direction is the perfectly squeezed quadrature.
pub fn critical_report<T: Real>(modes: &BogoliubovModes<T>) -> SqueezingReport<T> {
    let pp = critical_momentum_covariance(modes);
    let flat = [pp[0][0], pp[0][1], pp[1][0], pp[1][1]];
    let e = jacobi_eigen(&flat, 2);
    let v = &e.vectors[0];
    let ang = angles_from_vector(&[T::zero(), v[0], T::zero(), v[1]]);
    SqueezingReport {
        theta_opt: ang.theta,
        psi_opt: ang.psi,
        phi_opt: ang.phi,
        var_min: T::zero(),
        var_max: T::infinity(),
        product: None,
        var_photon: pp[0][0],
        critical_flag: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bogoliubov::{build_matrix, covariance, diagonalize, DEFAULT_OMEGA_CRIT};
    use crate::meanfield::solve_mean_field;
    use crate::model::{validate, DEFAULT_EPS_CRIT};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

    fn modes(wa: f64, wb: f64, g: f64) -> BogoliubovModes<f64> {
        let p = validate(wa, wb, g).unwrap();
        let mf = solve_mean_field(&p, DEFAULT_EPS_CRIT);
        diagonalize(&build_matrix(&mf, &p), DEFAULT_OMEGA_CRIT).unwrap()
    }

    fn sigma(wa: f64, wb: f64, g: f64) -> CovarianceMatrix<f64> {
        covariance(&modes(wa, wb, g)).unwrap()
    }

    #[test]
    fn quadrature_vector_examples() {
        assert_eq!(quadrature_vector(0.0, 0.0, 0.0), [1.0, 0.0, 0.0, 0.0]);
        let u = quadrature_vector(0.0, 0.0, FRAC_PI_2);
        assert!(u[0].abs() < 1e-16 && (u[1] + 1.0).abs() < 1e-16 && u[2] == 0.0 && u[3] == 0.0);
        let u = quadrature_vector(-FRAC_PI_4, 0.0, FRAC_PI_2);
        let expect = [0.0, -FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2];
        for i in 0..4 {
            assert!((u[i] - expect[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn vacuum_variance_is_quarter() {
        let s = CovarianceMatrix::vacuum();
        for (t, p, f) in [(0.1, 0.2, 0.3), (-1.0, 2.0, 3.0), (0.7, -0.4, 1.9)] {
            assert_relative_eq!(variance(&s, t, p, f), 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn resonant_variances() {
        let s = sigma(1.0, 1.0, 0.3);
        let vmin = variance(&s, -FRAC_PI_4, 0.0, FRAC_PI_2);
        let vmax = variance(&s, -FRAC_PI_4, 0.0, 0.0);
        assert_relative_eq!(vmin, 0.158113883008419, epsilon = 1e-12);
        assert_relative_eq!(vmax, 0.395284707521047, epsilon = 1e-12);
        assert_relative_eq!(vmin * vmax, 1.0 / 16.0, epsilon = 1e-14);
    }

    #[test]
    fn resonant_optimum() {
        let r = minimize(&sigma(1.0, 1.0, 0.3));
        assert_relative_eq!(r.theta_opt, -FRAC_PI_4, epsilon = 1e-12);
        assert_relative_eq!(r.psi_opt, 0.0, epsilon = 1e-12);
        assert_relative_eq!(r.phi_opt, FRAC_PI_2, epsilon = 1e-12);
        assert_relative_eq!(r.var_min, 0.158113883008419, epsilon = 1e-12);
        assert_relative_eq!(r.product.unwrap(), 0.25, epsilon = 1e-12);
        assert!(r.var_min <= r.var_photon);
    }

    #[test]
    fn decoupled_optimum() {
        let r = minimize(&sigma(1.0, 1.0, 0.0));
        assert_eq!((r.var_min, r.var_max), (0.25, 0.25));
        assert_eq!(r.product, Some(0.25));
        assert_eq!((r.theta_opt, r.psi_opt, r.phi_opt), (0.0, 0.0, 0.0));
    }

    #[test]
    fn approaches_critical_point() {
        let mut prev = f64::INFINITY;
        for k in 1..=8 {
            let g = 0.5 * (1.0 - 10f64.powi(-k));
            let r = minimize(&sigma(1.0, 1.0, g));
            assert!(r.var_min < prev);
            prev = r.var_min;
            assert_relative_eq!(r.product.unwrap(), 0.25, epsilon = 1e-9);
        }
        assert!(prev < 1e-4);
    }

    #[test]
    fn critical_report_values() {
        let r = critical_report(&modes(1.0, 1.0, 0.5));
        assert!(r.critical_flag);
        assert_eq!(r.var_min, 0.0);
        assert!(r.var_max.is_infinite());
        assert_eq!(r.product, None);
        assert!(r.var_photon > 0.05);
        assert_relative_eq!(r.theta_opt, -FRAC_PI_4, epsilon = 1e-12);
        assert_relative_eq!(r.phi_opt, FRAC_PI_2, epsilon = 1e-12);
        assert_relative_eq!(r.psi_opt, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn asymptotic_recovery() {
        for wb in [1.0, 2.0] {
            let gc = validate(1.0, wb, 0.0).unwrap().critical_coupling();
            // the atomic mode keeps a single-mode squeeze e^{2r_b} → √3
            let far = minimize(&sigma(1.0, wb, 1e4 * gc)).var_min;
            assert!((far - 0.25 / 3f64.sqrt()).abs() < 1e-6, "{}", far);
            let mut prev = 0.0;
            for k in 1..=30 {
                let v = minimize(&sigma(1.0, wb, gc * (1.0 + 0.008 * k as f64))).var_min;
                assert!(v > prev && v < 0.25);
                prev = v;
            }
            prev = minimize(&sigma(1.0, wb, 2.0 * gc)).var_min;
            for k in 1..=100 {
                let v = minimize(&sigma(1.0, wb, gc * (2.0 + 0.1 * k as f64))).var_min;
                assert!(v < prev && v > far);
                prev = v;
            }
            let mut prev = 0.25;
            for k in 1..100 {
                let v = minimize(&sigma(1.0, wb, gc * k as f64 / 100.0)).var_min;
                assert!(v < prev);
                prev = v;
            }
        }
    }

    #[test]
    fn angle_conventions_for_each_branch() {
        for (t, p, f) in [
            (0.3, 0.0, 0.2),
            (-0.3, 1.0, 2.5),
            (-FRAC_PI_2, 0.4, 0.0),
            (0.0, 0.0, 1.0),
        ] {
            let u = quadrature_vector(t, p, f);
            let a = angles_from_vector(&u);
            assert!((-FRAC_PI_2..=FRAC_PI_2).contains(&a.theta));
            assert!((0.0..PI).contains(&a.phi));
            assert!((-PI..PI).contains(&a.psi));
            let back = quadrature_vector(a.theta, a.psi, a.phi);
            let sgn = if (0..4).map(|i| back[i] * u[i]).sum::<f64>() < 0.0 {
                -1.0
            } else {
                1.0
            };
            for i in 0..4 {
                assert!((sgn * back[i] - u[i]).abs() < 1e-12, "{t} {p} {f}");
            }
        }
    }

    proptest! {
        #[test]
        fn angles_roundtrip_up_to_sign(t in -1.5f64..1.5, p in -3.0f64..3.0, f in 0.0f64..3.1) {
            let u = quadrature_vector(t, p, f);
            let a = angles_from_vector(&u);
            let back = quadrature_vector(a.theta, a.psi, a.phi);
            let dot: f64 = (0..4).map(|i| back[i] * u[i]).sum();
            prop_assert!((dot.abs() - 1.0).abs() < 1e-12);
            prop_assert!(a.theta <= 0.0);
        }

        #[test]
        fn report_invariants(wb in 0.3f64..3.0, rel in 0.0f64..4.0) {
            prop_assume!((rel - 1.0).abs() > 1e-3);
            let gc = validate(1.0, wb, 0.0).unwrap().critical_coupling();
            let s = sigma(1.0, wb, rel * gc);
            let r = minimize(&s);
            prop_assert!((r.product.unwrap() - 0.25).abs() < 1e-9);
            prop_assert!(r.var_min > 0.0 && r.var_min <= 0.25 + 1e-15);
            prop_assert!(r.var_max >= 0.25 - 1e-15);
            prop_assert!(r.var_min <= r.var_photon + 1e-15);
            prop_assert!((variance(&s, r.theta_opt, r.psi_opt, r.phi_opt) - r.var_min).abs() < 1e-12);
        }
    }
}
