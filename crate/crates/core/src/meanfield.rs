//! Zero-temperature mean-field solution after the Holstein–Primakoff
//! mapping `S_z → b†b − N/2`, `S_− → (N − b†b)^{1/2} b`.
//!
//! With `⟨a⟩ = √N ā` and `⟨b⟩ = −√N b̄` the energy per atom is
//! `ω_a ā² + ω_b b̄² − 4 g ā b̄ √(1 − b̄²)`. Its stationary points are
//! available in closed form, so this module has no iterative solver.
//! Order parameters are reported on the non-negative branch; `(−ā, −b̄)` is
//! the degenerate partner.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{classify_phase, FluctuationCoefficients, ModelParams, Phase};
use crate::scalar::Real;

/// Step of the central differences used by [`MeanField::stationarity_residual`].
pub const STATIONARITY_STEP: f64 = 1e-6;
/// Tolerance on both partial derivatives of the classical energy.
pub const STATIONARITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanField<T> {
    pub a_bar: T,
    pub b_bar: T,
    pub phase: Phase,
    pub coeffs: FluctuationCoefficients<T>,
}

/// Classical energy per atom, `H̄/(ħN)`.
pub fn classical_energy<T: Real>(p: &ModelParams<T>, a_bar: T, b_bar: T) -> Result<T> {
    let one = T::one();
    if !(b_bar.abs() <= one) {
        return Err(Error::Domain(format!(
            "|b_bar| must not exceed 1, got {b_bar}"
        )));
    }
    let root = (one - b_bar * b_bar).sqrt();
    Ok(p.omega_a() * a_bar * a_bar + p.omega_b() * b_bar * b_bar
        - T::lit(4.0) * p.g() * a_bar * b_bar * root)
}

/// Closed-form order parameters and the derived fluctuation coefficients.
///
/// Inside the critical band the normal-phase values are returned.
pub fn solve_mean_field<T: Real>(p: &ModelParams<T>, eps_crit: T) -> MeanField<T> {
    let phase = classify_phase(p, eps_crit);
    let (a_bar, b_bar) = match phase {
        Phase::Normal | Phase::Critical => (T::zero(), T::zero()),
        Phase::Superradiant => {
            let gc_over_g = p.critical_coupling() / p.g();
            let b2 = T::half() * (T::one() - gc_over_g * gc_over_g);
            let b_bar = b2.sqrt();
            let a_bar = T::two() * p.g() / p.omega_a() * b_bar * (T::one() - b2).sqrt();
            (a_bar, b_bar)
        }
    };
    MeanField {
        a_bar,
        b_bar,
        phase,
        coeffs: FluctuationCoefficients::from_order_parameters(p, a_bar, b_bar),
    }
}

impl<T: Real> MeanField<T> {
    /// Largest central-difference partial derivative of the classical
    /// energy at `(ā, b̄)`.
    pub fn stationarity_residual(&self, p: &ModelParams<T>) -> Result<T> {
        let h = T::lit(STATIONARITY_STEP);
        let two_h = T::two() * h;
        let e = |a, b| classical_energy(p, a, b);
        let da = (e(self.a_bar + h, self.b_bar)? - e(self.a_bar - h, self.b_bar)?) / two_h;
        let db = (e(self.a_bar, self.b_bar + h)? - e(self.a_bar, self.b_bar - h)?) / two_h;
        Ok(da.abs().max(db.abs()))
    }

    pub fn is_stationary(&self, p: &ModelParams<T>) -> bool {
        self.stationarity_residual(p)
            .map(|r| r < T::lit(STATIONARITY_TOL))
            .unwrap_or(false)
    }
}
