//! Closed-form unitary route to the ground state.
//!
//! The transformation `U = U_b U₋ U₊` maps the bare vacuum onto the
//! ground state, `|0⟩ ∝ U |0_{a,b}⟩`, with
//!
//! ```text
//! U_b = exp[−(r_b/2)(b†b† − bb)] · exp[−α(a†b − b†a)] · exp[−r(a†b† − ba)]
//! U₋  = exp[−(r₋/2)(a†a† − aa)],   U₊ = exp[−(r₊/2)(b†b† − bb)]
//! ```
//!
//! Every factor is Gaussian, so only its linear action on the quadratures
//! `(x_a, p_a, x_b, p_b)` is needed. Composing those actions and applying
//! them to the vacuum covariance `I/4` gives a second, independent route to
//! the covariance produced by [`crate::bogoliubov`].
//!
//! The mixing angle is fixed only through `tan 2α = 2ğ/(ω_a − ω̆_b)`. The
//! branch used here is `2α = −atan2(2ğ, ω̆_b − ω_a) ∈ [−π, 0]`: it tends to
//! `α = −π/4` as `ω̆_b → ω_a⁺` and keeps `U₋` attached to the lower
//! eigenmode on both sides of resonance.

use serde::Serialize;

use crate::bogoliubov::{CovarianceMatrix, ModeCoefficients};
use crate::error::{Error, Result};
use crate::linalg::{mat4_mul, transpose4};
use crate::meanfield::MeanField;
use crate::model::{classify_phase, ModelParams, Phase, DEFAULT_EPS_CRIT};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticDecomposition<T> {
    pub alpha: T,
    pub r: T,
    pub r_minus: T,
    pub r_plus: T,
    pub eps_minus: T,
    pub eps_plus: T,
    pub omega_minus: T,
    pub omega_plus: T,
    /// One-mode squeeze of `b` absorbing the `D̃ (b† + b)²` term.
    pub r_b: T,
}

/// Squeeze parameters and eigenfrequencies of the unitary route.
///
/// Fails inside the critical band, where `r₋` diverges.
pub fn decompose<T: Real>(
    mf: &MeanField<T>,
    p: &ModelParams<T>,
) -> Result<AnalyticDecomposition<T>> {
    if mf.phase == Phase::Critical {
        return Err(Error::Divergent(
            "r_minus diverges at the critical point".into(),
        ));
    }
    let c = &mf.coeffs;
    let two = T::two();
    let wa = p.omega_a();
    let wb = c.omega_b_breve;
    let gb = c.g_breve;

    let two_alpha = if gb == T::zero() && wa == wb {
        T::zero()
    } else {
        -(two * gb).atan2(wb - wa)
    };
    let alpha = T::half() * two_alpha + T::zero();
    let (sin2a, cos2a) = two_alpha.sin_cos();

    let tanh_2r = two * gb * cos2a / (wa + wb);
    let half_sum = T::half() * (wa + wb);
    let half_diff = T::half() * (wa - wb);
    let s = (half_sum * half_sum - gb * gb * cos2a * cos2a).sqrt();
    let rr = (half_diff * half_diff + gb * gb).sqrt();
    let eps_minus = s - rr;
    let eps_plus = s + rr;
    let off = gb * sin2a.abs();
    let omega_minus = ((eps_minus - off) * (eps_minus + off))
        .max(T::zero())
        .sqrt();
    let omega_plus = ((eps_plus - off) * (eps_plus + off)).sqrt();

    let tanh_2r_minus = gb * sin2a / eps_minus;
    let tanh_2r_plus = -gb * sin2a / eps_plus;
    if !(tanh_2r_minus.abs() < T::one()) {
        return Err(Error::Divergent(format!(
            "|tanh(2 r_minus)| = {} is not below 1",
            tanh_2r_minus.abs()
        )));
    }
    if !(tanh_2r_plus.abs() < T::one()) || !(tanh_2r.abs() < T::one()) {
        return Err(Error::Divergent("squeeze parameter out of range".into()));
    }

    Ok(AnalyticDecomposition {
        alpha,
        r: T::half() * tanh_2r.atanh(),
        r_minus: T::half() * tanh_2r_minus.atanh(),
        r_plus: T::half() * tanh_2r_plus.atanh(),
        eps_minus,
        eps_plus,
        omega_minus,
        omega_plus,
        r_b: c.r_b,
    })
}

/// `(e^{2r₋}/4, e^{−2r₋}/4)` for `ω_a = ω_b` in the normal phase, using
/// `tanh 2r₋ = −g/(ω_a − g)`.
pub fn equal_frequency_variances<T: Real>(p: &ModelParams<T>) -> Result<(T, T)> {
    let wa = p.omega_a();
    if (wa - p.omega_b()).abs() > T::lit(1e-12) * wa {
        return Err(Error::Precondition("requires omega_a = omega_b".into()));
    }
    if classify_phase(p, T::lit(DEFAULT_EPS_CRIT)) != Phase::Normal {
        return Err(Error::Precondition(
            "requires the normal phase (g < g_c)".into(),
        ));
    }
    let t = -p.g() / (wa - p.g());
    // e^{4 r₋} = (1 + t)/(1 − t)
    let e2r = ((T::one() + t) / (T::one() - t)).sqrt();
    Ok((T::quarter() * e2r, T::quarter() / e2r))
}

type Sym4<T> = [[T; 4]; 4];

fn squeeze_a<T: Real>(r: T) -> Sym4<T> {
    diag([(-r).exp(), r.exp(), T::one(), T::one()])
}

fn squeeze_b<T: Real>(r: T) -> Sym4<T> {
    diag([T::one(), T::one(), (-r).exp(), r.exp()])
}

fn diag<T: Real>(d: [T; 4]) -> Sym4<T> {
    let mut m = [[T::zero(); 4]; 4];
    for i in 0..4 {
        m[i][i] = d[i];
    }
    m
}

/// `a → a cos α − b sin α`, `b → b cos α + a sin α`.
fn mixer<T: Real>(alpha: T) -> Sym4<T> {
    let (s, c) = alpha.sin_cos();
    let z = T::zero();
    [[c, z, -s, z], [z, c, z, -s], [s, z, c, z], [z, s, z, c]]
}

/// `a → a cosh r − b† sinh r`, `b → b cosh r − a† sinh r`.
fn two_mode_squeeze<T: Real>(r: T) -> Sym4<T> {
    let (c, s) = (r.cosh(), r.sinh());
    let z = T::zero();
    [[c, z, -s, z], [z, c, z, s], [-s, z, c, z], [z, s, z, c]]
}

/// Heisenberg action `U† v U = T v` of the full `U` on `(x_a, p_a, x_b, p_b)`.
pub fn symplectic_transform<T: Real>(dec: &AnalyticDecomposition<T>) -> [[T; 4]; 4] {
    [
        mixer(dec.alpha),
        two_mode_squeeze(dec.r),
        squeeze_a(dec.r_minus),
        squeeze_b(dec.r_plus),
    ]
    .iter()
    .fold(squeeze_b(dec.r_b), |acc, f| mat4_mul(&acc, f))
}

/// Covariance of `U |0_{a,b}⟩`.
pub fn ground_state_covariance<T: Real>(dec: &AnalyticDecomposition<T>) -> CovarianceMatrix<T> {
    let t = symplectic_transform(dec);
    let mut sigma = mat4_mul(&t, &transpose4(&t));
    for row in sigma.iter_mut() {
        for v in row.iter_mut() {
            *v = *v * T::quarter();
        }
    }
    CovarianceMatrix { sigma }
}

/// The rotated basis `d₋ = U_b a U_b†`, `d₊ = U_b b U_b†` expressed in
/// `(a, b, a†, b†)`; `w, x, y, z` are the weights of `a, b, a†, b†`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuperposedBasis<T> {
    pub d_minus: ModeCoefficients<T>,
    pub d_plus: ModeCoefficients<T>,
}

pub fn superposed_basis_weights<T: Real>(dec: &AnalyticDecomposition<T>) -> SuperposedBasis<T> {
    // U_b v U_b† = T_b⁻¹ v
    let inv = mat4_mul(
        &mat4_mul(&two_mode_squeeze(-dec.r), &mixer(-dec.alpha)),
        &squeeze_b(-dec.r_b),
    );
    let h = T::half();
    let mode = |row_x: usize, row_p: usize| {
        let (s0, s1) = (inv[row_x][0], inv[row_x][2]);
        let (d0, d1) = (inv[row_p][1], inv[row_p][3]);
        ModeCoefficients {
            w: h * (s0 + d0),
            x: h * (s1 + d1),
            y: h * (s0 - d0),
            z: h * (s1 - d1),
        }
    };
    SuperposedBasis {
        d_minus: mode(0, 1),
        d_plus: mode(2, 3),
    }
}
