//! Dicke model parameters, phase classification and the renormalized
//! coefficients of the quadratic fluctuation Hamiltonian.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default half-width of the critical band, relative to `g_c`.
pub const DEFAULT_EPS_CRIT: f64 = 1e-12;

/// Photon frequency `omega_a`, collective atomic frequency `omega_b` and
/// light-matter coupling `g` of the Dicke Hamiltonian
///
/// ```text
/// H/ħ = ω_a a†a + ω_b (S_z + N/2) + (2g/√N)(a† + a) S_x
/// ```
///
/// Construct through [`ModelParams::new`], which enforces
/// `omega_a > 0`, `omega_b > 0`, `g >= 0` and finiteness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams<T> {
    omega_a: T,
    omega_b: T,
    g: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(omega_a: T, omega_b: T, g: T) -> Result<Self> {
        for (name, v) in [("omega_a", omega_a), ("omega_b", omega_b), ("g", g)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        if omega_a <= T::zero() {
            return Err(Error::InvalidParameter("omega_a must be positive".into()));
        }
        if omega_b <= T::zero() {
            return Err(Error::InvalidParameter("omega_b must be positive".into()));
        }
        if g < T::zero() {
            return Err(Error::InvalidParameter("g must be non-negative".into()));
        }
        Ok(Self {
            omega_a,
            omega_b,
            g,
        })
    }

    pub fn omega_a(&self) -> T {
        self.omega_a
    }

    pub fn omega_b(&self) -> T {
        self.omega_b
    }

    pub fn g(&self) -> T {
        self.g
    }

    /// Critical coupling `g_c = √(ω_a ω_b) / 2`.
    pub fn critical_coupling(&self) -> T {
        (self.omega_a * self.omega_b).sqrt() * T::half()
    }

    /// Same physics with every frequency expressed in units of `omega_a`.
    pub fn normalized(&self) -> Self {
        Self {
            omega_a: T::one(),
            omega_b: self.omega_b / self.omega_a,
            g: self.g / self.omega_a,
        }
    }

    /// Same frequencies with a different coupling.
    pub fn with_coupling(&self, g: T) -> Result<Self> {
        Self::new(self.omega_a, self.omega_b, g)
    }
}

/// Validates a raw triple `(omega_a, omega_b, g)`.
pub fn validate(omega_a: f64, omega_b: f64, g: f64) -> Result<ModelParams<f64>> {
    ModelParams::new(omega_a, omega_b, g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Normal,
    Critical,
    Superradiant,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Normal => "normal",
            Phase::Critical => "critical",
            Phase::Superradiant => "superradiant",
        }
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classifies `p` against the band `|g − g_c| ≤ eps_crit · g_c`.
pub fn classify_phase<T: Real>(p: &ModelParams<T>, eps_crit: T) -> Phase {
    let gc = p.critical_coupling();
    let band = eps_crit.abs() * gc;
    if p.g() < gc - band {
        Phase::Normal
    } else if p.g() > gc + band {
        Phase::Superradiant
    } else {
        Phase::Critical
    }
}

/// Coefficients of the fluctuation Hamiltonian
///
/// ```text
/// H/ħ = ω_a a†a + ω̃_b b†b + g̃ (a† + a)(b† + b) + D̃ (b† + b)²
/// ```
///
/// together with the second renormalization that absorbs `D̃` into a
/// one-mode squeeze of `b` (`ω̆_b`, `ğ`, `γ = tanh r_b`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluctuationCoefficients<T> {
    pub g_tilde: T,
    pub d_tilde: T,
    pub omega_b_tilde: T,
    pub omega_b_breve: T,
    pub g_breve: T,
    pub gamma: T,
    pub r_b: T,
}

impl<T: Real> FluctuationCoefficients<T> {
    /// Builds the coefficients from the order parameters `(ā, b̄)`.
    ///
    /// Requires `|b̄| < 1`.
    pub fn from_order_parameters(p: &ModelParams<T>, a_bar: T, b_bar: T) -> Self {
        let one = T::one();
        let two = T::two();
        let b2 = b_bar * b_bar;
        let root = (one - b2).sqrt();
        let g_tilde = p.g() * (one - two * b2) / root;
        let d_tilde = p.g() * a_bar * b_bar / root;
        let omega_b_tilde = p.omega_b() + two * d_tilde;

        // s = e^{2 r_b} = √(1 + 4D̃/ω̃_b)
        let ratio = T::lit(4.0) * d_tilde / omega_b_tilde;
        let s = (one + ratio).sqrt();
        let gamma = ratio / ((s + one) * (s + one));
        let r_b = T::quarter() * ratio.ln_1p();
        let omega_b_breve = (omega_b_tilde * (omega_b_tilde + T::lit(4.0) * d_tilde)).sqrt();
        let g_breve = g_tilde / s.sqrt();

        Self {
            g_tilde,
            d_tilde,
            omega_b_tilde,
            omega_b_breve,
            g_breve,
            gamma,
            r_b,
        }
    }
}
