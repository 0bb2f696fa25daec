//! Single-point evaluation through both routes.
//!
//! Everything is computed in units of `ω_a`. Inside the critical band the
//! point is reported through the `Ω₋ = 0` limit: zero minimal variance, an
//! infinite conjugate variance and no uncertainty product.

use serde::{Serialize, Serializer};

use crate::analytic::{
    decompose, ground_state_covariance, superposed_basis_weights, SuperposedBasis,
};
use crate::bogoliubov::{build_matrix, covariance, diagonalize, DEFAULT_OMEGA_CRIT};
use crate::ed::{self, EdConfig};
use crate::error::{Error, Result};
use crate::meanfield::solve_mean_field;
use crate::model::{Phase, DEFAULT_EPS_CRIT};
use crate::squeezing::{critical_report, minimize};
use crate::{Coefficients, Covariance, Decomposition, Modes, Params, Squeezing};

/// Serializes non-finite floats as `"inf"`, `"-inf"` or `"nan"`.
pub(crate) fn ser_float<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

fn ser_squeezing<S: Serializer>(r: &Squeezing, s: S) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct View {
        theta_opt: f64,
        psi_opt: f64,
        phi_opt: f64,
        var_min: f64,
        #[serde(serialize_with = "ser_float")]
        var_max: f64,
        product: Option<f64>,
        var_photon: f64,
        critical_flag: bool,
    }
    View {
        theta_opt: r.theta_opt,
        psi_opt: r.psi_opt,
        phi_opt: r.phi_opt,
        var_min: r.var_min,
        var_max: r.var_max,
        product: r.product,
        var_photon: r.var_photon,
        critical_flag: r.critical_flag,
    }
    .serialize(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub omega_a: f64,
    pub omega_b: f64,
    pub g: f64,
    pub omega_b_ratio: f64,
    pub g_over_omega_a: f64,
    pub critical_coupling: f64,
    pub phase: Phase,
    pub a_bar: f64,
    pub b_bar: f64,
    pub coefficients: Coefficients,
    pub omega_minus: f64,
    pub omega_plus: f64,
    pub modes: Modes,
    /// Absent at the critical point.
    pub covariance: Option<Covariance>,
    pub analytic: Option<Decomposition>,
    pub superposed_basis: Option<SuperposedBasis<f64>>,
    #[serde(serialize_with = "ser_squeezing")]
    pub squeezing: Squeezing,
    /// Largest relative discrepancy between the two routes.
    pub route_delta: Option<f64>,
}

/// Largest relative discrepancy in `Ω±` and in `Σ` (scaled by its largest
/// entry).
pub fn route_discrepancy(
    modes: &Modes,
    sigma: &Covariance,
    dec: &Decomposition,
    sigma2: &Covariance,
) -> f64 {
    let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE);
    let scale = sigma
        .sigma
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let cov = sigma
        .sigma
        .iter()
        .flatten()
        .zip(sigma2.sigma.iter().flatten())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs() / scale));
    rel(modes.omega_minus, dec.omega_minus)
        .max(rel(modes.omega_plus, dec.omega_plus))
        .max(cov)
}

/// Evaluates one parameter point; `band` is the relative half-width of the
/// critical band around `g_c`.
pub fn evaluate_point(p: &Params, band: f64) -> Result<PointReport> {
    let q = p.normalized();
    let gc = q.critical_coupling();
    let mf = solve_mean_field(&q, DEFAULT_EPS_CRIT);
    let in_band = mf.phase == Phase::Critical || (q.g() - gc).abs() <= band * gc;

    let base = |mf: &crate::MeanField, modes: Modes, squeezing: Squeezing| PointReport {
        omega_a: p.omega_a(),
        omega_b: p.omega_b(),
        g: p.g(),
        omega_b_ratio: q.omega_b(),
        g_over_omega_a: q.g(),
        critical_coupling: gc,
        phase: mf.phase,
        a_bar: mf.a_bar,
        b_bar: mf.b_bar,
        coefficients: mf.coeffs,
        omega_minus: modes.omega_minus,
        omega_plus: modes.omega_plus,
        modes,
        covariance: None,
        analytic: None,
        superposed_basis: None,
        squeezing,
        route_delta: None,
    };

    if !in_band {
        let modes = diagonalize(&build_matrix(&mf, &q), DEFAULT_OMEGA_CRIT)?;
        if !modes.critical_flag {
            let sigma = covariance(&modes)?;
            let dec = decompose(&mf, &q)?;
            let sigma2 = ground_state_covariance(&dec);
            let mut r = base(&mf, modes, minimize(&sigma));
            r.route_delta = Some(route_discrepancy(&modes, &sigma, &dec, &sigma2));
            r.covariance = Some(sigma);
            r.analytic = Some(dec);
            r.superposed_basis = Some(superposed_basis_weights(&dec));
            return Ok(r);
        }
    }

    let qc = q.with_coupling(gc)?;
    let mfc = solve_mean_field(&qc, DEFAULT_EPS_CRIT);
    let mut modes = diagonalize(&build_matrix(&mfc, &qc), DEFAULT_OMEGA_CRIT)?;
    if !modes.critical_flag {
        return Err(Error::Domain("critical limit could not be resolved".into()));
    }
    modes.omega_minus = 0.0;
    let mut r = base(&mfc, modes, critical_report(&modes));
    r.phase = Phase::Critical;
    Ok(r)
}

/// Full report with the default (exact) critical band.
pub fn run_point(p: &Params) -> Result<PointReport> {
    evaluate_point(p, DEFAULT_EPS_CRIT)
}

/// Finite-N result next to the thermodynamic-limit prediction.
#[derive(Debug, Clone, Serialize)]
pub struct EdComparison {
    pub config: EdConfig,
    pub omega_a: f64,
    pub omega_b: f64,
    pub g: f64,
    pub energy_per_atom: f64,
    pub var_min_ed: f64,
    pub var_min_limit: f64,
    pub gap: f64,
    pub mean_a: f64,
    pub mean_sx: f64,
    pub cutoff_population: f64,
    pub lanczos_restarts: usize,
    pub covariance: Covariance,
}

/// Exact diagonalization at finite N, compared with the Bogoliubov limit.
///
/// Restricted to the normal phase, where the finite-N ground state keeps
/// the parity symmetry of the mean-field solution.
pub fn compare_ed(p: &Params, cfg: &EdConfig) -> Result<EdComparison> {
    let q = p.normalized();
    let mf = solve_mean_field(&q, DEFAULT_EPS_CRIT);
    if mf.phase != Phase::Normal {
        return Err(Error::Precondition(
            "finite-N comparison requires the normal phase (g < g_c)".into(),
        ));
    }
    let limit = minimize(&covariance(&diagonalize(
        &build_matrix(&mf, &q),
        DEFAULT_OMEGA_CRIT,
    )?)?)
    .var_min;
    let r = ed::solve(&q, cfg)?;
    let var_min_ed = r.var_min();
    Ok(EdComparison {
        config: *cfg,
        omega_a: p.omega_a(),
        omega_b: p.omega_b(),
        g: p.g(),
        energy_per_atom: r.energy * p.omega_a(),
        var_min_ed,
        var_min_limit: limit,
        gap: (var_min_ed - limit).abs(),
        mean_a: r.mean_a,
        mean_sx: r.mean_sx,
        cutoff_population: r.cutoff_population,
        lanczos_restarts: r.restarts,
        covariance: r.covariance,
    })
}
