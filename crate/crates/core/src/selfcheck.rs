//! Runs every invariant of the model, Bogoliubov, squeezing, analytic and
//! finite-N layers and reports one outcome per check.

use std::fmt;

use serde::Serialize;

use crate::analytic::{decompose, equal_frequency_variances};
use crate::bogoliubov::{build_matrix, diagonalize, DEFAULT_OMEGA_CRIT};
use crate::crosscheck::{grid_minimum, GridSpec};
use crate::ed::{self, EdConfig};
use crate::error::Result;
use crate::meanfield::solve_mean_field;
use crate::model::{validate, Phase, DEFAULT_EPS_CRIT};
use crate::report::{compare_ed, PointReport};
use crate::squeezing::minimize;
use crate::sweep::{run_sweep, run_sweep_reports, to_csv, SweepSpec};
use crate::Covariance;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SelfcheckOptions {
    /// Skip the finite-N checks.
    pub quick: bool,
    /// Added to `Σ[0][0]` before the purity check; a negative control.
    pub perturb_sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfcheckSummary {
    pub outcomes: Vec<CheckOutcome>,
}

impl SelfcheckSummary {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

fn check(name: &'static str, worst: f64, tol: f64) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: worst <= tol,
        detail: format!("worst {worst:.3e} (tol {tol:.0e})"),
    }
}

fn flag(name: &'static str, passed: bool, detail: impl Into<String>) -> CheckOutcome {
    CheckOutcome {
        name,
        passed,
        detail: detail.into(),
    }
}

fn from_result(name: &'static str, r: Result<CheckOutcome>) -> CheckOutcome {
    r.unwrap_or_else(|e| flag(name, false, format!("error: {e}")))
}

/// Both reference sweeps, `ω_b/ω_a ∈ {1, 2}` on `g ∈ [0, 2]`, 401 points.
pub fn reference_sweeps() -> Result<Vec<Vec<PointReport>>> {
    [1.0, 2.0]
        .iter()
        .map(|&ratio| run_sweep_reports(&SweepSpec::new(ratio, 0.0, 2.0, 401)?))
        .collect()
}

fn regular(sweeps: &[Vec<PointReport>]) -> impl Iterator<Item = (&PointReport, &Covariance)> {
    sweeps
        .iter()
        .flatten()
        .filter_map(|r| r.covariance.as_ref().map(|c| (r, c)))
}

pub fn run_selfcheck(opts: &SelfcheckOptions) -> SelfcheckSummary {
    let mut out = Vec::new();
    match reference_sweeps() {
        Ok(sweeps) => closed_form_checks(&sweeps, opts, &mut out),
        Err(e) => out.push(flag("reference_sweeps", false, format!("error: {e}"))),
    }
    out.push(from_result("sweep_output", sweep_output_check()));
    if !opts.quick {
        out.push(from_result("ed_decoupled_ladder", ed_ladder_check()));
        out.push(from_result("ed_parity", ed_parity_check()));
        out.push(from_result("ed_convergence_trend", ed_trend_check()));
        out.push(from_result("ed_cutoff_robustness", ed_cutoff_check()));
    }
    SelfcheckSummary { outcomes: out }
}

fn closed_form_checks(
    sweeps: &[Vec<PointReport>],
    opts: &SelfcheckOptions,
    out: &mut Vec<CheckOutcome>,
) {
    let mut stationarity = 0.0f64;
    let mut order_ok = true;
    for sweep in sweeps {
        let mut prev = 0.0;
        for r in sweep.iter().filter(|r| r.phase != Phase::Critical) {
            let p = validate(1.0, r.omega_b_ratio, r.g_over_omega_a).expect("grid point");
            let mf = solve_mean_field(&p, DEFAULT_EPS_CRIT);
            stationarity = stationarity.max(mf.stationarity_residual(&p).unwrap_or(f64::INFINITY));
            let b2 = r.b_bar * r.b_bar;
            order_ok &= b2 >= prev && b2 <= 0.5;
            prev = b2;
        }
    }
    out.push(check(
        "mean_field_stationarity",
        stationarity,
        crate::meanfield::STATIONARITY_TOL,
    ));
    out.push(flag(
        "order_parameter_bounds",
        order_ok,
        "b̄² monotone in g and at most 1/2",
    ));

    let spectrum = (1..=100)
        .map(|k| {
            let g = 0.4999 * k as f64 / 100.0;
            let p = validate(1.0, 1.0, g).expect("valid");
            let m = diagonalize(
                &build_matrix(&solve_mean_field(&p, DEFAULT_EPS_CRIT), &p),
                DEFAULT_OMEGA_CRIT,
            )
            .expect("normal phase");
            let lo = (1.0 - 2.0 * g).sqrt();
            let hi = (1.0 + 2.0 * g).sqrt();
            ((m.omega_minus - lo) / lo)
                .abs()
                .max(((m.omega_plus - hi) / hi).abs())
        })
        .fold(0.0f64, f64::max);
    out.push(check("resonant_spectrum_closed_form", spectrum, 1e-12));

    let mut norm = 0.0f64;
    let mut occupation = 0.0f64;
    for (r, sigma) in regular(sweeps) {
        let m = &r.modes;
        norm = norm
            .max((m.coeffs_minus.symplectic_norm() - 1.0).abs())
            .max((m.coeffs_plus.symplectic_norm() - 1.0).abs())
            .max(m.coeffs_minus.symplectic_product(&m.coeffs_plus).abs());
        for c in [m.coeffs_minus, m.coeffs_plus] {
            let (ppd, pdp) = sigma.mode_occupations(&c);
            occupation = occupation.max((ppd - 1.0).abs()).max(pdp.abs());
        }
    }
    out.push(check("mode_normalization", norm, 1e-9));
    out.push(check("vacuum_occupations", occupation, 1e-9));

    let mut freq = 0.0f64;
    let mut cov = 0.0f64;
    for (r, sigma) in regular(sweeps) {
        let dec = r.analytic.expect("regular point has a decomposition");
        freq = freq
            .max(((r.omega_minus - dec.omega_minus) / r.omega_minus).abs())
            .max(((r.omega_plus - dec.omega_plus) / r.omega_plus).abs());
        let other = crate::analytic::ground_state_covariance(&dec);
        for (x, y) in sigma
            .sigma
            .iter()
            .flatten()
            .zip(other.sigma.iter().flatten())
        {
            cov = cov.max((x - y).abs());
        }
    }
    out.push(check("route_equivalence_frequencies", freq, 1e-10));
    out.push(check("route_equivalence_covariance", cov, 1e-9));

    let delta = regular(sweeps)
        .map(|(r, _)| r.route_delta.unwrap_or(f64::INFINITY))
        .fold(0.0f64, f64::max);
    out.push(check("route_delta", delta, 1e-10));

    let mut purity = 0.0f64;
    for (_, sigma) in regular(sweeps) {
        let mut s = *sigma;
        if let Some(d) = opts.perturb_sigma {
            s.sigma[0][0] += d;
        }
        let (lo, hi) = s.symplectic_eigenvalues();
        purity = purity.max((lo - 0.25).abs()).max((hi - 0.25).abs());
    }
    out.push(check("purity", purity, 1e-9));

    let heisenberg = regular(sweeps)
        .map(|(r, _)| (r.squeezing.product.unwrap_or(f64::INFINITY) - 0.25).abs())
        .fold(0.0f64, f64::max);
    out.push(check("heisenberg_equality", heisenberg, 1e-9));

    let mut symmetric = true;
    let mut var_order = true;
    for (r, sigma) in regular(sweeps) {
        symmetric &= sigma.is_symmetric(0.0);
        let s = &r.squeezing;
        var_order &= s.var_min > 0.0 && s.var_min <= 0.25 + 1e-12 && s.var_max >= 0.25 - 1e-12;
    }
    out.push(flag(
        "covariance_symmetric",
        symmetric,
        "Σ equals its transpose exactly",
    ));
    out.push(flag(
        "variance_bounds",
        var_order,
        "0 < var_min ≤ 1/4 ≤ var_max",
    ));

    let angles = sweeps[0]
        .iter()
        .filter(|r| r.phase == Phase::Normal && r.g_over_omega_a > 0.0)
        .map(|r| {
            let s = &r.squeezing;
            (s.theta_opt + std::f64::consts::FRAC_PI_4)
                .abs()
                .max(s.psi_opt.abs())
                .max((s.phi_opt - std::f64::consts::FRAC_PI_2).abs())
        })
        .fold(0.0f64, f64::max);
    out.push(check("resonant_optimal_angles", angles, 1e-6));

    let mut eqf = 0.0f64;
    for r in sweeps[0].iter().filter(|r| r.phase == Phase::Normal) {
        let p = validate(1.0, 1.0, r.g_over_omega_a).expect("valid");
        let (vmin, vmax) = equal_frequency_variances(&p).expect("normal phase at resonance");
        eqf = eqf
            .max((vmin - r.squeezing.var_min).abs())
            .max((vmin - r.omega_minus / 4.0).abs())
            .max((vmin * vmax - 1.0 / 16.0).abs());
    }
    out.push(check("equal_frequency_variances", eqf, 1e-10));

    let mut trend = true;
    let mut closest = 0.0f64;
    let mut alignment = 0.0f64;
    for wb in [1.0f64, 2.0] {
        let gc = wb.sqrt() / 2.0;
        for side in [-1.0, 1.0] {
            let mut prev = f64::INFINITY;
            for delta in [1e-2, 1e-4, 1e-6, 1e-8, 1e-10] {
                let p = validate(1.0, wb, gc * (1.0 + side * delta)).expect("valid");
                let m = diagonalize(
                    &build_matrix(&solve_mean_field(&p, DEFAULT_EPS_CRIT), &p),
                    DEFAULT_OMEGA_CRIT,
                )
                .expect("near-critical modes");
                let c = m.coeffs_minus;
                let off = (c.w / c.y + 1.0).abs().max((c.x / c.z + 1.0).abs());
                trend &= off < prev;
                prev = off;
                if delta == 1e-6 {
                    let sigma = crate::bogoliubov::covariance(&m).expect("regular modes");
                    let e = sigma.eigen();
                    let u = &e.vectors[0];
                    let d = c.momentum_weights();
                    let dn = (d[0] * d[0] + d[1] * d[1]).sqrt();
                    let cos = ((u[1] * d[0] + u[3] * d[1]) / dn).abs().min(1.0);
                    alignment = alignment.max(cos.acos());
                }
            }
            closest = closest.max(prev);
        }
    }
    out.push(flag(
        "near_critical_ratio_trend",
        trend && closest < 1e-3,
        format!("|w₋/y₋ + 1|, |x₋/z₋ + 1| shrink toward g_c; {closest:.2e} at 1e-10"),
    ));
    out.push(check("squeezed_quadrature_alignment", alignment, 1e-2));

    let flagged: Vec<&PointReport> = sweeps[0]
        .iter()
        .filter(|r| r.phase == Phase::Critical)
        .collect();
    let crit_ok = !flagged.is_empty()
        && flagged.iter().all(|r| {
            let s = &r.squeezing;
            s.var_min == 0.0
                && s.var_max.is_infinite()
                && s.product.is_none()
                && s.var_photon > 0.05
        });
    out.push(flag(
        "critical_record",
        crit_ok,
        format!(
            "{} flagged record(s) with var_min = 0 and var_max = inf",
            flagged.len()
        ),
    ));

    let mut refusal = true;
    for wb in [1.0f64, 2.0] {
        let p = validate(1.0, wb, wb.sqrt() / 2.0).expect("valid");
        refusal &= decompose(&solve_mean_field(&p, DEFAULT_EPS_CRIT), &p).is_err();
    }
    out.push(flag(
        "analytic_refuses_critical",
        refusal,
        "decompose errors at g = g_c",
    ));

    let picks = [(1.0, 0.3), (2.0, 0.2), (1.0, 1.3), (2.0, 1.7)];
    let spec = GridSpec {
        theta_steps: 60,
        psi_steps: 120,
        phi_steps: 60,
        refine_tol: 1e-10,
    };
    let grid = picks
        .iter()
        .map(|&(wb, g)| {
            let p = validate(1.0, wb, g).expect("valid");
            let r = crate::report::run_point(&p).expect("regular point");
            let sigma = r.covariance.expect("regular point");
            (grid_minimum(&sigma, &spec).var_refined - minimize(&sigma).var_min).abs()
        })
        .fold(0.0f64, f64::max);
    out.push(check("eigen_vs_grid_search", grid, 1e-9));
}

fn sweep_output_check() -> Result<CheckOutcome> {
    let mut ok = true;
    let mut detail =
        String::from("g = 0 records are exactly 1/4, output byte-identical across runs");
    for ratio in [1.0, 2.0] {
        let spec = SweepSpec::new(ratio, 0.0, 2.0, 401)?;
        let a = run_sweep(&spec)?;
        let b = run_sweep(&spec)?;
        ok &= to_csv(&a) == to_csv(&b);
        let first = &a.records[0];
        if first.var_min != 0.25 || first.var_max != 0.25 {
            ok = false;
            detail = format!(
                "g = 0 record has var_min {} var_max {}",
                first.var_min, first.var_max
            );
        }
    }
    Ok(flag("sweep_output", ok, detail))
}

fn ed_ladder_check() -> Result<CheckOutcome> {
    let p = validate(1.0, 1.7, 0.0)?;
    let cfg = EdConfig::new(1, 2)?;
    let h = ed::build_hamiltonian(&p, &cfg)?;
    let mut diag: Vec<f64> = (0..h.dim()).map(|i| h.get(i, i)).collect();
    diag.sort_by(|a, b| a.total_cmp(b));
    let ok = h.nnz() == h.dim() && diag == [0.0, 1.0, 1.7, 2.7] && h.is_symmetric();
    Ok(flag(
        "ed_decoupled_ladder",
        ok,
        format!("spectrum {diag:?}"),
    ))
}

fn ed_parity_check() -> Result<CheckOutcome> {
    let c = compare_ed(&validate(1.0, 1.0, 0.3)?, &EdConfig::new(8, 40)?)?;
    Ok(check(
        "ed_parity",
        c.mean_a.abs().max(c.mean_sx.abs()),
        1e-10,
    ))
}

/// ED gaps to the Bogoliubov variance at `N ∈ {8, 16, 32}`.
pub fn ed_convergence_gaps() -> Result<Vec<(usize, f64, f64)>> {
    let p = validate(1.0, 1.0, 0.3)?;
    [8, 16, 32]
        .iter()
        .map(|&n| {
            let c = compare_ed(&p, &EdConfig::new(n, 40)?)?;
            Ok((n, c.var_min_ed, c.gap))
        })
        .collect()
}

fn ed_trend_check() -> Result<CheckOutcome> {
    let gaps = ed_convergence_gaps()?;
    let monotone = gaps.windows(2).all(|w| w[1].2 < w[0].2 && w[1].1 < w[0].1);
    let ratio = gaps[0].2 / gaps[2].2;
    let within = gaps[1].2 / 0.158113883008419 < 0.1;
    Ok(flag(
        "ed_convergence_trend",
        monotone && ratio >= 2.0 && within,
        format!(
            "gaps {:.3e}, {:.3e}, {:.3e}; N=8/N=32 ratio {ratio:.2}",
            gaps[0].2, gaps[1].2, gaps[2].2
        ),
    ))
}

fn ed_cutoff_check() -> Result<CheckOutcome> {
    let p = validate(1.0, 1.0, 0.3)?;
    let a = ed::solve(&p, &EdConfig::new(16, 30)?)?;
    let b = ed::solve(&p, &EdConfig::new(16, 60)?)?;
    let worst = a
        .covariance
        .sigma
        .iter()
        .flatten()
        .zip(b.covariance.sigma.iter().flatten())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    Ok(check("ed_cutoff_robustness", worst, 1e-6))
}
