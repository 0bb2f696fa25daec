//! Uniform sweeps in `g/ω_a` and their CSV / JSON tables.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{validate, Phase, DEFAULT_EPS_CRIT};
use crate::report::{evaluate_point, ser_float, PointReport};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Relative half-width of the band around `g_c` flagged in sweeps.
pub const SWEEP_CRITICAL_BAND: f64 = 1e-6;
pub const MAX_POINTS: usize = 10_000_000;

pub const CSV_COLUMNS: [&str; 14] = [
    "g_over_omega_a",
    "phase",
    "a_bar",
    "b_bar",
    "omega_minus",
    "omega_plus",
    "var_min",
    "var_max",
    "product",
    "var_photon",
    "theta_opt",
    "psi_opt",
    "phi_opt",
    "route_delta",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::InvalidSpec(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub omega_b_ratio: f64,
    pub g_min: f64,
    pub g_max: f64,
    pub points: usize,
    pub exclude_critical_band: bool,
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
}

impl SweepSpec {
    pub fn new(omega_b_ratio: f64, g_min: f64, g_max: f64, points: usize) -> Result<Self> {
        let s = Self {
            omega_b_ratio,
            g_min,
            g_max,
            points,
            exclude_critical_band: true,
            output_path: None,
            format: OutputFormat::Csv,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_b_ratio.is_finite() && self.omega_b_ratio > 0.0) {
            return Err(Error::InvalidSpec(
                "omega_b_ratio must be positive and finite".into(),
            ));
        }
        if !(self.g_min.is_finite() && self.g_max.is_finite()) {
            return Err(Error::InvalidSpec("g bounds must be finite".into()));
        }
        if self.g_min < 0.0 {
            return Err(Error::InvalidSpec("g_min must be non-negative".into()));
        }
        if !(self.g_min < self.g_max) {
            return Err(Error::InvalidSpec(
                "g_min must be strictly less than g_max".into(),
            ));
        }
        if self.points < 2 {
            return Err(Error::InvalidSpec("points must be at least 2".into()));
        }
        if self.points > MAX_POINTS {
            return Err(Error::InvalidSpec(format!(
                "points must not exceed {MAX_POINTS}"
            )));
        }
        Ok(())
    }

    /// Node `i` of the uniform grid; the end points are hit exactly.
    pub fn grid_point(&self, i: usize) -> f64 {
        let n = (self.points - 1) as f64;
        if i + 1 == self.points {
            self.g_max
        } else {
            self.g_min + (self.g_max - self.g_min) * (i as f64 / n)
        }
    }

    fn band(&self) -> f64 {
        if self.exclude_critical_band {
            SWEEP_CRITICAL_BAND
        } else {
            DEFAULT_EPS_CRIT
        }
    }
}

/// One row of the sweep table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub g_over_omega_a: f64,
    pub phase: Phase,
    pub a_bar: f64,
    pub b_bar: f64,
    pub omega_minus: f64,
    pub omega_plus: f64,
    pub var_min: f64,
    #[serde(serialize_with = "ser_float")]
    pub var_max: f64,
    pub product: Option<f64>,
    pub var_photon: f64,
    pub theta_opt: f64,
    pub psi_opt: f64,
    pub phi_opt: f64,
    pub route_delta: Option<f64>,
}

impl From<&PointReport> for SweepRecord {
    fn from(r: &PointReport) -> Self {
        let s = &r.squeezing;
        Self {
            g_over_omega_a: r.g_over_omega_a,
            phase: r.phase,
            a_bar: r.a_bar,
            b_bar: r.b_bar,
            omega_minus: r.omega_minus,
            omega_plus: r.omega_plus,
            var_min: s.var_min,
            var_max: s.var_max,
            product: s.product,
            var_photon: s.var_photon,
            theta_opt: s.theta_opt,
            psi_opt: s.psi_opt,
            phi_opt: s.phi_opt,
            route_delta: r.route_delta,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepTable {
    pub tool_version: &'static str,
    pub spec: SweepSpec,
    pub records: Vec<SweepRecord>,
}

/// Full reports for every grid node, in grid order.
pub fn run_sweep_reports(spec: &SweepSpec) -> Result<Vec<PointReport>> {
    spec.validate()?;
    let band = spec.band();
    (0..spec.points)
        .into_par_iter()
        .map(|i| {
            evaluate_point(
                &validate(1.0, spec.omega_b_ratio, spec.grid_point(i))?,
                band,
            )
        })
        .collect()
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    let records = run_sweep_reports(spec)?
        .iter()
        .map(SweepRecord::from)
        .collect();
    Ok(SweepTable {
        tool_version: TOOL_VERSION,
        spec: spec.clone(),
        records,
    })
}

/// `%.12g`: twelve significant digits, trailing zeros removed.
pub fn format_g(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -4 || exp >= DIGITS {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim(mantissa), sign, exp.abs())
    } else {
        trim(&format!("{:.*}", (DIGITS - 1 - exp) as usize, x))
    }
}

fn csv_opt(x: Option<f64>) -> String {
    x.map(format_g).unwrap_or_default()
}

pub fn to_csv(table: &SweepTable) -> String {
    let s = &table.spec;
    let mut out = String::new();
    let _ = writeln!(out, "# dicke-squeeze {}", table.tool_version);
    let _ = writeln!(out, "# omega_b_ratio={}", format_g(s.omega_b_ratio));
    let _ = writeln!(
        out,
        "# grid: g_min={} g_max={} points={} exclude_critical_band={}",
        format_g(s.g_min),
        format_g(s.g_max),
        s.points,
        s.exclude_critical_band
    );
    out.push_str(&CSV_COLUMNS.join(","));
    out.push('\n');
    for r in &table.records {
        let fields = [
            format_g(r.g_over_omega_a),
            r.phase.as_str().to_string(),
            format_g(r.a_bar),
            format_g(r.b_bar),
            format_g(r.omega_minus),
            format_g(r.omega_plus),
            format_g(r.var_min),
            format_g(r.var_max),
            csv_opt(r.product),
            format_g(r.var_photon),
            format_g(r.theta_opt),
            format_g(r.psi_opt),
            format_g(r.phi_opt),
            csv_opt(r.route_delta),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json(table: &SweepTable) -> Result<String> {
    let mut s = serde_json::to_string_pretty(table).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn render(table: &SweepTable, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => Ok(to_csv(table)),
        OutputFormat::Json => to_json(table),
    }
}

pub fn write_table(table: &SweepTable, path: &Path, format: OutputFormat) -> Result<()> {
    std::fs::write(path, render(table, format)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_g_matches_printf() {
        let cases = [
            (0.25, "0.25"),
            (1.0, "1"),
            (0.158113883008419, "0.158113883008"),
            (123456789012345.0, "1.23456789012e+14"),
            (1.5e-7, "1.5e-07"),
            (-0.0001, "-0.0001"),
            (0.70710678118654757, "0.707106781187"),
            (999999999999.5, "1e+12"),
            (f64::INFINITY, "inf"),
            (0.0, "0"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g(x), want, "{x}");
        }
    }

    #[test]
    fn spec_validation() {
        assert!(SweepSpec::new(1.0, 0.5, 0.5, 10).is_err());
        assert!(SweepSpec::new(1.0, 0.6, 0.5, 10).is_err());
        assert!(SweepSpec::new(1.0, 0.0, 2.0, 1).is_err());
        assert!(SweepSpec::new(0.0, 0.0, 2.0, 10).is_err());
        assert!(SweepSpec::new(1.0, -1.0, 2.0, 10).is_err());
        assert!(SweepSpec::new(1.0, 0.0, 2.0, 2).is_ok());
    }

    #[test]
    fn grid_hits_critical_point() {
        let s = SweepSpec::new(1.0, 0.0, 2.0, 401).unwrap();
        assert_eq!(s.grid_point(100), 0.5);
        assert_eq!(s.grid_point(400), 2.0);
        assert_eq!(s.grid_point(0), 0.0);
    }

    #[test]
    fn sweep_table_shape() {
        let s = SweepSpec::new(1.0, 0.0, 2.0, 41).unwrap();
        let t = run_sweep(&s).unwrap();
        assert_eq!(t.records.len(), 41);
        let first = &t.records[0];
        assert_eq!(first.var_min, 0.25);
        assert_eq!(first.var_max, 0.25);
        let crit = &t.records[10];
        assert_eq!(crit.phase, Phase::Critical);
        assert_eq!(crit.var_min, 0.0);
        let csv = to_csv(&t);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[3], CSV_COLUMNS.join(","));
        assert!(lines[4].starts_with("0,normal,0,0,1,1,0.25,0.25,0.25,0.25,"));
        let crit_line = lines[4 + 10];
        let cols: Vec<&str> = crit_line.split(',').collect();
        assert_eq!(cols.len(), 14);
        assert_eq!(
            (cols[1], cols[6], cols[7], cols[8], cols[13]),
            ("critical", "0", "inf", "", "")
        );
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn output_is_deterministic() {
        let s = SweepSpec::new(2.0, 0.0, 2.0, 97).unwrap();
        let a = to_csv(&run_sweep(&s).unwrap());
        let b = to_csv(&run_sweep(&s).unwrap());
        assert_eq!(a, b);
        let j = to_json(&run_sweep(&s).unwrap()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v["records"].as_array().unwrap().len(), 97);
    }

    #[test]
    fn json_flags_critical_records() {
        let s = SweepSpec::new(1.0, 0.0, 1.0, 3).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&to_json(&run_sweep(&s).unwrap()).unwrap()).unwrap();
        let crit = &v["records"][1];
        assert_eq!(crit["phase"], "critical");
        assert_eq!(crit["var_max"], "inf");
        assert!(crit["product"].is_null());
    }
}
