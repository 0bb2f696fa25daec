use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use dicke_core::ed::EdConfig;
use dicke_core::model::validate;
use dicke_core::report::{compare_ed, run_point};
use dicke_core::selfcheck::{run_selfcheck, SelfcheckOptions};
use dicke_core::sweep::{render, run_sweep, OutputFormat, SweepSpec};
use dicke_core::Error;

const EXIT_SELFCHECK: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

/// Ground-state two-mode squeezing of the Dicke model.
#[derive(Parser, Debug)]
#[command(name = "dicke-squeeze", version)]
struct Cli {
    /// JSON file whose keys mirror the flag names; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep g/ω_a on a uniform grid and write a CSV or JSON table.
    Sweep(SweepArgs),
    /// Full report for one parameter point (JSON).
    Point(PointArgs),
    /// Finite-N exact diagonalization against the N → ∞ prediction (JSON).
    OracleEd(OracleArgs),
    /// Run the invariant suite.
    Selfcheck(SelfcheckArgs),
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, allow_negative_numbers = true)]
    omega_a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    omega_b: Option<f64>,
    /// Lower bound in units of ω_a.
    #[arg(long, allow_negative_numbers = true)]
    g_min: Option<f64>,
    /// Upper bound in units of ω_a.
    #[arg(long, allow_negative_numbers = true)]
    g_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Evaluate points next to g_c instead of flagging them.
    #[arg(long)]
    include_critical_band: bool,
    #[arg(long)]
    output: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args, Debug)]
struct PointArgs {
    #[arg(long, allow_negative_numbers = true)]
    omega_a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    omega_b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    g: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long, allow_negative_numbers = true)]
    omega_a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    omega_b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    g: Option<f64>,
    #[arg(long)]
    n_atoms: Option<usize>,
    #[arg(long)]
    photon_cutoff: Option<usize>,
    #[arg(long)]
    lanczos_dim: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SelfcheckArgs {
    /// Skip the finite-N checks.
    #[arg(long)]
    quick: bool,
    /// Add this amount to Σ[0][0] before the purity check (negative control).
    #[arg(long, allow_negative_numbers = true)]
    perturb_sigma: Option<f64>,
    /// text or json
    #[arg(long)]
    format: Option<String>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct Config {
    #[serde(alias = "omega_a")]
    omega_a: Option<f64>,
    #[serde(alias = "omega_b")]
    omega_b: Option<f64>,
    g: Option<f64>,
    #[serde(alias = "g_min")]
    g_min: Option<f64>,
    #[serde(alias = "g_max")]
    g_max: Option<f64>,
    points: Option<usize>,
    #[serde(alias = "include_critical_band")]
    include_critical_band: Option<bool>,
    output: Option<PathBuf>,
    format: Option<String>,
    quick: Option<bool>,
    #[serde(alias = "n_atoms")]
    n_atoms: Option<usize>,
    #[serde(alias = "photon_cutoff")]
    photon_cutoff: Option<usize>,
    #[serde(alias = "lanczos_dim")]
    lanczos_dim: Option<usize>,
    tol: Option<f64>,
}

enum Failure {
    Usage(String),
    Io(String),
    Selfcheck,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(m) => Failure::Io(m),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<Config, Failure> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn json(value: &impl serde::Serialize) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("missing required --{flag}")))
}

fn sweep(a: SweepArgs, c: Config) -> Result<(), Failure> {
    let omega_a = a.omega_a.or(c.omega_a).unwrap_or(1.0);
    let omega_b = a.omega_b.or(c.omega_b).unwrap_or(1.0);
    // validates the frequencies before forming the ratio
    validate(omega_a, omega_b, 0.0)?;
    let format: OutputFormat = a.format.or(c.format).as_deref().unwrap_or("csv").parse()?;
    let spec = SweepSpec {
        omega_b_ratio: omega_b / omega_a,
        g_min: a.g_min.or(c.g_min).unwrap_or(0.0),
        g_max: a.g_max.or(c.g_max).unwrap_or(2.0),
        points: a.points.or(c.points).unwrap_or(401),
        exclude_critical_band: !(a.include_critical_band
            || c.include_critical_band.unwrap_or(false)),
        output_path: a.output.or(c.output),
        format,
    };
    let table = run_sweep(&spec)?;
    emit(&render(&table, format)?, spec.output_path.as_deref())
}

fn point(a: PointArgs, c: Config) -> Result<(), Failure> {
    let p = validate(
        a.omega_a.or(c.omega_a).unwrap_or(1.0),
        a.omega_b.or(c.omega_b).unwrap_or(1.0),
        require(a.g.or(c.g), "g")?,
    )?;
    emit(&json(&run_point(&p)?)?, a.output.or(c.output).as_deref())
}

fn oracle_ed(a: OracleArgs, c: Config) -> Result<(), Failure> {
    let p = validate(
        a.omega_a.or(c.omega_a).unwrap_or(1.0),
        a.omega_b.or(c.omega_b).unwrap_or(1.0),
        require(a.g.or(c.g), "g")?,
    )?;
    let mut cfg = EdConfig::new(
        a.n_atoms.or(c.n_atoms).unwrap_or(16),
        a.photon_cutoff.or(c.photon_cutoff).unwrap_or(40),
    )?;
    if let Some(k) = a.lanczos_dim.or(c.lanczos_dim) {
        cfg.lanczos_dim = k;
    }
    if let Some(t) = a.tol.or(c.tol) {
        cfg.tol = t;
    }
    emit(
        &json(&compare_ed(&p, &cfg)?)?,
        a.output.or(c.output).as_deref(),
    )
}

fn selfcheck(a: SelfcheckArgs, c: Config) -> Result<(), Failure> {
    let opts = SelfcheckOptions {
        quick: a.quick || c.quick.unwrap_or(false),
        perturb_sigma: a.perturb_sigma,
    };
    let summary = run_selfcheck(&opts);
    let text = match a.format.or(c.format).as_deref().unwrap_or("text") {
        "text" => {
            let mut s: String = summary.outcomes.iter().map(|o| format!("{o}\n")).collect();
            let failed = summary.outcomes.iter().filter(|o| !o.passed).count();
            s.push_str(&format!(
                "{} checks, {failed} failed\n",
                summary.outcomes.len()
            ));
            s
        }
        "json" => json(&summary)?,
        other => return Err(Failure::Usage(format!("unknown format '{other}'"))),
    };
    emit(&text, None)?;
    if summary.passed() {
        Ok(())
    } else {
        Err(Failure::Selfcheck)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load_config(cli.config.as_deref()).and_then(|c| match cli.command {
        Command::Sweep(a) => sweep(a, c),
        Command::Point(a) => point(a, c),
        Command::OracleEd(a) => oracle_ed(a, c),
        Command::Selfcheck(a) => selfcheck(a, c),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Selfcheck) => ExitCode::from(EXIT_SELFCHECK),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_IO)
        }
    }
}
