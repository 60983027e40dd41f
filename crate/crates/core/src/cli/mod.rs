//! The `zetalab` command line: argument parsing, dispatch and output.

mod commands;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::arith::Precision;
use crate::error::{Error, Result};

pub use output::{complex, error_object, num, render_text, ResultEnvelope};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "zetalab", version, about = "Validated zeta, L-function, elliptic-curve, cutset and S^2 computations")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Working precision in bits; overrides the ZETALAB_PRECISION variable.
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Absolute tolerance for adaptive quadrature.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// zeta(s) by Euler-Maclaurin summation, with an error bound.
    Zeta(ZetaArgs),
    /// L(1, chi) for the real quadratic field Q(sqrt D).
    Lchi(LchiArgs),
    /// Point counts and traces of Frobenius mod primes.
    EcLocal(EcLocalArgs),
    /// Truncated Euler product and Dirichlet coefficients of L(E, s).
    EcLseries(EcLseriesArgs),
    /// DFS cutset of a rooted graph file.
    Cutset(CutsetArgs),
    /// Exact chart, transition and cocycle checks on generated points of S^2.
    VerifyCharts(VerifyChartsArgs),
    /// x(t) = e^{At} x0.
    Flow(FlowArgs),
    /// Clock and shift matrices for theta = p/q, optionally a rotation orbit.
    Nctorus(NctorusArgs),
}

#[derive(Debug, Args)]
pub struct ZetaArgs {
    /// Real part of s.
    #[arg(long, allow_hyphen_values = true)]
    pub s: String,
    /// Imaginary part of s.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub t: String,
    /// Summation cutoff.
    #[arg(long = "N")]
    pub n: Option<u64>,
    /// Number of Bernoulli correction terms.
    #[arg(long)]
    pub k: Option<u32>,
}

#[derive(Debug, Args)]
pub struct LchiArgs {
    /// Squarefree D >= 2.
    #[arg(long = "D")]
    pub d: u64,
    /// Number of terms in each sum.
    #[arg(long, default_value_t = 20)]
    pub m: u64,
}

#[derive(Debug, Args)]
#[group(id = "curve_source", required = true, multiple = false, args = ["curve", "curve_file"])]
pub struct CurveSource {
    /// "a1 a2 a3 a4 a6".
    #[arg(long, allow_hyphen_values = true)]
    pub curve: Option<String>,
    /// File holding the five coefficients.
    #[arg(long)]
    pub curve_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EcLocalArgs {
    #[command(flatten)]
    pub source: CurveSource,
    /// All primes up to this bound.
    #[arg(long = "P", conflicts_with = "p", required_unless_present = "p")]
    pub upto: Option<u64>,
    /// A single prime.
    #[arg(long = "p")]
    pub p: Option<u64>,
    /// Directory of per-curve "p t_p type" caches.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EcLseriesArgs {
    #[command(flatten)]
    pub source: CurveSource,
    /// Euler product over primes p <= P.
    #[arg(long = "P", default_value_t = 100)]
    pub upto: u64,
    /// Real part of s.
    #[arg(long, default_value = "2", allow_hyphen_values = true)]
    pub s: String,
    /// Imaginary part of s.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub t: String,
    /// Also compute a_1..a_M and the partial Dirichlet sum.
    #[arg(long = "M")]
    pub m: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CutsetArgs {
    /// Graph file; "-" reads standard input.
    #[arg(long)]
    pub file: PathBuf,
    /// Also cut nodes carrying a self-loop.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct VerifyChartsArgs {
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    /// Real matrix, rows separated by ';', e.g. "0 -1; 1 0".
    #[arg(long, allow_hyphen_values = true)]
    pub matrix: String,
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
    /// Initial vector, whitespace separated.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: String,
}

#[derive(Debug, Args)]
pub struct NctorusArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long, allow_hyphen_values = true)]
    pub p: i64,
    /// Rotation number for an orbit of y -> y + theta mod 1.
    #[arg(long, allow_hyphen_values = true)]
    pub orbit_theta: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub orbit_n: usize,
    #[arg(long, default_value_t = 0.0)]
    pub orbit_start: f64,
}

/// Settings shared by all subcommands after precedence is applied.
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub precision: Precision,
    pub tolerance: Option<f64>,
}

impl Settings {
    /// Flag, then environment, then the built-in default.
    pub fn resolve(cli: &Cli) -> Result<Self> {
        let precision = match cli.precision {
            Some(bits) => Precision::new(bits)?,
            None => Precision::from_env()?,
        };
        if let Some(tol) = cli.tolerance {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(Error::Parse(format!("tolerance must be a positive number, got {tol}")));
            }
        }
        Ok(Settings {
            precision,
            tolerance: cli.tolerance,
        })
    }
}

/// Runs the command and wraps its result.
pub fn dispatch(cli: &Cli) -> Result<ResultEnvelope> {
    let start = Instant::now();
    let settings = Settings::resolve(cli)?;
    let (name, inputs, values) = commands::run(&cli.command, settings)?;
    let mut inputs = inputs;
    inputs.insert("precision".into(), settings.precision.bits().into());
    if let Some(tol) = settings.tolerance {
        inputs.insert("tolerance".into(), num(tol));
    }
    Ok(ResultEnvelope {
        subcommand: name.into(),
        inputs,
        values,
        elapsed_ms: num(start.elapsed().as_secs_f64() * 1e3),
    })
}

/// Guesses the requested format from raw arguments, for errors raised
/// before parsing succeeds.
fn wants_json(args: &[OsString]) -> bool {
    let args: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    args.iter().any(|a| a == "--format=json") || args.windows(2).any(|w| w[0] == "--format" && w[1] == "json")
}

fn report_error(err: &Error, json: bool, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    if json {
        let _ = writeln!(stdout, "{}", error_object(err));
    } else {
        let _ = writeln!(stderr, "zetalab: {err}");
    }
    err.kind().exit_code()
}

/// Entry point shared by the binary and the tests. Returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let json = wants_json(&args);
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = write!(stdout, "{e}");
                return if e.kind() == K::DisplayHelpOnMissingArgumentOrSubcommand { 2 } else { 0 };
            }
            if json {
                let err = Error::Parse(e.render().to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string());
                let _ = writeln!(stdout, "{}", error_object(&err));
            } else {
                let _ = write!(stderr, "{e}");
            }
            return 2;
        }
    };
    match dispatch(&cli) {
        Ok(env) => {
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&env).expect("envelope serializes") + "\n",
                Format::Text => render_text(&env),
            };
            let _ = stdout.write_all(text.as_bytes());
            0
        }
        Err(err) => report_error(&err, json || cli.format == Format::Json, stdout, stderr),
    }
}
