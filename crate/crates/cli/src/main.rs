mod commands;
mod error;
mod manifest;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use error::CliError;
use manifest::RunManifest;
use report::{Format, Report};
use resurgence::gfunc::Method;

#[derive(Debug, Parser)]
#[command(name = "resurgence", version, about = "Evaluate G(z) = sum sqrt(n) z^n, its residual S(u) and the polynomials P_k")]
struct Cli {
    /// Output format for the primary result.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Write the primary result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel batches (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate G(z).
    Eval {
        /// Complex literal such as -1, 2+3i, 0.5-0.25i or -2i.
        #[arg(short = 'z', long = "z", allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = 50)]
        digits: u32,
        /// series, zeta-expansion, bilateral, inversion or neg-axis.
        #[arg(long, value_parser = parse_method)]
        method: Option<Method>,
        /// Confirm the value with a second method.
        #[arg(long)]
        crosscheck: bool,
    },
    /// Tabulate S(u) and its prediction from P_0..P_K over a grid of u.
    Scan {
        #[arg(long = "u-min")]
        u_min: f64,
        #[arg(long = "u-max")]
        u_max: f64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Working digits (default: enough to keep 30 digits of S at u-max).
        #[arg(long)]
        digits: Option<u32>,
        #[arg(long = "K", default_value_t = 12)]
        k_max: usize,
    },
    /// Write the difference polynomials Delta_0..Delta_K.
    Deltas {
        #[arg(long = "K")]
        k_max: usize,
    },
    /// Write the polynomials P_0..P_K in the table text format.
    Polys {
        #[arg(long = "K")]
        k_max: usize,
        /// File of P_k(0), one rational per line (default: shipped values).
        #[arg(long)]
        constants: Option<PathBuf>,
    },
    /// Recover P_0(0)..P_K(0) by sampling and peeling S(u) on even u.
    Fit {
        #[arg(long = "u-min", default_value_t = 402)]
        u_min: u32,
        #[arg(long = "u-max", default_value_t = 600)]
        u_max: u32,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Working digits (default: the smallest admissible for the range and K).
        #[arg(long)]
        digits: Option<u32>,
        #[arg(long = "K", default_value_t = 12)]
        k_max: usize,
        /// Also write the recovered rationals, one per line, for `polys --constants`.
        #[arg(long = "constants-out")]
        constants_out: Option<PathBuf>,
    },
    /// Extract C and R from the exact derivative data P_k'(0), P_k''(0).
    Constants {
        /// Lower end of the k-window (default: k-hi - 40).
        #[arg(long = "k-lo")]
        k_lo: Option<usize>,
        #[arg(long = "k-hi", default_value_t = 150)]
        k_hi: usize,
        #[arg(long, default_value_t = 40)]
        digits: u32,
    },
    /// Run every acceptance criterion.
    VerifyAll {
        /// Shrink the random suites tenfold.
        #[arg(long)]
        quick: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Eval { .. } => "eval",
            Command::Scan { .. } => "scan",
            Command::Deltas { .. } => "deltas",
            Command::Polys { .. } => "polys",
            Command::Fit { .. } => "fit",
            Command::Constants { .. } => "constants",
            Command::VerifyAll { .. } => "verify-all",
        }
    }
}

/// A finished command: its report, configuration and an optional failure
/// raised after the report was produced.
pub struct Outcome {
    pub report: Report,
    pub config: Vec<(String, String)>,
    /// Secondary text: on stdout when the result goes to a file, else on stderr.
    pub summary: Option<String>,
    pub failure: Option<CliError>,
}

fn dispatch(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Eval {
            z,
            digits,
            method,
            crosscheck,
        } => commands::eval(z, *digits, *method, *crosscheck),
        Command::Scan {
            u_min,
            u_max,
            count,
            digits,
            k_max,
        } => commands::scan(*u_min, *u_max, *count, *digits, *k_max),
        Command::Deltas { k_max } => commands::deltas(*k_max),
        Command::Polys { k_max, constants } => commands::polys(*k_max, constants.as_deref()),
        Command::Fit {
            u_min,
            u_max,
            count,
            digits,
            k_max,
            constants_out,
        } => commands::fit(*u_min, *u_max, *count, *digits, *k_max, constants_out.as_deref()),
        Command::Constants { k_lo, k_hi, digits } => commands::constants(*k_lo, *k_hi, *digits),
        Command::VerifyAll { quick } => commands::verify_all(*quick),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let start = Instant::now();
    let outcome = dispatch(&cli.command)?;
    let rendered = outcome.report.render(cli.format)?;
    let mut config = outcome.config;
    config.push(("format".into(), format!("{:?}", cli.format).to_lowercase()));
    let manifest = RunManifest::new(cli.command.name(), config, rendered.as_bytes(), start.elapsed());
    match &cli.out {
        Some(path) => {
            std::fs::write(path, &rendered)?;
            let mut side = path.clone().into_os_string();
            side.push(".manifest");
            std::fs::write(PathBuf::from(side), manifest.to_kv())?;
            if let Some(s) = &outcome.summary {
                print!("{s}");
            }
        }
        None => {
            print!("{rendered}");
            if let Some(s) = &outcome.summary {
                eprint!("{s}");
            }
        }
    }
    eprint!("{}", manifest.to_kv());
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
