//! `hardyops` command-line front end.
//!
//! Exit codes: 0 success, 1 a suite check failed, 2 admissibility or range error, 64 usage error.

use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hardyops::verify::{configure_threads, kernel_csv, GradingConfig, OutputFormat};
use hardyops::{c_of_sigma, lambda_star, sigma_from_lambda, RunConfig, Suite, Verifier, VerifyReport};
use sha2::{Digest, Sha256};

const EXIT_FAIL: u8 = 1;
const EXIT_ADMISSIBILITY: u8 = 2;
const EXIT_USAGE: u8 = 64;
const THREADS_VAR: &str = "HARDYOPS_THREADS";

#[derive(Parser)]
#[command(name = "hardyops", version, about = "Numerical checks for Hardy operators on the half-line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coupling map: σ from λ, or λ = C(σ) from σ.
    Sigma {
        #[arg(long)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true, conflicts_with = "sigma", required_unless_present = "sigma")]
        lambda: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        sigma: Option<f64>,
    },
    /// Critical coupling λ*(α).
    LambdaStar {
        #[arg(long)]
        alpha: f64,
    },
    /// Runs a named verification suite and prints its report.
    Verify {
        #[arg(long)]
        suite: Option<String>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Dumps kernel values and envelope ratios on the sweep nodes as CSV.
    Kernel {
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 0)]
        k: u32,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        complex_arg: f64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Exploratory envelope probe for α < 2 with λ in [λ*, 0).
    ProbeConjecture {
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GradingArg {
    Uniform,
    Layer,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

/// Overrides applied on top of the `--config` file.
#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long, value_enum)]
    grading: Option<GradingArg>,
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    /// Comma-separated exponents, paired with `--s-list`.
    #[arg(long, value_delimiter = ',')]
    p_list: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    s_list: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    conjecture_mode: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

enum Failure {
    Usage(String),
    Admissibility(String),
}

impl From<hardyops::Error> for Failure {
    fn from(e: hardyops::Error) -> Self {
        Failure::Admissibility(e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

impl RunArgs {
    fn load(&self) -> Result<RunConfig, Failure> {
        let mut c = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| Failure::Usage(format!("invalid config {}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        if let Some(v) = self.alpha {
            c.model.alpha = v;
        }
        if let Some(v) = self.lambda {
            c.model.lambda = v;
        }
        if let Some(v) = self.d {
            c.model.d = v;
        }
        if let Some(v) = self.n {
            c.grid.n = v;
        }
        if let Some(v) = self.x_max {
            c.grid.x_max = v;
        }
        if let Some(g) = self.grading {
            c.grid.grading = match g {
                GradingArg::Uniform => GradingConfig::Uniform,
                GradingArg::Layer => GradingConfig::Layer,
            };
        }
        if self.t_min.is_some() || self.t_max.is_some() {
            c.sweep.t_min = self.t_min.or(c.sweep.t_min);
            c.sweep.t_max = self.t_max.or(c.sweep.t_max);
        }
        if let Some(v) = &self.p_list {
            c.sweep.p_list = v.clone();
        }
        if let Some(v) = &self.s_list {
            c.sweep.s_list = v.clone();
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if self.conjecture_mode {
            c.conjecture_mode = true;
        }
        if let Some(p) = &self.out {
            c.output.path = Some(p.display().to_string());
        }
        if let Some(f) = self.format {
            c.output.format = match f {
                FormatArg::Json => OutputFormat::Json,
                FormatArg::Csv => OutputFormat::Csv,
            };
        }
        Ok(c)
    }
}

/// SHA-256 of the canonical config JSON; the output destination does not enter the digest.
fn digest(config: &RunConfig) -> String {
    let mut c = config.clone();
    c.output = Default::default();
    let json = serde_json::to_string(&c).expect("config is plain data");
    hex::encode(Sha256::digest(json.as_bytes()))
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(Failure::Usage(format!("cannot write stdout: {e}"))),
            _ => Ok(()),
        },
    }
}

fn emit_report(report: &VerifyReport, config: &RunConfig) -> Outcome {
    let text = match config.output.format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Csv => report.to_csv(),
    };
    emit(&text, config.output.path.as_deref().map(Path::new))?;
    Ok(if report.all_pass() { 0 } else { EXIT_FAIL })
}

fn verifier(config: RunConfig) -> Result<Verifier, Failure> {
    Suite::from_str(&config.suite).map_err(|e| Failure::Usage(e.to_string()))?;
    let digest = digest(&config);
    Ok(Verifier::new(config, digest)?)
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Sigma { alpha, lambda, sigma } => {
            match (lambda, sigma) {
                (Some(l), _) => println!("sigma={}", sigma_from_lambda(l, alpha)?),
                (None, Some(s)) => println!("lambda={}", c_of_sigma(s, alpha)?),
                (None, None) => return Err(Failure::Usage("pass --lambda or --sigma".into())),
            }
            Ok(0)
        }
        Command::LambdaStar { alpha } => {
            println!("lambda_star={}", lambda_star(alpha)?);
            Ok(0)
        }
        Command::Verify { suite, run } => {
            let mut config = run.load()?;
            if let Some(s) = suite {
                config.suite = s;
            }
            let suite = Suite::from_str(&config.suite).map_err(|e| Failure::Usage(e.to_string()))?;
            let report = verifier(config.clone())?.run(suite);
            emit_report(&report, &config)
        }
        Command::Kernel { t, k, complex_arg, run } => {
            let config = run.load()?;
            let rows = verifier(config.clone())?.kernel_table(t, k, complex_arg)?;
            emit(&kernel_csv(&rows), config.output.path.as_deref().map(Path::new))?;
            Ok(0)
        }
        Command::ProbeConjecture { run } => {
            let mut config = run.load()?;
            config.conjecture_mode = true;
            let report = verifier(config.clone())?.probe_conjecture();
            emit_report(&report, &config)?;
            Ok(0)
        }
    }
}

fn threads() -> Result<(), Failure> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| Failure::Usage(format!("{THREADS_VAR} must be a positive integer, got {v:?}")))?;
            configure_threads(n);
            Ok(())
        }
        Err(_) => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match threads().and_then(|()| run(cli.command)) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Admissibility(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ADMISSIBILITY)
        }
    }
}
