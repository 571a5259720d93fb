//! `approx`: moments, Padé and AAK approximants, and asymptotic sweeps.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use cauchy_approx::Error;
use clap::{Args, Parser, Subcommand};

use config::{Format, Method, RunConfig};

#[derive(Parser)]
#[command(name = "approx", version, about = "Padé and AAK approximation of Cauchy transforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Laurent coefficients c_0..c_{K-1} at infinity
    Moments(RunArgs),
    /// Classical diagonal Padé approximant of degree n
    Pade(RunArgs),
    /// AAK meromorphic approximant with n poles
    Aak(RunArgs),
    /// Approximants over an n range, compared with the asymptotic predictions
    Sweep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset name, in place of a config file
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Inclusive degree range `a:b`
    #[arg(long = "n-range")]
    n_range: Option<String>,
    /// Hankel truncation order
    #[arg(long = "N")]
    n_trunc: Option<usize>,
    /// Number of moments
    #[arg(long)]
    count: Option<usize>,
    /// Working precision in bits
    #[arg(long)]
    precision: Option<u32>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated list of csv, json, svg
    #[arg(long)]
    format: Option<String>,
    /// Approximant type for sweeps
    #[arg(long, value_parser = ["pade", "aak"])]
    method: Option<String>,
}

impl RunArgs {
    fn resolve(self) -> cauchy_approx::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(p) = self.preset {
            cfg.preset = Some(p);
            cfg.function = None;
        }
        if self.n.is_some() {
            cfg.n = self.n;
        }
        if self.n_range.is_some() {
            cfg.n_range = self.n_range;
        }
        if self.n_trunc.is_some() {
            cfg.n_trunc = self.n_trunc;
        }
        if self.count.is_some() {
            cfg.count = self.count;
        }
        if self.precision.is_some() {
            cfg.precision = self.precision;
        }
        if self.out.is_some() {
            cfg.out = self.out;
        }
        if let Some(f) = self.format {
            cfg.format = Some(Format::parse_list(&f)?);
        }
        if let Some(m) = self.method {
            cfg.method = Some(if m == "pade" { Method::Pade } else { Method::Aak });
        }
        Ok(cfg)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Accuracy { .. } | Error::Resolution(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (RunArgs, fn(&RunConfig) -> cauchy_approx::Result<Vec<PathBuf>>) = match cli.command {
        Command::Moments(a) => (a, commands::moments),
        Command::Pade(a) => (a, commands::pade),
        Command::Aak(a) => (a, commands::aak),
        Command::Sweep(a) => (a, commands::sweep),
    };
    match args.resolve().and_then(|cfg| run(&cfg)) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let body = serde_json::json!({"error": e.code(), "message": e.to_string()});
            eprintln!("{body}");
            ExitCode::from(exit_code(&e))
        }
    }
}
