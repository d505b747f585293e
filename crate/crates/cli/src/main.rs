//! `bref`: Bell-inequality experiments with bounded reference frames.

mod cache;
mod commands;
mod error;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use bref::{Frame, HalfInt};
use clap::{ArgGroup, Parser, Subcommand};

use crate::error::{CliError, CliResult};
use crate::format::Format;

#[derive(Parser)]
#[command(name = "bref", version, about = "Bell-inequality experiments with bounded spin reference frames")]
struct Cli {
    /// Cache directory (default: $BREF_CACHE_DIR, then .bref-cache)
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Output format for single-result reports
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// CHSH value for two spin-1/2 particles with frames of size j1 and j2
    Chsh {
        #[arg(long)]
        j1: HalfInt,
        #[arg(long)]
        j2: HalfInt,
        /// Emit K rows of (theta, analytic, numeric) correlation as CSV
        #[arg(long, value_name = "K")]
        curve: Option<usize>,
    },
    /// Mermin value for a GHZ state; frames may be `inf`
    #[command(group(ArgGroup::new("parties").required(true).args(["frames", "n"])))]
    Mermin {
        /// Comma-separated frame sizes, e.g. 1/2,inf,inf
        #[arg(long, value_delimiter = ',')]
        frames: Option<Vec<Frame>>,
        /// Number of parties, all with frame --j
        #[arg(long, requires = "j", conflicts_with = "frames")]
        n: Option<usize>,
        #[arg(long)]
        j: Option<Frame>,
    },
    /// Minimal frame size that violates the chained inequality, per j_S
    Scan {
        #[arg(long)]
        js_max: HalfInt,
        #[arg(long)]
        out: PathBuf,
        /// Reuse rows already in the cache
        #[arg(long)]
        resume: bool,
    },
    /// Fit j_RF_min = a j_S^2 + b j_S to a scan CSV
    Fit {
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
    },
    /// Chained CHSH with parity measurements on the spin-j_S singlet
    #[command(group(ArgGroup::new("angle").required(true).args(["dtheta", "optimize"])))]
    Peres {
        #[arg(long)]
        js: HalfInt,
        #[arg(long)]
        jrf: Frame,
        #[arg(long, allow_negative_numbers = true)]
        dtheta: Option<f64>,
        #[arg(long)]
        optimize: bool,
    },
    /// POVM of a frame pointing along (theta, phi), as JSON
    Povm {
        #[arg(long)]
        jrf: Frame,
        #[arg(long)]
        js: HalfInt,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phi: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> CliResult<i32> {
    let format = cli.format;
    match cli.command {
        Command::Chsh { j1, j2, curve } => commands::chsh(j1, j2, curve, format),
        Command::Mermin { frames, n, j } => {
            let frames = match (frames, n, j) {
                (Some(f), _, _) => f,
                (None, Some(n), Some(j)) => vec![j; n],
                _ => return Err(CliError::Usage("give --frames or both --n and --j".into())),
            };
            commands::mermin(frames, format)
        }
        Command::Scan { js_max, out, resume } => {
            let cache = cache::Cache::new(cache::resolve_dir(cli.cache_dir.as_deref()));
            commands::scan(js_max, &out, resume, &cache)
        }
        Command::Fit { input } => commands::fit(&input, format),
        Command::Peres { js, jrf, dtheta, .. } => commands::peres(js, jrf, dtheta, format),
        Command::Povm { jrf, js, theta, phi, out } => commands::povm(jrf, js, theta, phi, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
