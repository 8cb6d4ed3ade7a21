//! The `tiltlab` command line.
//!
//! Exit codes: 0 when a question was answered (negative verdicts included),
//! 2 for input errors, 3 when an internal invariant is found violated.

mod commands;
pub mod config;
pub mod report;
mod selftest;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use report::{Format, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "tiltlab", version, about = "Exact Bogomolov-Gieseker constants and tilt stability checks")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ConfigArg {
    /// Surface description (JSON with "p/q" strings).
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct CharacterArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub ch0: i64,
    /// Comma-separated coordinates, e.g. "1/2,-1".
    #[arg(long, allow_hyphen_values = true)]
    pub ch1: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub ch2: String,
}

#[derive(Args, Debug, Clone)]
pub struct PointArgs {
    /// Polarization; defaults to the config's ample class.
    #[arg(long = "H", allow_hyphen_values = true)]
    pub h: Option<String>,
    /// B-field; defaults to zero.
    #[arg(long = "B", allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Defaults to the generator-based estimate.
    #[arg(long = "C_H", allow_hyphen_values = true)]
    pub c_h: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Surface constant, d constant and the canonical bound.
    Constant(ConfigArg),
    /// Corrected Bogomolov inequality for a character.
    Check {
        #[command(flatten)]
        config: ConfigArg,
        #[command(flatten)]
        ch: CharacterArgs,
        #[arg(long = "B", allow_hyphen_values = true)]
        b: Option<String>,
    },
    /// Polarization wall between the slopes of E and F on tM + (1-t)L.
    Wall {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, allow_hyphen_values = true)]
        e_ch0: i64,
        #[arg(long, allow_hyphen_values = true)]
        e_ch1: String,
        #[arg(long, allow_hyphen_values = true)]
        f_ch0: i64,
        #[arg(long, allow_hyphen_values = true)]
        f_ch1: String,
        #[arg(long = "L", allow_hyphen_values = true)]
        l: String,
        #[arg(long = "M", allow_hyphen_values = true)]
        m: String,
        /// Emit a scan of this many evenly spaced t in [0, 1].
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Central charge of a character.
    Charge {
        #[command(flatten)]
        config: ConfigArg,
        #[command(flatten)]
        ch: CharacterArgs,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Torsion-pair side of a semistable class and its charge in the heart.
    Heart {
        #[command(flatten)]
        config: ConfigArg,
        #[command(flatten)]
        ch: CharacterArgs,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Support-property certificate, optionally over a grid of (sH, B + kH).
    Support {
        #[command(flatten)]
        config: ConfigArg,
        #[command(flatten)]
        point: PointArgs,
        /// Comma-separated scales s.
        #[arg(long, allow_hyphen_values = true)]
        grid_scales: Option<String>,
        /// Comma-separated shifts k.
        #[arg(long, allow_hyphen_values = true)]
        grid_shifts: Option<String>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Quadratic forms of a blown-up hypersurface.
    Hyper(commands::HyperArgs),
    /// Upper bound on L^2 for ample L with H^1(L^-1) != 0.
    Kvbound {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long = "L", allow_hyphen_values = true)]
        l: String,
    },
    /// Print the config in canonical form.
    Normalize(ConfigArg),
    /// Randomized identity checks, seeded by TILTLAB_SEED.
    Selftest {
        #[arg(long, default_value_t = 200)]
        cases: usize,
    },
}

/// Outcome of a command: the report and the exit code it implies.
pub(crate) enum Output {
    Report(Report, i32),
    Raw(String),
}

/// Runs the CLI on `args` (including the program name).
pub fn run(args: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let echo = std::iter::once("tiltlab".to_string()).chain(args.into_iter().skip(1)).collect::<Vec<_>>().join(" ");
    match commands::dispatch(&cli, echo) {
        Ok(Output::Report(report, code)) => {
            let _ = out.write_all(report.render(cli.format).as_bytes());
            code
        }
        Ok(Output::Raw(text)) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            // Library errors all stem from inputs failing preconditions.
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}
