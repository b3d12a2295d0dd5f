//! The `dde` command line, callable in-process through [`run`].

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use config::{OrderArg, UsageError};
use dde_core::triangular::Parity;
use std::ffi::OsString;
use std::path::PathBuf;

/// Solver and checks for y'(x) = y(x + 1/2) - y(x - 1/2).
#[derive(Debug, Parser)]
#[command(name = "dde", version)]
struct Cli {
    /// JSON file with default settings; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Print one JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact S_m = L x^m for m = 1..=M_MAX.
    SnTable {
        m_max: Option<u32>,
        /// Compare against the transcribed reference table (m <= 10).
        #[arg(long)]
        compare_paper: bool,
    },
    /// Method-of-steps solve from initial data on [-1/2, 1/2].
    Solve {
        /// Initial function h(x), e.g. "x^2" or "exp(x)".
        h: Option<String>,
        /// Declared smoothness: an integer or "unbounded".
        #[arg(short, long)]
        k: Option<OrderArg>,
        /// Extension steps on each side.
        #[arg(long)]
        span: Option<usize>,
        /// Continue past a failed admissibility check (exit code 2).
        #[arg(long)]
        force: bool,
        /// Sample count for samples.csv.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Roots of sin w = w in a box of the w-plane.
    Roots {
        /// RE_MIN RE_MAX IM_MIN IM_MAX
        #[arg(long = "box", num_args = 4, allow_negative_numbers = true, value_name = "X")]
        bx: Option<Vec<f64>>,
        /// Seeds per side.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Residual profile of a saved solution.
    Verify {
        file: Option<PathBuf>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Operator-polynomial identities and closed-form segments.
    Opcheck { n_max: Option<usize> },
    /// Undetermined-coefficient triangular system.
    Triangular {
        #[arg(long, value_parser = parse_parity)]
        parity: Option<Parity>,
        /// Truncation order N.
        #[arg(short, long)]
        n: Option<usize>,
    },
}

fn parse_parity(s: &str) -> Result<Parity, String> {
    match s {
        "even" => Ok(Parity::Even),
        "odd" => Ok(Parity::Odd),
        _ => Err(format!("expected \"even\" or \"odd\", got {s:?}")),
    }
}

const EXIT_USAGE: u8 = 64;

/// What a process would see: exit code and the two output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let fail = |code, stderr| Outcome {
        code,
        stdout: String::new(),
        stderr,
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                fail(EXIT_USAGE, text)
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match commands::run(cli) {
        Ok((status, stdout)) => Outcome {
            code: status.code(),
            stdout,
            stderr: String::new(),
        },
        Err(e) if e.is::<UsageError>() => fail(EXIT_USAGE, format!("error: {e}\n")),
        Err(e) => fail(1, format!("error: {e:#}\n")),
    }
}
