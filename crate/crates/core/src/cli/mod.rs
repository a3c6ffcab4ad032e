//! Command-line front end.
//!
//! Every command reads one JSON recurrence document from a path or stdin and
//! writes JSON (reports) or CSV (sequences) to stdout. Complex numbers are
//! `[re, im]` pairs. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | invalid document or arguments |
//! | 3 | numerical failure |
//! | 4 | the recurrence is outside the asymptotic theory (`rho <= 1`) |
//! | 5 | dominant roots are not stable under doubling the truncation |
//! | 6 | companion check requested for an infinite-order recurrence |

pub mod document;
pub mod report;

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::asymptotics::{
    asymptotic_error_profile, binet_coefficients, dominant_eigenvalues, AsymptoticsError,
};
use crate::kneading::{companion_check, KneadingError, KneadingSystem};
use crate::recurrence::ModelError;
use document::{Problem, RecurrenceDocument};
use report::{AsymReport, CompanionReport, GfReport};

#[derive(Debug, Parser)]
#[command(
    name = "kneading",
    version,
    about = "Kneading determinants of vector linear recurrences"
)]
pub struct Cli {
    /// Truncation order N, overriding the document.
    #[arg(long, global = true)]
    pub truncation: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Input {
    /// Recurrence document; stdin when omitted or `-`.
    pub input: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coefficients of the kneading determinant as JSON.
    Det {
        #[command(flatten)]
        input: Input,
    },
    /// CSV of v_0..v_H by direct iteration from the document's initial condition.
    Solve {
        #[arg(long)]
        horizon: usize,
        #[command(flatten)]
        input: Input,
    },
    /// One component of a generating function as JSON.
    Gf {
        /// Component, 1-based.
        #[arg(long)]
        alpha: usize,
        /// Basis vector index, 1-based.
        #[arg(
            long,
            required_unless_present = "from_initial",
            conflicts_with = "from_initial"
        )]
        beta: Option<usize>,
        /// Use the document's initial condition instead of a basis vector.
        #[arg(long)]
        from_initial: bool,
        #[command(flatten)]
        input: Input,
    },
    /// CSV of max |generating-function coefficient - iterate| for n = 0..=H.
    Compare {
        #[arg(long)]
        horizon: usize,
        #[command(flatten)]
        input: Input,
    },
    /// Dominant eigenvalues, Binet constants and error profile as JSON.
    Asym {
        #[arg(long)]
        horizon: usize,
        #[command(flatten)]
        input: Input,
    },
    /// Companion discriminant against the kneading determinant as JSON.
    CompanionCheck {
        #[command(flatten)]
        input: Input,
    },
}

impl Command {
    fn input(&self) -> &Input {
        match self {
            Command::Det { input }
            | Command::Solve { input, .. }
            | Command::Gf { input, .. }
            | Command::Compare { input, .. }
            | Command::Asym { input, .. }
            | Command::CompanionCheck { input } => input,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Computation(String),
    #[error("{0}")]
    Hypothesis(String),
    #[error("{0}")]
    Unstable(String),
    #[error("companion check needs a finite-order recurrence (explicit coefficients)")]
    InfiniteOrder,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Computation(_) => 3,
            CliError::Hypothesis(_) => 4,
            CliError::Unstable(_) => 5,
            CliError::InfiniteOrder => 6,
        }
    }
}

impl From<KneadingError> for CliError {
    fn from(e: KneadingError) -> Self {
        match e {
            KneadingError::Model(ModelError::InfiniteOrder) => CliError::InfiniteOrder,
            KneadingError::InvalidAlpha { .. } | KneadingError::InvalidBeta => {
                CliError::Invalid(e.to_string())
            }
            other => CliError::Computation(other.to_string()),
        }
    }
}

impl From<AsymptoticsError> for CliError {
    fn from(e: AsymptoticsError) -> Self {
        match e {
            AsymptoticsError::Kneading(k) => k.into(),
            AsymptoticsError::HypothesisViolated { .. } => CliError::Hypothesis(e.to_string()),
            AsymptoticsError::TruncationUnstable { .. } => CliError::Unstable(e.to_string()),
            other => CliError::Computation(other.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Computation(e.to_string())
    }
}

fn read_input(input: &Input, stdin: &mut dyn Read) -> Result<String, CliError> {
    let mut text = String::new();
    match &input.input {
        Some(path) if path.as_os_str() != "-" => {
            text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))?;
        }
        _ => {
            stdin
                .read_to_string(&mut text)
                .map_err(|e| CliError::Invalid(format!("cannot read stdin: {e}")))?;
        }
    }
    Ok(text)
}

fn json(value: &impl serde::Serialize) -> String {
    serde_json::to_string(value).expect("reports contain only serializable data")
}

fn io(e: std::io::Error) -> CliError {
    CliError::Computation(format!("cannot write output: {e}"))
}

/// Runs a parsed command, reading the document from `stdin` when no path is given.
pub fn run(cli: &Cli, stdin: &mut dyn Read, out: &mut dyn Write) -> Result<(), CliError> {
    let text = read_input(cli.command.input(), stdin)?;
    let doc = RecurrenceDocument::from_json(&text).map_err(CliError::Invalid)?;
    let mut problem = doc.validate().map_err(CliError::Invalid)?;
    if let Some(n) = cli.truncation {
        if n == 0 {
            return Err(CliError::Invalid("truncation must be positive".into()));
        }
        problem.truncation = n;
    }
    let text = execute(&cli.command, &problem)?;
    writeln!(out, "{text}").map_err(io)
}

fn execute(command: &Command, problem: &Problem) -> Result<String, CliError> {
    let Problem {
        recurrence: rec,
        initial: u,
        truncation,
    } = problem;
    let truncation = *truncation;
    let p = rec.dim();
    match command {
        Command::Det { .. } => {
            let sys = KneadingSystem::build(rec, truncation)?;
            Ok(json(&report::series_pairs(sys.delta())))
        }
        Command::Solve { horizon, .. } => {
            let sol = rec.iterate(u, *horizon)?;
            let mut lines = vec![report::solution_header(p)];
            lines.extend((0..=*horizon).map(|n| report::solution_row(n, sol.get(n))));
            Ok(lines.join("\n"))
        }
        Command::Gf {
            alpha,
            beta,
            from_initial,
            ..
        } => {
            if *alpha == 0 || *alpha > p {
                return Err(CliError::Invalid(format!("--alpha must be in 1..={p}")));
            }
            let sys = KneadingSystem::build(rec, truncation)?;
            let series = match beta {
                Some(beta) if !from_initial => sys.generating_function_basis(*alpha, *beta)?,
                _ => sys.generating_function(u)?.component(*alpha).clone(),
            };
            Ok(json(&GfReport {
                alpha: *alpha,
                beta: beta.filter(|_| !from_initial),
                truncation: series.truncation(),
                coefficients: report::series_pairs(&series),
            }))
        }
        Command::Compare { horizon, .. } => {
            if *horizon >= truncation {
                return Err(CliError::Invalid(format!(
                    "--horizon {horizon} must be below the truncation {truncation}"
                )));
            }
            let sys = KneadingSystem::build(rec, truncation)?;
            let g = sys.generating_function(u)?;
            let sol = rec.iterate(u, *horizon)?;
            let mut lines = vec!["n,max_abs_diff".to_string()];
            for n in 0..=*horizon {
                let diff = (g.coefficient(n) - sol.get(n))
                    .iter()
                    .map(|d| d.norm())
                    .fold(0.0, f64::max);
                lines.push(format!("{n},{}", report::number(diff)));
            }
            Ok(lines.join("\n"))
        }
        Command::Asym { horizon, .. } => {
            let sys = KneadingSystem::build(rec, truncation)?;
            let evs = dominant_eigenvalues(&sys)?;
            let approx = binet_coefficients(&sys, u, &evs)?;
            let profile = asymptotic_error_profile(rec, u, &approx, *horizon)?;
            Ok(json(&AsymReport::new(truncation, &approx, &profile)))
        }
        Command::CompanionCheck { .. } => {
            let check = companion_check(rec)?;
            Ok(json(&CompanionReport::from(&check)))
        }
    }
}
