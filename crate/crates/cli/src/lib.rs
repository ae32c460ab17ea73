//! Command-line harness around `modelkit`.
//!
//! Every subcommand builds a [`Report`]; the binary prints it and exits with
//! status 0 only when all of its diagnostics pass. Randomness comes from a
//! single `--seed`, split per subcommand with [`modelkit::rng::derive_seed`].

pub mod commands;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use report::Report;

#[derive(Debug, Parser)]
#[command(name = "modelkit", version, about = "PLS, envelope, confidence, causal and operator experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenModel {
    /// Σ_X = ΦΔΦᵀ + Φ₀Δ₀Φ₀ᵀ with β in span(Φ).
    Envelope,
    /// Random covariance with β on `m` eigenvectors.
    Population,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitMethod {
    Pls,
    Ols,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    Spin,
    Decision,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a dataset and write it with a sidecar of true parameters.
    Gen {
        #[arg(long, value_enum, default_value = "envelope")]
        model: GenModel,
        #[arg(long, default_value_t = 5)]
        p: usize,
        /// Envelope dimension (number of relevant components).
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Noise variance.
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV destination; the sidecar goes next to it as `<stem>.truth.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit PLS or OLS to a CSV dataset.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value = "pls")]
        method: FitMethod,
        /// Number of components; chosen by cross-validation when omitted.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        cv_folds: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare Krylov dimension, relevant eigenvalue groups and the
    /// population PLS stopping step on random models.
    Equivalence {
        #[arg(long, default_value_t = 6)]
        p: usize,
        #[arg(long, default_value_t = 3)]
        relevant: usize,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Uniformity of confidence curves evaluated at the true parameter.
    Confidence {
        #[arg(long, default_value_t = 2000)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// True noise scale relative to the one the normal-mean curve
        /// assumes; values other than 1 give a negative control.
        #[arg(long, default_value_t = 1.0)]
        sigma_factor: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Conditioning versus intervention in a discrete causal model.
    Causal {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Operator demos in finite dimension.
    Quantum {
        #[arg(long, value_enum, default_value = "spin")]
        demo: Demo,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..=64))]
        d: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Scale of the attraction factors in the decision demo.
        #[arg(long, default_value_t = 0.0)]
        attraction: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure modes of a run, mapped to distinct exit codes by the binary.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Failed(#[from] anyhow::Error),
}

impl From<modelkit::Error> for RunError {
    fn from(e: modelkit::Error) -> Self {
        RunError::Failed(e.into())
    }
}

pub type RunResult<T> = std::result::Result<T, RunError>;

pub fn usage(msg: impl Into<String>) -> RunError {
    RunError::Usage(msg.into())
}

impl Command {
    pub fn report_path(&self) -> Option<&PathBuf> {
        match self {
            Command::Gen { .. } => None,
            Command::Fit { out, .. }
            | Command::Equivalence { out, .. }
            | Command::Confidence { out, .. }
            | Command::Causal { out, .. }
            | Command::Quantum { out, .. } => out.as_ref(),
        }
    }
}

pub fn run(command: &Command) -> RunResult<Report> {
    match command {
        Command::Gen {
            model,
            p,
            m,
            n,
            noise,
            seed,
            out,
        } => commands::gen::run(*model, *p, *m, *n, *noise, *seed, out),
        Command::Fit {
            data,
            method,
            m,
            cv_folds,
            seed,
            ..
        } => commands::fit::run(data, *method, *m, *cv_folds, *seed),
        Command::Equivalence {
            p, relevant, reps, seed, ..
        } => commands::equivalence::run(*p, *relevant, *reps, *seed),
        Command::Confidence {
            reps,
            seed,
            sigma_factor,
            ..
        } => commands::confidence::run(*reps, *seed, *sigma_factor),
        Command::Causal { model, .. } => commands::causal::run(model),
        Command::Quantum {
            demo,
            d,
            seed,
            attraction,
            ..
        } => commands::quantum::run(*demo, *d as usize, *seed, *attraction),
    }
}
