use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the simulation stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error in {op}: {detail}")]
    Dimension { op: &'static str, detail: String },

    #[error("{op} did not converge within {iterations} iterations")]
    Convergence { op: &'static str, iterations: usize },

    #[error("requested {requested} streams but the channel has effective rank {rank}")]
    RankDeficient { requested: usize, rank: usize },

    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("{what} is numerically singular (condition number {condition:e})")]
    Singular { what: &'static str, condition: f64 },

    #[error("{side} RF column {column} has no active phase shifters")]
    DegenerateColumn { side: &'static str, column: usize },

    #[error("{what} requires a nonempty input")]
    EmptyInput { what: &'static str },

    #[error("{0}")]
    Shape(String),

    #[error("{}", config_message(.path, .line, .field, .message))]
    Config {
        path: Option<PathBuf>,
        line: Option<usize>,
        field: Option<String>,
        message: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

fn config_message(
    path: &Option<PathBuf>,
    line: &Option<usize>,
    field: &Option<String>,
    message: &str,
) -> String {
    let mut out = String::from("config error");
    if let Some(p) = path {
        out.push_str(&format!(" in {}", p.display()));
    }
    if let Some(l) = line {
        out.push_str(&format!(" at line {l}"));
    }
    if let Some(f) = field {
        out.push_str(&format!(" (field `{f}`)"));
    }
    out.push_str(": ");
    out.push_str(message);
    out
}

impl Error {
    pub(crate) fn dim(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Dimension {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn config_field(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: None,
            line: None,
            field: Some(field.into()),
            message: message.into(),
        }
    }

    /// True for per-trial failures that the Monte-Carlo runner records and
    /// skips instead of aborting the experiment.
    pub fn is_degenerate_trial(&self) -> bool {
        matches!(
            self,
            Error::RankDeficient { .. }
                | Error::Singular { .. }
                | Error::DegenerateColumn { .. }
                | Error::Convergence { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
