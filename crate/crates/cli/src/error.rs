use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Domain(#[from] f2lab_core::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}: {msg}")]
    Input { path: PathBuf, msg: String },

    /// A verification suite ran to completion but some checks failed. The
    /// report has already been written.
    #[error("{0} checks failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    fn kind(&self) -> &'static str {
        use f2lab_core::Error as E;
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Input { .. } => "input",
            CliError::ChecksFailed(_) => "checks_failed",
            CliError::Domain(e) => match e {
                E::Parse { .. } => "parse",
                E::VariableIndex { .. } => "variable_index",
                E::DimensionMismatch { .. } => "dimension_mismatch",
                E::CapExceeded { .. } => "cap_exceeded",
                E::DegreeTooHigh { .. } => "degree_too_high",
                E::Inconsistent => "inconsistent",
                E::NonLinearConstraint(_) => "nonlinear_constraint",
                E::NotPowerOfTwo(_) => "not_power_of_two",
                E::NotGrowth(_) => "not_growth",
                E::BudgetExceeded(_) => "budget_exceeded",
                E::NotAViolation => "not_a_violation",
                E::Invalid(_) => "invalid",
                E::Invariant(_) => "internal",
            },
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "schema_version": crate::output::SCHEMA_VERSION,
            "error": { "kind": self.kind(), "message": self.to_string() },
        })
    }
}
