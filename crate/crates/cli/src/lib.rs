//! Configuration-driven verification runs for `wulffcap`.
//!
//! Exit status of the binary: 0 when every check passes, 1 when a check
//! fails or aborts on a violated hypothesis or numerical failure, 2 for
//! configuration, usage and I/O errors.

pub mod catalog;
pub mod config;
pub mod output;
pub mod run;

use serde_json::json;

pub use catalog::{CatalogEntry, CheckId};
pub use config::RunConfig;
pub use run::{run, RunOutcome, RunReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("check {check} aborted: {source}")]
    Run {
        check: &'static str,
        #[source]
        source: wulffcap::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Run { .. } => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
        }
    }

    /// Structured description for stderr.
    pub fn to_json(&self) -> String {
        let value = match self {
            CliError::Config(msg) => json!({ "error": "config", "detail": msg }),
            CliError::Io(msg) => json!({ "error": "io", "detail": msg }),
            CliError::Run { check, source } => {
                let (kind, nodes) = match source {
                    wulffcap::Error::HypothesisViolation { nodes, .. } => ("hypothesis-violation", nodes.clone()),
                    wulffcap::Error::NumericalFailure { .. } => ("numerical-failure", vec![]),
                    wulffcap::Error::Discretization { node, .. } => ("discretization", vec![*node]),
                    wulffcap::Error::Ellipticity { .. } => ("ellipticity", vec![]),
                    wulffcap::Error::Orientation(_) => ("orientation", vec![]),
                    wulffcap::Error::InvalidArgument(_) | wulffcap::Error::Construction(_) => ("invalid-argument", vec![]),
                };
                json!({ "error": kind, "check": check, "detail": source.to_string(), "nodes": nodes })
            }
        };
        serde_json::to_string(&value).expect("error serialises")
    }
}
