//! Experiment registry, reports and the plumbing behind the `cm` tool.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod report;
pub mod suite;
pub mod svg;
pub mod verdict;

use thiserror::Error;

pub use config::Config;
pub use experiments::{run, run_many, REGISTRY};
pub use report::{Report, Table};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error(transparent)]
    Core(#[from] cm_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

macro_rules! core_error {
    ($($t:ty),*) => {$(
        impl From<$t> for HarnessError {
            fn from(e: $t) -> Self {
                HarnessError::Core(e.into())
            }
        }
    )*};
}

core_error!(
    cm_core::geometry::GeometryError,
    cm_core::measure::MeasureError,
    cm_core::confmap::MapError,
    cm_core::qcmap::QcError,
    cm_core::analysis::AnalysisError
);

impl HarnessError {
    /// Process exit status: configuration and construction failures are 2.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
