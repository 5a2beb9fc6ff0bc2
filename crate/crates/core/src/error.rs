use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::confmap::MapError;
use crate::geometry::GeometryError;
use crate::measure::MeasureError;
use crate::qcmap::QcError;

/// Umbrella error for callers that drive several modules at once.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Qc(#[from] QcError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}
