//! Circle homeomorphisms, their barycentric extension and Beltrami data.

mod beltrami;
mod extension;
mod homeo;

pub use beltrami::{
    beltrami_carleson, beltrami_compose, beltrami_of, grid_density_measure, poincare_bilipschitz,
    poincare_distance, qc_transport, BeltramiField, BilipschitzReport,
};
pub use extension::{
    douady_earle, douady_earle_point, DeOptions, DePoint, PolarGrid, QCGridMap, QcKind,
};
pub use homeo::{CircleHomeomorphism, HomeoKind, Mobius};

use thiserror::Error;

use crate::measure::MeasureError;

#[derive(Debug, Error)]
pub enum QcError {
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("homeomorphism is not increasing: {0}")]
    NotMonotone(String),
    #[error("point ({0}, {1}) outside the unit disk")]
    OutsideDisk(f64, f64),
    #[error("barycenter solve failed at ({re}, {im}); residual {residual:e}")]
    NewtonFailed { re: f64, im: f64, residual: f64 },
    #[error("|μ| = {modulus} ≥ 1 at ring {ring}, angle index {angle}")]
    NotQuasiconformal { ring: usize, angle: usize, modulus: f64 },
    #[error("invalid json: {0}")]
    Json(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}
