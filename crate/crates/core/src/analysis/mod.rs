//! Diagnostics on the circle and on holomorphic fields of the exterior disk.

mod bnorm;
mod circle;
mod quasisymmetry;
mod schwarzian;

pub use bnorm::{b0_profile, b_norm, curly_b_norm, BNormReport, HolomorphicSample};
pub use circle::{
    a_infty_check, bmo_norm, vmo_profile, AInftyReport, AInftyWitness, ArcFamily, BmoReport,
    CircleArc, CircleFunction, SubsetScheme,
};
pub use quasisymmetry::{default_t_grid, quasisymmetry_modulus, symmetric_profile, QsReport};
pub use schwarzian::{cocycle_residual, compose_jets, schwarzian, schwarzian_of_jet, Scheme};

use thiserror::Error;

use crate::confmap::MapError;
use crate::measure::MeasureError;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("weight vanishes identically")]
    ZeroWeight,
    #[error("stencil around ({0}, {1}) leaves the domain")]
    StencilOutsideDomain(f64, f64),
    #[error("g maps ({0}, {1}) outside the domain of f")]
    DomainMismatch(f64, f64),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}
