//! Univalent maps, measure transport, the Theodorsen engine and welding.

mod maps;
mod theodorsen;
mod transport;
mod welding;

pub use maps::{
    koebe_bounds_check, lens_boundary_value, ConformalMap, Direction, Jet, KoebeCheck, KoebeReport,
    MapKind,
};
pub use theodorsen::{theodorsen_map, RadiusFunction, TheodorsenOptions, TheodorsenTable};
pub use transport::{pull_back, push_forward, push_forward_onto};
pub use welding::{welding, welding_radius, WeldingResult};

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::measure::MeasureError;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("point ({0}, {1}) outside the map's domain")]
    OutsideDomain(f64, f64),
    #[error("point ({0}, {1}) outside the map's image")]
    OutsideImage(f64, f64),
    #[error("newton inversion did not converge for ({re}, {im}); last residual {residual:e}")]
    NewtonFailed { re: f64, im: f64, residual: f64, trace: Vec<(f64, f64)> },
    #[error("star-likeness condition fails: max |ρ'/ρ| = {0} ≥ 1")]
    EpsilonCondition(f64),
    #[error("iteration did not reach tolerance in {} steps (last residual {:e})", .history.len(), .history.last().copied().unwrap_or(f64::NAN))]
    NonConvergence { history: Vec<f64> },
    #[error("curve is not star-like about the origin: {0}")]
    NotStarLike(String),
    #[error("image curve unavailable for {0}")]
    ImageUnavailable(&'static str),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("invalid map json: {0}")]
    Json(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}
