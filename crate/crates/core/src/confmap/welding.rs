use serde::Serialize;

use super::theodorsen::{theodorsen_table, RadiusFunction, TheodorsenOptions};
use super::MapError;
use crate::geometry::JordanCurve;
use crate::qcmap::CircleHomeomorphism;

use num_complex::Complex64 as C;

#[derive(Clone, Debug, Serialize)]
pub struct WeldingResult {
    #[serde(skip)]
    pub h: CircleHomeomorphism,
    /// Largest of the boundary mismatch and both fixed-point residuals.
    pub residual: f64,
    pub boundary_mismatch: f64,
    pub interior_residual: f64,
    pub exterior_residual: f64,
    pub interior_iterations: usize,
    pub exterior_iterations: usize,
    /// Normalization applied to the lift: `H(0) = 0`.
    pub normalization: &'static str,
}

/// Welding homeomorphism of a star-like curve.
pub fn welding(curve: &JordanCurve, opts: &TheodorsenOptions) -> Result<WeldingResult, MapError> {
    let radius = RadiusFunction::from_curve(curve, curve.len().max(opts.n))?;
    welding_radius(&radius, opts)
}

/// Welding from the polar radius of the curve. The exterior component is
/// turned into an interior problem by `w ↦ 1/w̄`.
pub fn welding_radius(radius: &RadiusFunction, opts: &TheodorsenOptions) -> Result<WeldingResult, MapError> {
    let int = theodorsen_table(radius, opts, false)?;
    let ext = theodorsen_table(&RadiusFunction::Inverted(Box::new(radius.clone())), opts, true)?;
    let n = opts.n;
    let mut lift = Vec::with_capacity(n);
    let mut deriv = Vec::with_capacity(n);
    let mut mismatch = 0.0f64;
    for j in 0..n {
        let s = ext.nodes[j];
        let (target, dext) = ext.angle(s);
        let t = int.inverse_angle(target)?;
        let (_, dint) = int.angle(t);
        lift.push(t);
        deriv.push(dext / dint);
        let inside = int.value(C::from_polar(1.0, t));
        let outside = ext.value(C::from_polar(1.0, s));
        mismatch = mismatch.max((inside - outside).norm());
    }
    let shift = lift[0];
    for v in lift.iter_mut() {
        *v -= shift;
    }
    let h = CircleHomeomorphism::sampled(lift, Some(deriv)).map_err(|e| MapError::Parameter(e.to_string()))?;
    let (ir, er) = (int.final_residual(), ext.final_residual());
    Ok(WeldingResult {
        h,
        residual: mismatch.max(ir).max(er),
        boundary_mismatch: mismatch,
        interior_residual: ir,
        exterior_residual: er,
        interior_iterations: int.iterations(),
        exterior_iterations: ext.iterations(),
        normalization: "theta0",
    })
}
