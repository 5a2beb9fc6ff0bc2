use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::confmap::{ConformalMap, Direction, Jet, MapKind};

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Analytic,
    FiniteDifference,
}

/// `f‴/f′ − (3/2)(f″/f′)²`.
pub fn schwarzian_of_jet(j: &Jet) -> C {
    let p = j.d2 / j.d1;
    j.d3 / j.d1 - 1.5 * p * p
}

/// Jet of `f ∘ g` from the jet of `f` at `g(z)` and of `g` at `z`.
pub fn compose_jets(f: &Jet, g: &Jet) -> Jet {
    let g1 = g.d1;
    Jet {
        f: f.f,
        d1: f.d1 * g1,
        d2: f.d2 * g1 * g1 + f.d1 * g.d2,
        d3: f.d3 * g1 * g1 * g1 + 3.0 * f.d2 * g1 * g.d2 + f.d1 * g.d3,
    }
}

fn boundary_distance(map: &ConformalMap, z: C) -> f64 {
    match map.direction() {
        Direction::Disk => 1.0 - z.norm(),
        Direction::Exterior => z.norm() - 1.0,
    }
}

/// Schwarzian derivative of `map` at an interior point.
pub fn schwarzian(map: &ConformalMap, z: C, scheme: Scheme) -> Result<C, AnalysisError> {
    let d = boundary_distance(map, z);
    if !(d > 0.0) {
        return Err(AnalysisError::StencilOutsideDomain(z.re, z.im));
    }
    match scheme {
        Scheme::Analytic => {
            let one = 1.0 - z * z;
            Ok(match map.kind() {
                MapKind::Mobius { .. } => C::new(0.0, 0.0),
                MapKind::Koebe => -6.0 / (one * one),
                MapKind::Lens { alpha } => (2.0 - 2.0 * alpha * alpha) / (one * one),
                _ => schwarzian_of_jet(&map.jet(z)?),
            })
        }
        Scheme::FiniteDifference => {
            // Four nodes on the circle |ζ − z| = h; the discrete Cauchy
            // integral is exact through degree 3 and aliases from degree j+4.
            let h = 0.05 * d;
            let rot = [C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(-1.0, 0.0), C::new(0.0, -1.0)];
            let mut vals = [C::new(0.0, 0.0); 4];
            for (v, r) in vals.iter_mut().zip(rot) {
                *v = map.eval(z + h * r)?;
            }
            let coeff = |j: usize| -> C {
                (0..4).map(|k| vals[k] * rot[(4 - (j * k) % 4) % 4]).sum::<C>() / (4.0 * h.powi(j as i32))
            };
            let jet = Jet { f: map.eval(z)?, d1: coeff(1), d2: 2.0 * coeff(2), d3: 6.0 * coeff(3) };
            Ok(schwarzian_of_jet(&jet))
        }
    }
}

/// `|S(f∘g)(z) − S(f)(g(z))·g′(z)² − S(g)(z)|`.
pub fn cocycle_residual(f: &ConformalMap, g: &ConformalMap, z: C) -> Result<f64, AnalysisError> {
    let gj = g.jet(z)?;
    if !(boundary_distance(f, gj.f) > 0.0) {
        return Err(AnalysisError::DomainMismatch(z.re, z.im));
    }
    let fj = f.jet(gj.f)?;
    let s_fg = schwarzian_of_jet(&compose_jets(&fj, &gj));
    let s_f = schwarzian(f, gj.f, Scheme::Analytic)?;
    let s_g = schwarzian(g, z, Scheme::Analytic)?;
    Ok((s_fg - s_f * gj.d1 * gj.d1 - s_g).norm())
}
