use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::schwarzian::schwarzian_of_jet;
use super::AnalysisError;
use crate::confmap::{ConformalMap, Direction};
use crate::discretize::Cell;
use crate::geometry::JordanCurve;
use crate::measure::{carleson_norm, Atom, CarlesonGrid, CarlesonReport, Measure, Side};

type C = Complex64;

/// A holomorphic function on `|z| > 1` with its recorded order of decay at ∞.
#[derive(Clone)]
pub struct HolomorphicSample {
    f: Arc<dyn Fn(C) -> C + Send + Sync>,
    pub decay_order: f64,
    pub label: String,
}

impl fmt::Debug for HolomorphicSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HolomorphicSample").field("label", &self.label).field("decay_order", &self.decay_order).finish()
    }
}

impl HolomorphicSample {
    pub fn new<F: Fn(C) -> C + Send + Sync + 'static>(label: &str, decay_order: f64, f: F) -> Self {
        HolomorphicSample { f: Arc::new(f), decay_order, label: label.to_string() }
    }

    pub fn zero() -> Self {
        Self::new("zero", f64::INFINITY, |_| C::new(0.0, 0.0))
    }

    /// `c z^{-k}`.
    pub fn power(c: C, k: i32) -> Self {
        Self::new(&format!("z^-{k}"), k as f64, move |z| c * z.powi(-k))
    }

    /// Schwarzian of an exterior map normalized at ∞, which decays like `z⁻⁴`.
    pub fn schwarzian_of(map: ConformalMap) -> Result<Self, AnalysisError> {
        if map.direction() != Direction::Exterior {
            return Err(AnalysisError::Parameter(format!("{} is not an exterior map", map.name())));
        }
        let label = format!("S({})", map.name());
        Ok(Self::new(&label, 4.0, move |z| match map.jet(z) {
            Ok(j) => schwarzian_of_jet(&j),
            Err(_) => C::new(f64::NAN, f64::NAN),
        }))
    }

    pub fn eval(&self, z: C) -> C {
        (self.f)(z)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BNormReport {
    pub norm: f64,
    /// Modulus of the witness point; `None` when the supremum sits at ∞.
    pub witness_modulus: Option<f64>,
    pub witness_angle: f64,
    /// Set when the recorded decay order is below 4.
    pub infinite: bool,
}

/// Smallest `1/|z|` sampled; it stands in for the limit at ∞.
const S_INF: f64 = 1e-6;

fn weight(phi: &HolomorphicSample, s: f64, angle: f64) -> f64 {
    // (|z|² − 1)²|φ(z)| written in s = 1/|z|.
    let z = C::from_polar(1.0 / s, angle);
    let q = 1.0 - s * s;
    q * q * phi.eval(z).norm() / (s * s * s * s)
}

fn check(phi: &HolomorphicSample) -> Option<BNormReport> {
    (phi.decay_order < 4.0).then_some(BNormReport {
        norm: f64::INFINITY,
        witness_modulus: None,
        witness_angle: 0.0,
        infinite: true,
    })
}

/// Grid supremum of `(|z|² − 1)²|φ(z)|` on `|z| > 1` including ∞.
pub fn b_norm(phi: &HolomorphicSample, n_angles: usize, n_radial: usize) -> Result<BNormReport, AnalysisError> {
    if n_angles == 0 || n_radial < 2 {
        return Err(AnalysisError::Parameter("b-norm grid too small".into()));
    }
    if let Some(r) = check(phi) {
        return Ok(r);
    }
    let mut s_grid: Vec<f64> = crate::log_space(1e-4, 1.0, n_radial).iter().map(|d| 1.0 / (1.0 + d)).collect();
    s_grid.extend(crate::log_space(S_INF, 0.5, n_radial));
    let per_s: Vec<(f64, f64)> = s_grid
        .par_iter()
        .map(|&s| {
            let mut best = (0.0f64, 0.0);
            for k in 0..n_angles {
                let a = std::f64::consts::TAU * k as f64 / n_angles as f64;
                let v = weight(phi, s, a);
                if !(v <= best.0) {
                    best = (v, a);
                }
            }
            best
        })
        .collect();
    let mut out = BNormReport { norm: 0.0, witness_modulus: Some(1.0 / s_grid[0]), witness_angle: 0.0, infinite: false };
    for (&(v, a), &s) in per_s.iter().zip(&s_grid) {
        if v.is_nan() {
            return Err(AnalysisError::Parameter(format!("non-finite sample at |z| = {}", 1.0 / s)));
        }
        if v > out.norm {
            out = BNormReport {
                norm: v,
                witness_modulus: if s <= S_INF { None } else { Some(1.0 / s) },
                witness_angle: a,
                infinite: false,
            };
        }
    }
    Ok(out)
}

/// `(δ, sup over 1 < |z| ≤ 1 + δ)` for each collar width `δ`.
pub fn b0_profile(phi: &HolomorphicSample, n_angles: usize, widths: &[f64]) -> Result<Vec<(f64, f64)>, AnalysisError> {
    if n_angles == 0 || widths.iter().any(|&d| !(d > 0.0)) {
        return Err(AnalysisError::Parameter("collar widths must be positive".into()));
    }
    if check(phi).is_some() {
        return Ok(widths.iter().map(|&d| (d, f64::INFINITY)).collect());
    }
    Ok(widths
        .par_iter()
        .map(|&d| {
            let mut sup = 0.0f64;
            for m in 0..=16 {
                let s = 1.0 / (1.0 + d * 0.5f64.powi(m));
                for k in 0..n_angles {
                    sup = sup.max(weight(phi, s, std::f64::consts::TAU * k as f64 / n_angles as f64));
                }
            }
            (d, sup)
        })
        .collect())
}

/// Carleson norm, against the unit circle, of `|φ|²(|z|² − 1)³ dxdy` on the
/// supplied exterior cells.
pub fn curly_b_norm(
    phi: &HolomorphicSample,
    cells: &[Cell],
    circle: Arc<JordanCurve>,
    grid: &CarlesonGrid,
) -> Result<CarlesonReport, AnalysisError> {
    if check(phi).is_some() {
        return Ok(CarlesonReport {
            norm: f64::INFINITY,
            witness_center: grid.centers.first().copied().unwrap_or_default(),
            witness_radius: grid.radii.first().copied().unwrap_or(0.0),
            grid: grid.shape(),
        });
    }
    let atoms: Vec<Atom> = cells
        .par_iter()
        .filter_map(|c| {
            let q = c.center.norm_sqr() - 1.0;
            let w = phi.eval(c.center).norm_sqr() * q * q * q * c.area;
            (w > 0.0).then_some(Atom::new(c.center, w))
        })
        .collect();
    let m = Measure::new_trusted(circle, Side::Exterior, atoms)?;
    Ok(carleson_norm(&m, grid)?)
}
