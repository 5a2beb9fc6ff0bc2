//! Carleson measures on planar domains and their transport under conformal
//! and quasiconformal maps.
//!
//! The crate is organised around five pieces:
//!
//! - [`geometry`]: sampled Jordan curves, chord-arc and Ahlfors-regularity
//!   constants, distance and containment queries.
//! - [`measure`]: finite atomic measures, Carleson norms on
//!   (center, radius) grids, vanishing profiles and collar restrictions.
//! - [`confmap`]: explicit univalent maps, a Theodorsen mapping engine,
//!   pull-back / push-forward of measures and conformal welding.
//! - [`qcmap`]: circle homeomorphisms, the Douady–Earle extension, Beltrami
//!   fields and the Carleson measures they induce.
//! - [`analysis`]: BMO/VMO and A∞ diagnostics on the circle, quasisymmetry
//!   moduli, Schwarzian derivatives and the B / 𝓑 norms.
//!
//! Every reported supremum is a grid supremum and therefore a lower bound for
//! the quantity it estimates.

pub mod analysis;
pub mod confmap;
pub mod discretize;
pub mod geometry;
pub mod measure;
pub mod qcmap;

mod error;

pub use error::Error;
pub use geometry::{JordanCurve, Point};
pub use measure::{Atom, CarlesonGrid, Measure};

/// Log-spaced values from `lo` to `hi` inclusive, ascending.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && count >= 1);
    if count == 1 {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            if i + 1 == count {
                hi
            } else if i == 0 {
                lo
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}
