use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use super::AnalysisError;
use crate::qcmap::CircleHomeomorphism;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QsReport {
    pub modulus: f64,
    pub witness_theta: f64,
    pub witness_t: f64,
}

/// Log-spaced `t` in `[10⁻³, π/2]`.
pub fn default_t_grid(count: usize) -> Vec<f64> {
    crate::log_space(1e-3, PI / 2.0, count)
}

fn chord(h: &CircleHomeomorphism, a: f64, b: f64) -> f64 {
    2.0 * ((h.lift_at(b) - h.lift_at(a)) / 2.0).sin().abs()
}

fn ratio(h: &CircleHomeomorphism, theta: f64, t: f64) -> f64 {
    chord(h, theta, theta + t) / chord(h, theta - t, theta)
}

fn check_ts(ts: &[f64], n_theta: usize) -> Result<(), AnalysisError> {
    if n_theta == 0 || ts.is_empty() || ts.iter().any(|&t| !(t > 0.0 && t < PI)) {
        return Err(AnalysisError::Parameter("t grid must lie in (0, π) and θ grid be nonempty".into()));
    }
    Ok(())
}

/// Grid supremum of `max(ρ, 1/ρ)` for the three-point ratio `ρ(θ, t)`.
pub fn quasisymmetry_modulus(h: &CircleHomeomorphism, n_theta: usize, ts: &[f64]) -> Result<QsReport, AnalysisError> {
    check_ts(ts, n_theta)?;
    let per_t: Vec<(f64, f64)> = ts
        .par_iter()
        .map(|&t| {
            let mut best = (0.0f64, 0.0);
            for j in 0..n_theta {
                let th = TAU * j as f64 / n_theta as f64;
                let r = ratio(h, th, t);
                let m = r.max(1.0 / r);
                if m > best.0 {
                    best = (m, th);
                }
            }
            best
        })
        .collect();
    let mut out = QsReport { modulus: 0.0, witness_theta: 0.0, witness_t: ts[0] };
    for (&(m, th), &t) in per_t.iter().zip(ts) {
        if m > out.modulus {
            out = QsReport { modulus: m, witness_theta: th, witness_t: t };
        }
    }
    Ok(out)
}

/// `(t, sup_θ |ρ(θ, t) − 1|)` for each `t`.
pub fn symmetric_profile(h: &CircleHomeomorphism, n_theta: usize, ts: &[f64]) -> Result<Vec<(f64, f64)>, AnalysisError> {
    check_ts(ts, n_theta)?;
    Ok(ts
        .par_iter()
        .map(|&t| {
            let sup = (0..n_theta)
                .map(|j| (ratio(h, TAU * j as f64 / n_theta as f64, t) - 1.0).abs())
                .fold(0.0, f64::max);
            (t, sup)
        })
        .collect())
}
