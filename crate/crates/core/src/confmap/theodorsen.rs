//! Conjugate-function iteration for star-like domains.
//!
//! For a boundary `{ρ(θ) e^{iθ}}` the unknown correspondence `Θ(t)` satisfies
//! `Θ = t + K[log ρ(Θ)]`, `K` the periodic conjugate operator. With `u` the
//! converged `log ρ(Θ)`, the map is `f(z) = z·exp(g(z))` where `g` is the
//! analytic completion of `u`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::maps::{ConformalMap, Jet};
use super::MapError;
use crate::geometry::{CurveFamily, JordanCurve};

type C = Complex64;

/// Boundary radius as a function of polar angle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusFunction {
    Circle,
    /// `1 + a cos(kθ)`.
    Star { a: f64, k: u32 },
    /// Polar radius of the image of the unit circle under `z + c/z`.
    Ellipse { c: f64 },
    /// `1/ρ`: the image of the exterior under `w ↦ 1/w̄`.
    Inverted(Box<RadiusFunction>),
    /// `log ρ` on a uniform angle grid, periodic cubic interpolation between.
    Sampled { log_rho: Vec<f64> },
}

impl RadiusFunction {
    /// `(log ρ, ρ′/ρ)` at angle `theta`.
    pub fn log_eval(&self, theta: f64) -> (f64, f64) {
        match self {
            RadiusFunction::Circle => (0.0, 0.0),
            RadiusFunction::Star { a, k } => {
                let k = *k as f64;
                let rho = 1.0 + a * (k * theta).cos();
                (rho.ln(), -a * k * (k * theta).sin() / rho)
            }
            RadiusFunction::Ellipse { c } => {
                let (a, b) = (1.0 + c, 1.0 - c);
                let (s, co) = theta.sin_cos();
                let q = b * b * co * co + a * a * s * s;
                ((a * b).ln() - 0.5 * q.ln(), -(a * a - b * b) * s * co / q)
            }
            RadiusFunction::Inverted(inner) => {
                let (l, d) = inner.log_eval(theta);
                (-l, -d)
            }
            RadiusFunction::Sampled { log_rho } => catmull_rom(log_rho, theta),
        }
    }

    pub fn radius(&self, theta: f64) -> f64 {
        self.log_eval(theta).0.exp()
    }

    /// `max |ρ′/ρ|` over `samples` angles.
    pub fn epsilon(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|k| self.log_eval(TAU * k as f64 / samples as f64).1.abs())
            .fold(0.0, f64::max)
    }

    /// Radius function of a curve that is star-like about the origin.
    pub fn from_curve(curve: &JordanCurve, samples: usize) -> Result<Self, MapError> {
        match curve.family() {
            CurveFamily::Circle => return Ok(RadiusFunction::Circle),
            CurveFamily::Star { a, k } => return Ok(RadiusFunction::Star { a: *a, k: *k }),
            CurveFamily::Ellipse { c } => return Ok(RadiusFunction::Ellipse { c: *c }),
            _ => {}
        }
        let pts = curve.samples();
        let n = pts.len();
        // Unwrapped argument must increase monotonically by exactly 2π.
        let mut args = Vec::with_capacity(n + 1);
        let mut acc = pts[0].arg();
        args.push(acc);
        for i in 0..n {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            if a.norm() == 0.0 || b.norm() == 0.0 {
                return Err(MapError::NotStarLike("curve passes through the origin".into()));
            }
            let step = (b / a).arg();
            if step <= 0.0 {
                return Err(MapError::NotStarLike(format!("argument decreases at sample {i}")));
            }
            acc += step;
            args.push(acc);
        }
        if (acc - args[0] - TAU).abs() > 1e-9 {
            return Err(MapError::NotStarLike("origin not enclosed once".into()));
        }
        let mut log_rho = Vec::with_capacity(samples);
        let mut seg = 0usize;
        let base = args[0];
        for k in 0..samples {
            let mut theta = TAU * k as f64 / samples as f64;
            while theta < base {
                theta += TAU;
            }
            while seg < n && args[seg + 1] < theta {
                seg += 1;
            }
            let (a, b) = (pts[seg % n], pts[(seg + 1) % n]);
            let dir = C::from_polar(1.0, theta);
            // Intersection of the ray t·dir with segment a + s(b − a).
            let d = b - a;
            let den = dir.re * d.im - dir.im * d.re;
            let t = (a.re * d.im - a.im * d.re) / den;
            log_rho.push(t.ln());
        }
        Ok(RadiusFunction::Sampled { log_rho })
    }
}

fn catmull_rom(values: &[f64], theta: f64) -> (f64, f64) {
    let n = values.len();
    let h = TAU / n as f64;
    let x = theta.rem_euclid(TAU) / h;
    let i = (x.floor() as usize) % n;
    let s = x - x.floor();
    let p = |k: isize| values[((i as isize + k).rem_euclid(n as isize)) as usize];
    let (p0, p1, p2, p3) = (p(-1), p(0), p(1), p(2));
    let a = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
    let b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
    let c = -0.5 * p0 + 0.5 * p2;
    let v = ((a * s + b) * s + c) * s + p1;
    let dv = ((3.0 * a * s + 2.0 * b) * s + c) / h;
    (v, dv)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheodorsenOptions {
    pub n: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for TheodorsenOptions {
    fn default() -> Self {
        TheodorsenOptions { n: 1024, tol: 1e-12, max_iter: 200 }
    }
}

/// Converged boundary correspondence plus the Taylor coefficients of `g`.
#[derive(Clone, Debug)]
pub struct TheodorsenTable {
    /// Uniform parameters `t_j = 2πj/N`.
    pub nodes: Vec<f64>,
    /// `Θ(t_j)`.
    pub correspondence: Vec<f64>,
    /// `b_0, …, b_{N/2}`.
    pub coeffs: Vec<C>,
    pub residual_history: Vec<f64>,
    pub epsilon: f64,
    /// Map of `|z| > 1` obtained from the inverted interior problem.
    pub exterior: bool,
    /// Leading coefficients used in evaluation; the dropped tail sums to
    /// at most `4e-15·max(1, max|b_n|)`.
    active: usize,
}

impl TheodorsenTable {
    fn with_active_len(mut self) -> Self {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
        let mut tail = 0.0;
        let mut active = self.coeffs.len();
        while active > 1 {
            tail += self.coeffs[active - 1].norm();
            if tail > 4e-15 * scale {
                break;
            }
            active -= 1;
        }
        self.active = active;
        self
    }

    fn live(&self) -> &[C] {
        &self.coeffs[..self.active]
    }

    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(0.0)
    }

    pub fn iterations(&self) -> usize {
        self.residual_history.len()
    }

    /// `g` and its first three derivatives at `u`.
    fn g_jet(&self, u: C) -> [C; 4] {
        let zero = C::new(0.0, 0.0);
        let (mut p0, mut p1, mut p2, mut p3) = (zero, zero, zero, zero);
        for &c in self.live().iter().rev() {
            p3 = p3 * u + p2;
            p2 = p2 * u + p1;
            p1 = p1 * u + p0;
            p0 = p0 * u + c;
        }
        [p0, p1, 2.0 * p2, 6.0 * p3]
    }

    /// Jet of `z·exp(h(z))` from the jet of `h`.
    fn exp_jet(z: C, h: [C; 4]) -> Jet {
        let [g, g1, g2, g3] = h;
        let e = g.exp();
        let p = 1.0 + z * g1;
        let p1 = g1 + z * g2;
        let p2 = 2.0 * g2 + z * g3;
        let q = g1 * p + p1;
        let q1 = g2 * p + g1 * p1 + p2;
        Jet { f: z * e, d1: e * p, d2: e * q, d3: e * (g1 * q + q1) }
    }

    pub(crate) fn jet(&self, z: C) -> Jet {
        if !self.exterior {
            return Self::exp_jet(z, self.g_jet(z));
        }
        // f(ζ) = ζ·exp(H(ζ)) with H(ζ) = −conj(g)(1/ζ).
        let u = 1.0 / z;
        let [g0, g1, g2, g3] = self.conj_g_jet(u);
        let (u2, u3, u4) = (u * u, u * u * u, u * u * u * u);
        let h = [-g0, g1 * u2, -(g2 * u4 + 2.0 * g1 * u3), g3 * u4 * u2 + 6.0 * g2 * u4 * u + 6.0 * g1 * u4];
        Self::exp_jet(z, h)
    }

    /// Jet of `Σ b̄_n uⁿ`.
    fn conj_g_jet(&self, u: C) -> [C; 4] {
        let zero = C::new(0.0, 0.0);
        let (mut p0, mut p1, mut p2, mut p3) = (zero, zero, zero, zero);
        for &c in self.live().iter().rev() {
            p3 = p3 * u + p2;
            p2 = p2 * u + p1;
            p1 = p1 * u + p0;
            p0 = p0 * u + c.conj();
        }
        [p0, p1, 2.0 * p2, 6.0 * p3]
    }

    pub(crate) fn value(&self, z: C) -> C {
        if self.exterior {
            let u = 1.0 / z;
            let mut acc = C::new(0.0, 0.0);
            for &c in self.live().iter().rev() {
                acc = acc * u + c.conj();
            }
            z * (-acc).exp()
        } else {
            let mut acc = C::new(0.0, 0.0);
            for &c in self.live().iter().rev() {
                acc = acc * z + c;
            }
            z * acc.exp()
        }
    }

    /// `Θ(t) = t + Im g(e^{it})` and its derivative `1 + Re(z g′(z))`.
    pub fn angle(&self, t: f64) -> (f64, f64) {
        let z = C::from_polar(1.0, t);
        let [g, g1, _, _] = self.g_jet(z);
        (t + g.im, 1.0 + (z * g1).re)
    }

    /// Inverse of the correspondence: the `t` with `Θ(t) = target`.
    pub fn inverse_angle(&self, target: f64) -> Result<f64, MapError> {
        // Seed by linear interpolation in the table.
        let n = self.nodes.len();
        let turns = ((target - self.correspondence[0]) / TAU).floor();
        let y = target - turns * TAU;
        let j = self.correspondence.partition_point(|&v| v <= y).clamp(1, n) - 1;
        let (x0, y0) = (self.nodes[j], self.correspondence[j]);
        let (x1, y1) = if j + 1 < n {
            (self.nodes[j + 1], self.correspondence[j + 1])
        } else {
            (TAU, self.correspondence[0] + TAU)
        };
        let mut t = x0 + (y - y0) * (x1 - x0) / (y1 - y0) + turns * TAU;
        let mut trace = Vec::new();
        for _ in 0..50 {
            let (v, d) = self.angle(t);
            let r = v - target;
            trace.push((t, r));
            if r.abs() <= 1e-14 * target.abs().max(1.0) {
                return Ok(t);
            }
            t -= r / d;
        }
        let (v, _) = self.angle(t);
        if (v - target).abs() < 1e-11 {
            return Ok(t);
        }
        Err(MapError::NewtonFailed { re: target, im: 0.0, residual: (v - target).abs(), trace })
    }

    /// `{"table": [[θ, Θ], ...], "coefficients": [[re, im], ...], ...}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "table": self.nodes.iter().zip(&self.correspondence).map(|(a, b)| [*a, *b]).collect::<Vec<_>>(),
            "coefficients": self.coeffs.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
            "residual_history": self.residual_history,
            "epsilon": self.epsilon,
            "exterior": self.exterior,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, MapError> {
        #[derive(Deserialize)]
        struct Raw {
            table: Vec<[f64; 2]>,
            coefficients: Vec<[f64; 2]>,
            #[serde(default)]
            residual_history: Vec<f64>,
            #[serde(default)]
            epsilon: f64,
            #[serde(default)]
            exterior: bool,
        }
        let raw: Raw = serde_json::from_value(v.clone()).map_err(|e| MapError::Json(e.to_string()))?;
        if raw.table.is_empty() || raw.coefficients.is_empty() {
            return Err(MapError::Json("empty theodorsen table".into()));
        }
        Ok(TheodorsenTable {
            nodes: raw.table.iter().map(|p| p[0]).collect(),
            correspondence: raw.table.iter().map(|p| p[1]).collect(),
            coeffs: raw.coefficients.iter().map(|c| C::new(c[0], c[1])).collect(),
            residual_history: raw.residual_history,
            epsilon: raw.epsilon,
            exterior: raw.exterior,
            active: 0,
        }
        .with_active_len())
    }
}

/// Periodic conjugate function of real samples.
pub(crate) fn conjugate(values: &[f64], planner: &mut FftPlanner<f64>) -> Vec<f64> {
    let n = values.len();
    let mut buf: Vec<C> = values.iter().map(|&v| C::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        *c = if k == 0 || 2 * k == n {
            C::new(0.0, 0.0)
        } else if 2 * k < n {
            *c * C::new(0.0, -1.0)
        } else {
            *c * C::new(0.0, 1.0)
        };
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

/// Interior (or, with an [`RadiusFunction::Inverted`] radius and
/// `exterior = true`, exterior) map of a star-like domain.
pub fn theodorsen_map(
    radius: &RadiusFunction,
    opts: &TheodorsenOptions,
    exterior: bool,
) -> Result<ConformalMap, MapError> {
    Ok(ConformalMap::from_table(theodorsen_table(radius, opts, exterior)?))
}

pub(crate) fn theodorsen_table(
    radius: &RadiusFunction,
    opts: &TheodorsenOptions,
    exterior: bool,
) -> Result<TheodorsenTable, MapError> {
    let n = opts.n;
    if n < 64 || !n.is_power_of_two() {
        return Err(MapError::Parameter(format!("node count {n} must be a power of two ≥ 64")));
    }
    let epsilon = radius.epsilon(4 * n);
    if epsilon >= 1.0 {
        return Err(MapError::EpsilonCondition(epsilon));
    }
    let nodes: Vec<f64> = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
    let mut theta = nodes.clone();
    let mut planner = FftPlanner::new();
    let mut history = Vec::new();
    let mut converged = false;
    for _ in 0..opts.max_iter.max(1) {
        let u: Vec<f64> = theta.iter().map(|&t| radius.log_eval(t).0).collect();
        let v = conjugate(&u, &mut planner);
        let mut res = 0.0f64;
        for j in 0..n {
            let next = nodes[j] + v[j];
            res = res.max((next - theta[j]).abs());
            theta[j] = next;
        }
        history.push(res);
        if res < opts.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(MapError::NonConvergence { history });
    }
    let u: Vec<f64> = theta.iter().map(|&t| radius.log_eval(t).0).collect();
    let mut buf: Vec<C> = u.iter().map(|&v| C::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    let half = n / 2;
    let coeffs = (0..=half)
        .map(|k| {
            let c = buf[k] / n as f64;
            if k == 0 || k == half {
                c
            } else {
                2.0 * c
            }
        })
        .collect();
    Ok(TheodorsenTable { nodes, correspondence: theta, coeffs, residual_history: history, epsilon, exterior, active: 0 }
        .with_active_len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> TheodorsenOptions {
        TheodorsenOptions { n: 512, tol: 1e-12, max_iter: 200 }
    }

    #[test]
    fn conjugate_of_cosine_is_sine() {
        let n = 64;
        let u: Vec<f64> = (0..n).map(|j| (3.0 * TAU * j as f64 / n as f64).cos()).collect();
        let v = conjugate(&u, &mut FftPlanner::new());
        for (j, x) in v.iter().enumerate() {
            assert!((x - (3.0 * TAU * j as f64 / n as f64).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn circle_is_identity_in_one_iteration() {
        let t = theodorsen_table(&RadiusFunction::Circle, &opts(), false).unwrap();
        assert_eq!(t.iterations(), 1);
        assert_eq!(t.correspondence, t.nodes);
    }

    #[test]
    fn star_converges_and_hits_boundary() {
        let r = RadiusFunction::Star { a: 0.1, k: 3 };
        let t = theodorsen_table(&r, &opts(), false).unwrap();
        assert!(t.final_residual() < 1e-12);
        assert!(t.iterations() <= 200);
        let m = ConformalMap::from_table(t.clone());
        for j in (0..512).step_by(7) {
            let w = m.eval(C::from_polar(1.0, t.nodes[j])).unwrap();
            let th = t.correspondence[j];
            assert!((w - C::from_polar(r.radius(th), th)).norm() < 1e-12);
        }
        let d = m.derivative(C::new(0.0, 0.0)).unwrap();
        assert!(d.im.abs() < 1e-14 && d.re > 0.0);
    }

    #[test]
    fn residual_monotone_after_warmup() {
        let t = theodorsen_table(&RadiusFunction::Star { a: 0.1, k: 3 }, &opts(), false).unwrap();
        for w in t.residual_history[5..].windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn large_star_rejected() {
        let err = theodorsen_table(&RadiusFunction::Star { a: 0.5, k: 3 }, &opts(), false).unwrap_err();
        assert!(matches!(err, MapError::EpsilonCondition(e) if e > 1.0));
    }

    #[test]
    fn ellipse_exterior_matches_joukowski_correspondence() {
        let c = 0.2;
        let r = RadiusFunction::Inverted(Box::new(RadiusFunction::Ellipse { c }));
        let t = theodorsen_table(&r, &opts(), true).unwrap();
        let m = ConformalMap::from_table(t.clone());
        // z + c/z is the normalized exterior map; the numerical one must agree.
        for j in (0..512).step_by(11) {
            let s = t.nodes[j];
            let exact = C::from_polar(1.0, s) + c * C::from_polar(1.0, -s);
            assert!((m.eval(C::from_polar(1.0, s)).unwrap() - exact).norm() < 1e-10);
        }
        let z = C::new(1.7, -0.4);
        assert!((m.eval(z).unwrap() - (z + c / z)).norm() < 1e-10);
    }

    #[test]
    fn sampled_radius_from_polyimage_curve() {
        let curve = crate::geometry::generate_curve(CurveFamily::Polyimage { c: 0.2 }, 1024).unwrap();
        let r = RadiusFunction::from_curve(&curve, 1024).unwrap();
        let t = theodorsen_table(&r, &TheodorsenOptions { n: 256, tol: 1e-10, max_iter: 200 }, false).unwrap();
        let m = ConformalMap::from_table(t);
        // The exact map is z + 0.2 z²; agreement is limited by the polyline.
        let z = C::new(0.3, 0.2);
        assert!((m.eval(z).unwrap() - (z + 0.2 * z * z)).norm() < 1e-4);
    }
}
