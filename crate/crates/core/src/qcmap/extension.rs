//! Barycentric (Douady–Earle) extension on a polar grid.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::homeo::{CircleHomeomorphism, Mobius};
use super::QcError;

type C = Complex64;

/// Nodes `r_i e^{iφ_j}` with ascending radii and `φ_j = 2πj/M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    pub radii: Vec<f64>,
    pub n_angles: usize,
}

impl PolarGrid {
    /// `r_i = sin(π/2 · i/n)`, `i = 1..n`: clustered toward the circle, last
    /// ring on it.
    pub fn clustered(n_radii: usize, n_angles: usize) -> Self {
        let radii = (1..=n_radii).map(|i| (PI / 2.0 * i as f64 / n_radii as f64).sin()).collect();
        PolarGrid { radii, n_angles }
    }

    pub fn new(radii: Vec<f64>, n_angles: usize) -> Result<Self, QcError> {
        let ok = !radii.is_empty()
            && radii[0] > 0.0
            && radii.windows(2).all(|w| w[1] > w[0])
            && *radii.last().unwrap() <= 1.0
            && n_angles >= 8;
        if !ok {
            return Err(QcError::Parameter("grid radii must increase inside (0, 1]; at least 8 angles".into()));
        }
        Ok(PolarGrid { radii, n_angles })
    }

    pub fn default_grid() -> Self {
        Self::clustered(128, 512)
    }

    pub fn n_radii(&self) -> usize {
        self.radii.len()
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.n_angles
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn angle(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n_angles as f64
    }

    pub fn node(&self, i: usize, j: usize) -> C {
        C::from_polar(self.radii[i], self.angle(j))
    }

    pub fn nodes(&self) -> Vec<C> {
        (0..self.n_radii()).flat_map(|i| (0..self.n_angles).map(move |j| (i, j))).map(|(i, j)| self.node(i, j)).collect()
    }

    pub fn has_boundary_ring(&self) -> bool {
        *self.radii.last().unwrap() == 1.0
    }

    /// Area of the annular sector owned by each node of ring `i`, or `None`
    /// when the sector touches the unit circle.
    pub fn node_area(&self, i: usize) -> Option<f64> {
        let n = self.radii.len();
        let r = self.radii[i];
        let inner = if i == 0 { 0.0 } else { 0.5 * (self.radii[i - 1] + r) };
        let outer = if i + 1 < n {
            0.5 * (r + self.radii[i + 1])
        } else if i > 0 {
            r + 0.5 * (r - self.radii[i - 1])
        } else {
            1.0
        };
        if outer >= 1.0 {
            return None;
        }
        Some(0.5 * (outer * outer - inner * inner) * TAU / self.n_angles as f64)
    }

    /// Both counts doubled; the radial rule is kept when the grid is clustered.
    pub fn refined(&self) -> Self {
        let n = self.radii.len();
        let clustered = PolarGrid::clustered(n, self.n_angles);
        if clustered.radii == self.radii {
            PolarGrid::clustered(2 * n, 2 * self.n_angles)
        } else {
            let mut radii = Vec::with_capacity(2 * n);
            for i in 0..n {
                let prev = if i == 0 { 0.0 } else { self.radii[i - 1] };
                radii.push(0.5 * (prev + self.radii[i]));
                radii.push(self.radii[i]);
            }
            PolarGrid { radii, n_angles: 2 * self.n_angles }
        }
    }
}

/// How values off the grid are obtained.
#[derive(Clone, Debug)]
pub enum QcKind {
    DouadyEarle { h: CircleHomeomorphism, opts: DeOptions },
    /// `z ↦ a z + b z̄`.
    Affine { a: C, b: C },
    Mobius(Mobius),
    /// Grid values only; off-grid values are bilinear in `(r, φ)`.
    Sampled,
}

/// Grid of values of a quasiconformal self-map of the disk.
#[derive(Clone, Debug)]
pub struct QCGridMap {
    pub grid: PolarGrid,
    /// Ring-major: `values[i * n_angles + j]` at `grid.node(i, j)`.
    pub values: Vec<C>,
    pub trace: Option<CircleHomeomorphism>,
    pub kind: QcKind,
    /// Largest barycenter residual over the solved nodes.
    pub worst_residual: f64,
}

impl QCGridMap {
    pub fn from_fn<F: Fn(C) -> C + Sync>(grid: PolarGrid, kind: QcKind, f: F) -> Self {
        let values = grid.nodes().par_iter().map(|&z| f(z)).collect();
        QCGridMap { grid, values, trace: None, kind, worst_residual: 0.0 }
    }

    pub fn identity(grid: PolarGrid) -> Self {
        Self::from_fn(grid, QcKind::Mobius(Mobius { a: C::new(0.0, 0.0), rot: 0.0 }), |z| z)
    }

    pub fn affine(grid: PolarGrid, a: C, b: C) -> Self {
        Self::from_fn(grid, QcKind::Affine { a, b }, |z| a * z + b * z.conj())
    }

    pub fn mobius(grid: PolarGrid, m: Mobius) -> Self {
        Self::from_fn(grid, QcKind::Mobius(m), |z| m.apply(z))
    }

    pub fn value(&self, i: usize, j: usize) -> C {
        self.values[i * self.grid.n_angles + j]
    }

    /// Map value at an arbitrary point of the closed disk.
    pub fn eval(&self, z: C) -> Result<C, QcError> {
        if !(z.norm() <= 1.0) {
            return Err(QcError::OutsideDisk(z.re, z.im));
        }
        Ok(match &self.kind {
            QcKind::DouadyEarle { h, opts } => douady_earle_point(h, z, None, opts)?.value,
            QcKind::Affine { a, b } => a * z + b * z.conj(),
            QcKind::Mobius(m) => m.apply(z),
            QcKind::Sampled => self.interpolate(z),
        })
    }

    fn interpolate(&self, z: C) -> C {
        let g = &self.grid;
        let r = z.norm();
        let phi = z.arg().rem_euclid(TAU) / TAU * g.n_angles as f64;
        let j0 = (phi.floor() as usize) % g.n_angles;
        let j1 = (j0 + 1) % g.n_angles;
        let s = phi - phi.floor();
        let i1 = g.radii.partition_point(|&x| x < r).min(g.n_radii() - 1);
        let i0 = i1.saturating_sub(1);
        let t = if i1 == i0 { 0.0 } else { ((r - g.radii[i0]) / (g.radii[i1] - g.radii[i0])).clamp(0.0, 1.0) };
        let ring = |i| self.value(i, j0) * (1.0 - s) + self.value(i, j1) * s;
        ring(i0) * (1.0 - t) + ring(i1) * t
    }

    /// Grid-value JSON with shape metadata.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "shape": [self.grid.n_radii(), self.grid.n_angles],
            "radii": self.grid.radii,
            "values": self.values.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
            "worst_residual": self.worst_residual,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeOptions {
    /// Quadrature points on the circle, lower and upper bound; the count
    /// grows like `8/(1 − |w|)` between them.
    pub quad_min: usize,
    pub quad_max: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DeOptions {
    fn default() -> Self {
        DeOptions { quad_min: 512, quad_max: 4096, tol: 1e-13, max_iter: 100 }
    }
}

impl DeOptions {
    fn quad_points(&self, r: f64) -> usize {
        let want = (8.0 / (1.0 - r).max(1e-12)).ceil() as usize;
        want.clamp(self.quad_min, self.quad_max).next_power_of_two()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DePoint {
    pub value: C,
    pub residual: f64,
    pub iterations: usize,
}

/// `(F, B)` at `ζ` with `F = mean η′`, `B = mean η′²` and
/// `η′ = (η − ζ)/(1 − ζ̄η)`. In the recentred variable the derivative of `F`
/// is `−1` in `ζ` and `B` in `ζ̄`.
fn barycenter(eta: &[C], zeta: C) -> (C, C) {
    let zb = zeta.conj();
    let (mut f, mut b) = (C::new(0.0, 0.0), C::new(0.0, 0.0));
    for &e in eta {
        let q = (e - zeta) / (1.0 - zb * e);
        f += q;
        b += q * q;
    }
    let m = eta.len() as f64;
    (f / m, b / m)
}

/// Value of the extension of `h` at `w`, `|w| ≤ 1`.
pub fn douady_earle_point(
    h: &CircleHomeomorphism,
    w: C,
    seed: Option<C>,
    opts: &DeOptions,
) -> Result<DePoint, QcError> {
    let r = w.norm();
    if r >= 1.0 - 1e-12 {
        if r > 1.0 + 1e-12 {
            return Err(QcError::OutsideDisk(w.re, w.im));
        }
        return Ok(DePoint { value: h.apply_unit(w / r), residual: 0.0, iterations: 0 });
    }
    let m = opts.quad_points(r);
    let wb = w.conj();
    // Harmonic measure from w is uniform in φ after z = M_w(e^{iφ}).
    let eta: Vec<C> = (0..m)
        .map(|k| {
            let e = C::from_polar(1.0, TAU * k as f64 / m as f64);
            let z = (e + w) / (1.0 + wb * e);
            h.apply_unit(z / z.norm())
        })
        .collect();
    let mut zeta = seed.filter(|s| s.norm() < 1.0).unwrap_or(w);
    let (mut f, mut b) = barycenter(&eta, zeta);
    let mut res = f.norm();
    // Roundoff floor of the kernel grows like 1/(1 − |w|).
    let tol = opts.tol.max(1e-15 / (1.0 - r));
    let mut it = 0;
    while it < opts.max_iter && res > tol {
        it += 1;
        // Newton step for the recentred problem, mapped back by M_ζ.
        let mut delta = (b * f.conj() + f) / (1.0 - b.norm_sqr());
        if delta.norm() > 0.5 {
            delta *= 0.5 / delta.norm();
        }
        let mut accepted = false;
        for _ in 0..40 {
            let cand = (delta + zeta) / (1.0 + zeta.conj() * delta);
            if cand.norm() < 1.0 {
                let (f2, b2) = barycenter(&eta, cand);
                if f2.norm() < res {
                    zeta = cand;
                    f = f2;
                    b = b2;
                    res = f2.norm();
                    accepted = true;
                    break;
                }
            }
            delta *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if res > 1e-8 {
        return Err(QcError::NewtonFailed { re: w.re, im: w.im, residual: res });
    }
    Ok(DePoint { value: zeta, residual: res, iterations: it })
}

/// Douady–Earle extension of `h` on `grid`. Each ray is solved from the
/// center outward, seeding every node by extrapolation along the ray.
pub fn douady_earle(h: &CircleHomeomorphism, grid: &PolarGrid, opts: &DeOptions) -> Result<QCGridMap, QcError> {
    let nr = grid.n_radii();
    let rays: Result<Vec<(Vec<C>, f64)>, QcError> = (0..grid.n_angles)
        .into_par_iter()
        .map(|j| {
            let mut ray = Vec::with_capacity(nr);
            let mut worst = 0.0f64;
            for i in 0..nr {
                let w = grid.node(i, j);
                let seed = match i {
                    0 => None,
                    1 => Some(ray[0]),
                    _ => {
                        let (z1, z2): (C, C) = (ray[i - 1], ray[i - 2]);
                        let s = (grid.radii[i] - grid.radii[i - 1]) / (grid.radii[i - 1] - grid.radii[i - 2]);
                        let guess = z1 + (z1 - z2) * s;
                        Some(if guess.norm() < 1.0 { guess } else { z1 })
                    }
                };
                let p = douady_earle_point(h, w, seed, opts)?;
                worst = worst.max(p.residual);
                ray.push(p.value);
            }
            Ok((ray, worst))
        })
        .collect();
    let rays = rays?;
    let mut values = vec![C::new(0.0, 0.0); grid.len()];
    let mut worst = 0.0f64;
    for (j, (ray, w)) in rays.iter().enumerate() {
        worst = worst.max(*w);
        for (i, v) in ray.iter().enumerate() {
            values[i * grid.n_angles + j] = *v;
        }
    }
    Ok(QCGridMap {
        grid: grid.clone(),
        values,
        trace: Some(h.clone()),
        kind: QcKind::DouadyEarle { h: h.clone(), opts: *opts },
        worst_residual: worst,
    })
}
