use std::f64::consts::{PI, TAU};
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::Serialize;

use super::theodorsen::TheodorsenTable;
use super::MapError;
use crate::geometry::{generate_curve, CurveFamily, DistanceIndex, JordanCurve};

type C = Complex64;

const NEWTON_CAP: usize = 50;
/// Samples used when a map's image curve is needed for distances.
const IMAGE_SAMPLES: usize = 4096;

/// Which unit-circle component the map is defined on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `|z| < 1` onto a bounded domain.
    Disk,
    /// `|z| > 1` onto the exterior of a bounded domain, fixing ∞.
    Exterior,
}

#[derive(Clone, Debug)]
pub enum MapKind {
    /// `e^{i rot} (z + a) / (1 + ā z)`.
    Mobius { a: C, rot: f64 },
    /// `z + c z²`, univalent for `|c| < 1/2`.
    Polymap { c: f64 },
    /// `(A − B)/(A + B)` with `A = (1 + z)^α`, `B = (1 − z)^α`.
    Lens { alpha: f64 },
    /// `z / (1 − z)²`.
    Koebe,
    /// `z + c / z` on `|z| > 1`.
    EllipseExterior { c: f64 },
    /// Numerical map from a boundary-correspondence table.
    Theodorsen(Arc<TheodorsenTable>),
}

/// Value and first three derivatives at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub f: C,
    pub d1: C,
    pub d2: C,
    pub d3: C,
}

#[derive(Clone, Debug)]
pub struct ConformalMap {
    kind: MapKind,
    seeds: OnceLock<SeedIndex>,
}

impl ConformalMap {
    fn wrap(kind: MapKind) -> Self {
        ConformalMap { kind, seeds: OnceLock::new() }
    }

    pub fn identity() -> Self {
        Self::wrap(MapKind::Mobius { a: C::new(0.0, 0.0), rot: 0.0 })
    }

    pub fn mobius(a: C, rot: f64) -> Result<Self, MapError> {
        if !(a.norm() < 1.0) || !rot.is_finite() {
            return Err(MapError::Parameter(format!("mobius needs |a| < 1, got {a}")));
        }
        Ok(Self::wrap(MapKind::Mobius { a, rot }))
    }

    pub fn polymap(c: f64) -> Result<Self, MapError> {
        if !(c.abs() < 0.5) {
            return Err(MapError::Parameter(format!("polymap needs |c| < 1/2, got {c}")));
        }
        Ok(Self::wrap(MapKind::Polymap { c }))
    }

    pub fn lens(alpha: f64) -> Result<Self, MapError> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(MapError::Parameter(format!("lens needs alpha in (0, 2), got {alpha}")));
        }
        Ok(Self::wrap(MapKind::Lens { alpha }))
    }

    pub fn koebe() -> Self {
        Self::wrap(MapKind::Koebe)
    }

    pub fn ellipse_exterior(c: f64) -> Result<Self, MapError> {
        if !(c.abs() < 1.0) {
            return Err(MapError::Parameter(format!("ellipse exterior needs |c| < 1, got {c}")));
        }
        Ok(Self::wrap(MapKind::EllipseExterior { c }))
    }

    pub fn from_table(table: TheodorsenTable) -> Self {
        Self::wrap(MapKind::Theodorsen(Arc::new(table)))
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            MapKind::Mobius { .. } => "mobius",
            MapKind::Polymap { .. } => "polymap",
            MapKind::Lens { .. } => "lens",
            MapKind::Koebe => "koebe",
            MapKind::EllipseExterior { .. } => "ellipse_exterior",
            MapKind::Theodorsen(_) => "theodorsen",
        }
    }

    pub fn direction(&self) -> Direction {
        match &self.kind {
            MapKind::EllipseExterior { .. } => Direction::Exterior,
            MapKind::Theodorsen(t) if t.exterior => Direction::Exterior,
            _ => Direction::Disk,
        }
    }

    pub fn is_mobius(&self) -> bool {
        matches!(self.kind, MapKind::Mobius { .. })
    }

    /// Whether `z` is in the closed domain of definition.
    pub fn in_domain(&self, z: C) -> bool {
        let r = z.norm();
        let ok = match self.direction() {
            Direction::Disk => r <= 1.0 + 4.0 * f64::EPSILON,
            Direction::Exterior => r >= 1.0 - 4.0 * f64::EPSILON,
        };
        ok && !(matches!(self.kind, MapKind::Koebe) && (z - 1.0).norm() == 0.0)
    }

    fn in_open_domain(&self, z: C) -> bool {
        match self.direction() {
            Direction::Disk => z.norm() < 1.0,
            Direction::Exterior => z.norm() > 1.0,
        }
    }

    fn check(&self, z: C) -> Result<(), MapError> {
        if z.re.is_finite() && z.im.is_finite() && self.in_domain(z) {
            Ok(())
        } else {
            Err(MapError::OutsideDomain(z.re, z.im))
        }
    }

    pub fn eval(&self, z: C) -> Result<C, MapError> {
        self.check(z)?;
        Ok(self.value(z))
    }

    pub fn derivative(&self, z: C) -> Result<C, MapError> {
        self.check(z)?;
        Ok(self.jet_unchecked(z).d1)
    }

    pub fn jet(&self, z: C) -> Result<Jet, MapError> {
        self.check(z)?;
        Ok(self.jet_unchecked(z))
    }

    fn value(&self, z: C) -> C {
        match &self.kind {
            MapKind::Mobius { a, rot } => C::from_polar(1.0, *rot) * (z + a) / (1.0 + a.conj() * z),
            MapKind::Polymap { c } => z + *c * z * z,
            MapKind::Lens { alpha } => lens_value(*alpha, z),
            MapKind::Koebe => z / ((1.0 - z) * (1.0 - z)),
            MapKind::EllipseExterior { c } => z + *c / z,
            MapKind::Theodorsen(t) => t.value(z),
        }
    }

    pub(crate) fn jet_unchecked(&self, z: C) -> Jet {
        match &self.kind {
            MapKind::Mobius { a, rot } => {
                let e = C::from_polar(1.0, *rot);
                let ab = a.conj();
                let d = 1.0 + ab * z;
                let d1 = e * (1.0 - a.norm_sqr()) / (d * d);
                Jet {
                    f: e * (z + a) / d,
                    d1,
                    d2: -2.0 * ab * d1 / d,
                    d3: 6.0 * ab * ab * d1 / (d * d),
                }
            }
            MapKind::Polymap { c } => Jet {
                f: z + *c * z * z,
                d1: 1.0 + 2.0 * *c * z,
                d2: C::new(2.0 * c, 0.0),
                d3: C::new(0.0, 0.0),
            },
            MapKind::Lens { alpha } => lens_jet(*alpha, z),
            MapKind::Koebe => {
                let w = 1.0 - z;
                Jet {
                    f: z / (w * w),
                    d1: (1.0 + z) / (w * w * w),
                    d2: (4.0 + 2.0 * z) / (w * w * w * w),
                    d3: (18.0 + 6.0 * z) / (w * w * w * w * w),
                }
            }
            MapKind::EllipseExterior { c } => {
                let (z2, z3) = (z * z, z * z * z);
                Jet {
                    f: z + *c / z,
                    d1: 1.0 - *c / z2,
                    d2: 2.0 * *c / z3,
                    d3: -6.0 * *c / (z3 * z),
                }
            }
            MapKind::Theodorsen(t) => t.jet(z),
        }
    }

    /// Closed-form inverse where one exists.
    fn analytic_inverse(&self, w: C) -> Option<C> {
        match &self.kind {
            MapKind::Mobius { a, rot } => {
                let v = w * C::from_polar(1.0, -rot);
                Some((v - a) / (1.0 - a.conj() * v))
            }
            MapKind::Polymap { c } => Some(2.0 * w / (1.0 + (1.0 + 4.0 * *c * w).sqrt())),
            MapKind::Lens { alpha } => {
                let q = ((1.0 + w) / (1.0 - w)).powf(1.0 / alpha);
                Some((q - 1.0) / (q + 1.0))
            }
            MapKind::Koebe => {
                if w.im == 0.0 && w.re <= -0.25 {
                    return None;
                }
                let s = (4.0 * w + 1.0).sqrt();
                Some((s - 1.0) / (s + 1.0))
            }
            MapKind::EllipseExterior { c } => {
                let s = (w * w - 4.0 * *c).sqrt();
                let (z1, z2) = ((w + s) / 2.0, (w - s) / 2.0);
                Some(if z1.norm() >= z2.norm() { z1 } else { z2 })
            }
            MapKind::Theodorsen(_) => None,
        }
    }

    fn seed_grid(&self) -> &SeedIndex {
        self.seeds.get_or_init(|| {
            let radii: Vec<f64> = match self.direction() {
                Direction::Disk => (1..=40).map(|i| 1.0 - (1.0 - 0.999) * 1.19f64.powi(40 - i)).filter(|r| *r > 0.0).collect(),
                Direction::Exterior => (0..40).map(|i| 1.0 + 1e-3 * 1.25f64.powi(i)).collect(),
            };
            let mut out = vec![];
            if self.direction() == Direction::Disk {
                out.push((C::new(0.0, 0.0), self.value(C::new(0.0, 0.0))));
            }
            for r in radii {
                for k in 0..128 {
                    let z = C::from_polar(r, TAU * k as f64 / 128.0);
                    out.push((z, self.value(z)));
                }
            }
            SeedIndex::new(out)
        })
    }

    /// Newton inversion seeded by the closed-form inverse or, failing that,
    /// by the nearest point of a precomputed forward grid.
    pub fn invert(&self, w: C) -> Result<C, MapError> {
        if !(w.re.is_finite() && w.im.is_finite()) {
            return Err(MapError::OutsideImage(w.re, w.im));
        }
        if let MapKind::Koebe = self.kind {
            if w.im == 0.0 && w.re <= -0.25 {
                return Err(MapError::OutsideImage(w.re, w.im));
            }
        }
        let seed = match self.analytic_inverse(w) {
            Some(z) if z.re.is_finite() && z.im.is_finite() => z,
            _ => self.seed_grid().nearest(w),
        };
        if !self.in_open_domain(seed) {
            return Err(MapError::OutsideImage(w.re, w.im));
        }
        let scale = w.norm().max(1.0);
        let mut z = seed;
        let mut trace = Vec::new();
        let mut residual = f64::INFINITY;
        for _ in 0..NEWTON_CAP {
            let j = self.jet_unchecked(z);
            let r = j.f - w;
            residual = r.norm();
            trace.push((z.re, z.im));
            if residual <= 4.0 * f64::EPSILON * scale {
                return Ok(z);
            }
            let mut step = r / j.d1;
            let mut next = z - step;
            let mut halvings = 0;
            while !self.in_open_domain(next) && halvings < 60 {
                step *= 0.5;
                next = z - step;
                halvings += 1;
            }
            if !self.in_open_domain(next) {
                break;
            }
            let moved = step.norm();
            z = next;
            if moved <= 1e-15 * z.norm().max(1.0) {
                let r = (self.value(z) - w).norm();
                if r <= 1e-12 * scale {
                    return Ok(z);
                }
            }
        }
        if residual <= 1e-12 * scale {
            return Ok(z);
        }
        Err(MapError::NewtonFailed { re: w.re, im: w.im, residual, trace })
    }

    /// Boundary curve of the image, sampled at `n` uniform parameters.
    pub fn image_curve(&self, n: usize) -> Result<JordanCurve, MapError> {
        let family = match &self.kind {
            MapKind::Mobius { .. } => CurveFamily::Circle,
            MapKind::Polymap { c } => CurveFamily::Polyimage { c: *c },
            MapKind::Lens { alpha } => CurveFamily::Lens { alpha: *alpha },
            MapKind::EllipseExterior { c } => CurveFamily::Ellipse { c: *c },
            MapKind::Koebe => return Err(MapError::ImageUnavailable("koebe (unbounded image)")),
            MapKind::Theodorsen(t) => {
                let samples = (0..n).map(|k| t.value(C::from_polar(1.0, TAU * k as f64 / n as f64))).collect();
                return Ok(JordanCurve::from_samples(samples)?);
            }
        };
        Ok(generate_curve(family, n)?)
    }

    /// Map descriptor `{"kind", "params"}`.
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        let params = match &self.kind {
            MapKind::Mobius { a, rot } => json!({ "a": [a.re, a.im], "rot": rot }),
            MapKind::Polymap { c } | MapKind::EllipseExterior { c } => json!({ "c": c }),
            MapKind::Lens { alpha } => json!({ "alpha": alpha }),
            MapKind::Koebe => json!({}),
            MapKind::Theodorsen(t) => t.to_json(),
        };
        json!({ "kind": self.name(), "params": params })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, MapError> {
        let kind = v.get("kind").and_then(|k| k.as_str()).ok_or_else(|| MapError::Json("missing `kind`".into()))?;
        let empty = serde_json::json!({});
        let params = v.get("params").unwrap_or(&empty);
        let num = |key: &str| -> Result<f64, MapError> {
            params.get(key).and_then(|x| x.as_f64()).ok_or_else(|| MapError::Json(format!("{kind}: missing `{key}`")))
        };
        match kind {
            "mobius" | "identity" => {
                let a = match params.get("a") {
                    None => C::new(0.0, 0.0),
                    Some(serde_json::Value::Array(p)) if p.len() == 2 => C::new(
                        p[0].as_f64().unwrap_or(f64::NAN),
                        p[1].as_f64().unwrap_or(f64::NAN),
                    ),
                    Some(x) => C::new(x.as_f64().ok_or_else(|| MapError::Json("mobius: bad `a`".into()))?, 0.0),
                };
                let rot = params.get("rot").and_then(|x| x.as_f64()).unwrap_or(0.0);
                Self::mobius(a, rot)
            }
            "polymap" => Self::polymap(num("c")?),
            "lens" => Self::lens(num("alpha")?),
            "koebe" => Ok(Self::koebe()),
            "ellipse_exterior" => Self::ellipse_exterior(num("c")?),
            "theodorsen" => Ok(Self::from_table(TheodorsenTable::from_json(params)?)),
            other => Err(MapError::Json(format!("unknown map kind `{other}`"))),
        }
    }

    /// Distance from `w` to the boundary of the image domain.
    pub fn image_boundary_distance(&self, w: C, index: Option<&DistanceIndex>) -> Result<f64, MapError> {
        Ok(match &self.kind {
            MapKind::Mobius { .. } => (1.0 - w.norm()).abs(),
            MapKind::Koebe => {
                if w.re <= -0.25 {
                    w.im.abs()
                } else {
                    (w + 0.25).norm()
                }
            }
            _ => match index {
                Some(idx) => idx.distance(w),
                None => {
                    let curve = self.image_curve(IMAGE_SAMPLES)?;
                    crate::geometry::distance_to_curve(w, &curve)
                }
            },
        })
    }
}

fn lens_value(alpha: f64, z: C) -> C {
    let a = pow_or_zero(1.0 + z, alpha);
    let b = pow_or_zero(1.0 - z, alpha);
    (a - b) / (a + b)
}

fn pow_or_zero(x: C, p: f64) -> C {
    if x.norm() == 0.0 {
        C::new(0.0, 0.0)
    } else {
        x.powf(p)
    }
}

fn lens_jet(alpha: f64, z: C) -> Jet {
    let a = pow_or_zero(1.0 + z, alpha);
    let b = pow_or_zero(1.0 - z, alpha);
    let s = a + b;
    let one_m = 1.0 - z * z;
    let d1 = 4.0 * alpha * pow_or_zero(one_m, alpha - 1.0) / (s * s);
    // Logarithmic derivatives of f′.
    let a1 = alpha * a / (1.0 + z);
    let b1 = -alpha * b / (1.0 - z);
    let a2 = alpha * (alpha - 1.0) * a / ((1.0 + z) * (1.0 + z));
    let b2 = alpha * (alpha - 1.0) * b / ((1.0 - z) * (1.0 - z));
    let q1 = (a1 + b1) / s;
    let p1 = -2.0 * (alpha - 1.0) * z / one_m - 2.0 * q1;
    let p2 = -2.0 * (alpha - 1.0) * (1.0 + z * z) / (one_m * one_m) - 2.0 * ((a2 + b2) / s - q1 * q1);
    Jet { f: (a - b) / s, d1, d2: d1 * p1, d3: d1 * (p2 + p1 * p1) }
}

/// Point of the lens boundary at parameter `theta` on the unit circle.
pub fn lens_boundary_value(alpha: f64, theta: f64) -> C {
    let t = theta.rem_euclid(TAU);
    if t == 0.0 {
        return C::new(1.0, 0.0);
    }
    if t == PI {
        return C::new(-1.0, 0.0);
    }
    lens_value(alpha, C::from_polar(1.0, t))
}

#[derive(Clone, Debug, Serialize)]
pub struct KoebeCheck {
    pub z: C,
    pub lower: f64,
    pub distance: f64,
    pub upper: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KoebeReport {
    pub checks: Vec<KoebeCheck>,
    pub all_pass: bool,
}

/// Checks `¼(1 − |z|²)|f′(z)| ≤ d_f(z) ≤ (1 − |z|²)|f′(z)|` where `d_f(z)` is
/// the distance from `f(z)` to the image boundary.
pub fn koebe_bounds_check(map: &ConformalMap, points: &[C]) -> Result<KoebeReport, MapError> {
    if map.direction() != Direction::Disk {
        return Err(MapError::Parameter("koebe bounds apply to disk maps".into()));
    }
    let curve = match map.kind() {
        MapKind::Mobius { .. } | MapKind::Koebe => None,
        _ => Some(map.image_curve(IMAGE_SAMPLES)?),
    };
    let index = curve.as_ref().map(DistanceIndex::new);
    let mut checks = Vec::with_capacity(points.len());
    for &z in points {
        if !(z.norm() < 1.0) {
            return Err(MapError::OutsideDomain(z.re, z.im));
        }
        let j = map.jet_unchecked(z);
        let scale = (1.0 - z.norm_sqr()) * j.d1.norm();
        let distance = map.image_boundary_distance(j.f, index.as_ref())?;
        let slack = 1e-9 * scale;
        let (lower, upper) = (0.25 * scale, scale);
        checks.push(KoebeCheck {
            z,
            lower,
            distance,
            upper,
            pass: lower <= distance + slack && distance <= upper + slack,
        });
    }
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(KoebeReport { checks, all_pass })
}

/// Forward-grid pairs `(z, φ(z))` bucketed by image point.
#[derive(Clone, Debug)]
struct SeedIndex {
    pairs: Vec<(C, C)>,
    lo: C,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl SeedIndex {
    fn new(pairs: Vec<(C, C)>) -> Self {
        let pairs: Vec<(C, C)> = pairs.into_iter().filter(|p| p.1.re.is_finite() && p.1.im.is_finite()).collect();
        let (mut lo, mut hi) = (C::new(f64::INFINITY, f64::INFINITY), C::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in &pairs {
            lo = C::new(lo.re.min(p.1.re), lo.im.min(p.1.im));
            hi = C::new(hi.re.max(p.1.re), hi.im.max(p.1.im));
        }
        let side = (hi.re - lo.re).max(hi.im - lo.im).max(1e-12);
        let per = ((pairs.len() as f64).sqrt().ceil() as usize).clamp(1, 256);
        let cell = side / per as f64;
        let nx = (((hi.re - lo.re) / cell) as usize + 1).max(1);
        let ny = (((hi.im - lo.im) / cell) as usize + 1).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        let mut index = SeedIndex { pairs: Vec::new(), lo, cell, nx, ny, buckets: Vec::new() };
        for (k, p) in pairs.iter().enumerate() {
            let (i, j) = index.cell_of(p.1);
            buckets[j * nx + i].push(k as u32);
        }
        index.pairs = pairs;
        index.buckets = buckets;
        index
    }

    fn cell_of(&self, w: C) -> (usize, usize) {
        let f = |v: f64, n: usize| ((v / self.cell).floor().max(0.0) as usize).min(n - 1);
        (f(w.re - self.lo.re, self.nx), f(w.im - self.lo.im, self.ny))
    }

    /// Domain point of the pair whose image is nearest to `w`; ties go to
    /// the earlier pair.
    fn nearest(&self, w: C) -> C {
        if self.pairs.is_empty() {
            return C::new(0.0, 0.0);
        }
        let (ci, cj) = self.cell_of(w);
        // Distance from `w` to the clamped cell, so ring bounds stay valid
        // for points outside the bounding box.
        let x0 = self.lo.re + ci as f64 * self.cell;
        let y0 = self.lo.im + cj as f64 * self.cell;
        let dx = (x0 - w.re).max(w.re - (x0 + self.cell)).max(0.0);
        let dy = (y0 - w.im).max(w.im - (y0 + self.cell)).max(0.0);
        let offset = dx.hypot(dy);
        let mut best = (f64::INFINITY, usize::MAX);
        let max_ring = self.nx.max(self.ny);
        for ring in 0..=max_ring {
            if best.1 != usize::MAX && (ring as f64 - 1.0) * self.cell - offset > best.0.sqrt() {
                break;
            }
            let (r, ci, cj) = (ring as isize, ci as isize, cj as isize);
            for j in cj - r..=cj + r {
                if j < 0 || j >= self.ny as isize {
                    continue;
                }
                for i in ci - r..=ci + r {
                    if i < 0 || i >= self.nx as isize || ((j - cj).abs() != r && (i - ci).abs() != r) {
                        continue;
                    }
                    for &k in &self.buckets[j as usize * self.nx + i as usize] {
                        let d = (self.pairs[k as usize].1 - w).norm_sqr();
                        if d < best.0 || (d == best.0 && (k as usize) < best.1) {
                            best = (d, k as usize);
                        }
                    }
                }
            }
        }
        self.pairs[best.1].0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_index_matches_linear_scan() {
        let pairs: Vec<(C, C)> = (0..3000)
            .map(|k| {
                let z = C::from_polar(((k * 7919) % 1000) as f64 / 1000.0, k as f64 * 0.37);
                (z, z + 0.3 * z * z)
            })
            .collect();
        let idx = SeedIndex::new(pairs.clone());
        for k in 0..500 {
            let w = C::from_polar(3.0 * ((k * 37) % 100) as f64 / 100.0, k as f64 * 1.3);
            let brute = pairs.iter().min_by(|a, b| (a.1 - w).norm_sqr().total_cmp(&(b.1 - w).norm_sqr())).unwrap().0;
            assert_eq!(idx.nearest(w), brute, "{w}");
        }
    }

    fn fd_derivative(m: &ConformalMap, z: C) -> C {
        let h = 1e-5;
        (m.eval(z + h).unwrap() - m.eval(z - h).unwrap()) / (2.0 * h)
    }

    fn all_maps() -> Vec<(ConformalMap, Vec<C>)> {
        let disk: Vec<C> = (0..40).map(|k| C::from_polar(0.05 + 0.85 * (k as f64 / 40.0), 2.39996 * k as f64)).collect();
        let ext: Vec<C> = disk.iter().map(|z| 1.0 / z.conj()).collect();
        vec![
            (ConformalMap::mobius(C::new(0.5, 0.2), 0.7).unwrap(), disk.clone()),
            (ConformalMap::polymap(0.3).unwrap(), disk.clone()),
            (ConformalMap::lens(0.8).unwrap(), disk.clone()),
            (ConformalMap::lens(1.5).unwrap(), disk.clone()),
            (ConformalMap::koebe(), disk.clone()),
            (ConformalMap::ellipse_exterior(0.2).unwrap(), ext),
        ]
    }

    #[test]
    fn spec_examples() {
        let id = ConformalMap::mobius(C::new(0.0, 0.0), 0.0).unwrap();
        let z = C::new(0.3, -0.4);
        assert_eq!(id.eval(z).unwrap(), z);
        let p = ConformalMap::polymap(0.3).unwrap();
        assert_eq!(p.eval(C::new(0.0, 0.0)).unwrap(), C::new(0.0, 0.0));
        assert_eq!(p.derivative(C::new(0.0, 0.0)).unwrap(), C::new(1.0, 0.0));
        let m = ConformalMap::mobius(C::new(0.5, 0.0), 0.0).unwrap();
        let d = m.derivative(C::new(-0.5, 0.0)).unwrap();
        assert!((d - C::new(4.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!(ConformalMap::polymap(0.5).is_err());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for (m, pts) in all_maps() {
            for &z in &pts {
                let j = m.jet(z).unwrap();
                let fd = fd_derivative(&m, z);
                assert!((fd - j.d1).norm() / j.d1.norm() < 1e-6, "{} at {z}", m.name());
                let h = 1e-4;
                let fd2 = (m.jet(z + h).unwrap().d1 - m.jet(z - h).unwrap().d1) / (2.0 * h);
                assert!((fd2 - j.d2).norm() / j.d2.norm().max(1.0) < 1e-5, "{} d2 at {z}", m.name());
                let fd3 = (m.jet(z + h).unwrap().d2 - m.jet(z - h).unwrap().d2) / (2.0 * h);
                assert!((fd3 - j.d3).norm() / j.d3.norm().max(1.0) < 1e-5, "{} d3 at {z}", m.name());
            }
        }
    }

    #[test]
    fn inverse_round_trips() {
        for (m, pts) in all_maps() {
            for &z in &pts {
                let w = m.eval(z).unwrap();
                let back = m.invert(w).unwrap();
                assert!((back - z).norm() < 1e-10, "{}: {z} -> {back}", m.name());
            }
        }
    }

    #[test]
    fn inversion_outside_image_fails() {
        let p = ConformalMap::polymap(0.3).unwrap();
        assert!(p.invert(C::new(3.0, 0.0)).is_err());
        assert!(ConformalMap::koebe().invert(C::new(-1.0, 0.0)).is_err());
        let m = ConformalMap::mobius(C::new(0.2, 0.0), 0.0).unwrap();
        assert!(m.invert(C::new(1.5, 0.0)).is_err());
    }

    #[test]
    fn koebe_bounds() {
        let id = ConformalMap::identity();
        let r = koebe_bounds_check(&id, &[C::new(0.0, 0.0)]).unwrap();
        assert!(r.all_pass);
        assert!((r.checks[0].distance - 1.0).abs() < 1e-15);
        let k = koebe_bounds_check(&ConformalMap::koebe(), &[C::new(0.0, 0.0)]).unwrap();
        assert!((k.checks[0].distance - 0.25).abs() < 1e-15);
        assert!((k.checks[0].lower - 0.25).abs() < 1e-15);
        assert!(k.all_pass);
    }

    #[test]
    fn lens_boundary_hits_vertices() {
        assert_eq!(lens_boundary_value(0.8, 0.0), C::new(1.0, 0.0));
        assert_eq!(lens_boundary_value(0.8, PI), C::new(-1.0, 0.0));
        let top = lens_boundary_value(0.8, PI / 2.0);
        assert!(top.re.abs() < 1e-15 && top.im > 0.0);
    }

    #[test]
    fn json_round_trip() {
        for (m, _) in all_maps() {
            let back = ConformalMap::from_json(&m.to_json()).unwrap();
            let z = if m.direction() == Direction::Disk { C::new(0.2, 0.1) } else { C::new(1.5, 0.3) };
            assert_eq!(back.eval(z).unwrap(), m.eval(z).unwrap());
        }
    }
}
