//! Finite atomic measures and their Carleson norms.
//!
//! The Carleson ratio of a measure `μ` at a boundary center `z` and radius `r`
//! is `μ(D(z, r)) / r`. Disks are open, but an atom whose distance to the
//! center is within a relative `1e-14` of `r` is counted as inside.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{DistanceIndex, JordanCurve, Point};

/// Relative slack for the disk-boundary tie-break.
pub const DISK_TIE_REL: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("atom {index} has invalid weight {weight}")]
    BadWeight { index: usize, weight: f64 },
    #[error("atom {index} at ({re}, {im}) lies outside its domain")]
    OutsideDomain { index: usize, re: f64, im: f64 },
    #[error("measures live on different domains")]
    DomainMismatch,
    #[error("radius {0} outside (0, {1}]")]
    BadRadius(f64, f64),
    #[error("empty {0} grid")]
    EmptyGrid(&'static str),
    #[error("radii must be strictly decreasing")]
    RadiiNotDecreasing,
    #[error("invalid measure json: {0}")]
    Json(String),
}

/// A weighted point mass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Atom {
    pub z: Point,
    pub w: f64,
}

impl Atom {
    pub fn new(z: Point, w: f64) -> Self {
        Atom { z, w }
    }
}

/// Which complementary component of the curve the atoms live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Interior,
    Exterior,
}

/// Nonnegative finite measure made of atoms inside a Jordan domain.
#[derive(Clone, Debug)]
pub struct Measure {
    atoms: Vec<Atom>,
    domain: Arc<JordanCurve>,
    side: Side,
}

impl Measure {
    /// Checked constructor for measures on the interior of `domain`.
    pub fn new(domain: Arc<JordanCurve>, atoms: Vec<Atom>) -> Result<Self, MeasureError> {
        Self::new_on(domain, Side::Interior, atoms)
    }

    /// Checked constructor on either side of `domain`.
    pub fn new_on(domain: Arc<JordanCurve>, side: Side, atoms: Vec<Atom>) -> Result<Self, MeasureError> {
        for (index, a) in atoms.iter().enumerate() {
            if !(a.w >= 0.0 && a.w.is_finite()) {
                return Err(MeasureError::BadWeight { index, weight: a.w });
            }
        }
        let bad = atoms.par_iter().position_first(|a| {
            let inside = domain.encloses(a.z);
            let ok = match side {
                Side::Interior => inside,
                Side::Exterior => {
                    !inside
                        && crate::geometry::contains(a.z, &domain)
                            != crate::geometry::Containment::Boundary
                }
            };
            !ok || !a.z.re.is_finite() || !a.z.im.is_finite()
        });
        if let Some(index) = bad {
            let z = atoms[index].z;
            return Err(MeasureError::OutsideDomain { index, re: z.re, im: z.im });
        }
        Ok(Measure { atoms, domain, side })
    }

    /// Constructor without the location check. Weights are still checked.
    /// Used where atoms come out of a map whose image is the domain.
    pub fn new_trusted(domain: Arc<JordanCurve>, side: Side, atoms: Vec<Atom>) -> Result<Self, MeasureError> {
        for (index, a) in atoms.iter().enumerate() {
            if !(a.w >= 0.0 && a.w.is_finite()) {
                return Err(MeasureError::BadWeight { index, weight: a.w });
            }
        }
        Ok(Measure { atoms, domain, side })
    }

    pub fn zero(domain: Arc<JordanCurve>) -> Self {
        Measure { atoms: Vec::new(), domain, side: Side::Interior }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn domain(&self) -> &Arc<JordanCurve> {
        &self.domain
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.w).sum()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    fn same_domain(&self, other: &Measure) -> bool {
        self.side == other.side
            && (Arc::ptr_eq(&self.domain, &other.domain) || *self.domain == *other.domain)
    }

    /// Measure JSON: `{"domain": <curve json>, "atoms": [[re, im, w], ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut domain = self.domain.to_json();
        if self.side == Side::Exterior {
            domain["side"] = serde_json::json!("exterior");
        }
        serde_json::json!({
            "domain": domain,
            "atoms": self.atoms.iter().map(|a| [a.z.re, a.z.im, a.w]).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, crate::Error> {
        let domain = value
            .get("domain")
            .ok_or_else(|| MeasureError::Json("missing `domain`".into()))?;
        let side = match domain.get("side").and_then(|s| s.as_str()) {
            Some("exterior") => Side::Exterior,
            _ => Side::Interior,
        };
        let curve = Arc::new(JordanCurve::from_json(domain)?);
        let raw: Vec<[f64; 3]> = value
            .get("atoms")
            .cloned()
            .map(serde_json::from_value)
            .transpose()
            .map_err(|e| MeasureError::Json(e.to_string()))?
            .unwrap_or_default();
        let atoms = raw.into_iter().map(|[re, im, w]| Atom::new(Point::new(re, im), w)).collect();
        Ok(Measure::new_on(curve, side, atoms)?)
    }
}

/// Multiplies every weight by `a ≥ 0`.
pub fn scale(m: &Measure, a: f64) -> Result<Measure, MeasureError> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(MeasureError::BadWeight { index: 0, weight: a });
    }
    let atoms = m.atoms.iter().map(|at| Atom::new(at.z, at.w * a)).collect();
    Ok(Measure { atoms, domain: m.domain.clone(), side: m.side })
}

/// Sum of two measures on the same domain (atom lists concatenated).
pub fn add(m1: &Measure, m2: &Measure) -> Result<Measure, MeasureError> {
    if !m1.same_domain(m2) {
        return Err(MeasureError::DomainMismatch);
    }
    let mut atoms = m1.atoms.clone();
    atoms.extend_from_slice(&m2.atoms);
    Ok(Measure { atoms, domain: m1.domain.clone(), side: m1.side })
}

/// Boundary centers and radii over which Carleson ratios are maximized.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CarlesonGrid {
    pub centers: Vec<Point>,
    pub radii: Vec<f64>,
}

impl CarlesonGrid {
    /// 64 log-spaced radii on `[1e-3·diam, diam]`, centers at every sample.
    pub fn default_for(curve: &JordanCurve) -> Self {
        let d = curve.diameter();
        CarlesonGrid { centers: curve.samples().to_vec(), radii: crate::log_space(1e-3 * d, d, 64) }
    }

    /// `n_centers` points evenly spaced in arc length along the curve and
    /// `n_radii` log-spaced radii on `[r_min_rel·diam, diam]`.
    pub fn with_sizes(curve: &JordanCurve, n_centers: usize, n_radii: usize, r_min_rel: f64) -> Self {
        let d = curve.diameter();
        CarlesonGrid {
            centers: centers_along(curve, n_centers),
            radii: crate::log_space(r_min_rel * d, d, n_radii),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.centers.len(), self.radii.len())
    }

    /// Doubles both the center and radius counts over the same ranges.
    pub fn refined(&self, curve: &JordanCurve) -> Self {
        let lo = self.radii.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.radii.iter().cloned().fold(0.0, f64::max);
        CarlesonGrid {
            centers: centers_along(curve, 2 * self.centers.len()),
            radii: crate::log_space(lo, hi, 2 * self.radii.len().max(1) - 1),
        }
    }
}

/// Points evenly spaced in arc length along the polyline, starting at sample 0.
/// When `count` divides the sample count the points are exactly samples.
pub fn centers_along(curve: &JordanCurve, count: usize) -> Vec<Point> {
    let n = curve.len();
    if count == 0 {
        return Vec::new();
    }
    if n % count == 0 {
        return (0..count).map(|k| curve.samples()[k * (n / count)]).collect();
    }
    let per = curve.perimeter();
    let mut out = Vec::with_capacity(count);
    let mut seg = 0usize;
    for k in 0..count {
        let s = per * k as f64 / count as f64;
        while seg + 1 < n && curve.forward_arc(0, seg + 1) <= s {
            seg += 1;
        }
        let (a, b) = curve.segment(seg);
        let start = curve.forward_arc(0, seg);
        let len = (b - a).norm();
        let t = ((s - start) / len).clamp(0.0, 1.0);
        out.push(a + (b - a) * t);
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct CarlesonReport {
    pub norm: f64,
    pub witness_center: Point,
    pub witness_radius: f64,
    pub grid: (usize, usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct VanishingProfile {
    /// `(r, sup_z μ(D(z, r)) / r)` with `r` strictly decreasing.
    pub entries: Vec<(f64, f64)>,
}

impl VanishingProfile {
    pub fn radii(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.0).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.1).collect()
    }
}

fn check_grid(m: &Measure, grid: &CarlesonGrid) -> Result<(), MeasureError> {
    if grid.centers.is_empty() {
        return Err(MeasureError::EmptyGrid("center"));
    }
    if grid.radii.is_empty() {
        return Err(MeasureError::EmptyGrid("radius"));
    }
    let diam = m.domain.diameter();
    for &r in &grid.radii {
        if !(r > 0.0 && r <= diam * (1.0 + 1e-12)) {
            return Err(MeasureError::BadRadius(r, diam));
        }
    }
    Ok(())
}

/// Atoms sorted into square buckets; a bucket whose distance range from a
/// center falls inside one radius bin is added as a whole.
struct Buckets {
    atoms: Vec<Atom>,
    // (first atom, end, total weight, lower-left, upper-right)
    spans: Vec<(usize, usize, f64, Point, Point)>,
}

impl Buckets {
    fn new(atoms: &[Atom], per_side: usize) -> Self {
        let live: Vec<Atom> = atoms.iter().copied().filter(|a| a.w != 0.0).collect();
        if live.is_empty() {
            return Buckets { atoms: live, spans: Vec::new() };
        }
        let (mut lo, mut hi) = (live[0].z, live[0].z);
        for a in &live {
            lo = Point::new(lo.re.min(a.z.re), lo.im.min(a.z.im));
            hi = Point::new(hi.re.max(a.z.re), hi.im.max(a.z.im));
        }
        let side = ((hi.re - lo.re).max(hi.im - lo.im) / per_side as f64).max(f64::MIN_POSITIVE);
        let cell = |z: Point| {
            let i = (((z.re - lo.re) / side) as usize).min(per_side - 1);
            let j = (((z.im - lo.im) / side) as usize).min(per_side - 1);
            j * per_side + i
        };
        let mut keyed: Vec<(usize, Atom)> = live.iter().map(|a| (cell(a.z), *a)).collect();
        keyed.sort_by_key(|k| k.0);
        let atoms: Vec<Atom> = keyed.iter().map(|k| k.1).collect();
        let mut spans = Vec::new();
        let mut s = 0;
        while s < keyed.len() {
            let mut e = s;
            let (mut blo, mut bhi, mut w) = (atoms[s].z, atoms[s].z, 0.0);
            while e < keyed.len() && keyed[e].0 == keyed[s].0 {
                let z = atoms[e].z;
                blo = Point::new(blo.re.min(z.re), blo.im.min(z.im));
                bhi = Point::new(bhi.re.max(z.re), bhi.im.max(z.im));
                w += atoms[e].w;
                e += 1;
            }
            spans.push((s, e, w, blo, bhi));
            s = e;
        }
        Buckets { atoms, spans }
    }
}

/// Per-radius supremum over centers: `(value, center index)` in the order of
/// `grid.radii`. Sums are accumulated in a fixed order per center, so the
/// result does not depend on the thread count.
fn ratio_table(m: &Measure, grid: &CarlesonGrid) -> Vec<(f64, usize)> {
    let nr = grid.radii.len();
    let mut order: Vec<usize> = (0..nr).collect();
    order.sort_by(|&a, &b| grid.radii[a].total_cmp(&grid.radii[b]));
    let sorted: Vec<f64> = order.iter().map(|&k| grid.radii[k]).collect();
    let thresholds: Vec<f64> = sorted.iter().map(|r| r * (1.0 + DISK_TIE_REL)).collect();
    let per_side = ((m.atoms.len() as f64 / 16.0).sqrt() as usize).clamp(4, 512);
    let buckets = Buckets::new(&m.atoms, per_side);
    let per_center: Vec<Vec<f64>> = grid
        .centers
        .par_iter()
        .map(|&c| {
            let mut bins = vec![0.0f64; nr + 1];
            for &(s, e, w, lo, hi) in &buckets.spans {
                let dx = (lo.re - c.re).max(c.re - hi.re).max(0.0);
                let dy = (lo.im - c.im).max(c.im - hi.im).max(0.0);
                let dmin = dx.hypot(dy) * (1.0 - 1e-12);
                let fx = (c.re - lo.re).abs().max((hi.re - c.re).abs());
                let fy = (c.im - lo.im).abs().max((hi.im - c.im).abs());
                let dmax = fx.hypot(fy) * (1.0 + 1e-12);
                let k1 = thresholds.partition_point(|&t| t < dmin);
                if k1 == thresholds.partition_point(|&t| t < dmax) {
                    bins[k1] += w;
                    continue;
                }
                for a in &buckets.atoms[s..e] {
                    let d = (a.z - c).norm();
                    bins[thresholds.partition_point(|&t| t < d)] += a.w;
                }
            }
            let mut acc = 0.0;
            let mut ratios = vec![0.0; nr];
            for k in 0..nr {
                acc += bins[k];
                ratios[order[k]] = acc / sorted[k];
            }
            ratios
        })
        .collect();
    (0..nr)
        .map(|k| {
            let mut best = (0.0f64, 0usize);
            for (ci, row) in per_center.iter().enumerate() {
                if row[k] > best.0 {
                    best = (row[k], ci);
                }
            }
            best
        })
        .collect()
}

/// Grid supremum of `μ(D(z, r)) / r`.
pub fn carleson_norm(m: &Measure, grid: &CarlesonGrid) -> Result<CarlesonReport, MeasureError> {
    check_grid(m, grid)?;
    let table = ratio_table(m, grid);
    let mut best = (0.0f64, 0usize, 0usize);
    for (k, &(v, ci)) in table.iter().enumerate() {
        if v > best.0 {
            best = (v, ci, k);
        }
    }
    Ok(CarlesonReport {
        norm: best.0,
        witness_center: grid.centers[best.1],
        witness_radius: grid.radii[best.2],
        grid: grid.shape(),
    })
}

/// Per-radius suprema, radii reported in strictly decreasing order.
pub fn vanishing_profile(m: &Measure, grid: &CarlesonGrid) -> Result<VanishingProfile, MeasureError> {
    check_grid(m, grid)?;
    let table = ratio_table(m, grid);
    let mut entries: Vec<(f64, f64)> =
        grid.radii.iter().zip(&table).map(|(&r, &(v, _))| (r, v)).collect();
    entries.sort_by(|a, b| b.0.total_cmp(&a.0));
    entries.dedup_by(|a, b| a.0 == b.0);
    Ok(VanishingProfile { entries })
}

/// Keeps the atoms farther than `r` from the boundary curve.
pub fn restrict_to_collar(m: &Measure, r: f64) -> Measure {
    let (inner, _) = split_by_distance(m, r);
    inner
}

/// Splits `m` into `(μ_r, μ − μ_r)`.
pub fn split_by_distance(m: &Measure, r: f64) -> (Measure, Measure) {
    let idx = DistanceIndex::new(&m.domain);
    let dist: Vec<f64> = m.atoms.par_iter().map(|a| idx.distance(a.z)).collect();
    split_with(m, &dist, r)
}

fn split_with(m: &Measure, dist: &[f64], r: f64) -> (Measure, Measure) {
    let (mut keep, mut rest) = (Vec::new(), Vec::new());
    for (a, &d) in m.atoms.iter().zip(dist) {
        if d > r {
            keep.push(*a);
        } else {
            rest.push(*a);
        }
    }
    let make = |atoms| Measure { atoms, domain: m.domain.clone(), side: m.side };
    (make(keep), make(rest))
}

/// `(r, ‖μ − μ_r‖*)` for each collar width `r` (strictly decreasing).
pub fn collar_deficit(
    m: &Measure,
    collar_radii: &[f64],
    grid: &CarlesonGrid,
) -> Result<Vec<(f64, f64)>, MeasureError> {
    if collar_radii.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(MeasureError::RadiiNotDecreasing);
    }
    check_grid(m, grid)?;
    let idx = DistanceIndex::new(&m.domain);
    let dist: Vec<f64> = m.atoms.par_iter().map(|a| idx.distance(a.z)).collect();
    collar_radii
        .iter()
        .map(|&r| {
            let (_, rest) = split_with(m, &dist, r);
            Ok((r, carleson_norm(&rest, grid)?.norm))
        })
        .collect()
}
