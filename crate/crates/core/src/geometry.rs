//! Sampled Jordan curves and the geometric constants measured on them.
//!
//! A [`JordanCurve`] is a closed polyline through `N` samples (`N` a power of
//! two, at least 64). Every length below is a polyline length, so all
//! constants are computable exactly on the samples and converge under
//! refinement for the analytic families.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A point of the complex plane.
pub type Point = Complex64;

/// Relative tolerance (times the curve diameter) for on-boundary detection.
pub const ON_BOUNDARY_REL_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("sample count {0} must be a power of two and at least 64")]
    BadSampleCount(usize),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("self-intersection between segments {0} and {1}")]
    SelfIntersection(usize, usize),
    #[error("degenerate curve: {0}")]
    Degenerate(String),
    #[error("empty {0} grid")]
    EmptyGrid(&'static str),
    #[error("invalid curve json: {0}")]
    Json(String),
}

/// Family descriptor of a generated curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveFamily {
    /// The unit circle.
    Circle,
    /// Image of the unit circle under `z + c/z`: semi-axes `1 + c`, `1 - c`.
    Ellipse { c: f64 },
    /// Closed polygon through the given vertices.
    Polygon { vertices: Vec<[f64; 2]> },
    /// Image of the unit circle under `z + c z²`.
    Polyimage { c: f64 },
    /// Boundary of the lens with vertex angle `alpha·π` at ±1.
    Lens { alpha: f64 },
    /// Star-like curve with radius `1 + a cos(kθ)`.
    Star { a: f64, k: u32 },
    /// Koch snowflake prefractal of the given level.
    Koch { level: u32 },
    /// Samples supplied by the caller.
    Sampled,
}

impl CurveFamily {
    pub fn name(&self) -> &'static str {
        match self {
            CurveFamily::Circle => "circle",
            CurveFamily::Ellipse { .. } => "ellipse",
            CurveFamily::Polygon { .. } => "polygon",
            CurveFamily::Polyimage { .. } => "polyimage",
            CurveFamily::Lens { .. } => "lens",
            CurveFamily::Star { .. } => "star",
            CurveFamily::Koch { .. } => "koch",
            CurveFamily::Sampled => "sampled",
        }
    }

    /// Family parameters as a JSON object.
    pub fn params(&self) -> serde_json::Value {
        use serde_json::json;
        match self {
            CurveFamily::Circle | CurveFamily::Sampled => json!({}),
            CurveFamily::Ellipse { c } | CurveFamily::Polyimage { c } => json!({ "c": c }),
            CurveFamily::Polygon { vertices } => json!({ "vertices": vertices }),
            CurveFamily::Lens { alpha } => json!({ "alpha": alpha }),
            CurveFamily::Star { a, k } => json!({ "a": a, "k": k }),
            CurveFamily::Koch { level } => json!({ "level": level }),
        }
    }

    /// Rebuilds a family from its name and parameter object.
    pub fn from_name_params(name: &str, params: &serde_json::Value) -> Result<Self, GeometryError> {
        let num = |key: &str| -> Result<f64, GeometryError> {
            params
                .get(key)
                .and_then(|v| v.as_f64())
                .ok_or_else(|| GeometryError::Json(format!("{name}: missing numeric parameter `{key}`")))
        };
        let int = |key: &str| -> Result<u32, GeometryError> {
            params
                .get(key)
                .and_then(|v| v.as_u64())
                .map(|v| v as u32)
                .ok_or_else(|| GeometryError::Json(format!("{name}: missing integer parameter `{key}`")))
        };
        Ok(match name {
            "circle" => CurveFamily::Circle,
            "sampled" => CurveFamily::Sampled,
            "ellipse" => CurveFamily::Ellipse { c: num("c")? },
            "polyimage" => CurveFamily::Polyimage { c: num("c")? },
            "lens" => CurveFamily::Lens { alpha: num("alpha")? },
            "star" => CurveFamily::Star { a: num("a")?, k: int("k")? },
            "koch" => CurveFamily::Koch { level: int("level")? },
            "polygon" => {
                let vertices: Vec<[f64; 2]> = params
                    .get("vertices")
                    .cloned()
                    .map(serde_json::from_value)
                    .transpose()
                    .map_err(|e| GeometryError::Json(e.to_string()))?
                    .ok_or_else(|| GeometryError::Json("polygon: missing `vertices`".into()))?;
                CurveFamily::Polygon { vertices }
            }
            other => return Err(GeometryError::Json(format!("unknown curve family `{other}`"))),
        })
    }

    /// Whether samples of this family lie exactly on an analytic curve.
    pub fn is_analytic(&self) -> bool {
        matches!(
            self,
            CurveFamily::Circle
                | CurveFamily::Ellipse { .. }
                | CurveFamily::Polyimage { .. }
                | CurveFamily::Lens { .. }
                | CurveFamily::Star { .. }
        )
    }

    fn validate(&self) -> Result<(), GeometryError> {
        let bad = |msg: String| Err(GeometryError::ParameterOutOfRange(msg));
        match *self {
            CurveFamily::Ellipse { c } if !(0.0..1.0).contains(&c.abs()) || !c.is_finite() => {
                bad(format!("ellipse needs |c| < 1, got {c}"))
            }
            CurveFamily::Polyimage { c } if !(c.abs() < 0.5) => {
                bad(format!("polyimage needs |c| < 1/2, got {c}"))
            }
            CurveFamily::Lens { alpha } if !(alpha > 0.0 && alpha < 2.0) => {
                bad(format!("lens needs alpha in (0, 2), got {alpha}"))
            }
            CurveFamily::Star { a, k } if k == 0 || !(a.abs() * k as f64) .lt(&1.0) => {
                bad(format!("star needs k >= 1 and |a|·k < 1, got a = {a}, k = {k}"))
            }
            CurveFamily::Polygon { ref vertices } if vertices.len() < 3 => {
                bad("polygon needs at least three vertices".into())
            }
            _ => Ok(()),
        }
    }
}

/// Closed sampled curve. Sample 0 follows sample `N − 1`.
#[derive(Clone, Debug)]
pub struct JordanCurve {
    samples: Vec<Point>,
    family: CurveFamily,
    /// `cumulative[i]` is the polyline length from sample 0 to sample `i`;
    /// `cumulative[N]` is the perimeter.
    cumulative: Vec<f64>,
    diameter: f64,
    vertex_indices: Vec<usize>,
}

impl PartialEq for JordanCurve {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family && self.samples == other.samples
    }
}

/// Result of [`contains`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Containment {
    Inside,
    Outside,
    Boundary,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChordArcReport {
    pub constant: f64,
    pub witness_pair: (Point, Point),
    pub witness_indices: (usize, usize),
}

#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    pub constant: f64,
    pub witness_center: Point,
    pub witness_radius: f64,
}

/// Builds the curve of a family with `n` samples.
pub fn generate_curve(family: CurveFamily, n: usize) -> Result<JordanCurve, GeometryError> {
    check_sample_count(n)?;
    family.validate()?;
    let theta = |k: usize| TAU * k as f64 / n as f64;
    let (samples, vertex_indices) = match &family {
        CurveFamily::Circle => ((0..n).map(|k| Point::from_polar(1.0, theta(k))).collect(), vec![]),
        CurveFamily::Ellipse { c } => (
            (0..n)
                .map(|k| {
                    let z = Point::from_polar(1.0, theta(k));
                    z + *c * z.conj()
                })
                .collect(),
            vec![],
        ),
        CurveFamily::Polyimage { c } => (
            (0..n)
                .map(|k| {
                    let z = Point::from_polar(1.0, theta(k));
                    z + *c * z * z
                })
                .collect(),
            vec![],
        ),
        CurveFamily::Lens { alpha } => (
            (0..n)
                .map(|k| crate::confmap::lens_boundary_value(*alpha, theta(k)))
                .collect(),
            vec![],
        ),
        CurveFamily::Star { a, k: freq } => (
            (0..n)
                .map(|k| {
                    let t = theta(k);
                    Point::from_polar(1.0 + a * (*freq as f64 * t).cos(), t)
                })
                .collect(),
            vec![],
        ),
        CurveFamily::Polygon { vertices } => {
            let mut v: Vec<Point> = vertices.iter().map(|p| Point::new(p[0], p[1])).collect();
            if signed_area(&v) < 0.0 {
                v.reverse();
            }
            sample_polygon(&v, n)?
        }
        CurveFamily::Koch { level } => {
            let v = koch_vertices(*level);
            if v.len() > n {
                return Err(GeometryError::ParameterOutOfRange(format!(
                    "koch level {level} has {} vertices, more than n = {n}",
                    v.len()
                )));
            }
            sample_polygon(&v, n)?
        }
        CurveFamily::Sampled => {
            return Err(GeometryError::ParameterOutOfRange(
                "sampled curves are built with JordanCurve::from_samples".into(),
            ))
        }
    };
    JordanCurve::build(samples, family, vertex_indices)
}

fn check_sample_count(n: usize) -> Result<(), GeometryError> {
    if n < 64 || !n.is_power_of_two() {
        return Err(GeometryError::BadSampleCount(n));
    }
    Ok(())
}

fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a.re * b.im - b.re * a.im
        })
        .sum::<f64>()
}

/// Vertices of the Koch snowflake, counter-clockwise, starting at the top
/// corner of the generating triangle.
pub fn koch_vertices(level: u32) -> Vec<Point> {
    let mut pts: Vec<Point> = (0..3)
        .map(|k| Point::from_polar(1.0, PI / 2.0 + TAU * k as f64 / 3.0))
        .collect();
    let out = Point::from_polar(1.0, -PI / 3.0);
    for _ in 0..level {
        let n = pts.len();
        let mut next = Vec::with_capacity(4 * n);
        for i in 0..n {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            let d = (b - a) / 3.0;
            next.extend_from_slice(&[a, a + d, a + d + d * out, a + 2.0 * d]);
        }
        pts = next;
    }
    pts
}

/// Samples a closed polygon with `n` points so that every vertex is a sample;
/// the remaining samples are spread along the edges in proportion to length.
fn sample_polygon(v: &[Point], n: usize) -> Result<(Vec<Point>, Vec<usize>), GeometryError> {
    let m = v.len();
    let lens: Vec<f64> = (0..m).map(|i| (v[(i + 1) % m] - v[i]).norm()).collect();
    let total: f64 = lens.iter().sum();
    if !(total > 0.0) {
        return Err(GeometryError::Degenerate("polygon has zero perimeter".into()));
    }
    let mut counts = Vec::with_capacity(m);
    let mut acc = 0.0;
    let mut prev = 0usize;
    for (i, l) in lens.iter().enumerate() {
        acc += l;
        let upto = if i + 1 == m { n } else { ((acc / total) * n as f64).round() as usize };
        let c = upto.saturating_sub(prev);
        if c == 0 {
            return Err(GeometryError::ParameterOutOfRange(format!(
                "n = {n} is too small to place a sample on every polygon edge"
            )));
        }
        counts.push(c);
        prev = upto;
    }
    let mut samples = Vec::with_capacity(n);
    let mut vertex_indices = Vec::with_capacity(m);
    for i in 0..m {
        let (a, b) = (v[i], v[(i + 1) % m]);
        vertex_indices.push(samples.len());
        for s in 0..counts[i] {
            samples.push(a + (b - a) * (s as f64 / counts[i] as f64));
        }
    }
    Ok((samples, vertex_indices))
}

impl JordanCurve {
    /// Wraps caller-supplied samples, checking every curve invariant.
    pub fn from_samples(samples: Vec<Point>) -> Result<Self, GeometryError> {
        check_sample_count(samples.len())?;
        Self::build(samples, CurveFamily::Sampled, vec![])
    }

    fn build(
        samples: Vec<Point>,
        family: CurveFamily,
        vertex_indices: Vec<usize>,
    ) -> Result<Self, GeometryError> {
        if samples.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return Err(GeometryError::Degenerate("non-finite sample".into()));
        }
        let n = samples.len();
        let mut cumulative = Vec::with_capacity(n + 1);
        cumulative.push(0.0);
        for i in 0..n {
            let step = (samples[(i + 1) % n] - samples[i]).norm();
            cumulative.push(cumulative[i] + step);
        }
        let diameter = (0..n)
            .into_par_iter()
            .map(|i| {
                samples[i + 1..]
                    .iter()
                    .map(|q| (q - samples[i]).norm())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        if !(diameter > 0.0) {
            return Err(GeometryError::Degenerate("all samples coincide".into()));
        }
        for i in 0..n {
            if !(cumulative[i + 1] - cumulative[i] > 1e-15 * diameter) {
                return Err(GeometryError::Degenerate(format!(
                    "samples {i} and {} coincide",
                    (i + 1) % n
                )));
            }
        }
        let curve = JordanCurve { samples, family, cumulative, diameter, vertex_indices };
        if let Some((i, j)) = curve.find_self_intersection() {
            return Err(GeometryError::SelfIntersection(i, j));
        }
        Ok(curve)
    }

    pub fn samples(&self) -> &[Point] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn family(&self) -> &CurveFamily {
        &self.family
    }

    pub fn perimeter(&self) -> f64 {
        self.cumulative[self.samples.len()]
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Sample indices of polygon vertices (polygon and Koch families only).
    pub fn vertex_indices(&self) -> &[usize] {
        &self.vertex_indices
    }

    pub fn on_boundary_tolerance(&self) -> f64 {
        ON_BOUNDARY_REL_TOL * self.diameter
    }

    pub fn segment(&self, i: usize) -> (Point, Point) {
        let n = self.samples.len();
        (self.samples[i % n], self.samples[(i + 1) % n])
    }

    /// Length of the forward arc from sample `i` to sample `j`.
    pub fn forward_arc(&self, i: usize, j: usize) -> f64 {
        let d = self.cumulative[j] - self.cumulative[i];
        if d >= 0.0 {
            d
        } else {
            d + self.perimeter()
        }
    }

    /// Length of the smaller of the two arcs joining samples `i` and `j`.
    pub fn smaller_arc(&self, i: usize, j: usize) -> f64 {
        let a = self.forward_arc(i, j);
        a.min(self.perimeter() - a)
    }

    /// Interior test used for measure validation. The unit circle uses the
    /// exact disk; every other family uses the sampled polyline.
    pub fn encloses(&self, p: Point) -> bool {
        match self.family {
            CurveFamily::Circle => p.norm_sqr() < 1.0,
            _ => contains(p, self) == Containment::Inside,
        }
    }

    fn find_self_intersection(&self) -> Option<(usize, usize)> {
        let n = self.samples.len();
        let scale = self.diameter;
        // Folds between consecutive segments.
        for i in 0..n {
            let a = self.samples[(i + n - 1) % n];
            let b = self.samples[i];
            let c = self.samples[(i + 1) % n];
            let (u, v) = (b - a, c - b);
            let cross = u.re * v.im - u.im * v.re;
            let dot = u.re * v.re + u.im * v.im;
            if cross.abs() <= 1e-14 * u.norm() * v.norm() && dot < 0.0 {
                return Some(((i + n - 1) % n, i));
            }
        }
        // Sweep over x-extents.
        let mut order: Vec<usize> = (0..n).collect();
        let bounds: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let (a, b) = self.segment(i);
                (a.re.min(b.re), a.re.max(b.re))
            })
            .collect();
        order.sort_by(|&i, &j| bounds[i].0.total_cmp(&bounds[j].0));
        for (pos, &i) in order.iter().enumerate() {
            let (a, b) = self.segment(i);
            for &j in &order[pos + 1..] {
                if bounds[j].0 > bounds[i].1 {
                    break;
                }
                let gap = (i as isize - j as isize).unsigned_abs();
                if gap == 1 || gap == n - 1 {
                    continue;
                }
                let (c, d) = self.segment(j);
                if segments_intersect(a, b, c, d, 1e-14 * scale * scale) {
                    return Some((i.min(j), i.max(j)));
                }
            }
        }
        None
    }

    /// Curve serialized as `{"family", "params", "n", "samples"}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "family": self.family.name(),
            "params": self.family.params(),
            "n": self.samples.len(),
            "samples": self.samples.iter().map(|p| [p.re, p.im]).collect::<Vec<_>>(),
        })
    }

    /// Reads a curve JSON object. When `samples` is absent the curve is
    /// regenerated from its family; otherwise the samples are taken verbatim
    /// and validated.
    pub fn from_json(value: &serde_json::Value) -> Result<Self, GeometryError> {
        let obj: CurveJson =
            serde_json::from_value(value.clone()).map_err(|e| GeometryError::Json(e.to_string()))?;
        let family = CurveFamily::from_name_params(&obj.family, &obj.params)?;
        match obj.samples {
            None => generate_curve(family, obj.n),
            Some(raw) => {
                if raw.len() != obj.n {
                    return Err(GeometryError::Json(format!(
                        "n = {} but {} samples given",
                        obj.n,
                        raw.len()
                    )));
                }
                check_sample_count(raw.len())?;
                family.validate()?;
                let samples = raw.into_iter().map(|[re, im]| Point::new(re, im)).collect();
                let vertex_indices = match &family {
                    CurveFamily::Koch { .. } | CurveFamily::Polygon { .. } => {
                        generate_curve(family.clone(), obj.n)
                            .map(|c| c.vertex_indices)
                            .unwrap_or_default()
                    }
                    _ => vec![],
                };
                Self::build(samples, family, vertex_indices)
            }
        }
    }
}

#[derive(Deserialize)]
struct CurveJson {
    family: String,
    #[serde(default)]
    params: serde_json::Value,
    n: usize,
    samples: Option<Vec<[f64; 2]>>,
}

#[inline]
fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.re - a.re) * (c.im - a.im) - (b.im - a.im) * (c.re - a.re)
}

#[inline]
fn within_box(a: Point, b: Point, p: Point) -> bool {
    p.re >= a.re.min(b.re) && p.re <= a.re.max(b.re) && p.im >= a.im.min(b.im) && p.im <= a.im.max(b.im)
}

/// Closed-segment intersection; orientations below `eps` count as collinear.
fn segments_intersect(a: Point, b: Point, c: Point, d: Point, eps: f64) -> bool {
    let sgn = |x: f64| if x > eps { 1 } else if x < -eps { -1 } else { 0 };
    let d1 = sgn(orient(c, d, a));
    let d2 = sgn(orient(c, d, b));
    let d3 = sgn(orient(a, b, c));
    let d4 = sgn(orient(a, b, d));
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    (d1 == 0 && within_box(c, d, a))
        || (d2 == 0 && within_box(c, d, b))
        || (d3 == 0 && within_box(a, b, c))
        || (d4 == 0 && within_box(a, b, d))
}

/// Distance from `p` to the segment `[a, b]`.
#[inline]
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

/// Length of `[a, b]` inside the closed disk `D(center, r)`.
#[inline]
pub fn segment_length_in_disk(a: Point, b: Point, center: Point, r: f64) -> f64 {
    let d = b - a;
    let f = a - center;
    let qa = d.norm_sqr();
    let qb = 2.0 * (f * d.conj()).re;
    let qc = f.norm_sqr() - r * r;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc <= 0.0 || qa == 0.0 {
        return 0.0;
    }
    let s = disc.sqrt();
    let t0 = ((-qb - s) / (2.0 * qa)).max(0.0);
    let t1 = ((-qb + s) / (2.0 * qa)).min(1.0);
    if t1 <= t0 {
        0.0
    } else {
        (t1 - t0) * qa.sqrt()
    }
}

/// Chord-arc constant: the largest ratio of smaller-arc length to chord
/// length over all sample pairs.
pub fn chord_arc_constant(curve: &JordanCurve) -> ChordArcReport {
    let n = curve.len();
    let s = curve.samples();
    let best = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = (0.0f64, i, i);
            for j in i + 1..n {
                let ratio = curve.smaller_arc(i, j) / (s[j] - s[i]).norm();
                if ratio > best.0 {
                    best = (ratio, i, j);
                }
            }
            best
        })
        .reduce(|| (0.0, 0, 0), |x, y| if y.0 > x.0 || (y.0 == x.0 && (y.1, y.2) < (x.1, x.2)) { y } else { x });
    ChordArcReport {
        constant: best.0,
        witness_pair: (s[best.1], s[best.2]),
        witness_indices: (best.1, best.2),
    }
}

/// Smaller-arc over chord ratio for one sample pair.
pub fn chord_arc_ratio(curve: &JordanCurve, i: usize, j: usize) -> f64 {
    curve.smaller_arc(i, j) / (curve.samples()[j] - curve.samples()[i]).norm()
}

/// Ahlfors-regularity constant: the largest ratio of polyline length inside
/// `D(center, r)` to `r` over the given grid.
pub fn ahlfors_constant(
    curve: &JordanCurve,
    centers: &[Point],
    radii: &[f64],
) -> Result<RegularityReport, GeometryError> {
    if centers.is_empty() {
        return Err(GeometryError::EmptyGrid("center"));
    }
    if radii.is_empty() {
        return Err(GeometryError::EmptyGrid("radius"));
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0)) {
        return Err(GeometryError::ParameterOutOfRange(format!("radius {r} is not positive")));
    }
    let n = curve.len();
    let best = centers
        .par_iter()
        .map(|&c| {
            let mut best = (0.0f64, c, radii[0]);
            for &r in radii {
                let mut len = 0.0;
                for i in 0..n {
                    let (a, b) = curve.segment(i);
                    len += segment_length_in_disk(a, b, c, r);
                }
                let ratio = len / r;
                if ratio > best.0 {
                    best = (ratio, c, r);
                }
            }
            best
        })
        .reduce(
            || (0.0, Point::new(0.0, 0.0), 0.0),
            |x, y| if y.0 > x.0 { y } else { x },
        );
    Ok(RegularityReport { constant: best.0, witness_center: best.1, witness_radius: best.2 })
}

/// Distance from `p` to the sample polyline.
pub fn distance_to_curve(p: Point, curve: &JordanCurve) -> f64 {
    let n = curve.len();
    (0..n)
        .map(|i| {
            let (a, b) = curve.segment(i);
            point_segment_distance(p, a, b)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Winding number of the polyline about `p`.
pub fn winding_number(p: Point, curve: &JordanCurve) -> i32 {
    let n = curve.len();
    let mut wn = 0;
    for i in 0..n {
        let (a, b) = curve.segment(i);
        if a.im <= p.im {
            if b.im > p.im && orient(a, b, p) > 0.0 {
                wn += 1;
            }
        } else if b.im <= p.im && orient(a, b, p) < 0.0 {
            wn -= 1;
        }
    }
    wn
}

/// Inside / outside / boundary classification of `p`.
pub fn contains(p: Point, curve: &JordanCurve) -> Containment {
    if distance_to_curve(p, curve) <= curve.on_boundary_tolerance() {
        return Containment::Boundary;
    }
    if winding_number(p, curve).abs() == 1 {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

/// Bucket index over the curve segments for repeated distance queries.
pub struct DistanceIndex<'a> {
    curve: &'a JordanCurve,
    origin: Point,
    cell: f64,
    dim: usize,
    buckets: Vec<Vec<u32>>,
}

impl<'a> DistanceIndex<'a> {
    pub fn new(curve: &'a JordanCurve) -> Self {
        let s = curve.samples();
        let (mut lo, mut hi) = (s[0], s[0]);
        for p in s {
            lo = Point::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = Point::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        let dim = ((curve.len() as f64).sqrt().ceil() as usize).clamp(4, 512);
        let span = (hi.re - lo.re).max(hi.im - lo.im) * (1.0 + 1e-9) + f64::MIN_POSITIVE;
        let cell = span / dim as f64;
        let mut buckets = vec![Vec::new(); dim * dim];
        let clamp = |x: f64| ((x / cell).floor().max(0.0) as usize).min(dim - 1);
        for i in 0..curve.len() {
            let (a, b) = curve.segment(i);
            let (x0, x1) = (clamp(a.re.min(b.re) - lo.re), clamp(a.re.max(b.re) - lo.re));
            let (y0, y1) = (clamp(a.im.min(b.im) - lo.im), clamp(a.im.max(b.im) - lo.im));
            for y in y0..=y1 {
                for x in x0..=x1 {
                    buckets[y * dim + x].push(i as u32);
                }
            }
        }
        DistanceIndex { curve, origin: lo, cell, dim, buckets }
    }

    /// Same value as [`distance_to_curve`].
    pub fn distance(&self, p: Point) -> f64 {
        let rel = p - self.origin;
        let fx = rel.re / self.cell;
        let fy = rel.im / self.cell;
        let dim = self.dim as f64;
        if !(fx >= 0.0 && fy >= 0.0 && fx < dim && fy < dim) {
            return distance_to_curve(p, self.curve);
        }
        let (cx, cy) = (fx as isize, fy as isize);
        let mut best = f64::INFINITY;
        let d = self.dim as isize;
        for ring in 0..d {
            let (y0, y1, x0, x1) = (cy - ring, cy + ring, cx - ring, cx + ring);
            for y in y0..=y1 {
                if y < 0 || y >= d {
                    continue;
                }
                for x in x0..=x1 {
                    if x < 0 || x >= d {
                        continue;
                    }
                    if y != y0 && y != y1 && x != x0 && x != x1 {
                        continue;
                    }
                    for &i in &self.buckets[(y * d + x) as usize] {
                        let (a, b) = self.curve.segment(i as usize);
                        best = best.min(point_segment_distance(p, a, b));
                    }
                }
            }
            if best <= ring as f64 * self.cell {
                return best;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn circle_samples_on_unit_circle() {
        let c = generate_curve(CurveFamily::Circle, 256).unwrap();
        assert_eq!(c.len(), 256);
        for p in c.samples() {
            assert_relative_eq!(p.norm(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn polyimage_matches_formula() {
        let c = generate_curve(CurveFamily::Polyimage { c: 0.3 }, 256).unwrap();
        for (k, p) in c.samples().iter().enumerate() {
            let z = Point::from_polar(1.0, TAU * k as f64 / 256.0);
            assert!((p - (z + 0.3 * z * z)).norm() < 1e-15);
        }
    }

    #[test]
    fn koch_level_three_segment_count() {
        let c = generate_curve(CurveFamily::Koch { level: 3 }, 256).unwrap();
        // Merge collinear consecutive samples to count prefractal edges.
        let s = c.samples();
        let n = s.len();
        let corners = (0..n)
            .filter(|&i| {
                let (a, b, d) = (s[(i + n - 1) % n], s[i], s[(i + 1) % n]);
                orient(a, b, d).abs() > 1e-12
            })
            .count();
        assert_eq!(corners, 3 * 4usize.pow(3));
        assert_eq!(c.vertex_indices().len(), 3 * 4usize.pow(3));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(generate_curve(CurveFamily::Circle, 100), Err(GeometryError::BadSampleCount(100))));
        assert!(matches!(generate_curve(CurveFamily::Circle, 32), Err(GeometryError::BadSampleCount(32))));
        assert!(generate_curve(CurveFamily::Polyimage { c: 0.5 }, 64).is_err());
        assert!(generate_curve(CurveFamily::Star { a: 0.5, k: 3 }, 64).is_err());
        assert!(generate_curve(CurveFamily::Lens { alpha: 2.0 }, 64).is_err());
        assert!(generate_curve(CurveFamily::Koch { level: 4 }, 512).is_err());
    }

    #[test]
    fn straight_segment_is_not_a_jordan_curve() {
        let samples: Vec<Point> = (0..64).map(|k| Point::new(k as f64 / 63.0, 0.0)).collect();
        assert!(matches!(
            JordanCurve::from_samples(samples),
            Err(GeometryError::SelfIntersection(..))
        ));
    }

    #[test]
    fn figure_eight_is_rejected() {
        let samples: Vec<Point> = (0..128)
            .map(|k| {
                let t = TAU * k as f64 / 128.0;
                Point::new(t.sin(), (2.0 * t).sin() / 2.0)
            })
            .collect();
        assert!(matches!(JordanCurve::from_samples(samples), Err(GeometryError::SelfIntersection(..))));
    }

    #[test]
    fn chord_arc_circle_and_square() {
        let c = generate_curve(CurveFamily::Circle, 256).unwrap();
        let r = chord_arc_constant(&c);
        // Antipodal pair of the inscribed 256-gon.
        let expected = 128.0 * (PI / 256.0).sin();
        assert_relative_eq!(r.constant, expected, epsilon = 1e-12);
        assert!((r.constant - PI / 2.0).abs() < 1e-4);
        assert_eq!((r.witness_indices.1 - r.witness_indices.0), 128);

        let sq = generate_curve(
            CurveFamily::Polygon { vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]] },
            256,
        )
        .unwrap();
        assert_relative_eq!(chord_arc_constant(&sq).constant, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn ahlfors_circle_whole_circumference() {
        let c = generate_curve(CurveFamily::Circle, 256).unwrap();
        let centers = [Point::new(0.0, 0.0), Point::new(0.3, 0.1), c.samples()[5]];
        let radii = [0.01, 0.5, 1.0, 1.5, 2.0];
        let r = ahlfors_constant(&c, &centers, &radii).unwrap();
        assert!((r.constant - TAU).abs() < 1e-3, "{}", r.constant);
        assert_eq!(r.witness_radius, 1.0);
        assert!(ahlfors_constant(&c, &[], &radii).is_err());
        assert!(ahlfors_constant(&c, &centers, &[]).is_err());
    }

    #[test]
    fn distances_to_unit_circle() {
        let c = generate_curve(CurveFamily::Circle, 1024).unwrap();
        let tol = 1e-5;
        assert!((distance_to_curve(Point::new(0.0, 0.0), &c) - 1.0).abs() < tol);
        assert!((distance_to_curve(Point::new(0.5, 0.0), &c) - 0.5).abs() < tol);
        assert!((distance_to_curve(Point::new(2.0, 0.0), &c) - 1.0).abs() < tol);
    }

    #[test]
    fn containment_basic() {
        let c = generate_curve(CurveFamily::Circle, 256).unwrap();
        assert_eq!(contains(Point::new(0.0, 0.0), &c), Containment::Inside);
        assert_eq!(contains(Point::new(3.0, 0.0), &c), Containment::Outside);
        assert_eq!(contains(c.samples()[17], &c), Containment::Boundary);
    }

    #[test]
    fn distance_index_agrees_with_brute_force() {
        let c = generate_curve(CurveFamily::Star { a: 0.2, k: 4 }, 512).unwrap();
        let idx = DistanceIndex::new(&c);
        for k in 0..400 {
            let t = k as f64 * 0.731;
            let p = Point::from_polar(0.05 + 1.6 * ((k * 37 % 100) as f64 / 100.0), t);
            assert_eq!(idx.distance(p), distance_to_curve(p, &c));
        }
    }

    #[test]
    fn json_round_trip_keeps_samples() {
        let c = generate_curve(CurveFamily::Koch { level: 2 }, 128).unwrap();
        let back = JordanCurve::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.vertex_indices(), c.vertex_indices());
    }
}
