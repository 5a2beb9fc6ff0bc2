use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::extension::{PolarGrid, QCGridMap};
use super::QcError;
use crate::geometry::JordanCurve;
use crate::measure::{Atom, Measure};

type C = Complex64;

/// Complex dilatation on the nodes of a polar grid, with `|∂f|` alongside.
#[derive(Clone, Debug)]
pub struct BeltramiField {
    pub grid: PolarGrid,
    pub mu: Vec<C>,
    /// `|∂f|` at the nodes (empty for fields not derived from a map).
    pub dz_abs: Vec<f64>,
    pub jacobian: Vec<f64>,
}

impl BeltramiField {
    pub fn constant(grid: PolarGrid, k: C) -> Self {
        let n = grid.len();
        BeltramiField { grid, mu: vec![k; n], dz_abs: Vec::new(), jacobian: Vec::new() }
    }

    pub fn from_fn<F: Fn(C) -> C>(grid: PolarGrid, f: F) -> Self {
        let mu = grid.nodes().into_iter().map(f).collect();
        BeltramiField { grid, mu, dz_abs: Vec::new(), jacobian: Vec::new() }
    }

    pub fn sup_norm(&self) -> f64 {
        self.mu.iter().map(|m| m.norm()).fold(0.0, f64::max)
    }

    /// Supremum over nodes with `|z| ≤ r_max`.
    pub fn sup_norm_within(&self, r_max: f64) -> f64 {
        let na = self.grid.n_angles;
        self.mu
            .iter()
            .enumerate()
            .filter(|(k, _)| self.grid.radii[k / na] <= r_max)
            .map(|(_, m)| m.norm())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "shape": [self.grid.n_radii(), self.grid.n_angles],
            "radii": self.grid.radii,
            "values": self.mu.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
        })
    }
}

/// Weights of the nonuniform three-point first derivative at `x[i]`,
/// one-sided at both ends.
fn radial_weights(x: &[f64], i: usize) -> ([usize; 3], [f64; 3]) {
    let n = x.len();
    let (a, b, c) = if i == 0 {
        (0, 1, 2)
    } else if i + 1 == n {
        (n - 3, n - 2, n - 1)
    } else {
        (i - 1, i, i + 1)
    };
    let (xa, xb, xc, x0) = (x[a], x[b], x[c], x[i]);
    // Derivatives of the Lagrange basis polynomials at x0.
    let wa = ((x0 - xb) + (x0 - xc)) / ((xa - xb) * (xa - xc));
    let wb = ((x0 - xa) + (x0 - xc)) / ((xb - xa) * (xb - xc));
    let wc = ((x0 - xa) + (x0 - xb)) / ((xc - xa) * (xc - xb));
    ([a, b, c], [wa, wb, wc])
}

/// `μ = ∂̄f/∂f` by finite differences: three-point in `r`, five-point
/// centered (periodic) in `φ`.
pub fn beltrami_of(map: &QCGridMap) -> Result<BeltramiField, QcError> {
    let g = &map.grid;
    if g.n_radii() < 3 {
        return Err(QcError::Parameter("need at least three rings".into()));
    }
    let na = g.n_angles;
    let dphi = std::f64::consts::TAU / na as f64;
    let out: Vec<(C, f64, f64)> = (0..g.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / na, k % na);
            let r = g.radii[i];
            let (idx, w) = radial_weights(&g.radii, i);
            let fr = map.value(idx[0], j) * w[0] + map.value(idx[1], j) * w[1] + map.value(idx[2], j) * w[2];
            let at = |d: isize| map.value(i, ((j as isize + d).rem_euclid(na as isize)) as usize);
            let fphi = (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * dphi);
            let e = C::from_polar(1.0, g.angle(j));
            let dz = 0.5 * e.conj() * (fr - C::i() * fphi / r);
            let dzb = 0.5 * e * (fr + C::i() * fphi / r);
            (dzb / dz, dz.norm(), dz.norm_sqr() - dzb.norm_sqr())
        })
        .collect();
    let mut mu = Vec::with_capacity(out.len());
    let mut dz_abs = Vec::with_capacity(out.len());
    let mut jac = Vec::with_capacity(out.len());
    for (k, (m, d, jc)) in out.into_iter().enumerate() {
        if !(m.norm() < 1.0) {
            return Err(QcError::NotQuasiconformal { ring: k / na, angle: k % na, modulus: m.norm() });
        }
        mu.push(m);
        dz_abs.push(d);
        jac.push(jc);
    }
    Ok(BeltramiField { grid: g.clone(), mu, dz_abs, jacobian: jac })
}

/// Dilatation of a composition: `(μ + ντ)/(1 + μ̄ντ)`.
pub fn beltrami_compose(mu_f: C, nu_at_image: C, tau: C) -> C {
    (mu_f + nu_at_image * tau) / (1.0 + mu_f.conj() * nu_at_image * tau)
}

/// Hyperbolic distance `2 artanh |p − q|/|1 − p̄q|`.
pub fn poincare_distance(p: C, q: C) -> f64 {
    let num = (p - q).norm();
    if num == 0.0 {
        return 0.0;
    }
    let den = (1.0 - p.conj() * q).norm();
    let x = num / den;
    // 1 − x² = (1 − |p|²)(1 − |q|²)/|1 − p̄q|², free of cancellation.
    let one_minus_x2 = (1.0 - p.norm_sqr()) * (1.0 - q.norm_sqr()) / (den * den);
    ((1.0 + x) * (1.0 + x) / one_minus_x2).ln()
}

#[derive(Clone, Debug, Serialize)]
pub struct BilipschitzReport {
    pub constant: f64,
    pub worst_pair: (C, C),
    pub pairs: usize,
}

/// Largest distortion `max(ratio, 1/ratio)` of Poincaré distances.
pub fn poincare_bilipschitz(map: &QCGridMap, pairs: &[(C, C)]) -> Result<BilipschitzReport, QcError> {
    for &(p, q) in pairs {
        if p.norm() > 0.99 + 1e-12 || q.norm() > 0.99 + 1e-12 {
            return Err(QcError::Parameter("pairs must lie in |z| ≤ 0.99".into()));
        }
    }
    let results: Result<Vec<(f64, usize)>, QcError> = pairs
        .par_iter()
        .enumerate()
        .map(|(k, &(p, q))| {
            let d = poincare_distance(p, q);
            if d == 0.0 {
                return Ok((1.0, k));
            }
            let (fp, fq) = (map.eval(p)?, map.eval(q)?);
            if !(fp.norm() < 1.0 && fq.norm() < 1.0) {
                return Err(QcError::OutsideDisk(fp.re, fp.im));
            }
            let ratio = poincare_distance(fp, fq) / d;
            Ok((ratio.max(1.0 / ratio), k))
        })
        .collect();
    let mut best = (1.0f64, 0usize);
    for (c, k) in results? {
        if c > best.0 {
            best = (c, k);
        }
    }
    let worst_pair = pairs.get(best.1).copied().unwrap_or_default();
    Ok(BilipschitzReport { constant: best.0, worst_pair, pairs: pairs.len() })
}

/// Discretized `|μ|²/(1 − |z|²) dxdy`. Node sectors touching the circle are
/// left out.
pub fn beltrami_carleson(field: &BeltramiField, disk: Arc<JordanCurve>) -> Result<Measure, QcError> {
    let g = &field.grid;
    let na = g.n_angles;
    let mut atoms = Vec::new();
    for i in 0..g.n_radii() {
        let Some(area) = g.node_area(i) else { continue };
        let r = g.radii[i];
        for j in 0..na {
            let w = field.mu[i * na + j].norm_sqr() / (1.0 - r * r) * area;
            if w > 0.0 {
                atoms.push(Atom::new(g.node(i, j), w));
            }
        }
    }
    Ok(Measure::new_trusted(disk, crate::measure::Side::Interior, atoms)?)
}

/// Discretized `λ∘φ(ζ)|∂φ(ζ)| dξdη` on the grid of `map`.
pub fn qc_transport<F: Fn(C) -> f64 + Sync>(
    map: &QCGridMap,
    field: &BeltramiField,
    density: F,
    disk: Arc<JordanCurve>,
) -> Result<Measure, QcError> {
    let g = &map.grid;
    if field.dz_abs.len() != g.len() {
        return Err(QcError::Parameter("field carries no |∂f| samples".into()));
    }
    let na = g.n_angles;
    let mut atoms = Vec::new();
    for i in 0..g.n_radii() {
        let Some(area) = g.node_area(i) else { continue };
        for j in 0..na {
            let k = i * na + j;
            let w = density(map.values[k]) * field.dz_abs[k] * area;
            if w > 0.0 {
                atoms.push(Atom::new(g.node(i, j), w));
            }
        }
    }
    Ok(Measure::new_trusted(disk, crate::measure::Side::Interior, atoms)?)
}

/// Discretized `λ dxdy` on the node sectors of `grid`.
pub fn grid_density_measure<F: Fn(C) -> f64>(grid: &PolarGrid, density: F, disk: Arc<JordanCurve>) -> Result<Measure, QcError> {
    let mut atoms = Vec::new();
    for i in 0..grid.n_radii() {
        let Some(area) = grid.node_area(i) else { continue };
        for j in 0..grid.n_angles {
            let z = grid.node(i, j);
            let w = density(z) * area;
            if w > 0.0 {
                atoms.push(Atom::new(z, w));
            }
        }
    }
    Ok(Measure::new_trusted(disk, crate::measure::Side::Interior, atoms)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcmap::homeo::Mobius;

    fn grid() -> PolarGrid {
        PolarGrid::clustered(32, 128)
    }

    #[test]
    fn identity_and_affine_dilatations() {
        let id = beltrami_of(&QCGridMap::identity(grid())).unwrap();
        assert!(id.sup_norm() < 1e-6, "{}", id.sup_norm());
        let aff = beltrami_of(&QCGridMap::affine(grid(), C::new(1.0, 0.0), C::new(0.2, 0.0))).unwrap();
        for m in &aff.mu {
            assert!((m - C::new(0.2, 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn non_quasiconformal_flagged() {
        let bad = QCGridMap::affine(grid(), C::new(0.3, 0.0), C::new(1.0, 0.0));
        assert!(matches!(beltrami_of(&bad), Err(QcError::NotQuasiconformal { .. })));
    }

    #[test]
    fn compose_examples() {
        let (mu, nu, one) = (C::new(0.2, 0.0), C::new(0.3, 0.0), C::new(1.0, 0.0));
        assert_eq!(beltrami_compose(mu, C::new(0.0, 0.0), one), mu);
        assert_eq!(beltrami_compose(C::new(0.0, 0.0), nu, one), nu);
        assert!((beltrami_compose(mu, nu, one) - C::new(0.5 / 1.06, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn compose_matches_chain_rule_on_grid() {
        // g ∘ f with f = z + 0.2 z̄ and g = w + 0.3 w̄.
        let (b1, b2) = (C::new(0.2, 0.0), C::new(0.3, 0.0));
        let f = |z: C| z + b1 * z.conj();
        let comp = QCGridMap::from_fn(grid(), super::super::QcKind::Sampled, |z| {
            let w = f(z);
            w + b2 * w.conj()
        });
        let mu = beltrami_of(&comp).unwrap();
        let expect = beltrami_compose(b1, b2, C::new(1.0, 0.0));
        for m in &mu.mu {
            assert!((m - expect).norm() < 1e-6);
        }
    }

    #[test]
    fn mobius_is_a_poincare_isometry() {
        let m = Mobius::new(C::new(0.4, 0.0), 0.0).unwrap();
        let map = QCGridMap::mobius(grid(), m);
        let pairs: Vec<(C, C)> = (0..200)
            .map(|k| {
                let t = k as f64;
                (C::from_polar(0.99 * ((t * 0.37).sin()).abs(), t), C::from_polar(0.99 * ((t * 0.91).cos()).abs(), 2.0 * t))
            })
            .collect();
        let r = poincare_bilipschitz(&map, &pairs).unwrap();
        assert!((r.constant - 1.0).abs() < 1e-10, "{}", r.constant);
    }

    #[test]
    fn zero_field_has_zero_measure() {
        let disk = Arc::new(crate::geometry::generate_curve(crate::geometry::CurveFamily::Circle, 256).unwrap());
        let f = BeltramiField::constant(grid(), C::new(0.0, 0.0));
        assert_eq!(beltrami_carleson(&f, disk).unwrap().len(), 0);
    }
}
