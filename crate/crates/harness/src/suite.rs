//! Fixed measure libraries shared by the experiments.

use std::sync::Arc;

use cm_core::confmap::ConformalMap;
use cm_core::discretize::{discretize, Cell};
use cm_core::geometry::JordanCurve;
use cm_core::measure::{Atom, Measure, Side};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::HarnessError;

type C = Complex64;
pub type Density = Arc<dyn Fn(C) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum MemberKind {
    /// Absolutely continuous, density in disk coordinates.
    Density(Density),
    /// Unit linear density along `[0, 1)` with this many atoms.
    Segment(usize),
    Atoms(Vec<Atom>),
}

#[derive(Clone)]
pub struct Member {
    pub name: String,
    pub kind: MemberKind,
}

fn density<F: Fn(C) -> f64 + Send + Sync + 'static>(name: &str, f: F) -> Member {
    Member { name: name.to_string(), kind: MemberKind::Density(Arc::new(f)) }
}

/// `(1 − |z|²)^p` on the disk.
pub fn boundary_power(p: f64) -> Density {
    Arc::new(move |z: C| (1.0 - z.norm_sqr()).max(f64::MIN_POSITIVE).powf(p))
}

fn bump(center: C, radius: f64) -> impl Fn(C) -> f64 + Send + Sync {
    move |z: C| {
        let s = (z - center).norm() / radius;
        if s < 1.0 {
            (1.0 - s * s).powi(2)
        } else {
            0.0
        }
    }
}

/// Area, boundary powers, a bump, point masses and a seeded atom cloud.
pub fn vanishing_suite(seed: u64) -> Vec<Member> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cloud: Vec<Atom> = (0..200)
        .map(|_| {
            let z = C::from_polar(0.8 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
            Atom::new(z, rng.gen_range(0.0..1e-2))
        })
        .collect();
    let p = boundary_power(-0.5);
    let q = boundary_power(-0.25);
    vec![
        density("area", |_| 1.0),
        density("boundary_power_-0.5", move |z| p(z)),
        density("boundary_power_-0.25", move |z| q(z)),
        density("bump", bump(C::new(0.2, 0.1), 0.3)),
        Member {
            name: "point_masses".into(),
            kind: MemberKind::Atoms(vec![
                Atom::new(C::new(0.0, 0.0), 1.0),
                Atom::new(C::new(0.5, 0.0), 0.5),
                Atom::new(C::new(-0.3, 0.6), 0.25),
            ]),
        },
        Member { name: "atom_cloud".into(), kind: MemberKind::Atoms(cloud) },
    ]
}

/// The vanishing suite plus the (non-vanishing) segment measure.
pub fn bounded_suite(seed: u64, segment_atoms: usize) -> Vec<Member> {
    let mut s = vanishing_suite(seed);
    s.push(Member { name: "segment".into(), kind: MemberKind::Segment(segment_atoms) });
    s
}

fn segment_atoms(n: usize) -> Vec<Atom> {
    let h = 1.0 / n as f64;
    (0..n).map(|k| Atom::new(C::new((k as f64 + 0.5) * h, 0.0), h)).collect()
}

/// The member as a measure on the unit disk.
pub fn disk_measure(m: &Member, cells: &[Cell], disk: Arc<JordanCurve>) -> Result<Measure, HarnessError> {
    let atoms = match &m.kind {
        MemberKind::Density(f) => discretize(cells, |z| f(z)),
        MemberKind::Segment(n) => segment_atoms(*n),
        MemberKind::Atoms(a) => a.clone(),
    };
    Ok(Measure::new_trusted(disk, Side::Interior, atoms)?)
}

/// The member carried to `φ(Δ)`: densities pick up `|φ′|²`, the segment
/// `|φ′|`, point masses keep their weight.
pub fn image_measure(
    m: &Member,
    cells: &[Cell],
    map: &ConformalMap,
    image: Arc<JordanCurve>,
) -> Result<Measure, HarnessError> {
    use rayon::prelude::*;
    let jet = |z: C| map.jet(z).map_err(HarnessError::from);
    let atoms: Result<Vec<Atom>, HarnessError> = match &m.kind {
        MemberKind::Density(f) => cells
            .par_iter()
            .filter_map(|c| {
                let w = f(c.center) * c.area;
                (w > 0.0).then_some(c)
            })
            .map(|c| {
                let j = jet(c.center)?;
                Ok(Atom::new(j.f, f(c.center) * c.area * j.d1.norm_sqr()))
            })
            .collect(),
        MemberKind::Segment(n) => segment_atoms(*n)
            .into_par_iter()
            .map(|a| {
                let j = jet(a.z)?;
                Ok(Atom::new(j.f, a.w * j.d1.norm()))
            })
            .collect(),
        MemberKind::Atoms(list) => list.iter().map(|a| Ok(Atom::new(map.eval(a.z)?, a.w))).collect(),
    };
    Ok(Measure::new_trusted(image, Side::Interior, atoms?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cm_core::discretize::PolarCells;
    use cm_core::geometry::{generate_curve, CurveFamily};

    #[test]
    fn suites_are_seeded() {
        let a = vanishing_suite(4);
        let b = vanishing_suite(4);
        let c = vanishing_suite(5);
        let atoms = |s: &[Member]| match &s[5].kind {
            MemberKind::Atoms(v) => v.clone(),
            _ => unreachable!(),
        };
        assert_eq!(atoms(&a), atoms(&b));
        assert_ne!(atoms(&a), atoms(&c));
        assert_eq!(bounded_suite(0, 10).len(), a.len() + 1);
    }

    #[test]
    fn identity_image_matches_disk_measure() {
        let disk = Arc::new(generate_curve(CurveFamily::Circle, 256).unwrap());
        let cells = PolarCells { min_scale: 1e-2, ..Default::default() }.disk_cells();
        for m in bounded_suite(0, 100) {
            let a = disk_measure(&m, &cells, disk.clone()).unwrap();
            let b = image_measure(&m, &cells, &ConformalMap::identity(), disk.clone()).unwrap();
            assert_eq!(a.atoms(), b.atoms(), "{}", m.name);
        }
    }

    #[test]
    fn area_of_disk() {
        let disk = Arc::new(generate_curve(CurveFamily::Circle, 256).unwrap());
        let cells = PolarCells { min_scale: 1e-2, ..Default::default() }.disk_cells();
        let m = disk_measure(&vanishing_suite(0)[0], &cells, disk).unwrap();
        assert!((m.total_mass() - std::f64::consts::PI).abs() < 1e-3);
    }
}
