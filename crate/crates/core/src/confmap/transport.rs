use std::sync::Arc;

use rayon::prelude::*;

use super::maps::{ConformalMap, Direction};
use super::MapError;
use crate::geometry::{generate_curve, CurveFamily};
use crate::measure::{Atom, Measure, Side};

fn side_of(map: &ConformalMap) -> Side {
    match map.direction() {
        Direction::Disk => Side::Interior,
        Direction::Exterior => Side::Exterior,
    }
}

/// `(q, w) ↦ (φ⁻¹(q), w / |φ′(φ⁻¹(q))|)`: a measure on `φ(Δ)` to one on `Δ`.
pub fn pull_back(m: &Measure, map: &ConformalMap) -> Result<Measure, MapError> {
    let n = m.domain().len();
    let disk = Arc::new(generate_curve(CurveFamily::Circle, n)?);
    let atoms: Result<Vec<Atom>, MapError> = m
        .atoms()
        .par_iter()
        .map(|a| {
            let z = map.invert(a.z)?;
            let d = map.derivative(z)?.norm();
            Ok(Atom::new(z, a.w / d))
        })
        .collect();
    Ok(Measure::new_trusted(disk, side_of(map), atoms?)?)
}

/// `(p, w) ↦ (φ(p), w·|φ′(p)|)`: a measure on `Δ` to one on `φ(Δ)`.
pub fn push_forward(m: &Measure, map: &ConformalMap) -> Result<Measure, MapError> {
    let image = Arc::new(map.image_curve(m.domain().len())?);
    push_forward_onto(m, map, image)
}

/// [`push_forward`] onto a caller-supplied image curve.
pub fn push_forward_onto(
    m: &Measure,
    map: &ConformalMap,
    image: Arc<crate::geometry::JordanCurve>,
) -> Result<Measure, MapError> {
    let open = |z: num_complex::Complex64| match map.direction() {
        Direction::Disk => z.norm() < 1.0,
        Direction::Exterior => z.norm() > 1.0,
    };
    let atoms: Result<Vec<Atom>, MapError> = m
        .atoms()
        .par_iter()
        .map(|a| {
            if !open(a.z) {
                return Err(MapError::OutsideDomain(a.z.re, a.z.im));
            }
            let j = map.jet_unchecked(a.z);
            Ok(Atom::new(j.f, a.w * j.d1.norm()))
        })
        .collect();
    Ok(Measure::new_trusted(image, side_of(map), atoms?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{carleson_norm, CarlesonGrid};
    use num_complex::Complex64 as C;

    #[test]
    fn mobius_pull_back_of_unit_atom() {
        let disk = Arc::new(generate_curve(CurveFamily::Circle, 256).unwrap());
        let m = Measure::new(disk.clone(), vec![Atom::new(C::new(0.0, 0.0), 1.0)]).unwrap();
        let phi = ConformalMap::mobius(C::new(0.5, 0.0), 0.0).unwrap();
        let p = pull_back(&m, &phi).unwrap();
        let a = p.atoms()[0];
        assert!((a.z - C::new(-0.5, 0.0)).norm() < 1e-12);
        assert!((a.w - 0.75).abs() < 1e-12);
        let mut grid = CarlesonGrid::default_for(&disk);
        grid.radii.push(0.5);
        let n = carleson_norm(&p, &grid).unwrap().norm;
        assert!((n - 1.5).abs() < 1e-12);
        let back = push_forward(&p, &phi).unwrap();
        assert!((back.atoms()[0].z).norm() < 1e-12);
        assert!((back.atoms()[0].w - 1.0).abs() < 1e-12);
    }

    #[test]
    fn push_unit_atom_at_minus_half() {
        let disk = Arc::new(generate_curve(CurveFamily::Circle, 256).unwrap());
        let m = Measure::new(disk, vec![Atom::new(C::new(-0.5, 0.0), 1.0)]).unwrap();
        let phi = ConformalMap::mobius(C::new(0.5, 0.0), 0.0).unwrap();
        let p = push_forward(&m, &phi).unwrap();
        assert!(p.atoms()[0].z.norm() < 1e-15);
        assert!((p.atoms()[0].w - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn polymap_fixes_origin_atom() {
        let phi = ConformalMap::polymap(0.3).unwrap();
        let dom = Arc::new(phi.image_curve(256).unwrap());
        let m = Measure::new(dom, vec![Atom::new(C::new(0.0, 0.0), 1.0)]).unwrap();
        let p = pull_back(&m, &phi).unwrap();
        assert_eq!(p.atoms()[0], Atom::new(C::new(0.0, 0.0), 1.0));
    }
}
