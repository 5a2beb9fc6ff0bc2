use std::sync::Arc;

use cm_core::confmap::{pull_back, push_forward, ConformalMap};
use cm_core::geometry::{generate_curve, CurveFamily};
use cm_core::measure::{carleson_norm, Atom, CarlesonGrid, Measure};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_map(rng: &mut ChaCha8Rng) -> ConformalMap {
    match rng.gen_range(0..3) {
        0 => ConformalMap::mobius(C::from_polar(rng.gen_range(0.0..0.8), rng.gen_range(0.0..std::f64::consts::TAU)), rng.gen_range(0.0..std::f64::consts::TAU)).unwrap(),
        1 => ConformalMap::polymap(rng.gen_range(0.0..0.45)).unwrap(),
        _ => ConformalMap::lens(rng.gen_range(0.3..0.95)).unwrap(),
    }
}

#[test]
fn unit_atom_under_half_mobius() {
    let disk = Arc::new(generate_curve(CurveFamily::Circle, 512).unwrap());
    let m = Measure::new(disk.clone(), vec![Atom::new(C::new(0.0, 0.0), 1.0)]).unwrap();
    let p = pull_back(&m, &ConformalMap::mobius(C::new(0.5, 0.0), 0.0).unwrap()).unwrap();
    let a = p.atoms()[0];
    assert!((a.z - C::new(-0.5, 0.0)).norm() < 1e-12);
    assert!((a.w - 0.75).abs() < 1e-12);
    // The extremal disk is D(−1, 1/2); radii spaced by under 1% bound the
    // grid bias.
    let grid = CarlesonGrid { centers: disk.samples().to_vec(), radii: cm_core::log_space(1e-3, 2.0, 1001) };
    let n = carleson_norm(&p, &grid).unwrap().norm;
    assert!((n - 1.5).abs() <= 0.02 * 1.5, "{n}");
}

#[test]
fn push_pull_round_trip_on_random_measures() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let map = random_map(&mut rng);
        let image = Arc::new(map.image_curve(256).unwrap());
        let atoms: Vec<Atom> = (0..1000)
            .map(|_| {
                let z = C::from_polar(0.98 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
                Atom::new(map.eval(z).unwrap(), rng.gen_range(0.0..1.0))
            })
            .collect();
        let m = Measure::new_trusted(image, cm_core::measure::Side::Interior, atoms).unwrap();
        let back = push_forward(&pull_back(&m, &map).unwrap(), &map).unwrap();
        for (a, b) in m.atoms().iter().zip(back.atoms()) {
            assert!((a.z - b.z).norm() < 1e-10 && (a.w - b.w).abs() < 1e-10 * a.w.max(1.0), "{:?} {a:?} {b:?}", map.kind());
        }
    }
}
