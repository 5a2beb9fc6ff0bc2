//! Independent closed-form oracles.

use std::sync::Arc;

use cm_core::discretize::{cartesian_disk_cells, discretize};
use cm_core::geometry::{generate_curve, CurveFamily};
use cm_core::measure::{carleson_norm, CarlesonGrid, Measure};

/// Area of `D(ζ, r) ∩ Δ` for `|ζ| = 1`, by the two-circle lens formula.
fn lens_area(r: f64) -> f64 {
    if r >= 2.0 {
        return std::f64::consts::PI;
    }
    r * r * (r / 2.0).acos() + (1.0 - r * r / 2.0).acos() - 0.5 * (r * r * (4.0 - r * r)).sqrt()
}

/// `sup_r A(r)/r` by golden-section search on `(0, 2]`.
fn lens_oracle() -> (f64, f64) {
    let f = |r: f64| lens_area(r) / r;
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.5, 2.0);
    for _ in 0..200 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let r = 0.5 * (a + b);
    (f(r), r)
}

#[test]
fn lens_area_limits() {
    assert!(lens_area(1e-4) / (std::f64::consts::PI * 1e-8 / 2.0) - 1.0 < 1e-3);
    assert!((lens_area(2.0) - std::f64::consts::PI).abs() < 1e-12);
    let (v, r) = lens_oracle();
    assert!((v - 1.620).abs() < 1e-3 && r > 1.7 && r < 1.9, "{v} at {r}");
}

#[test]
fn area_measure_norm_matches_lens_oracle() {
    let disk = Arc::new(generate_curve(CurveFamily::Circle, 256).unwrap());
    let m = Measure::new_trusted(disk.clone(), cm_core::measure::Side::Interior, discretize(&cartesian_disk_cells(512), |_| 1.0)).unwrap();
    let grid = CarlesonGrid::with_sizes(&disk, 256, 64, 1e-3);
    let got = carleson_norm(&m, &grid).unwrap();
    let (oracle, _) = lens_oracle();
    assert!(got.norm >= 1.55 && got.norm <= 1.63, "{}", got.norm);
    assert!((got.norm - oracle).abs() / oracle < 0.01, "{} vs {oracle}", got.norm);
}
