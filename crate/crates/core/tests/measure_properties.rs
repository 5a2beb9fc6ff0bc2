//! Randomized invariants of the Carleson sweep.

use std::sync::Arc;

use cm_core::geometry::{generate_curve, CurveFamily, JordanCurve};
use cm_core::measure::{add, carleson_norm, restrict_to_collar, scale, Atom, CarlesonGrid, Measure, Side};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn disk() -> Arc<JordanCurve> {
    Arc::new(generate_curve(CurveFamily::Circle, 128).unwrap())
}

fn grid(d: &JordanCurve) -> CarlesonGrid {
    CarlesonGrid::with_sizes(d, 64, 24, 1e-3)
}

fn atoms(max: usize) -> impl Strategy<Value = Vec<Atom>> {
    prop::collection::vec((0.0f64..0.999, 0.0f64..std::f64::consts::TAU, 0.0f64..10.0), 1..max)
        .prop_map(|v| v.into_iter().map(|(r, t, w)| Atom::new(C::from_polar(r, t), w)).collect())
}

fn measure(d: &Arc<JordanCurve>, a: Vec<Atom>) -> Measure {
    Measure::new_trusted(d.clone(), Side::Interior, a).unwrap()
}

fn norm(m: &Measure, g: &CarlesonGrid) -> f64 {
    carleson_norm(m, g).unwrap().norm
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn homogeneity_power_of_two_is_exact(a in atoms(60), k in -8i32..8) {
        let d = disk();
        let g = grid(&d);
        let m = measure(&d, a);
        let s = 2f64.powi(k);
        prop_assert_eq!(norm(&scale(&m, s).unwrap(), &g), s * norm(&m, &g));
    }

    #[test]
    fn homogeneity_general_scalar(a in atoms(60), s in 0.0f64..100.0) {
        let d = disk();
        let g = grid(&d);
        let m = measure(&d, a);
        let (lhs, rhs) = (norm(&scale(&m, s).unwrap(), &g), s * norm(&m, &g));
        prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn subadditivity(a in atoms(60), b in atoms(60)) {
        let d = disk();
        let g = grid(&d);
        let (m1, m2) = (measure(&d, a), measure(&d, b));
        let sum = add(&m1, &m2).unwrap();
        prop_assert!(norm(&sum, &g) <= (norm(&m1, &g) + norm(&m2, &g)) * (1.0 + 1e-12));
    }

    #[test]
    fn restriction_is_monotone(a in atoms(60), r in 0.0f64..0.5) {
        let d = disk();
        let g = grid(&d);
        let m = measure(&d, a);
        prop_assert!(norm(&restrict_to_collar(&m, r), &g) <= norm(&m, &g) * (1.0 + 1e-12));
    }

    #[test]
    fn refined_grid_never_lowers_the_norm(a in atoms(60)) {
        let d = disk();
        let g = grid(&d);
        let m = measure(&d, a);
        prop_assert!(norm(&m, &g.refined(&d)) >= norm(&m, &g) - 1e-12);
    }

    #[test]
    fn norm_is_rotation_covariant(a in atoms(30), k in 0usize..128) {
        // Rotating atoms by a sample spacing permutes the grid centers.
        let d = disk();
        let g = CarlesonGrid { centers: d.samples().to_vec(), radii: cm_core::log_space(1e-3, 2.0, 24) };
        let m = measure(&d, a.clone());
        let rot = C::from_polar(1.0, std::f64::consts::TAU * k as f64 / 128.0);
        let r = measure(&d, a.iter().map(|x| Atom::new(x.z * rot, x.w)).collect());
        let (n1, n2) = (norm(&m, &g), norm(&r, &g));
        prop_assert!((n1 - n2).abs() <= 1e-9 * n1.max(1.0));
    }
}
