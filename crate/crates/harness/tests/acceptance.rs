//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::sync::Arc;
use std::time::Instant;

use cm_core::analysis::{
    a_infty_check, cocycle_residual, schwarzian, schwarzian_of_jet, ArcFamily, CircleFunction, Scheme, SubsetScheme,
};
use cm_core::confmap::{pull_back, push_forward, ConformalMap};
use cm_core::discretize::{cartesian_disk_cells, discretize};
use cm_core::geometry::{generate_curve, CurveFamily};
use cm_core::measure::{add, carleson_norm, restrict_to_collar, scale, Atom, CarlesonGrid, Measure, Side};
use cm_harness::{run, Config, Report};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);

fn metric(r: &Report, k: &str) -> f64 {
    r.metrics.get(k).copied().flatten().unwrap_or(f64::NAN)
}

fn random_point(rng: &mut ChaCha8Rng, r_max: f64) -> C {
    C::from_polar(r_max * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
}

fn c1_area_norm() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    pool.install(|| {
        let t = Instant::now();
        let disk = Arc::new(generate_curve(CurveFamily::Circle, 1024).unwrap());
        let m = Measure::new_trusted(disk.clone(), Side::Interior, discretize(&cartesian_disk_cells(512), |_| 1.0)).unwrap();
        let n = carleson_norm(&m, &CarlesonGrid::with_sizes(&disk, 256, 64, 1e-3)).unwrap().norm;
        let secs = t.elapsed().as_secs_f64();
        ((1.55..=1.63).contains(&n) && secs < 30.0, format!("norm {n:.5}, {secs:.2} s on one thread"))
    })
}

fn c2_mobius_pull_back() -> Outcome {
    let disk = Arc::new(generate_curve(CurveFamily::Circle, 512).unwrap());
    let m = Measure::new(disk.clone(), vec![Atom::new(C::new(0.0, 0.0), 1.0)]).unwrap();
    let p = pull_back(&m, &ConformalMap::mobius(C::new(0.5, 0.0), 0.0).unwrap()).unwrap();
    let a = p.atoms()[0];
    let grid = CarlesonGrid { centers: disk.samples().to_vec(), radii: cm_core::log_space(1e-3, 2.0, 1001) };
    let n = carleson_norm(&p, &grid).unwrap().norm;
    let ok = (a.z - C::new(-0.5, 0.0)).norm() < 1e-12 && (a.w - 0.75).abs() < 1e-12 && (n - 1.5).abs() <= 0.03;
    (ok, format!("atom ({:.3e}, {:.3e}) weight {:.15}, norm {n:.5}", a.z.re, a.z.im, a.w))
}

fn c3_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let map = match case % 3 {
            0 => ConformalMap::mobius(random_point(&mut rng, 0.8), rng.gen_range(0.0..std::f64::consts::TAU)).unwrap(),
            1 => ConformalMap::polymap(rng.gen_range(0.0..0.45)).unwrap(),
            _ => ConformalMap::lens(rng.gen_range(0.3..0.95)).unwrap(),
        };
        let image = Arc::new(map.image_curve(256).unwrap());
        let atoms: Vec<Atom> =
            (0..1000).map(|_| Atom::new(map.eval(random_point(&mut rng, 0.98)).unwrap(), rng.gen_range(0.0..1.0))).collect();
        let m = Measure::new_trusted(image, Side::Interior, atoms).unwrap();
        let back = push_forward(&pull_back(&m, &map).unwrap(), &map).unwrap();
        for (a, b) in m.atoms().iter().zip(back.atoms()) {
            worst = worst.max((a.z - b.z).norm()).max((a.w - b.w).abs());
        }
    }
    (worst < 1e-10, format!("max atomwise deviation {worst:.2e} over 100 x 1000 atoms"))
}

fn c4_schwarzian() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut mob, mut mob_fd, mut ka, mut kf) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let koebe = ConformalMap::koebe();
    for _ in 0..100 {
        let m = ConformalMap::mobius(random_point(&mut rng, 0.9), rng.gen_range(0.0..std::f64::consts::TAU)).unwrap();
        let z = random_point(&mut rng, 0.9);
        mob = mob.max(schwarzian_of_jet(&m.jet(z).unwrap()).norm());
        mob = mob.max(schwarzian(&m, z, Scheme::Analytic).unwrap().norm());
        mob_fd = mob_fd.max(schwarzian(&m, z, Scheme::FiniteDifference).unwrap().norm());
        let exact = -6.0 / ((1.0 - z * z) * (1.0 - z * z));
        ka = ka.max((schwarzian_of_jet(&koebe.jet(z).unwrap()) - exact).norm() / exact.norm());
        ka = ka.max((schwarzian(&koebe, z, Scheme::Analytic).unwrap() - exact).norm() / exact.norm());
        kf = kf.max((schwarzian(&koebe, z, Scheme::FiniteDifference).unwrap() - exact).norm() / exact.norm());
    }
    let p = schwarzian(&ConformalMap::polymap(0.25).unwrap(), C::new(0.0, 0.0), Scheme::Analytic).unwrap();
    let pe = (p - C::new(-0.375, 0.0)).norm();
    (
        mob < 1e-10 && ka < 1e-6 && kf < 1e-4 && pe < 1e-10,
        format!("mobius {mob:.1e} (fd {mob_fd:.1e}), koebe analytic {ka:.1e} / fd {kf:.1e}, polymap(0.25) at 0 off by {pe:.1e}"),
    )
}

fn c5_cocycle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let f = ConformalMap::mobius(random_point(&mut rng, 0.8), rng.gen_range(0.0..std::f64::consts::TAU)).unwrap();
        let g = ConformalMap::polymap(rng.gen_range(0.0..0.45)).unwrap();
        let z = random_point(&mut rng, 0.6);
        worst = worst.max(cocycle_residual(&f, &g, z).unwrap());
    }
    (worst < 1e-8, format!("max residual {worst:.2e} over 50 pairs"))
}

fn c6_collar(r: &Report) -> Outcome {
    let (seg, dens, prof) = (metric(r, "segment/min_deficit"), metric(r, "density/deficit_at_r"), metric(r, "density/profile_over_bound"));
    (
        seg >= 0.9 && dens < 0.2 && prof <= 1.0,
        format!("segment deficit >= {seg:.4} for r <= 0.1; density deficit {dens:.4} at 1e-3; max profile/(3 sqrt r) {prof:.3}"),
    )
}

fn vanishing_rows(r: &Report, maps: &[&str]) -> Outcome {
    let t = &r.tables["profiles"];
    let mut ok = true;
    let (mut min_slope, mut max_decay, mut rows) = (f64::INFINITY, 0.0f64, 0);
    for row in &t.rows {
        if !maps.contains(&row[0].as_str().unwrap()) {
            continue;
        }
        rows += 1;
        let (final_v, peak) = (row[3].as_f64().unwrap(), row[4].as_f64().unwrap());
        let decay = if peak > 0.0 { final_v / peak } else { 0.0 };
        let slope_ok = match row[2].as_f64() {
            Some(s) => {
                min_slope = min_slope.min(s);
                s >= 0.25
            }
            None => final_v == 0.0,
        };
        max_decay = max_decay.max(decay);
        ok &= slope_ok && decay < 0.1;
    }
    ok &= rows > 0;
    (ok, format!("{rows} measures; min fitted slope {min_slope:.3}, max final/peak {max_decay:.3}"))
}

fn c9_qc(r: &Report) -> Outcome {
    let s1 = metric(r, "s1/bilipschitz");
    let s2 = r.verdicts.get("s2/a_infty") == Some(&true);
    let change = metric(r, "transport/relative_change");
    (
        s1 < 5.0 && s2 && change <= 0.1,
        format!(
            "S1 constant {s1:.4}; S2 A-infinity {}; suite constant {:.4} -> {:.4} ({:.2}% change)",
            if s2 { "pass" } else { "fail" },
            metric(r, "transport/constant"),
            metric(r, "transport/constant_refined"),
            100.0 * change
        ),
    )
}

fn c10_weld(r: &Report, cfg: &Config) -> Outcome {
    let dev = metric(r, "circle/deviation");
    let (res, it) = (metric(r, "star/theodorsen_residual"), metric(r, "star/theodorsen_iterations"));
    let bmo: Vec<f64> = cfg.weld.ellipse_c.iter().map(|c| metric(r, &format!("ellipse({c})/bmo_log_derivative"))).collect();
    let dec = bmo.windows(2).all(|w| w[1] < w[0]);
    (
        dev < 1e-6 && res < 1e-8 && it <= 200.0 && dec,
        format!("circle deviation {dev:.1e}; star residual {res:.1e} in {it} iterations; ellipse BMO {bmo:.4?}"),
    )
}

fn c11_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let disk = Arc::new(generate_curve(CurveFamily::Circle, 128).unwrap());
    let grid = CarlesonGrid::with_sizes(&disk, 64, 24, 1e-3);
    let norm = |m: &Measure| carleson_norm(m, &grid).unwrap().norm;
    let random = |rng: &mut ChaCha8Rng| {
        let n = rng.gen_range(1..60);
        let atoms = (0..n).map(|_| Atom::new(random_point(rng, 0.999), rng.gen_range(0.0..10.0))).collect();
        Measure::new_trusted(disk.clone(), Side::Interior, atoms).unwrap()
    };
    let (mut hom, mut sub, mut res) = (0, 0, 0);
    for _ in 0..1000 {
        let m = random(&mut rng);
        let s2 = 2f64.powi(rng.gen_range(-8..8));
        let s = rng.gen_range(0.0..100.0);
        let base = norm(&m);
        if norm(&scale(&m, s2).unwrap()) != s2 * base || (norm(&scale(&m, s).unwrap()) - s * base).abs() > 1e-13 * s * base {
            hom += 1;
        }
        let m2 = random(&mut rng);
        if norm(&add(&m, &m2).unwrap()) > (base + norm(&m2)) * (1.0 + 1e-12) {
            sub += 1;
        }
        if norm(&restrict_to_collar(&m, rng.gen_range(0.0..0.5))) > base * (1.0 + 1e-12) {
            res += 1;
        }
    }
    (hom + sub + res == 0, format!("violations: homogeneity {hom}, subadditivity {sub}, restriction {res} (1000 cases each)"))
}

fn c12_negative(r: &Report, cfg: &Config) -> Outcome {
    let koch: Vec<f64> = cfg.neg.koch_levels.iter().map(|l| metric(r, &format!("koch({l})/chord_arc"))).collect();
    let koch_ok =
        cfg.neg.koch_levels.iter().zip(&koch).all(|(l, v)| ((v - (4f64 / 3.0).powi(*l as i32)) / (4f64 / 3.0).powi(*l as i32)).abs() <= 0.05);
    let poly: Vec<f64> = cfg.neg.polymap_c.iter().map(|c| metric(r, &format!("polymap({c})/constant"))).collect();
    let inc = poly.windows(2).all(|w| w[1] > w[0]);
    (koch_ok && inc, format!("koch chord-arc {koch:.4?}; polymap constants {poly:.4?}"))
}

fn c13_a_infty() -> Outcome {
    let n = 1024;
    let arcs = ArcFamily::for_a_infty(n).unwrap();
    let check = |f: &dyn Fn(f64) -> f64| a_infty_check(&CircleFunction::from_fn(n, f).unwrap(), &arcs, SubsetScheme::Both, 0.1).unwrap();
    let one = check(&|_| 1.0);
    let semi = check(&|t| if t < std::f64::consts::PI { 1.0 } else { 0.0 });
    let cos = check(&|t| 2.0 + t.cos());
    let w = &semi.worst;
    let witness = w.measure_fraction >= 0.5 && w.weight_fraction < 0.1;
    (
        one.pass && !semi.pass && witness && cos.pass,
        format!(
            "1: {}; semicircle: {} (witness arc at {:.3} length {:.3}, {} with |E|/|I| = {:.2}, w(E)/w(I) = {:.2}); 2 + cos: {}",
            one.pass, semi.pass, w.arc_start, w.arc_length, w.subset, w.measure_fraction, w.weight_fraction, cos.pass
        ),
    )
}

fn main() {
    let cfg = Config::default();
    let exp = |id: &str| run(id, &cfg).unwrap_or_else(|e| panic!("{id}: {e}"));
    let (collar, vpull, vpush, qc, weld, neg) =
        (exp("EXP-COLLAR"), exp("EXP-VPULL"), exp("EXP-VPUSH"), exp("EXP-QC"), exp("EXP-WELD"), exp("EXP-NEG"));
    let results: Vec<Outcome> = vec![
        c1_area_norm(),
        c2_mobius_pull_back(),
        c3_round_trip(),
        c4_schwarzian(),
        c5_cocycle(),
        c6_collar(&collar),
        vanishing_rows(&vpull, &["polymap(0.3)"]),
        vanishing_rows(&vpush, &["polymap(0.3)", "lens(0.8)", "star(0.1,3)"]),
        c9_qc(&qc),
        c10_weld(&weld, &cfg),
        c11_properties(),
        c12_negative(&neg, &cfg),
        c13_a_infty(),
    ];
    let mut failed = 0;
    for (k, (ok, detail)) in results.iter().enumerate() {
        println!("criterion {:>2}: {} - {detail}", k + 1, if *ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
