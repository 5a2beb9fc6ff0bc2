//! The experiment registry.

use std::sync::Arc;
use std::time::Instant;

use cm_core::analysis::{a_infty_check, bmo_norm, ArcFamily, CircleFunction, SubsetScheme};
use cm_core::confmap::{
    pull_back, push_forward_onto, theodorsen_map, welding, welding_radius, ConformalMap, MapKind, RadiusFunction,
};
use cm_core::discretize::{Cell, PolarCells};
use cm_core::geometry::{ahlfors_constant, chord_arc_constant, chord_arc_ratio, generate_curve, CurveFamily, JordanCurve};
use cm_core::measure::{carleson_norm, centers_along, collar_deficit, vanishing_profile, CarlesonGrid, Measure};
use cm_core::qcmap::{
    beltrami_carleson, beltrami_of, douady_earle, grid_density_measure, poincare_bilipschitz, qc_transport,
    CircleHomeomorphism, DeOptions, PolarGrid,
};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;

use crate::config::{Config, MapSpec};
use crate::report::{Report, Table};
use crate::suite::{bounded_suite, boundary_power, disk_measure, image_measure, vanishing_suite, Member, MemberKind};
use crate::verdict::{boundedness_verdict, vanishing_verdict};
use crate::HarnessError;

pub const REGISTRY: [&str; 8] =
    ["EXP-Z1", "EXP-Z2", "EXP-VPULL", "EXP-VPUSH", "EXP-COLLAR", "EXP-QC", "EXP-WELD", "EXP-NEG"];

type Res<T> = Result<T, HarnessError>;

/// Runs one experiment. The report is a function of `cfg` alone.
pub fn run(id: &str, cfg: &Config) -> Res<Report> {
    cfg.validate()?;
    let start = Instant::now();
    let mut rep = Report::new(id, cfg.hash(), cfg.seed);
    let mut ctx = Ctx::new(cfg, &mut rep);
    match id {
        "EXP-Z1" => transport_bounds(&mut ctx, Dir::Pull)?,
        "EXP-Z2" => transport_bounds(&mut ctx, Dir::Push)?,
        "EXP-VPULL" => vanishing(&mut ctx, Dir::Pull)?,
        "EXP-VPUSH" => vanishing(&mut ctx, Dir::Push)?,
        "EXP-COLLAR" => collar(&mut ctx)?,
        "EXP-QC" => qc(&mut ctx)?,
        "EXP-WELD" => weld(&mut ctx)?,
        "EXP-NEG" => negative(&mut ctx)?,
        other => return Err(HarnessError::UnknownExperiment(other.to_string())),
    }
    ctx.close();
    rep.finish();
    rep.runtime = start.elapsed().as_secs_f64();
    Ok(rep)
}

/// Runs several experiments concurrently; results come back in input order.
pub fn run_many(ids: &[String], cfg: &Config) -> Vec<Res<Report>> {
    ids.par_iter().map(|id| run(id, cfg)).collect()
}

#[derive(Clone, Copy, PartialEq)]
enum Dir {
    Pull,
    Push,
}

struct Ctx<'a> {
    cfg: &'a Config,
    rep: &'a mut Report,
    disk: Arc<JordanCurve>,
    /// Worst `refined − coarse` norm difference seen by the audit.
    audit_worst: f64,
    audited: usize,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a Config, rep: &'a mut Report) -> Self {
        let disk = Arc::new(generate_curve(CurveFamily::Circle, cfg.curve_samples).expect("circle"));
        Ctx { cfg, rep, disk, audit_worst: f64::INFINITY, audited: 0 }
    }

    fn grid(&self, curve: &JordanCurve) -> CarlesonGrid {
        let g = &self.cfg.grid;
        CarlesonGrid::with_sizes(curve, g.centers, g.radii, g.r_min_rel)
    }

    /// Carleson norm on `grid`, re-run on the doubled grid for the audit.
    fn norm(&mut self, m: &Measure, grid: &CarlesonGrid) -> Res<f64> {
        let coarse = carleson_norm(m, grid)?.norm;
        let fine = carleson_norm(m, &grid.refined(m.domain()))?.norm;
        self.audit_worst = self.audit_worst.min(fine - coarse);
        self.audited += 1;
        Ok(coarse)
    }

    fn close(self) {
        if self.audited > 0 {
            let slack = self.cfg.thresholds.refinement_slack;
            self.rep.metric("refinement_audit/min_difference", self.audit_worst);
            self.rep.metric("refinement_audit/norms", self.audited as f64);
            self.rep.verdict("refinement_audit", self.audit_worst >= -slack);
        }
    }
}

fn refine_cells(c: &PolarCells) -> PolarCells {
    PolarCells { aspect: c.aspect / 2.0, min_scale: c.min_scale / 2.0, ..*c }
}

fn build_map(cfg: &Config, spec: &MapSpec) -> Res<ConformalMap> {
    spec.build(&cfg.weld.theodorsen())
}

/// Measure on the source side and its image under the transport.
fn transported(
    dir: Dir,
    member: &Member,
    cells: &[Cell],
    map: &ConformalMap,
    disk: &Arc<JordanCurve>,
    image: &Arc<JordanCurve>,
) -> Res<(Measure, Measure)> {
    Ok(match dir {
        Dir::Pull => {
            let om = image_measure(member, cells, map, image.clone())?;
            let pb = pull_back(&om, map)?;
            (om, pb)
        }
        Dir::Push => {
            let m = disk_measure(member, cells, disk.clone())?;
            let pf = push_forward_onto(&m, map, image.clone())?;
            (m, pf)
        }
    })
}

/// Largest transported/input norm ratio over `suite` for one map.
fn suite_constant(
    ctx: &mut Ctx,
    dir: Dir,
    suite: &[Member],
    cells: &[Cell],
    map: &ConformalMap,
    image: &Arc<JordanCurve>,
    refine_grid: bool,
    mut row: impl FnMut(&str, f64, f64, f64),
) -> Res<f64> {
    let disk = ctx.disk.clone();
    let (mut dg, mut og) = (ctx.grid(&disk), ctx.grid(image));
    if refine_grid {
        dg = dg.refined(&disk);
        og = og.refined(image);
    }
    let (src_grid, dst_grid) = match dir {
        Dir::Pull => (&og, &dg),
        Dir::Push => (&dg, &og),
    };
    let mut best = 0.0f64;
    for member in suite {
        let (src, dst) = transported(dir, member, cells, map, &disk, image)?;
        let (a, b) = if refine_grid {
            (carleson_norm(&src, src_grid)?.norm, carleson_norm(&dst, dst_grid)?.norm)
        } else {
            (ctx.norm(&src, src_grid)?, ctx.norm(&dst, dst_grid)?)
        };
        let ratio = if a > 0.0 { b / a } else { 0.0 };
        row(&member.name, a, b, ratio);
        best = best.max(ratio);
    }
    Ok(best)
}

/// EXP-Z1 / EXP-Z2: suite constant of the pull-back or push-forward and its
/// stability under one refinement of cells and grid.
fn transport_bounds(ctx: &mut Ctx, dir: Dir) -> Res<()> {
    let cfg = ctx.cfg;
    let specs = match dir {
        Dir::Pull => &cfg.z1.maps,
        Dir::Push => &cfg.z2.maps,
    };
    let cells = cfg.cells.disk_cells();
    let fine_cells = refine_cells(&cfg.cells).disk_cells();
    let suite = bounded_suite(cfg.seed, cfg.suite_segment_atoms);
    let fine_suite = bounded_suite(cfg.seed, 2 * cfg.suite_segment_atoms);
    let mut table = Table::new(&["map", "member", "input_norm", "transported_norm", "ratio"]);
    let mut consts = Table::new(&["map", "coarse", "fine", "relative_change", "ahlfors_constant", "bounded"]);
    for spec in specs {
        let label = spec.label();
        let map = build_map(cfg, spec)?;
        let image = Arc::new(map.image_curve(cfg.curve_samples)?);
        let coarse = suite_constant(ctx, dir, &suite, &cells, &map, &image, false, |name, a, b, r| {
            table.push(vec![label.clone().into(), name.into(), a.into(), b.into(), r.into()])
        })?;
        let fine = suite_constant(ctx, dir, &fine_suite, &fine_cells, &map, &image, true, |_, _, _, _| {})?;
        let v = boundedness_verdict(coarse, fine, &cfg.thresholds);
        let og = ctx.grid(&image);
        let ahlfors = ahlfors_constant(&image, &og.centers, &og.radii)?.constant;
        consts.push(vec![
            label.clone().into(),
            coarse.into(),
            fine.into(),
            v.relative_change.into(),
            ahlfors.into(),
            v.pass.into(),
        ]);
        ctx.rep.metric(format!("{label}/constant"), coarse);
        ctx.rep.metric(format!("{label}/constant_refined"), fine);
        ctx.rep.metric(format!("{label}/ahlfors_constant"), ahlfors);
        ctx.rep.verdict(format!("{label}/bounded"), v.pass);
    }
    ctx.rep.tables.insert("ratios".into(), table);
    ctx.rep.tables.insert("constants".into(), consts);
    Ok(())
}

/// EXP-VPULL / EXP-VPUSH: every vanishing-suite member stays vanishing.
fn vanishing(ctx: &mut Ctx, dir: Dir) -> Res<()> {
    let cfg = ctx.cfg;
    let specs = match dir {
        Dir::Pull => &cfg.vpull.maps,
        Dir::Push => &cfg.vpush.maps,
    };
    let cells = cfg.cells.disk_cells();
    let suite = vanishing_suite(cfg.seed);
    let mut table = Table::new(&["map", "member", "slope", "final", "peak", "input_vanishing", "vanishing"]);
    for spec in specs {
        let label = spec.label();
        let map = build_map(cfg, spec)?;
        let image = Arc::new(map.image_curve(cfg.curve_samples)?);
        let (dg, og) = (ctx.grid(&ctx.disk), ctx.grid(&image));
        let (src_grid, dst_grid) = match dir {
            Dir::Pull => (&og, &dg),
            Dir::Push => (&dg, &og),
        };
        for member in &suite {
            let (src, dst) = transported(dir, member, &cells, &map, &ctx.disk, &image)?;
            let input = vanishing_verdict(&vanishing_profile(&src, src_grid)?.entries, &cfg.thresholds);
            let profile = vanishing_profile(&dst, dst_grid)?.entries;
            let v = vanishing_verdict(&profile, &cfg.thresholds);
            ctx.norm(&dst, dst_grid)?;
            let key = format!("{label}/{}", member.name);
            table.push(vec![
                label.clone().into(),
                member.name.clone().into(),
                v.slope.map_or(Value::Null, Value::from),
                v.final_value.into(),
                v.peak.into(),
                input.pass.into(),
                v.pass.into(),
            ]);
            ctx.rep.metric(format!("{key}/slope"), v.slope.unwrap_or(f64::NAN));
            ctx.rep.metric(format!("{key}/final_over_peak"), if v.peak > 0.0 { v.final_value / v.peak } else { 0.0 });
            ctx.rep.verdict(format!("{key}/vanishing"), v.pass);
            ctx.rep.profiles.insert(key, profile);
        }
    }
    ctx.rep.tables.insert("profiles".into(), table);
    Ok(())
}

/// EXP-COLLAR: `‖μ − μ_r‖*` for a non-vanishing segment and a vanishing
/// boundary-power density.
fn collar(ctx: &mut Ctx) -> Res<()> {
    let cfg = ctx.cfg;
    let (t, c) = (&cfg.thresholds, &cfg.collar);
    let disk = ctx.disk.clone();
    let (lo, hi, n) = c.carleson_radii;
    let grid = CarlesonGrid { centers: centers_along(&disk, c.centers), radii: cm_core::log_space(lo, hi, n) };
    let segment = Member { name: "segment".into(), kind: MemberKind::Segment(c.segment_atoms) };
    let seg = disk_measure(&segment, &[], disk.clone())?;
    let dens = cm_core::measure::Measure::new_trusted(
        disk.clone(),
        cm_core::measure::Side::Interior,
        cm_core::discretize::discretize(&c.cells.disk_cells(), |z| boundary_power(c.density_exponent)(z)),
    )?;
    let mut table = Table::new(&["r", "segment_deficit", "density_deficit"]);
    let ds = collar_deficit(&seg, &c.collar_radii, &grid)?;
    let dd = collar_deficit(&dens, &c.collar_radii, &grid)?;
    let mut seg_ok = true;
    let mut dens_at = None;
    for ((r, a), (_, b)) in ds.iter().zip(&dd) {
        table.push(vec![(*r).into(), (*a).into(), (*b).into()]);
        if *r <= t.collar_nonvanishing_r * (1.0 + 1e-12) {
            seg_ok &= *a >= t.collar_deficit_min;
        }
        if (*r - t.collar_density_r).abs() <= 1e-12 * t.collar_density_r {
            dens_at = Some(*b);
        }
    }
    let dens_at = match dens_at {
        Some(v) => v,
        None => collar_deficit(&dens, &[t.collar_density_r], &grid)?[0].1,
    };
    let (sn, dn) = (ctx.norm(&seg, &grid)?, ctx.norm(&dens, &grid)?);
    ctx.rep.metric("segment/norm", sn);
    ctx.rep.metric("density/norm", dn);
    ctx.rep.metric("segment/min_deficit", ds.iter().filter(|p| p.0 <= t.collar_nonvanishing_r).map(|p| p.1).fold(f64::INFINITY, f64::min));
    ctx.rep.metric("density/deficit_at_r", dens_at);
    ctx.rep.verdict("segment/non_vanishing", seg_ok);
    ctx.rep.verdict("density/deficit_small", dens_at < t.collar_density_deficit_max);

    let (plo, phi, pn) = c.profile_radii;
    let pgrid = CarlesonGrid { centers: grid.centers.clone(), radii: cm_core::log_space(plo, phi, pn) };
    let profile = vanishing_profile(&dens, &pgrid)?.entries;
    let worst = profile.iter().map(|(r, v)| v / (t.profile_sqrt_coeff * r.sqrt())).fold(0.0, f64::max);
    ctx.rep.metric("density/profile_over_bound", worst);
    ctx.rep.verdict("density/profile_sqrt_bound", worst <= 1.0);

    let seg_profile = vanishing_profile(&seg, &grid)?.entries;
    let dens_profile = vanishing_profile(&dens, &grid)?.entries;
    ctx.rep.verdict("segment/profile_not_vanishing", !vanishing_verdict(&seg_profile, t).pass);
    ctx.rep.verdict("density/profile_vanishing", vanishing_verdict(&dens_profile, t).pass);
    ctx.rep.profiles.insert("segment".into(), seg_profile);
    ctx.rep.profiles.insert("density".into(), dens_profile);
    ctx.rep.profiles.insert("segment_deficit".into(), ds);
    ctx.rep.profiles.insert("density_deficit".into(), dd);
    ctx.rep.tables.insert("deficits".into(), table);
    Ok(())
}

/// Seeded point pairs in `|z| ≤ 0.95`: half independent, half close.
fn poincare_pairs(seed: u64, count: usize) -> Vec<(C, C)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5153);
    let point = |rng: &mut ChaCha8Rng| C::from_polar(0.95 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
    (0..count)
        .map(|k| {
            let p = point(&mut rng);
            let q = if k % 2 == 0 {
                point(&mut rng)
            } else {
                let d = 10f64.powf(rng.gen_range(-2.0..-0.5));
                let q = p + C::from_polar(d, rng.gen_range(0.0..std::f64::consts::TAU));
                if q.norm() > 0.95 {
                    q * (0.95 / q.norm())
                } else {
                    q
                }
            };
            (p, q)
        })
        .collect()
}

/// EXP-QC: Douady–Earle extension of `θ + amp·sin θ`, its (S1)/(S2)
/// certificates and the transported suite constant.
fn qc(ctx: &mut Ctx) -> Res<()> {
    let cfg = ctx.cfg;
    let (t, q) = (&cfg.thresholds, &cfg.qc);
    let h = CircleHomeomorphism::sine(q.amp, q.homeo_samples)?;
    let disk = ctx.disk.clone();
    let (lo, hi, n) = q.carleson_radii;
    let grid = CarlesonGrid { centers: centers_along(&disk, q.centers), radii: cm_core::log_space(lo, hi, n) };

    let deriv = CircleFunction::new(h.derivative_samples().to_vec())?;
    let s2 = a_infty_check(&deriv, &ArcFamily::for_a_infty(deriv.len())?, SubsetScheme::Both, t.a_infty_beta)?;
    ctx.rep.metric("s2/min_weight_fraction", s2.min_weight_fraction);
    ctx.rep.metric("s2/c1", s2.c1);
    ctx.rep.metric("s2/c2", s2.c2);
    ctx.rep.verdict("s2/a_infty", s2.pass);

    let densities: Vec<(String, crate::suite::Density)> = vanishing_suite(cfg.seed)
        .into_iter()
        .filter_map(|m| match m.kind {
            MemberKind::Density(f) => Some((m.name, f)),
            _ => None,
        })
        .collect();
    let coarse_grid = PolarGrid::clustered(q.polar.0, q.polar.1);
    let mut consts = Vec::new();
    let mut table = Table::new(&["level", "member", "input_norm", "transported_norm", "ratio"]);
    for (level, pg) in [coarse_grid.clone(), coarse_grid.refined()].into_iter().enumerate() {
        let map = douady_earle(&h, &pg, &DeOptions::default())?;
        let field = beltrami_of(&map)?;
        let tag = if level == 0 { "coarse" } else { "refined" };
        if level == 0 {
            let s1 = poincare_bilipschitz(&map, &poincare_pairs(cfg.seed, q.pairs))?;
            ctx.rep.metric("s1/bilipschitz", s1.constant);
            ctx.rep.verdict("s1/bilipschitz", s1.constant < t.qc_bilipschitz_max);
        }
        ctx.rep.metric(format!("{tag}/sup_mu"), field.sup_norm());
        ctx.rep.metric(format!("{tag}/de_residual"), map.worst_residual);
        let bc = beltrami_carleson(&field, disk.clone())?;
        ctx.rep.metric(format!("{tag}/beltrami_carleson_norm"), carleson_norm(&bc, &grid)?.norm);
        let mut best = 0.0f64;
        for (name, f) in &densities {
            let input = grid_density_measure(&pg, |z| f(z), disk.clone())?;
            let moved = qc_transport(&map, &field, |z| f(z), disk.clone())?;
            let (a, b) = if level == 0 {
                (ctx.norm(&input, &grid)?, ctx.norm(&moved, &grid)?)
            } else {
                (carleson_norm(&input, &grid)?.norm, carleson_norm(&moved, &grid)?.norm)
            };
            let r = if a > 0.0 { b / a } else { 0.0 };
            table.push(vec![tag.into(), name.clone().into(), a.into(), b.into(), r.into()]);
            best = best.max(r);
        }
        consts.push(best);
    }
    let v = boundedness_verdict(consts[0], consts[1], t);
    ctx.rep.metric("transport/constant", v.coarse);
    ctx.rep.metric("transport/constant_refined", v.fine);
    ctx.rep.metric("transport/relative_change", v.relative_change);
    ctx.rep.verdict("transport/bounded", v.pass);
    ctx.rep.tables.insert("transport".into(), table);
    Ok(())
}

fn log_derivative(h: &CircleHomeomorphism) -> Res<CircleFunction> {
    Ok(CircleFunction::new(h.derivative_samples().iter().map(|d| d.ln()).collect())?)
}

/// EXP-WELD: welding of the circle, a star and a shrinking ellipse family.
fn weld(ctx: &mut Ctx) -> Res<()> {
    let cfg = ctx.cfg;
    let (t, w) = (&cfg.thresholds, &cfg.weld);
    let opts = w.theodorsen();
    let mut table = Table::new(&["curve", "residual", "bmo_log_derivative", "a_infty", "iterations"]);
    let mut classify = |name: String, h: &CircleHomeomorphism, residual: f64, iters: usize| -> Res<(f64, bool)> {
        let lg = log_derivative(h)?;
        let bmo = bmo_norm(&lg, &ArcFamily::quasi_dyadic(lg.len())?)?.norm;
        let d = CircleFunction::new(h.derivative_samples().to_vec())?;
        let ai = a_infty_check(&d, &ArcFamily::for_a_infty(d.len())?, SubsetScheme::Both, t.a_infty_beta)?.pass;
        table.push(vec![name.into(), residual.into(), bmo.into(), ai.into(), iters.into()]);
        Ok((bmo, ai))
    };

    let circle = generate_curve(CurveFamily::Circle, w.theodorsen_n)?;
    let wc = welding(&circle, &opts)?;
    let theta = wc.h.theta();
    let dev = wc.h.lift_samples().iter().zip(&theta).map(|(l, th)| (l - th).abs()).fold(0.0, f64::max);
    classify("circle".into(), &wc.h, wc.residual, wc.interior_iterations.max(wc.exterior_iterations))?;
    ctx.rep.metric("circle/deviation", dev);
    ctx.rep.verdict("circle/identity", dev < t.weld_circle_deviation);

    let (a, k) = w.star;
    let star = RadiusFunction::Star { a, k };
    let map = theodorsen_map(&star, &opts, false)?;
    let MapKind::Theodorsen(table_s) = map.kind() else { unreachable!("theodorsen map") };
    let (res, iters) = (table_s.final_residual(), table_s.iterations());
    ctx.rep.metric("star/theodorsen_residual", res);
    ctx.rep.metric("star/theodorsen_iterations", iters as f64);
    ctx.rep.verdict("star/theodorsen_converged", res < t.weld_residual && iters <= w.max_iter);
    let ws = welding_radius(&star, &opts)?;
    let (_, ai) = classify(format!("star({a},{k})"), &ws.h, ws.residual, ws.interior_iterations.max(ws.exterior_iterations))?;
    ctx.rep.metric("star/welding_residual", ws.residual);
    ctx.rep.verdict("star/strongly_quasisymmetric", ai);

    let mut bmos = Vec::new();
    for &c in &w.ellipse_c {
        let curve = generate_curve(CurveFamily::Ellipse { c }, w.theodorsen_n)?;
        let we = welding(&curve, &opts)?;
        let (bmo, _) = classify(format!("ellipse({c})"), &we.h, we.residual, we.interior_iterations.max(we.exterior_iterations))?;
        ctx.rep.metric(format!("ellipse({c})/bmo_log_derivative"), bmo);
        bmos.push((c, bmo));
    }
    let decreasing = bmos.windows(2).all(|p| (p[1].0 < p[0].0) == (p[1].1 < p[0].1));
    ctx.rep.verdict("ellipse/bmo_monotone", decreasing);
    ctx.rep.profiles.insert("ellipse_bmo".into(), bmos);
    ctx.rep.tables.insert("welding".into(), table);
    Ok(())
}

/// EXP-NEG: Koch chord-arc growth and the polymap blow-up trend.
fn negative(ctx: &mut Ctx) -> Res<()> {
    let cfg = ctx.cfg;
    let t = &cfg.thresholds;
    let mut koch = Table::new(&["level", "corner_ratio", "expected", "relative_error", "sampled_constant"]);
    let mut koch_ok = true;
    for &l in &cfg.neg.koch_levels {
        let n = cfg.curve_samples.max(3 * 4usize.pow(l));
        let curve = generate_curve(CurveFamily::Koch { level: l }, n)?;
        let v = curve.vertex_indices();
        let ratio = chord_arc_ratio(&curve, v[0], v[4usize.pow(l)]);
        let expected = (4.0f64 / 3.0).powi(l as i32);
        let err = (ratio - expected).abs() / expected;
        let sampled = chord_arc_constant(&curve).constant;
        koch.push(vec![l.into(), ratio.into(), expected.into(), err.into(), sampled.into()]);
        ctx.rep.metric(format!("koch({l})/chord_arc"), ratio);
        koch_ok &= err <= t.koch_rel_tol;
    }
    ctx.rep.verdict("koch/chord_arc_growth", koch_ok);

    let cells = cfg.cells.disk_cells();
    let suite = bounded_suite(cfg.seed, cfg.suite_segment_atoms);
    let mut poly = Table::new(&["c", "member", "input_norm", "transported_norm", "ratio"]);
    let mut trend = Vec::new();
    for &c in &cfg.neg.polymap_c {
        let map = ConformalMap::polymap(c)?;
        let image = Arc::new(map.image_curve(cfg.curve_samples)?);
        let k = suite_constant(ctx, Dir::Push, &suite, &cells, &map, &image, false, |name, a, b, r| {
            poly.push(vec![c.into(), name.into(), a.into(), b.into(), r.into()])
        })?;
        ctx.rep.metric(format!("polymap({c})/constant"), k);
        trend.push((c, k));
    }
    let increasing = trend.windows(2).all(|p| p[1].1 > p[0].1);
    ctx.rep.verdict("polymap/constant_increasing", increasing);
    ctx.rep.profiles.insert("polymap_trend".into(), trend.iter().map(|&(c, k)| (0.5 - c, k)).collect());
    ctx.rep.tables.insert("koch".into(), koch);
    ctx.rep.tables.insert("polymap".into(), poly);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_id_is_rejected() {
        assert!(matches!(run("EXP-NOPE", &Config::default()), Err(HarnessError::UnknownExperiment(_))));
    }

    #[test]
    fn pairs_stay_inside() {
        let p = poincare_pairs(3, 200);
        assert!(p.iter().all(|(a, b)| a.norm() <= 0.95 + 1e-12 && b.norm() <= 0.95 + 1e-12));
        assert_eq!(p, poincare_pairs(3, 200));
    }
}
