//! The `cm` command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use cm_core::confmap::{pull_back, push_forward, welding};
use cm_core::geometry::{chord_arc_constant, generate_curve, CurveFamily, JordanCurve};
use cm_core::measure::{carleson_norm, vanishing_profile, CarlesonGrid, Measure};
use serde_json::{json, Value};

use crate::config::{Config, MapSpec};
use crate::report::{merge, Report};
use crate::verdict::vanishing_verdict;
use crate::{run_many, HarnessError, REGISTRY};

#[derive(Parser, Debug)]
#[command(name = "cm", version, about = "Carleson measure experiments and tools")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Global {
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Carleson grid as `<centers>x<radii>`.
    #[arg(long, global = true)]
    pub grid: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample a curve family and write it as JSON.
    GenCurve {
        /// circle, ellipse, polyimage, lens, star, koch or polygon.
        family: String,
        /// Family parameters as a JSON object, e.g. '{"a":0.1,"k":3}'.
        #[arg(long, default_value = "{}")]
        params: String,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Carleson norm of a measure JSON file.
    Norm { measure: PathBuf },
    /// Vanishing profile of a measure JSON file (CSV and SVG).
    Profile { measure: PathBuf },
    /// Pull back or push forward a measure through a map.
    Transport {
        measure: PathBuf,
        /// Map descriptor, e.g. '{"kind":"polymap","c":0.3}'.
        #[arg(long)]
        map: String,
        #[arg(long, conflicts_with = "push", required_unless_present = "push")]
        pull: bool,
        #[arg(long)]
        push: bool,
    },
    /// Welding homeomorphism of a star-like curve.
    Weld {
        family: String,
        #[arg(long, default_value = "{}")]
        params: String,
    },
    /// Run one experiment, or `all`.
    Verify { id: String },
    /// Merge the reports found under the output directory.
    Report,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Resolves the configuration from the global flags.
pub fn load_config(g: &Global) -> Result<Config, HarnessError> {
    let mut cfg = match &g.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(s) = &g.grid {
        cfg.grid.parse_shape(s)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn read_json(p: &Path) -> Result<Value, HarnessError> {
    let text = std::fs::read_to_string(p)?;
    serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", p.display())))
}

fn read_measure(p: &Path) -> Result<Measure, HarnessError> {
    Ok(Measure::from_json(&read_json(p)?)?)
}

fn family(name: &str, params: &str) -> Result<CurveFamily, HarnessError> {
    let v: Value = serde_json::from_str(params).map_err(|e| HarnessError::Config(format!("--params: {e}")))?;
    Ok(CurveFamily::from_name_params(name, &v)?)
}

fn grid_for(cfg: &Config, curve: &JordanCurve) -> CarlesonGrid {
    CarlesonGrid::with_sizes(curve, cfg.grid.centers, cfg.grid.radii, cfg.grid.r_min_rel)
}

fn write(out: &Path, name: &str, contents: &str) -> Result<PathBuf, HarnessError> {
    std::fs::create_dir_all(out)?;
    let p = out.join(name);
    std::fs::write(&p, contents)?;
    Ok(p)
}

/// `Ok(true)` when every verdict passes.
pub fn execute(cli: &Cli) -> Result<bool, HarnessError> {
    let g = &cli.global;
    let cfg = load_config(g)?;
    match &cli.command {
        Command::GenCurve { family: name, params, samples } => {
            let curve = generate_curve(family(name, params)?, samples.unwrap_or(cfg.curve_samples))?;
            let p = write(&g.out, "curve.json", &serde_json::to_string(&curve.to_json()).expect("json"))?;
            let ca = chord_arc_constant(&curve);
            print(&json!({
                "path": p.display().to_string(),
                "samples": curve.len(),
                "perimeter": curve.perimeter(),
                "chord_arc": ca.constant,
            }));
            Ok(true)
        }
        Command::Norm { measure } => {
            let m = read_measure(measure)?;
            let r = carleson_norm(&m, &grid_for(&cfg, m.domain()))?;
            print(&serde_json::to_value(&r).expect("json"));
            Ok(true)
        }
        Command::Profile { measure } => {
            let m = read_measure(measure)?;
            let p = vanishing_profile(&m, &grid_for(&cfg, m.domain()))?;
            let v = vanishing_verdict(&p.entries, &cfg.thresholds);
            let mut rep = Report::new("profile", cfg.hash(), cfg.seed);
            rep.profiles.insert("measure".into(), p.entries.clone());
            rep.verdict("vanishing", v.pass);
            rep.finish();
            let path = rep.render(&g.out)?;
            print(&json!({ "report": path.display().to_string(), "verdict": v }));
            Ok(true)
        }
        Command::Transport { measure, map, pull, .. } => {
            let spec: MapSpec =
                serde_json::from_str(map).map_err(|e| HarnessError::Config(format!("--map: {e}")))?;
            let phi = spec.build(&cfg.weld.theodorsen())?;
            let m = read_measure(measure)?;
            let moved = if *pull { pull_back(&m, &phi)? } else { push_forward(&m, &phi)? };
            let before = carleson_norm(&m, &grid_for(&cfg, m.domain()))?.norm;
            let after = carleson_norm(&moved, &grid_for(&cfg, moved.domain()))?.norm;
            let p = write(&g.out, "transported.json", &serde_json::to_string(&moved.to_json()).expect("json"))?;
            print(&json!({
                "path": p.display().to_string(),
                "map": spec.label(),
                "direction": if *pull { "pull" } else { "push" },
                "input_norm": before,
                "transported_norm": after,
            }));
            Ok(true)
        }
        Command::Weld { family: name, params } => {
            let curve = Arc::new(generate_curve(family(name, params)?, cfg.weld.theodorsen_n)?);
            let w = welding(&curve, &cfg.weld.theodorsen())?;
            let mut csv = String::from("theta,lift,derivative\n");
            for ((t, l), d) in w.h.theta().iter().zip(w.h.lift_samples()).zip(w.h.derivative_samples()) {
                csv.push_str(&format!("{t},{l},{d}\n"));
            }
            let p = write(&g.out, "welding.csv", &csv)?;
            let mut v = serde_json::to_value(&w).expect("json");
            v["path"] = json!(p.display().to_string());
            print(&v);
            Ok(w.residual < cfg.thresholds.weld_residual)
        }
        Command::Verify { id } => {
            let ids: Vec<String> = if id.eq_ignore_ascii_case("all") {
                REGISTRY.iter().map(|s| s.to_string()).collect()
            } else {
                let id = id.to_ascii_uppercase();
                if !REGISTRY.contains(&id.as_str()) {
                    return Err(HarnessError::UnknownExperiment(id));
                }
                vec![id]
            };
            let mut reports = Vec::new();
            for r in run_many(&ids, &cfg) {
                let r = r?;
                r.render(&g.out)?;
                println!("{} {} ({:.1} s)", if r.pass { "PASS" } else { "FAIL" }, r.id, r.runtime);
                for (name, ok) in &r.verdicts {
                    if !ok {
                        println!("  failed: {name}");
                    }
                }
                reports.push(r);
            }
            Ok(reports.iter().all(|r| r.pass))
        }
        Command::Report => {
            let mut reports = Vec::new();
            if g.out.is_dir() {
                let mut dirs: Vec<PathBuf> = std::fs::read_dir(&g.out)?.filter_map(|e| e.ok().map(|e| e.path())).collect();
                dirs.sort();
                for d in dirs {
                    let p = d.join("report.json");
                    if p.is_file() {
                        reports.push(Report::load(&p)?);
                    }
                }
            }
            if reports.is_empty() {
                return Err(HarnessError::Config(format!("no reports under {}", g.out.display())));
            }
            let merged = merge(reports);
            let text = serde_json::to_string_pretty(&merged).expect("json") + "\n";
            write(&g.out, "summary.json", &text)?;
            print!("{text}");
            Ok(merged["pass"] == json!(true))
        }
    }
}
