//! Run configuration. Every field has a default; unknown keys are rejected.

use std::path::Path;

use cm_core::confmap::{theodorsen_map, ConformalMap, RadiusFunction, TheodorsenOptions};
use cm_core::discretize::PolarCells;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::HarnessError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    /// Samples on every generated boundary curve.
    pub curve_samples: usize,
    /// Atoms in the segment member of the bounded suite.
    pub suite_segment_atoms: usize,
    pub grid: GridSpec,
    pub cells: PolarCells,
    pub thresholds: Thresholds,
    pub z1: TransportSpec,
    pub z2: TransportSpec,
    pub vpull: TransportSpec,
    pub vpush: TransportSpec,
    pub collar: CollarSpec,
    pub qc: QcSpec,
    pub weld: WeldSpec,
    pub neg: NegSpec,
}

/// Carleson grid: `centers` points along the boundary, `radii` log-spaced
/// radii on `[r_min_rel·diam, diam]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub centers: usize,
    pub radii: usize,
    pub r_min_rel: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { centers: 128, radii: 48, r_min_rel: 1e-3 }
    }
}

impl GridSpec {
    /// Parses `<centers>x<radii>`.
    pub fn parse_shape(&mut self, s: &str) -> Result<(), HarnessError> {
        let (c, r) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| HarnessError::Config(format!("grid '{s}' is not of the form <centers>x<radii>")))?;
        let parse = |t: &str| {
            t.trim().parse::<usize>().ok().filter(|&v| v > 0).ok_or_else(|| HarnessError::Config(format!("bad grid size '{t}'")))
        };
        self.centers = parse(c)?;
        self.radii = parse(r)?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Smallest fitted log-log profile slope accepted as vanishing.
    pub vanishing_slope: f64,
    /// Largest accepted final/peak profile ratio.
    pub vanishing_decay: f64,
    /// Decades above the smallest radius used in the slope fit.
    pub slope_decades: f64,
    /// Largest relative change of a suite constant under one refinement.
    pub boundedness_stability: f64,
    /// Allowed decrease of a norm when the Carleson grid is doubled.
    pub refinement_slack: f64,
    pub collar_deficit_min: f64,
    pub collar_nonvanishing_r: f64,
    pub collar_density_deficit_max: f64,
    pub collar_density_r: f64,
    /// Coefficient `K` in `profile(r) ≤ K√r`.
    pub profile_sqrt_coeff: f64,
    pub qc_bilipschitz_max: f64,
    pub a_infty_beta: f64,
    pub weld_circle_deviation: f64,
    pub weld_residual: f64,
    pub koch_rel_tol: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            vanishing_slope: 0.25,
            vanishing_decay: 0.1,
            slope_decades: 2.0,
            boundedness_stability: 0.1,
            refinement_slack: 1e-12,
            collar_deficit_min: 0.9,
            collar_nonvanishing_r: 0.1,
            collar_density_deficit_max: 0.2,
            collar_density_r: 1e-3,
            profile_sqrt_coeff: 3.0,
            qc_bilipschitz_max: 5.0,
            a_infty_beta: 0.1,
            weld_circle_deviation: 1e-6,
            weld_residual: 1e-8,
            koch_rel_tol: 0.05,
        }
    }
}

/// Descriptor of a disk map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    Identity,
    Mobius { a: [f64; 2], rot: f64 },
    Polymap { c: f64 },
    Lens { alpha: f64 },
    /// Numerical map onto the star `ρ = 1 + a cos kθ`.
    Star { a: f64, k: u32 },
}

impl MapSpec {
    pub fn label(&self) -> String {
        match self {
            MapSpec::Identity => "identity".into(),
            MapSpec::Mobius { a, rot } => format!("mobius({},{},{})", a[0], a[1], rot),
            MapSpec::Polymap { c } => format!("polymap({c})"),
            MapSpec::Lens { alpha } => format!("lens({alpha})"),
            MapSpec::Star { a, k } => format!("star({a},{k})"),
        }
    }

    pub fn build(&self, theodorsen: &TheodorsenOptions) -> Result<ConformalMap, HarnessError> {
        Ok(match self {
            MapSpec::Identity => ConformalMap::identity(),
            MapSpec::Mobius { a, rot } => ConformalMap::mobius(Complex64::new(a[0], a[1]), *rot)?,
            MapSpec::Polymap { c } => ConformalMap::polymap(*c)?,
            MapSpec::Lens { alpha } => ConformalMap::lens(*alpha)?,
            MapSpec::Star { a, k } => theodorsen_map(&RadiusFunction::Star { a: *a, k: *k }, theodorsen, false)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransportSpec {
    pub maps: Vec<MapSpec>,
}

impl Default for TransportSpec {
    fn default() -> Self {
        TransportSpec {
            maps: vec![MapSpec::Polymap { c: 0.3 }, MapSpec::Lens { alpha: 0.8 }, MapSpec::Star { a: 0.1, k: 3 }],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CollarSpec {
    pub segment_atoms: usize,
    /// Collar widths, strictly decreasing.
    pub collar_radii: Vec<f64>,
    pub centers: usize,
    /// `[min, max, count]` of the log-spaced Carleson radii.
    pub carleson_radii: (f64, f64, usize),
    /// `[min, max, count]` of the radii where `profile(r) ≤ K√r` is checked.
    pub profile_radii: (f64, f64, usize),
    /// Exponent `p` of the density `(1 − |z|²)^p`.
    pub density_exponent: f64,
    /// Cells for the density; fine enough to resolve the thinnest collar.
    pub cells: PolarCells,
}

impl Default for CollarSpec {
    fn default() -> Self {
        CollarSpec {
            segment_atoms: 100_000,
            collar_radii: vec![0.1, 0.05, 0.02, 0.01, 5e-3, 2e-3, 1e-3],
            centers: 256,
            carleson_radii: (1e-4, 2.0, 64),
            profile_radii: (1e-3, 1e-1, 9),
            density_exponent: -0.5,
            cells: PolarCells { min_scale: 1e-3, growth: 1.25, cutoff: 1e-5, aspect: 0.5, min_angles: 64 },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QcSpec {
    /// `h(θ) = θ + amp·sin θ`.
    pub amp: f64,
    pub homeo_samples: usize,
    /// Polar grid `(radii, angles)` at the coarse level.
    pub polar: (usize, usize),
    pub pairs: usize,
    pub centers: usize,
    /// `[min, max, count]` of the log-spaced Carleson radii.
    pub carleson_radii: (f64, f64, usize),
}

impl Default for QcSpec {
    fn default() -> Self {
        QcSpec {
            amp: 0.3,
            homeo_samples: 1024,
            polar: (32, 128),
            pairs: 1000,
            centers: 256,
            carleson_radii: (0.05, 2.0, 48),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeldSpec {
    pub theodorsen_n: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub ellipse_c: Vec<f64>,
    pub star: (f64, u32),
}

impl Default for WeldSpec {
    fn default() -> Self {
        WeldSpec { theodorsen_n: 1024, tol: 1e-12, max_iter: 200, ellipse_c: vec![0.2, 0.1, 0.05], star: (0.1, 3) }
    }
}

impl WeldSpec {
    pub fn theodorsen(&self) -> TheodorsenOptions {
        TheodorsenOptions { n: self.theodorsen_n, tol: self.tol, max_iter: self.max_iter }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NegSpec {
    pub koch_levels: Vec<u32>,
    pub polymap_c: Vec<f64>,
}

impl Default for NegSpec {
    fn default() -> Self {
        NegSpec { koch_levels: vec![1, 2, 3, 4], polymap_c: vec![0.3, 0.4, 0.45, 0.49] }
    }
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 0,
            curve_samples: 1024,
            suite_segment_atoms: 20_000,
            grid: GridSpec::default(),
            cells: PolarCells { min_scale: 2e-3, growth: 1.25, cutoff: 1e-5, aspect: 0.5, min_angles: 64 },
            thresholds: Thresholds::default(),
            z1: TransportSpec::default(),
            z2: TransportSpec::default(),
            vpull: TransportSpec { maps: vec![MapSpec::Polymap { c: 0.3 }] },
            vpush: TransportSpec::default(),
            collar: CollarSpec::default(),
            qc: QcSpec::default(),
            weld: WeldSpec::default(),
            neg: NegSpec::default(),
        }
    }
}

impl Config {
    pub fn from_json_str(s: &str) -> Result<Self, HarnessError> {
        let c: Config = serde_json::from_str(s).map_err(|e| HarnessError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.curve_samples < 16 {
            return bad("curve_samples must be at least 16");
        }
        if self.grid.centers == 0 || self.grid.radii == 0 || !(self.grid.r_min_rel > 0.0 && self.grid.r_min_rel < 1.0) {
            return bad("grid needs centers, radii and r_min_rel in (0, 1)");
        }
        let c = &self.cells;
        if !(c.min_scale > 0.0 && c.growth > 1.0 && c.cutoff > 0.0 && c.aspect > 0.0) {
            return bad("cells: min_scale, cutoff, aspect must be positive and growth > 1");
        }
        if self.collar.collar_radii.windows(2).any(|w| !(w[0] > w[1])) {
            return bad("collar.collar_radii must be strictly decreasing");
        }
        let t = &self.thresholds;
        if [t.vanishing_slope, t.vanishing_decay, t.slope_decades, t.boundedness_stability, t.koch_rel_tol]
            .iter()
            .any(|v| !v.is_finite())
        {
            return bad("thresholds must be finite");
        }
        Ok(())
    }

    /// Canonical JSON: sorted keys, no insignificant whitespace.
    pub fn canonical_json(&self) -> String {
        let v = serde_json::to_value(self).expect("config serializes");
        serde_json::to_string(&v).expect("value serializes")
    }

    /// SHA-256 of the canonical JSON, thresholds included.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_and_hash_is_stable() {
        let c = Config::default();
        let back = Config::from_json_str(&c.canonical_json()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
        assert_eq!(c.hash().len(), 64);
    }

    #[test]
    fn thresholds_enter_the_hash() {
        let mut c = Config::default();
        let h0 = c.hash();
        c.thresholds.vanishing_slope = 0.3;
        assert_ne!(c.hash(), h0);
        assert!(c.canonical_json().contains("vanishing_slope"));
    }

    #[test]
    fn unknown_keys_and_bad_values_rejected() {
        assert!(Config::from_json_str(r#"{"sed": 3}"#).is_err());
        assert!(Config::from_json_str(r#"{"thresholds": {"slope": 1}}"#).is_err());
        assert!(Config::from_json_str(r#"{"collar": {"collar_radii": [0.1, 0.2]}}"#).is_err());
        let c = Config::from_json_str(r#"{"seed": 7, "vpull": {"maps": [{"kind": "lens", "alpha": 0.8}]}}"#).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.vpull.maps, vec![MapSpec::Lens { alpha: 0.8 }]);
    }

    #[test]
    fn grid_shape_parsing() {
        let mut g = GridSpec::default();
        g.parse_shape("64x32").unwrap();
        assert_eq!((g.centers, g.radii), (64, 32));
        assert!(g.parse_shape("64").is_err());
        assert!(g.parse_shape("0x3").is_err());
    }
}
