//! Cell quadratures that turn densities into atom lists.
//!
//! Two layouts are provided: a uniform Cartesian grid clipped to the disk, and
//! polar cells whose radial bands shrink geometrically toward the unit circle
//! so that small boundary disks still contain many cells.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::measure::Atom;

/// One cell of a quadrature: representative point and area.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub center: Complex64,
    pub area: f64,
}

/// Cells of the `n × n` grid on `[-1, 1]²` whose centers lie in the open disk.
pub fn cartesian_disk_cells(n: usize) -> Vec<Cell> {
    let h = 2.0 / n as f64;
    let mut out = Vec::new();
    for j in 0..n {
        let y = -1.0 + (j as f64 + 0.5) * h;
        for i in 0..n {
            let x = -1.0 + (i as f64 + 0.5) * h;
            if x * x + y * y < 1.0 {
                out.push(Cell { center: Complex64::new(x, y), area: h * h });
            }
        }
    }
    out
}

/// Parameters of the boundary-refined polar layout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolarCells {
    /// Smallest boundary-disk radius the layout should resolve.
    pub min_scale: f64,
    /// Ratio between consecutive radial band widths.
    pub growth: f64,
    /// Cells closer to the circle than `cutoff` are dropped.
    pub cutoff: f64,
    /// Target cell size relative to the distance from the circle.
    pub aspect: f64,
    /// Floor on the number of angular cells per band.
    pub min_angles: usize,
}

impl Default for PolarCells {
    fn default() -> Self {
        PolarCells { min_scale: 1e-3, growth: 1.2, cutoff: 1e-5, aspect: 0.25, min_angles: 64 }
    }
}

impl PolarCells {
    /// Band edges measured as distance to the circle, from `cutoff` upward.
    fn band_edges(&self, outer: f64) -> Vec<f64> {
        let mut edges = vec![self.cutoff];
        let mut width = self.cutoff * (self.growth - 1.0).max(1e-3);
        loop {
            let last = *edges.last().unwrap();
            let next = last + width.max(last * (self.growth - 1.0));
            if next >= outer {
                edges.push(outer);
                break;
            }
            edges.push(next);
            width = next - last;
        }
        edges
    }

    fn angle_count(&self, dist: f64) -> usize {
        let size = (self.aspect * dist).max(self.aspect * self.min_scale).max(1e-12);
        let n = (TAU / size).ceil() as usize;
        n.max(self.min_angles)
    }

    /// Cells covering `|z| < 1 − cutoff`.
    pub fn disk_cells(&self) -> Vec<Cell> {
        let edges = self.band_edges(1.0);
        let mut out = Vec::new();
        for w in edges.windows(2).rev() {
            let (r_out, r_in) = (1.0 - w[0], 1.0 - w[1]);
            push_band(&mut out, r_in, r_out, self.angle_count(w[0]));
        }
        out
    }

    /// Cells covering `1 + cutoff < |z| < outer`.
    pub fn exterior_cells(&self, outer: f64) -> Vec<Cell> {
        let edges = self.band_edges(outer - 1.0);
        let mut out = Vec::new();
        for w in edges.windows(2) {
            let (r_in, r_out) = (1.0 + w[0], 1.0 + w[1]);
            push_band(&mut out, r_in, r_out, self.angle_count(w[0]));
        }
        out
    }
}

fn push_band(out: &mut Vec<Cell>, r_in: f64, r_out: f64, n_ang: usize) {
    let dphi = TAU / n_ang as f64;
    let area = 0.5 * dphi * (r_out * r_out - r_in * r_in);
    let rc = (2.0 / 3.0) * (r_out.powi(3) - r_in.powi(3)) / (r_out * r_out - r_in * r_in);
    for k in 0..n_ang {
        out.push(Cell { center: Complex64::from_polar(rc, (k as f64 + 0.5) * dphi), area });
    }
}

/// Atoms `density(center) × area`; cells with zero weight are skipped.
pub fn discretize<F: Fn(Complex64) -> f64 + Sync>(cells: &[Cell], density: F) -> Vec<Atom> {
    use rayon::prelude::*;
    cells
        .par_iter()
        .map(|c| Atom::new(c.center, density(c.center) * c.area))
        .filter(|a| a.w > 0.0)
        .collect()
}
