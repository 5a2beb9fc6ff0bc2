use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use super::AnalysisError;

/// Real samples `f(2πk/N)`, `N` a power of two.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircleFunction {
    values: Vec<f64>,
}

impl CircleFunction {
    pub fn new(values: Vec<f64>) -> Result<Self, AnalysisError> {
        if values.len() < 2 || !values.len().is_power_of_two() {
            return Err(AnalysisError::Parameter(format!("sample count {} is not a power of two", values.len())));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(AnalysisError::Parameter(format!("sample {k} is not finite")));
        }
        Ok(CircleFunction { values })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(n: usize, f: F) -> Result<Self, AnalysisError> {
        Self::new((0..n).map(|k| f(TAU * k as f64 / n as f64)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, a: f64) -> Result<Self, AnalysisError> {
        Self::new(self.values.iter().map(|v| a * v).collect())
    }

    fn window(&self, arc: CircleArc) -> impl Iterator<Item = f64> + '_ {
        let n = self.values.len();
        (0..arc.len).map(move |k| self.values[(arc.start + k) % n])
    }
}

/// Sample-index arc `start, start+1, …, start+len−1` (mod N).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CircleArc {
    pub start: usize,
    pub len: usize,
}

impl CircleArc {
    /// `(start angle, angular length)` on a grid of `n` samples.
    pub fn angles(&self, n: usize) -> (f64, f64) {
        let h = TAU / n as f64;
        (self.start as f64 * h, self.len as f64 * h)
    }
}

/// Arcs of length `N/2^ℓ` for `ℓ = 0..=max_level`, translated by a fixed
/// fraction of their length. A stride equal to the length gives the dyadic
/// partition at each level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ArcFamily {
    pub n: usize,
    pub max_level: u32,
    /// Translates per arc length; `None` means every sample.
    pub translates: Option<usize>,
}

impl ArcFamily {
    pub fn dyadic(n: usize, max_level: u32) -> Result<Self, AnalysisError> {
        Self::build(n, max_level, Some(1))
    }

    /// Depth `log₂N − 4` with every translate.
    pub fn quasi_dyadic(n: usize) -> Result<Self, AnalysisError> {
        Self::build(n, depth(n)?, None)
    }

    /// Depth `log₂N − 4`, eight translates per length.
    pub fn for_a_infty(n: usize) -> Result<Self, AnalysisError> {
        Self::build(n, depth(n)?, Some(8))
    }

    pub fn build(n: usize, max_level: u32, translates: Option<usize>) -> Result<Self, AnalysisError> {
        if n < 2 || !n.is_power_of_two() || max_level > n.trailing_zeros() {
            return Err(AnalysisError::Parameter(format!("arc family ({n}, {max_level}) invalid")));
        }
        if translates == Some(0) {
            return Err(AnalysisError::Parameter("zero translates".into()));
        }
        Ok(ArcFamily { n, max_level, translates })
    }

    pub fn level(&self, l: u32) -> Vec<CircleArc> {
        let len = self.n >> l;
        let stride = match self.translates {
            None => 1,
            Some(t) => (len / t).max(1),
        };
        (0..self.n).step_by(stride).map(|start| CircleArc { start, len }).collect()
    }

    pub fn arcs(&self) -> Vec<CircleArc> {
        (0..=self.max_level).flat_map(|l| self.level(l)).collect()
    }

    fn check(&self, f: &CircleFunction) -> Result<(), AnalysisError> {
        if f.len() != self.n {
            return Err(AnalysisError::Parameter(format!("arc family built for {} samples, got {}", self.n, f.len())));
        }
        Ok(())
    }
}

fn depth(n: usize) -> Result<u32, AnalysisError> {
    if n < 32 || !n.is_power_of_two() {
        return Err(AnalysisError::Parameter(format!("need a power of two ≥ 32, got {n}")));
    }
    Ok(n.trailing_zeros() - 4)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BmoReport {
    pub norm: f64,
    pub worst_arc: CircleArc,
}

fn oscillation(f: &CircleFunction, arc: CircleArc) -> f64 {
    let len = arc.len as f64;
    let mean = f.window(arc).sum::<f64>() / len;
    f.window(arc).map(|v| (v - mean).abs()).sum::<f64>() / len
}

fn first_max(arcs: &[CircleArc], vals: &[f64]) -> (f64, CircleArc) {
    let mut best = (0.0, arcs[0]);
    for (a, &v) in arcs.iter().zip(vals) {
        if v > best.0 {
            best = (v, *a);
        }
    }
    best
}

/// Supremum over the family of the mean oscillation `⨍_I |f − f_I|`.
pub fn bmo_norm(f: &CircleFunction, arcs: &ArcFamily) -> Result<BmoReport, AnalysisError> {
    arcs.check(f)?;
    let all = arcs.arcs();
    let vals: Vec<f64> = all.par_iter().map(|&a| oscillation(f, a)).collect();
    let (norm, worst_arc) = first_max(&all, &vals);
    Ok(BmoReport { norm, worst_arc })
}

/// Per-level suprema of the mean oscillation, as `(arc length, sup)` from
/// the longest arcs down.
pub fn vmo_profile(f: &CircleFunction, arcs: &ArcFamily) -> Result<Vec<(f64, f64)>, AnalysisError> {
    arcs.check(f)?;
    Ok((0..=arcs.max_level)
        .map(|l| {
            let level = arcs.level(l);
            let vals: Vec<f64> = level.par_iter().map(|&a| oscillation(f, a)).collect();
            let (sup, arc) = first_max(&level, &vals);
            (arc.angles(arcs.n).1, sup)
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetScheme {
    LevelSets,
    SubArcUnions,
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AInftyWitness {
    pub arc: CircleArc,
    pub arc_start: f64,
    pub arc_length: f64,
    /// `"level_set"`, `"sub_arc_union"` or `"whole_arc"`.
    pub subset: &'static str,
    /// `|E|/|I|`.
    pub measure_fraction: f64,
    /// `ω(E)/ω(I)`.
    pub weight_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AInftyReport {
    pub pass: bool,
    pub beta_used: f64,
    /// Exponent and constant of `ω(E)/ω(I) ≤ C₂ (|E|/|I|)^{C₁}` fitted on
    /// the collected pairs.
    pub c1: f64,
    pub c2: f64,
    /// Smallest `ω(E)/ω(I)` seen with `|E| ≥ |I|/2`.
    pub min_weight_fraction: f64,
    pub worst: AInftyWitness,
    pub arcs_tested: usize,
}

struct ArcResult {
    // (|E|/|I|, ω(E)/ω(I), kind) of the lightest half-or-more subset.
    lightest: (f64, f64, &'static str),
    // Heaviest weight fraction for |E|/|I| = k/8, k = 1..7.
    heaviest: [f64; 7],
}

fn scan_arc(w: &CircleFunction, arc: CircleArc, scheme: SubsetScheme) -> ArcResult {
    let vals: Vec<f64> = w.window(arc).collect();
    let total: f64 = vals.iter().sum();
    if total <= 0.0 {
        return ArcResult { lightest: (1.0, 0.0, "whole_arc"), heaviest: [0.0; 7] };
    }
    let len = vals.len();
    let mut lightest = (1.0, f64::INFINITY, "whole_arc");
    let mut heaviest = [0.0f64; 7];
    if matches!(scheme, SubsetScheme::LevelSets | SubsetScheme::Both) {
        let mut sorted = vals.clone();
        sorted.sort_by(f64::total_cmp);
        let half = len.div_ceil(2);
        let low: f64 = sorted[..half].iter().sum::<f64>() / total;
        if low < lightest.1 {
            lightest = (half as f64 / len as f64, low, "level_set");
        }
        for (k, slot) in heaviest.iter_mut().enumerate() {
            let m = (len * (k + 1)) / 8;
            let top: f64 = sorted[len - m..].iter().sum::<f64>() / total;
            *slot = slot.max(top);
        }
    }
    if len >= 8 && matches!(scheme, SubsetScheme::SubArcUnions | SubsetScheme::Both) {
        let piece = len / 8;
        let mut parts: Vec<f64> = vals.chunks(piece).take(8).map(|c| c.iter().sum::<f64>() / total).collect();
        parts.sort_by(f64::total_cmp);
        let low: f64 = parts[..4].iter().sum();
        if low < lightest.1 {
            lightest = (0.5, low, "sub_arc_union");
        }
        for (k, slot) in heaviest.iter_mut().enumerate() {
            let top: f64 = parts[8 - (k + 1)..].iter().sum();
            *slot = slot.max(top);
        }
    }
    ArcResult { lightest, heaviest }
}

/// Tests `ω(E)/ω(I) < β ⇒ |E|/|I| < 1/2` over the family, with `E` drawn from
/// level sets of `ω` in `I` and unions of its eighths.
pub fn a_infty_check(
    omega: &CircleFunction,
    arcs: &ArcFamily,
    scheme: SubsetScheme,
    beta: f64,
) -> Result<AInftyReport, AnalysisError> {
    arcs.check(omega)?;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(AnalysisError::Parameter(format!("beta = {beta} outside (0, 1)")));
    }
    if omega.values().iter().any(|&v| v < 0.0) {
        return Err(AnalysisError::Parameter("negative weight".into()));
    }
    if omega.values().iter().all(|&v| v == 0.0) {
        return Err(AnalysisError::ZeroWeight);
    }
    let all: Vec<CircleArc> = arcs.arcs().into_iter().filter(|a| a.len >= 2).collect();
    let results: Vec<ArcResult> = all.par_iter().map(|&a| scan_arc(omega, a, scheme)).collect();

    let mut worst_idx = 0;
    let mut heaviest = [0.0f64; 7];
    for (i, r) in results.iter().enumerate() {
        if r.lightest.1 < results[worst_idx].lightest.1 {
            worst_idx = i;
        }
        for k in 0..7 {
            heaviest[k] = heaviest[k].max(r.heaviest[k]);
        }
    }
    let (mf, wf, kind) = results[worst_idx].lightest;
    let arc = all[worst_idx];
    let (arc_start, arc_length) = arc.angles(arcs.n);
    let worst = AInftyWitness { arc, arc_start, arc_length, subset: kind, measure_fraction: mf, weight_fraction: wf };

    // Least-squares slope in log-log space, then the smallest constant that
    // puts every pair under the curve.
    let pts: Vec<(f64, f64)> = heaviest
        .iter()
        .enumerate()
        .filter(|(_, &y)| y > 0.0)
        .map(|(k, &y)| (((k + 1) as f64 / 8.0).ln(), y.ln()))
        .collect();
    let (c1, c2) = if pts.len() >= 2 {
        let m = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / m, pts.iter().map(|p| p.1).sum::<f64>() / m);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let c1 = sxy / sxx;
        let c2 = pts.iter().map(|p| (p.1 - c1 * p.0).exp()).fold(0.0, f64::max);
        (c1, c2)
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(AInftyReport {
        pass: wf >= beta,
        beta_used: beta,
        c1,
        c2,
        min_weight_fraction: wf,
        worst,
        arcs_tested: all.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn upper(n: usize) -> CircleFunction {
        CircleFunction::from_fn(n, |t| if t < PI { 1.0 } else { 0.0 }).unwrap()
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(CircleFunction::new(vec![0.0; 100]).is_err());
        assert!(CircleFunction::new(vec![f64::NAN; 64]).is_err());
        assert!(ArcFamily::dyadic(64, 7).is_err());
        assert!(ArcFamily::quasi_dyadic(16).is_err());
    }

    #[test]
    fn dyadic_levels_partition() {
        let fam = ArcFamily::dyadic(64, 6).unwrap();
        for l in 0..=6 {
            let arcs = fam.level(l);
            assert_eq!(arcs.len(), 1 << l);
            assert_eq!(arcs.iter().map(|a| a.len).sum::<usize>(), 64);
        }
    }

    #[test]
    fn bmo_examples() {
        let fam = ArcFamily::quasi_dyadic(256).unwrap();
        let c = CircleFunction::new(vec![3.0; 256]).unwrap();
        assert_eq!(bmo_norm(&c, &fam).unwrap().norm, 0.0);
        let r = bmo_norm(&upper(256), &fam).unwrap();
        assert!((r.norm - 0.5).abs() < 1e-15);
        let cosine = CircleFunction::from_fn(256, f64::cos).unwrap();
        let a = bmo_norm(&cosine, &fam).unwrap().norm;
        let b = bmo_norm(&cosine.scaled(2.5).unwrap(), &fam).unwrap().norm;
        assert!((b - 2.5 * a).abs() < 1e-14);
    }

    #[test]
    fn vmo_profiles() {
        let fam = ArcFamily::quasi_dyadic(1024).unwrap();
        let p = vmo_profile(&upper(1024), &fam).unwrap();
        assert!(p.iter().all(|&(_, v)| v >= 0.4));
        let c = vmo_profile(&CircleFunction::from_fn(1024, f64::cos).unwrap(), &fam).unwrap();
        for w in c.windows(2).skip(1) {
            assert!(w[1].1 < w[0].1);
        }
        let last = c.last().unwrap();
        // Mean oscillation of a linear function over length s is s/4 × slope.
        assert!(last.1 <= last.0 / 4.0 * 1.0001);
    }

    #[test]
    fn a_infty_examples() {
        let n = 1024;
        let fam = ArcFamily::for_a_infty(n).unwrap();
        let one = a_infty_check(&CircleFunction::new(vec![1.0; n]).unwrap(), &fam, SubsetScheme::Both, 0.1).unwrap();
        assert!(one.pass);
        assert!((one.c1 - 1.0).abs() < 1e-12 && (one.c2 - 1.0).abs() < 1e-12);

        let bad = a_infty_check(&upper(n), &fam, SubsetScheme::Both, 0.1).unwrap();
        assert!(!bad.pass);
        assert_eq!(bad.worst.weight_fraction, 0.0);
        assert!(bad.worst.measure_fraction >= 0.5);

        let smooth = CircleFunction::from_fn(n, |t| 2.0 + t.cos()).unwrap();
        let r = a_infty_check(&smooth, &fam, SubsetScheme::Both, 0.1).unwrap();
        assert!(r.pass, "{r:?}");
        let scaled = a_infty_check(&smooth.scaled(7.0).unwrap(), &fam, SubsetScheme::Both, 0.1).unwrap();
        assert_eq!(scaled.pass, r.pass);
        assert!(a_infty_check(&CircleFunction::new(vec![0.0; n]).unwrap(), &fam, SubsetScheme::Both, 0.1).is_err());
    }
}
