//! Vanishing and boundedness verdicts.

use serde::Serialize;

use crate::config::Thresholds;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VanishingVerdict {
    /// Least-squares slope of `ln v` against `ln r` over the fit window;
    /// `None` when the profile is identically zero there.
    pub slope: Option<f64>,
    pub final_value: f64,
    pub peak: f64,
    pub pass: bool,
}

/// Profile entries are `(r, value)` in any order.
pub fn vanishing_verdict(profile: &[(f64, f64)], t: &Thresholds) -> VanishingVerdict {
    let mut e: Vec<(f64, f64)> = profile.to_vec();
    e.sort_by(|a, b| a.0.total_cmp(&b.0));
    let Some(&(r_min, final_value)) = e.first() else {
        return VanishingVerdict { slope: None, final_value: 0.0, peak: 0.0, pass: true };
    };
    let peak = e.iter().map(|p| p.1).fold(0.0, f64::max);
    let r_cap = r_min * 10f64.powf(t.slope_decades) * (1.0 + 1e-9);
    let window: Vec<(f64, f64)> = e.iter().filter(|p| p.0 <= r_cap).copied().collect();
    let pts: Vec<(f64, f64)> = window.iter().filter(|p| p.1 > 0.0).map(|p| (p.0.ln(), p.1.ln())).collect();
    let slope = if pts.len() < 2 {
        // Zero at the smallest radius: the measure no longer meets small disks.
        if final_value == 0.0 {
            None
        } else {
            Some(f64::NAN)
        }
    } else {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    };
    let slope_ok = match slope {
        None => true,
        Some(s) => s >= t.vanishing_slope,
    };
    let decay_ok = peak == 0.0 || final_value < t.vanishing_decay * peak;
    VanishingVerdict { slope, final_value, peak, pass: slope_ok && decay_ok }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundednessVerdict {
    pub coarse: f64,
    pub fine: f64,
    pub relative_change: f64,
    pub pass: bool,
}

pub fn boundedness_verdict(coarse: f64, fine: f64, t: &Thresholds) -> BoundednessVerdict {
    let relative_change = (fine - coarse).abs() / coarse.abs().max(f64::MIN_POSITIVE);
    let pass = coarse.is_finite() && fine.is_finite() && relative_change <= t.boundedness_stability;
    BoundednessVerdict { coarse, fine, relative_change, pass }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power_profile(p: f64) -> Vec<(f64, f64)> {
        cm_core::log_space(1e-3, 2.0, 40).into_iter().map(|r| (r, r.powf(p))).collect()
    }

    #[test]
    fn power_law_slopes() {
        let t = Thresholds::default();
        let v = vanishing_verdict(&power_profile(0.5), &t);
        assert!((v.slope.unwrap() - 0.5).abs() < 1e-12 && v.pass);
        assert!(!vanishing_verdict(&power_profile(0.1), &t).pass);
        let flat: Vec<(f64, f64)> = power_profile(0.0);
        assert!(!vanishing_verdict(&flat, &t).pass);
    }

    #[test]
    fn zero_tail_passes_with_null_slope() {
        let t = Thresholds::default();
        let p: Vec<(f64, f64)> = cm_core::log_space(1e-3, 2.0, 40).into_iter().map(|r| (r, if r > 0.5 { r } else { 0.0 })).collect();
        let v = vanishing_verdict(&p, &t);
        assert_eq!(v.slope, None);
        assert!(v.pass);
    }

    #[test]
    fn single_positive_point_before_zero_tail() {
        let t = Thresholds::default();
        let p = [(2e-3, 0.0), (2e-2, 0.0), (0.1, 0.0), (0.2, 0.5), (1.0, 1.0), (2.0, 1.0)];
        let v = vanishing_verdict(&p, &t);
        assert_eq!(v.slope, None);
        assert!(v.pass);
    }

    #[test]
    fn decay_threshold_is_configurable() {
        let mut t = Thresholds::default();
        let p = power_profile(0.5);
        assert!(vanishing_verdict(&p, &t).pass);
        t.vanishing_decay = 0.01;
        assert!(!vanishing_verdict(&p, &t).pass);
    }

    #[test]
    fn boundedness() {
        let t = Thresholds::default();
        assert!(boundedness_verdict(1.0, 1.05, &t).pass);
        assert!(!boundedness_verdict(1.0, 1.2, &t).pass);
        assert!(!boundedness_verdict(f64::INFINITY, 1.0, &t).pass);
    }
}
