use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Deserialize;

use super::QcError;

type C = Complex64;

/// Disk automorphism `e^{i rot}(z + a)/(1 + ā z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mobius {
    pub a: C,
    pub rot: f64,
}

impl Mobius {
    pub fn new(a: C, rot: f64) -> Result<Self, QcError> {
        if !(a.norm() < 1.0) {
            return Err(QcError::Parameter(format!("automorphism needs |a| < 1, got {a}")));
        }
        Ok(Mobius { a, rot })
    }

    pub fn apply(&self, z: C) -> C {
        C::from_polar(1.0, self.rot) * (z + self.a) / (1.0 + self.a.conj() * z)
    }

    pub fn inverse(&self) -> Mobius {
        let b = -self.a * C::from_polar(1.0, self.rot);
        Mobius { a: b, rot: -self.rot }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum HomeoKind {
    Identity,
    Rotation { angle: f64 },
    /// Restriction of a disk automorphism fixing the orientation.
    MobiusTrace { map: Mobius },
    /// `θ + amp·sin θ`, `|amp| < 1`.
    Sine { amp: f64 },
    /// Lift linear between knots `(θ_i, H_i)` on `[0, 2π)`.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
    /// Interpolated samples.
    Sampled,
    /// `outer ∘ base ∘ inner`.
    Conjugated { outer: Mobius, inner: Mobius, base: Box<CircleHomeomorphism> },
}

/// Orientation-preserving degree-one circle map, stored as its lift
/// `H(θ_k)` on the uniform grid `θ_k = 2πk/N` with `H(θ + 2π) = H(θ) + 2π`.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleHomeomorphism {
    kind: HomeoKind,
    lift: Vec<f64>,
    deriv: Vec<f64>,
}

fn grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| TAU * k as f64 / n as f64)
}

fn check_n(n: usize) -> Result<(), QcError> {
    if n < 8 || !n.is_power_of_two() {
        return Err(QcError::Parameter(format!("sample count {n} must be a power of two ≥ 8")));
    }
    Ok(())
}

impl CircleHomeomorphism {
    fn analytic(kind: HomeoKind, n: usize) -> Result<Self, QcError> {
        check_n(n)?;
        let mut h = CircleHomeomorphism { kind, lift: Vec::new(), deriv: Vec::new() };
        h.lift = grid(n).map(|t| h.lift_at(t)).collect();
        h.deriv = grid(n).map(|t| h.derivative_at(t)).collect();
        h.validate()?;
        Ok(h)
    }

    pub fn identity(n: usize) -> Result<Self, QcError> {
        Self::analytic(HomeoKind::Identity, n)
    }

    pub fn rotation(angle: f64, n: usize) -> Result<Self, QcError> {
        Self::analytic(HomeoKind::Rotation { angle }, n)
    }

    pub fn mobius_trace(map: Mobius, n: usize) -> Result<Self, QcError> {
        Self::analytic(HomeoKind::MobiusTrace { map }, n)
    }

    pub fn sine(amp: f64, n: usize) -> Result<Self, QcError> {
        if !(amp.abs() < 1.0) {
            return Err(QcError::NotMonotone(format!("θ + {amp}·sin θ is not monotone")));
        }
        Self::analytic(HomeoKind::Sine { amp }, n)
    }

    /// Knots `(θ_i, H_i)`, `θ_0 = 0`, both coordinates strictly increasing
    /// and `H_last < H_0 + 2π`.
    pub fn piecewise_linear(knots: Vec<(f64, f64)>, n: usize) -> Result<Self, QcError> {
        if knots.is_empty() || knots[0].0 != 0.0 {
            return Err(QcError::Parameter("first knot must sit at θ = 0".into()));
        }
        let last = knots[knots.len() - 1];
        let ok = knots.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1)
            && last.0 < TAU
            && last.1 < knots[0].1 + TAU;
        if !ok {
            return Err(QcError::NotMonotone("knots must increase".into()));
        }
        Self::analytic(HomeoKind::PiecewiseLinear { knots }, n)
    }

    /// Two-slope map with right/left derivative ratio `ratio` at θ = 0
    /// (and `1/ratio` at θ = π).
    pub fn kink(ratio: f64, n: usize) -> Result<Self, QcError> {
        let s2 = 2.0 / (1.0 + ratio);
        Self::piecewise_linear(vec![(0.0, 0.0), (TAU / 2.0, TAU / 2.0 * ratio * s2)], n)
    }

    /// Lift samples on the uniform grid; derivatives by periodic centered
    /// differences unless supplied.
    pub fn sampled(lift: Vec<f64>, deriv: Option<Vec<f64>>) -> Result<Self, QcError> {
        let n = lift.len();
        check_n(n)?;
        let deriv = match deriv {
            Some(d) if d.len() == n => d,
            Some(_) => return Err(QcError::Parameter("derivative length mismatch".into())),
            None => {
                let dt = TAU / n as f64;
                (0..n)
                    .map(|k| {
                        let next = if k + 1 == n { lift[0] + TAU } else { lift[k + 1] };
                        let prev = if k == 0 { lift[n - 1] - TAU } else { lift[k - 1] };
                        (next - prev) / (2.0 * dt)
                    })
                    .collect()
            }
        };
        let h = CircleHomeomorphism { kind: HomeoKind::Sampled, lift, deriv };
        h.validate()?;
        Ok(h)
    }

    /// `outer ∘ self ∘ inner`.
    pub fn conjugate(&self, outer: Mobius, inner: Mobius) -> Result<Self, QcError> {
        let n = self.lift.len();
        let kind = HomeoKind::Conjugated { outer, inner, base: Box::new(self.clone()) };
        let mut h = CircleHomeomorphism { kind, lift: Vec::new(), deriv: Vec::new() };
        let mut lift = Vec::with_capacity(n);
        let mut prev = h.apply_unit(C::new(1.0, 0.0)).arg();
        lift.push(prev);
        for t in grid(n).skip(1) {
            let a = h.apply_unit(C::from_polar(1.0, t)).arg();
            prev += (a - prev + TAU / 2.0).rem_euclid(TAU) - TAU / 2.0;
            lift.push(prev);
        }
        h.lift = lift;
        h.deriv = grid(n).map(|t| h.derivative_at(t)).collect();
        h.validate()?;
        Ok(h)
    }

    fn validate(&self) -> Result<(), QcError> {
        let n = self.lift.len();
        if self.lift.iter().chain(&self.deriv).any(|v| !v.is_finite()) {
            return Err(QcError::NotMonotone("non-finite samples".into()));
        }
        for k in 0..n {
            let next = if k + 1 == n { self.lift[0] + TAU } else { self.lift[k + 1] };
            if !(next > self.lift[k]) {
                return Err(QcError::NotMonotone(format!("lift not increasing at sample {k}")));
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> &HomeoKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        self.lift.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lift.is_empty()
    }

    pub fn theta(&self) -> Vec<f64> {
        grid(self.lift.len()).collect()
    }

    pub fn lift_samples(&self) -> &[f64] {
        &self.lift
    }

    pub fn derivative_samples(&self) -> &[f64] {
        &self.deriv
    }

    /// `H(θ)` at any real θ.
    pub fn lift_at(&self, theta: f64) -> f64 {
        match &self.kind {
            HomeoKind::Identity => theta,
            HomeoKind::Rotation { angle } => theta + angle,
            HomeoKind::MobiusTrace { map } => {
                // e^{i rot}(z + a)/(1 + ā z) = e^{i rot} z (1 + a z̄)/conj(1 + a z̄).
                let q = 1.0 + map.a * C::from_polar(1.0, -theta);
                theta + map.rot + 2.0 * q.arg()
            }
            HomeoKind::Sine { amp } => theta + amp * theta.sin(),
            HomeoKind::PiecewiseLinear { knots } => {
                let turns = (theta / TAU).floor();
                let t = theta - turns * TAU;
                let i = knots.partition_point(|k| k.0 <= t) - 1;
                let (t0, h0) = knots[i];
                let (t1, h1) = if i + 1 < knots.len() { knots[i + 1] } else { (TAU, knots[0].1 + TAU) };
                h0 + (t - t0) * (h1 - h0) / (t1 - t0) + turns * TAU
            }
            HomeoKind::Sampled | HomeoKind::Conjugated { .. } => self.interpolate(theta),
        }
    }

    fn interpolate(&self, theta: f64) -> f64 {
        // Periodic Catmull-Rom on H(θ) − θ.
        let n = self.lift.len();
        let h = TAU / n as f64;
        let x = theta / h;
        let fl = x.floor();
        let s = x - fl;
        let i = fl as i64;
        let p = |k: i64| {
            let idx = (i + k).rem_euclid(n as i64) as usize;
            self.lift[idx] - TAU * idx as f64 / n as f64
        };
        let (p0, p1, p2, p3) = (p(-1), p(0), p(1), p(2));
        let a = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
        let b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
        let c = -0.5 * p0 + 0.5 * p2;
        ((a * s + b) * s + c) * s + p1 + theta
    }

    /// `H′(θ)`.
    pub fn derivative_at(&self, theta: f64) -> f64 {
        match &self.kind {
            HomeoKind::Identity | HomeoKind::Rotation { .. } => 1.0,
            HomeoKind::MobiusTrace { map } => {
                (1.0 - map.a.norm_sqr()) / (1.0 + map.a.conj() * C::from_polar(1.0, theta)).norm_sqr()
            }
            HomeoKind::Sine { amp } => 1.0 + amp * theta.cos(),
            HomeoKind::PiecewiseLinear { knots } => {
                let t = theta.rem_euclid(TAU);
                let i = knots.partition_point(|k| k.0 <= t) - 1;
                let (t0, h0) = knots[i];
                let (t1, h1) = if i + 1 < knots.len() { knots[i + 1] } else { (TAU, knots[0].1 + TAU) };
                (h1 - h0) / (t1 - t0)
            }
            HomeoKind::Conjugated { outer, inner, base } => {
                let z = C::from_polar(1.0, theta);
                let u = inner.apply(z);
                let du = mobius_circle_speed(inner, z);
                let v = base.apply_unit(u);
                let dv = base.derivative_at(u.arg());
                du * dv * mobius_circle_speed(outer, v)
            }
            HomeoKind::Sampled => {
                let n = self.lift.len();
                let h = TAU / n as f64;
                let x = theta.rem_euclid(TAU) / h;
                let i = (x.floor() as usize) % n;
                let s = x - x.floor();
                self.deriv[i] * (1.0 - s) + self.deriv[(i + 1) % n] * s
            }
        }
    }

    /// `h(z)` for `|z| = 1`.
    pub fn apply_unit(&self, z: C) -> C {
        match &self.kind {
            HomeoKind::Identity => z,
            HomeoKind::Rotation { angle } => z * C::from_polar(1.0, *angle),
            HomeoKind::MobiusTrace { map } => {
                let w = map.apply(z);
                w / w.norm()
            }
            HomeoKind::Sine { amp } => {
                let (s, c) = (amp * z.im / z.norm()).sin_cos();
                let w = z * C::new(c, s);
                w / w.norm()
            }
            HomeoKind::Conjugated { outer, inner, base } => {
                let u = inner.apply(z);
                let w = outer.apply(base.apply_unit(u / u.norm()));
                w / w.norm()
            }
            _ => C::from_polar(1.0, self.lift_at(z.arg())),
        }
    }

    /// `{"theta": [...], "H": [...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "theta": self.theta(), "H": self.lift })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, QcError> {
        #[derive(Deserialize)]
        struct Raw {
            theta: Vec<f64>,
            #[serde(rename = "H")]
            h: Vec<f64>,
        }
        let raw: Raw = serde_json::from_value(v.clone()).map_err(|e| QcError::Json(e.to_string()))?;
        if raw.theta.len() != raw.h.len() {
            return Err(QcError::Json("theta and H lengths differ".into()));
        }
        let n = raw.theta.len();
        for (k, t) in raw.theta.iter().enumerate() {
            if (t - TAU * k as f64 / n as f64).abs() > 1e-9 {
                return Err(QcError::Json("theta must be the uniform grid 2πk/N".into()));
            }
        }
        Self::sampled(raw.h, None)
    }
}

/// `|M′(z)|` on the unit circle.
fn mobius_circle_speed(m: &Mobius, z: C) -> f64 {
    (1.0 - m.a.norm_sqr()) / (1.0 + m.a.conj() * z).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mobius_lift_consistent_with_unit_map() {
        let m = Mobius::new(C::new(0.4, -0.2), 0.3).unwrap();
        let h = CircleHomeomorphism::mobius_trace(m, 256).unwrap();
        for t in [0.0, 0.7, 2.0, 4.5, 6.2] {
            let w = C::from_polar(1.0, h.lift_at(t));
            assert!((w - h.apply_unit(C::from_polar(1.0, t))).norm() < 1e-14);
            let fd = (h.lift_at(t + 1e-6) - h.lift_at(t - 1e-6)) / 2e-6;
            assert!((fd - h.derivative_at(t)).abs() < 1e-7);
        }
        assert!((h.lift_at(TAU) - h.lift_at(0.0) - TAU).abs() < 1e-12);
    }

    #[test]
    fn sine_and_kink() {
        let h = CircleHomeomorphism::sine(0.3, 512).unwrap();
        let t = 1.1f64;
        assert!((h.apply_unit(C::from_polar(1.0, t)) - C::from_polar(1.0, t + 0.3 * t.sin())).norm() < 1e-15);
        assert!(CircleHomeomorphism::sine(1.2, 64).is_err());
        let k = CircleHomeomorphism::kink(2.0, 256).unwrap();
        assert!((k.derivative_at(0.1) / k.derivative_at(-0.1) - 2.0).abs() < 1e-12);
        assert!((k.lift_at(TAU) - TAU).abs() < 1e-12);
    }

    #[test]
    fn sampled_rejects_non_monotone() {
        let mut lift: Vec<f64> = grid(64).collect();
        lift.swap(3, 4);
        assert!(matches!(CircleHomeomorphism::sampled(lift, None), Err(QcError::NotMonotone(_))));
    }

    #[test]
    fn json_round_trip_and_interpolation() {
        let h = CircleHomeomorphism::sine(0.3, 1024).unwrap();
        let back = CircleHomeomorphism::from_json(&h.to_json()).unwrap();
        assert_eq!(back.lift_samples(), h.lift_samples());
        for t in [0.01, 1.0, 3.3, 5.9] {
            assert!((back.lift_at(t) - h.lift_at(t)).abs() < 1e-8);
        }
    }

    #[test]
    fn mobius_inverse() {
        let m = Mobius::new(C::new(0.3, 0.5), 1.2).unwrap();
        let z = C::new(0.1, -0.4);
        assert!((m.inverse().apply(m.apply(z)) - z).norm() < 1e-14);
    }
}
