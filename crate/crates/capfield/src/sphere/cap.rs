use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CapfieldError, Result};
use crate::quad::{integrate_with_breakpoints, QuadConfig};
use crate::special::betainc;
use crate::sphere::point::{angle_of_chord, chord_of_angle, SpherePoint};

/// Open chordal cap κ(center, radius) = {x ∈ S^d : ‖x − center‖ < radius}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cap {
    pub center: SpherePoint,
    pub radius: f64,
}

impl Cap {
    /// Requires 0 < radius ≤ 2; radius 2 is the whole sphere minus the antipode.
    pub fn new(center: SpherePoint, radius: f64) -> Result<Self> {
        if !radius.is_finite() || radius <= 0.0 || radius > 2.0 {
            return Err(CapfieldError::OutOfRange(format!(
                "cap radius must lie in (0, 2], got {radius}"
            )));
        }
        Ok(Cap { center, radius })
    }

    pub fn d(&self) -> usize {
        self.center.d()
    }

    /// Geodesic half-angle of the cap: 2 asin(radius/2).
    pub fn angular_radius(&self) -> f64 {
        angle_of_chord(self.radius)
    }

    /// Chordal diameter, saturating at 2 (the sphere's own diameter).
    pub fn diameter(&self) -> f64 {
        (2.0 * self.radius).min(2.0)
    }

    pub fn contains(&self, p: &SpherePoint) -> bool {
        self.center.dist(p) < self.radius
    }

    /// σ(κ) under the normalized surface measure.
    pub fn measure(&self) -> Result<f64> {
        cap_measure(self.d(), self.radius)
    }
}

/// Half-open slice S(y, δ1, δ2) = κ(y, δ2) \ κ(y, δ1), 0 ≤ δ1 ≤ δ2 ≤ 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    pub center: SpherePoint,
    pub inner: f64,
    pub outer: f64,
}

impl Slice {
    pub fn new(center: SpherePoint, inner: f64, outer: f64) -> Result<Self> {
        if !(inner.is_finite() && outer.is_finite()) || inner < 0.0 || outer < inner || outer > 2.0
        {
            return Err(CapfieldError::OutOfRange(format!(
                "slice radii must satisfy 0 ≤ inner ≤ outer ≤ 2, got ({inner}, {outer})"
            )));
        }
        Ok(Slice {
            center,
            inner,
            outer,
        })
    }

    pub fn contains(&self, p: &SpherePoint) -> bool {
        let s = self.center.dist(p);
        self.inner <= s && s < self.outer
    }

    pub fn measure(&self) -> Result<f64> {
        Ok(cap_measure(self.center.d(), self.outer)? - cap_measure(self.center.d(), self.inner)?)
    }
}

/// σ(κ(·, δ)) = I_{δ²/4}(d/2, d/2), the regularized incomplete beta of the
/// height parameter; exact closed forms: δ²/4 for d = 2, (2/π) asin(δ/2) for d = 1.
pub fn cap_measure(d: usize, delta: f64) -> Result<f64> {
    if d == 0 {
        return Err(CapfieldError::OutOfRange(
            "cap measure needs d ≥ 1".into(),
        ));
    }
    if !delta.is_finite() || delta < 0.0 || delta > 2.0 {
        return Err(CapfieldError::OutOfRange(format!(
            "cap radius must lie in [0, 2], got {delta}"
        )));
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    if delta == 2.0 {
        return Ok(1.0);
    }
    let x = delta * delta / 4.0;
    match d {
        1 => Ok(2.0 / PI * (0.5 * delta).asin()),
        2 => Ok(x),
        _ => {
            let a = d as f64 / 2.0;
            Ok(betainc(a, a, x))
        }
    }
}

/// Inverse of `cap_measure` in δ: the chordal radius whose cap has measure m.
pub fn inverse_cap_measure(d: usize, m: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(CapfieldError::OutOfRange(format!(
            "cap measure must lie in [0, 1], got {m}"
        )));
    }
    match d {
        0 => Err(CapfieldError::OutOfRange("cap measure needs d ≥ 1".into())),
        1 => Ok(2.0 * (0.5 * PI * m).sin()),
        2 => Ok(2.0 * m.sqrt()),
        _ => {
            let mut lo = 0.0_f64;
            let mut hi = 2.0_f64;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if cap_measure(d, mid)? < m {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        }
    }
}

/// Smallest C with σ(κ(y, min(2δ, 2))) ≤ C σ(κ(y, δ)) over a log grid of radii.
pub fn doubling_constant(d: usize) -> f64 {
    let mut worst = 1.0_f64;
    let n = 4000;
    for i in 0..=n {
        let t = i as f64 / n as f64;
        let delta = 1e-8_f64.powf(1.0 - t) * 2.0_f64.powf(t);
        let small = cap_measure(d, delta).unwrap();
        let big = cap_measure(d, (2.0 * delta).min(2.0)).unwrap();
        if small > 0.0 {
            worst = worst.max(big / small);
        }
    }
    worst
}

/// Gauge family: φ(s) = s^γ target dimension, ψ(s) = s^γ' dilation target,
/// and a divergence weight τ, either pure power s^{-β} or power with an extra
/// logarithm s^{-β}(1 + ln(1/s)) on (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaugeKind {
    Power,
    PowerLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeSpec {
    pub kind: GaugeKind,
    pub beta: f64,
    pub gamma: f64,
    pub psi_gamma: f64,
}

impl GaugeSpec {
    pub fn new(kind: GaugeKind, beta: f64, gamma: f64, psi_gamma: f64) -> Result<Self> {
        for (name, v) in [("beta", beta), ("gamma", gamma), ("psi_gamma", psi_gamma)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(CapfieldError::OutOfRange(format!(
                    "gauge parameter {name} must be positive, got {v}"
                )));
            }
        }
        Ok(GaugeSpec {
            kind,
            beta,
            gamma,
            psi_gamma,
        })
    }

    pub fn power(beta: f64, gamma: f64, psi_gamma: f64) -> Result<Self> {
        GaugeSpec::new(GaugeKind::Power, beta, gamma, psi_gamma)
    }

    /// φ(s) = s^γ.
    pub fn phi(&self, s: f64) -> f64 {
        s.powf(self.gamma)
    }

    /// ψ(s) = s^γ'.
    pub fn psi(&self, s: f64) -> f64 {
        s.powf(self.psi_gamma)
    }

    /// Divergence weight τ(s) for s ∈ (0, 1].
    pub fn tau(&self, s: f64) -> f64 {
        match self.kind {
            GaugeKind::Power => s.powf(-self.beta),
            GaugeKind::PowerLog => s.powf(-self.beta) * (1.0 + (1.0 / s).ln().max(0.0)),
        }
    }
}

/// κ(y, ρ) ↦ κ(y, ρ^{γ/γ'}), the cap with φ-size equal to the input's ψ-size,
/// clamped at the whole sphere.
pub fn dilate_cap(cap: &Cap, gauge: &GaugeSpec) -> Result<Cap> {
    if gauge.psi_gamma <= 0.0 || gauge.gamma <= 0.0 {
        return Err(CapfieldError::GaugeIncompatible(
            "dilation needs positive gauge exponents".into(),
        ));
    }
    let r = cap.radius.powf(gauge.gamma / gauge.psi_gamma).min(2.0);
    Cap::new(cap.center.clone(), r)
}

/// Whether two open caps overlap, by the exact angular criterion
/// θ(centers) < θ(ρ1) + θ(ρ2).
pub fn caps_intersect(a: &Cap, b: &Cap) -> bool {
    a.center.angle_to(&b.center) < a.angular_radius() + b.angular_radius()
}

/// Whether κ_a ⊆ κ_b, by θ(centers) + θ(ρ_a) ≤ θ(ρ_b).
pub fn cap_subset(a: &Cap, b: &Cap) -> bool {
    a.center.angle_to(&b.center) + a.angular_radius() <= b.angular_radius() + 1e-15
}

/// σ(κ_a ∩ κ_b): exact arc overlap for d = 1, one-dimensional quadrature in
/// the polar angle for d = 2, stratified sampling for d ≥ 3.
pub fn cap_intersection_measure(a: &Cap, b: &Cap) -> Result<f64> {
    if a.center.coords().len() != b.center.coords().len() {
        return Err(CapfieldError::DimensionMismatch {
            expected: a.center.coords().len(),
            got: b.center.coords().len(),
        });
    }
    if !caps_intersect(a, b) {
        return Ok(0.0);
    }
    if cap_subset(a, b) {
        return a.measure();
    }
    if cap_subset(b, a) {
        return b.measure();
    }
    let d = a.d();
    match d {
        1 => {
            let ca = a.center.angle()?;
            let cb = b.center.angle()?;
            // κ(c, ρ) on the circle is the arc of half-width θ(ρ) around c
            let ta = a.angular_radius();
            let tb = b.angular_radius();
            // overlap of [ca − ta, ca + ta] and [cb − tb, cb + tb] on the circle;
            // wide arcs can meet on both sides of the circle, so count the
            // component across the near gap and the one across the far gap
            let mut gap = (cb - ca).rem_euclid(2.0 * PI);
            if gap > PI {
                gap -= 2.0 * PI;
            }
            let shorter = (2.0 * ta).min(2.0 * tb);
            let near = ((ta + tb) - gap.abs()).max(0.0).min(shorter);
            let far = ((ta + tb) - (2.0 * PI - gap.abs())).max(0.0).min(shorter);
            let overlap = (near + far).min(shorter).min(2.0 * PI);
            Ok(overlap / (2.0 * PI))
        }
        2 => cap_intersection_measure_d2(a, b),
        _ => cap_intersection_measure_mc(a, b, 200_000, 0x00c0ffee),
    }
}

/// d = 2 case: with Δ the angle between centers and θ the polar angle from
/// center a, the azimuthal arc inside κ_b has length
/// 2 acos((cos θ_b − cos Δ cos θ)/(sin Δ sin θ)), and
/// σ(κ_a ∩ κ_b) = (1/4π) ∫ L(θ) sin θ dθ.
fn cap_intersection_measure_d2(a: &Cap, b: &Cap) -> Result<f64> {
    let delta = a.center.angle_to(&b.center);
    let th_a = a.angular_radius();
    let th_b = b.angular_radius();
    if delta < 1e-12 {
        // concentric to rounding: the smaller cap wins
        return if th_a <= th_b { a.measure() } else { b.measure() };
    }
    if delta > PI - 1e-12 {
        // antipodal centers: distance to b's center is π − θ exactly
        let lo = (PI - th_b).max(0.0);
        if th_a <= lo {
            return Ok(0.0);
        }
        return Ok(cap_measure(2, chord_of_angle(th_a))?
            - cap_measure(2, chord_of_angle(lo))?);
    }
    let (sd, cd) = delta.sin_cos();
    let ctb = th_b.cos();
    let arc = move |theta: f64| -> f64 {
        if theta + delta <= th_b {
            return 2.0 * PI;
        }
        if (theta - delta).abs() >= th_b {
            return 0.0;
        }
        let c = (ctb - cd * theta.cos()) / (sd * theta.sin());
        2.0 * c.clamp(-1.0, 1.0).acos()
    };
    let f = |theta: f64| arc(theta) * theta.sin();
    let hi = th_a.min(delta + th_b);
    let lo = 0.0;
    let breaks = [th_b - delta, delta - th_b, delta + th_b];
    let cfg = QuadConfig {
        abs_tol: 1e-13,
        rel_tol: 1e-11,
        max_panels: 2000,
    };
    let q = integrate_with_breakpoints(&f, lo, hi, &breaks, &cfg);
    if !q.converged {
        return Err(CapfieldError::QuadratureAccuracy {
            achieved: q.abs_error,
            requested: 1e-11,
        });
    }
    Ok(q.value / (4.0 * PI))
}

/// Stratified estimate: sample the smaller cap in equal-measure polar shells
/// and count hits in the other cap.
fn cap_intersection_measure_mc(a: &Cap, b: &Cap, samples: usize, seed: u64) -> Result<f64> {
    use rand::SeedableRng;
    let (small, large) = if a.radius <= b.radius { (a, b) } else { (b, a) };
    let total = small.measure()?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for i in 0..samples {
        let u = (i as f64 + rng.gen::<f64>()) / samples as f64;
        let p = sample_cap_at_quantile(small, u, &mut rng)?;
        if large.contains(&p) {
            hits += 1;
        }
    }
    Ok(total * hits as f64 / samples as f64)
}

/// Uniform draw from a cap conditioned on the radial measure quantile u.
pub(crate) fn sample_cap_at_quantile(cap: &Cap, u: f64, rng: &mut impl Rng) -> Result<SpherePoint> {
    let d = cap.d();
    let s = inverse_cap_measure(d, u * cap_measure(d, cap.radius)?)?;
    let theta = angle_of_chord(s);
    Ok(rotate_from_pole(&cap.center, theta, rng))
}

/// Uniform draw from a cap.
pub fn uniform_in_cap(cap: &Cap, rng: &mut impl Rng) -> Result<SpherePoint> {
    sample_cap_at_quantile(cap, rng.gen::<f64>(), rng)
}

/// Point at geodesic angle θ from `center`, in a uniformly random tangent
/// direction.
pub fn rotate_from_pole(center: &SpherePoint, theta: f64, rng: &mut impl Rng) -> SpherePoint {
    let n = center.coords().len();
    // Gaussian vector orthogonalized against the center
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            // Box-Muller
            let u1: f64 = rng.gen::<f64>().max(1e-300);
            let u2: f64 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
        })
        .collect();
    let proj: f64 = w.iter().zip(center.coords()).map(|(a, b)| a * b).sum();
    for (wi, ci) in w.iter_mut().zip(center.coords()) {
        *wi -= proj * ci;
    }
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-12 {
        // essentially impossible; fall back to a coordinate direction
        return rotate_from_pole(center, theta, rng);
    }
    let (st, ct) = theta.sin_cos();
    let coords: Vec<f64> = center
        .coords()
        .iter()
        .zip(&w)
        .map(|(c, wi)| ct * c + st * wi / norm)
        .collect();
    SpherePoint::normalized(coords).expect("rotation preserves the sphere")
}

/// Uniform draw from the whole sphere.
pub fn uniform_on_sphere(d: usize, rng: &mut impl Rng) -> SpherePoint {
    loop {
        let coords: Vec<f64> = (0..=d)
            .map(|_| {
                let u1: f64 = rng.gen::<f64>().max(1e-300);
                let u2: f64 = rng.gen();
                (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
            })
            .collect();
        if let Ok(p) = SpherePoint::normalized(coords) {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Independent oracle: σ(κ(·, δ)) = c_d ∫_0^{θ(δ)} sin^{d−1} t dt with the
    /// normalization fixed by σ(S^d) = 1.
    fn cap_measure_oracle(d: usize, delta: f64) -> f64 {
        let theta = angle_of_chord(delta);
        let f = |t: f64| t.sin().powi(d as i32 - 1);
        let cfg = QuadConfig::default();
        let num = integrate_with_breakpoints(&f, 0.0, theta, &[], &cfg).value;
        let den = integrate_with_breakpoints(&f, 0.0, PI, &[], &cfg).value;
        num / den
    }

    #[test]
    fn measure_matches_quadrature_oracle() {
        for d in 1..=4 {
            for &delta in &[0.01, 0.1, 0.5, 1.0, 1.4142135623730951, 1.9, 1.999] {
                let m = cap_measure(d, delta).unwrap();
                let o = cap_measure_oracle(d, delta);
                assert!(
                    (m - o).abs() < 1e-10,
                    "d={d} delta={delta}: {m} vs oracle {o}"
                );
            }
        }
    }

    #[test]
    fn measure_closed_forms() {
        // half-sphere at δ = √2 in every dimension
        for d in 1..=5 {
            let m = cap_measure(d, 2.0_f64.sqrt()).unwrap();
            assert!((m - 0.5).abs() < 1e-12, "d={d}: {m}");
        }
        assert_eq!(cap_measure(3, 0.0).unwrap(), 0.0);
        assert_eq!(cap_measure(3, 2.0).unwrap(), 1.0);
        // d = 2 exact form δ²/4
        assert!((cap_measure(2, 0.6).unwrap() - 0.09).abs() < 1e-15);
        // d = 1 arc fraction
        let m = cap_measure(1, 1.0).unwrap();
        assert!((m - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_roundtrip() {
        for d in 1..=4 {
            for &m in &[1e-6, 0.01, 0.3, 0.5, 0.9, 0.999] {
                let delta = inverse_cap_measure(d, m).unwrap();
                let back = cap_measure(d, delta).unwrap();
                assert!((back - m).abs() < 1e-9, "d={d} m={m}: {back}");
            }
        }
    }

    #[test]
    fn ahlfors_ratio_bounds() {
        // σ(κ(·, δ))/δ^d stays within fixed positive bounds; on the circle the
        // ratio runs from 1/π (δ → 0) up to 1/2 (δ = 2), on S² it is exactly 1/4
        for &delta in &[1e-6, 0.001, 0.1, 0.5, 1.0, 1.5, 2.0] {
            let ratio = cap_measure(1, delta).unwrap() / delta;
            assert!(
                ratio >= 1.0 / PI - 1e-12 && ratio <= 0.5 + 1e-12,
                "{delta}: {ratio}"
            );
            let ratio2 = cap_measure(2, delta).unwrap() / (delta * delta);
            assert!((ratio2 - 0.25).abs() < 1e-12, "{delta}: {ratio2}");
            // d = 3: ratio falls from 2/(3π) at δ → 0 to 1/8 at δ = 2
            let ratio3 = cap_measure(3, delta).unwrap() / (delta * delta * delta);
            assert!(ratio3 >= 0.125 - 1e-12 && ratio3 <= 0.213, "{delta}: {ratio3}");
        }
    }

    #[test]
    fn doubling_constants() {
        let c1 = doubling_constant(1);
        assert!(c1 <= 3.0 + 1e-9 && c1 > 2.9, "{c1}");
        let c2 = doubling_constant(2);
        assert!((c2 - 4.0).abs() < 1e-6, "{c2}");
    }

    #[test]
    fn rejects_bad_caps_and_slices() {
        let n = SpherePoint::north_pole(2);
        assert!(Cap::new(n.clone(), 0.0).is_err());
        assert!(Cap::new(n.clone(), 2.5).is_err());
        assert!(Cap::new(n.clone(), f64::NAN).is_err());
        assert!(Slice::new(n.clone(), 0.5, 0.4).is_err());
        assert!(Slice::new(n.clone(), -0.1, 0.4).is_err());
        assert!(Slice::new(n, 0.1, 2.1).is_err());
    }

    #[test]
    fn slice_measure_is_cap_difference() {
        let n = SpherePoint::north_pole(2);
        let s = Slice::new(n, 0.3, 0.8).unwrap();
        let m = s.measure().unwrap();
        assert!((m - (0.16 - 0.0225)).abs() < 1e-15);
    }

    #[test]
    fn gauge_validation_and_dilation() {
        assert!(GaugeSpec::power(0.5, 1.0, 2.0).is_ok());
        assert!(GaugeSpec::power(0.0, 1.0, 2.0).is_err());
        assert!(GaugeSpec::power(0.5, -1.0, 2.0).is_err());
        let g = GaugeSpec::power(0.5, 1.0, 2.0).unwrap();
        let cap = Cap::new(SpherePoint::north_pole(2), 0.25).unwrap();
        let big = dilate_cap(&cap, &g).unwrap();
        assert!((big.radius - 0.5).abs() < 1e-15);
        // roundtrip (φ,ψ) then (ψ,φ) is the identity away from the clamp
        let back = GaugeSpec::power(0.5, 2.0, 1.0).unwrap();
        let again = dilate_cap(&big, &back).unwrap();
        assert!((again.radius - cap.radius).abs() < 1e-15);
        // dilation clamps at the whole sphere
        let whole = Cap::new(SpherePoint::north_pole(2), 1.9).unwrap();
        let g3 = GaugeSpec::power(0.5, 3.0, 1.0).unwrap();
        assert_eq!(dilate_cap(&whole, &g3).unwrap().radius, 2.0);
    }

    #[test]
    fn tau_forms() {
        let g = GaugeSpec::new(GaugeKind::Power, 0.5, 1.0, 1.0).unwrap();
        assert!((g.tau(0.25) - 2.0).abs() < 1e-15);
        let gl = GaugeSpec::new(GaugeKind::PowerLog, 0.5, 1.0, 1.0).unwrap();
        assert!((gl.tau(0.25) - 2.0 * (1.0 + 4.0_f64.ln())).abs() < 1e-12);
        assert!((gl.tau(1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn intersection_exact_on_circle() {
        let a = Cap::new(SpherePoint::from_angle(0.0), 1.0).unwrap();
        let b = Cap::new(SpherePoint::from_angle(0.4), 1.0).unwrap();
        // arcs [−θ, θ] and [0.4 − θ, 0.4 + θ], θ = 2 asin(1/2) = π/3
        let theta = PI / 3.0;
        let expected = (2.0 * theta - 0.4) / (2.0 * PI);
        let got = cap_intersection_measure(&a, &b).unwrap();
        assert!((got - expected).abs() < 1e-14, "{got} vs {expected}");
        // far apart: zero
        let c = Cap::new(SpherePoint::from_angle(2.5), 0.3).unwrap();
        assert_eq!(cap_intersection_measure(&a, &c).unwrap(), 0.0);
        // nested: smaller measure
        let inner = Cap::new(SpherePoint::from_angle(0.01), 0.1).unwrap();
        let got = cap_intersection_measure(&a, &inner).unwrap();
        assert!((got - inner.measure().unwrap()).abs() < 1e-15);
        // wide arcs meet on both sides: half-widths 0.9π at angular gap π
        // intersect in two components of length 0.8π each
        let rho = chord_of_angle(0.9 * PI);
        let w1 = Cap::new(SpherePoint::from_angle(0.0), rho).unwrap();
        let w2 = Cap::new(SpherePoint::from_angle(PI), rho).unwrap();
        let got = cap_intersection_measure(&w1, &w2).unwrap();
        assert!((got - 0.8).abs() < 1e-12, "{got}");
        // two full caps always overlap fully
        let f1 = Cap::new(SpherePoint::from_angle(1.1), 2.0).unwrap();
        let f2 = Cap::new(SpherePoint::from_angle(-0.7), 2.0).unwrap();
        assert!((cap_intersection_measure(&f1, &f2).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn intersection_d2_matches_monte_carlo() {
        let a = Cap::new(SpherePoint::north_pole(2), 0.8).unwrap();
        let b = Cap::new(
            SpherePoint::normalized(vec![0.5, 0.0, 1.0]).unwrap(),
            0.6,
        )
        .unwrap();
        let exact = cap_intersection_measure(&a, &b).unwrap();
        let mc = cap_intersection_measure_mc(&a, &b, 400_000, 7).unwrap();
        assert!(
            (exact - mc).abs() < 3e-3,
            "quadrature {exact} vs sampling {mc}"
        );
        // symmetric in the arguments
        let swapped = cap_intersection_measure(&b, &a).unwrap();
        assert!((exact - swapped).abs() < 1e-9);
    }

    #[test]
    fn intersection_d2_antipodal_and_concentric() {
        let n = SpherePoint::north_pole(2);
        let a = Cap::new(n.clone(), 1.9).unwrap();
        let b = Cap::new(n.antipode(), 1.9).unwrap();
        let got = cap_intersection_measure(&a, &b).unwrap();
        let expected = a.measure().unwrap() + b.measure().unwrap() - 1.0;
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
        let c = Cap::new(n.clone(), 0.5).unwrap();
        let d = Cap::new(n, 0.7).unwrap();
        let got = cap_intersection_measure(&c, &d).unwrap();
        assert!((got - c.measure().unwrap()).abs() < 1e-15);
    }

    #[test]
    fn uniform_cap_samples_land_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [1usize, 2, 3] {
            let cap = Cap::new(SpherePoint::north_pole(d), 0.7).unwrap();
            for _ in 0..500 {
                let p = uniform_in_cap(&cap, &mut rng).unwrap();
                assert!(cap.contains(&p) || cap.center.dist(&p) < cap.radius + 1e-12);
            }
        }
    }
}
