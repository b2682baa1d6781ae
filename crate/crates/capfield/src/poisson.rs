//! Poisson kernel of the unit ball and integrals against cap-based boundary data.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CapfieldError, Result};
use crate::quad::{geometric_breakpoints, integrate_with_breakpoints, QuadConfig};
use crate::special::ellip_e;
use crate::sphere::cap::{cap_measure, sample_cap_at_quantile, Cap};
use crate::sphere::point::{angle_of_chord, SpherePoint};

/// P(ry, ξ) = (1−r²)/‖ry−ξ‖^(d+1) as a function of the boundary chordal
/// distance δ = ‖y−ξ‖, using the identity ‖ry−ξ‖² = (1−r)² + rδ² for unit
/// vectors: (1−r²)/((1−r)² + rδ²)^((d+1)/2).
pub fn kernel_value(d: usize, r: f64, delta: f64) -> Result<f64> {
    if d == 0 {
        return Err(CapfieldError::OutOfRange("kernel needs d ≥ 1".into()));
    }
    if !(0.0..1.0).contains(&r) {
        return Err(CapfieldError::OutOfRange(format!(
            "kernel radius must lie in [0, 1), got {r}"
        )));
    }
    if !(0.0..=2.0).contains(&delta) {
        return Err(CapfieldError::OutOfRange(format!(
            "chordal distance must lie in [0, 2], got {delta}"
        )));
    }
    let s2 = (1.0 - r) * (1.0 - r) + r * delta * delta;
    Ok((1.0 - r * r) / s2.powf((d as f64 + 1.0) / 2.0))
}

/// Antiderivative of the circle kernel in the angle: F(φ) with
/// F'(φ) = (1−r²)/(1−2r cos φ + r²), continuous and strictly increasing on ℝ,
/// F(φ+2π) = F(φ) + 2π.
pub(crate) fn circle_kernel_antiderivative(r: f64, phi: f64) -> f64 {
    // reduce to [-π, π] and add back the winding so F stays continuous;
    // 1 − r cos t = (1 − r) + 2r sin²(t/2) avoids cancellation as r → 1
    let k = (phi / (2.0 * PI)).round();
    let t = phi - 2.0 * PI * k;
    let den = (1.0 - r) + 2.0 * r * (0.5 * t).sin().powi(2);
    t + 2.0 * (r * t.sin() / den).atan() + 2.0 * PI * k
}

/// Exact ∫ over {angle to y in [lo, hi]} of P(ry, ·) dσ on S¹.
pub(crate) fn circle_arc_integral(r: f64, lo: f64, hi: f64) -> f64 {
    (circle_kernel_antiderivative(r, hi) - circle_kernel_antiderivative(r, lo)) / (2.0 * PI)
}

/// ∫_{κ(z, cap_radius)} P(ry, ξ) dσ(ξ) with ‖y − z‖ = gamma.
///
/// d = 1 reduces to one adaptive quadrature over the arc angle; d = 2 to an
/// adaptive polar quadrature whose azimuthal integral is a complete elliptic
/// integral; d ≥ 3 uses stratified sampling over the cap (estimate grade).
pub fn cap_kernel_integral(d: usize, r: f64, gamma: f64, cap_radius: f64) -> Result<f64> {
    cap_kernel_integral_with(d, r, gamma, cap_radius, &QuadConfig::default())
}

pub fn cap_kernel_integral_with(
    d: usize,
    r: f64,
    gamma: f64,
    cap_radius: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(CapfieldError::OutOfRange(format!(
            "kernel radius must lie in [0, 1), got {r}"
        )));
    }
    if !(0.0..=2.0).contains(&gamma) {
        return Err(CapfieldError::OutOfRange(format!(
            "center offset must lie in [0, 2], got {gamma}"
        )));
    }
    if !(cap_radius > 0.0 && cap_radius <= 2.0) {
        return Err(CapfieldError::OutOfRange(format!(
            "cap radius must lie in (0, 2], got {cap_radius}"
        )));
    }
    if r == 0.0 {
        return cap_measure(d, cap_radius);
    }
    let a = angle_of_chord(gamma);
    let thc = angle_of_chord(cap_radius);
    let value = match d {
        0 => return Err(CapfieldError::OutOfRange("kernel needs d ≥ 1".into())),
        1 => {
            // 1 − 2r cos u + r² = (1−r)² + 4r sin²(u/2), stable as r → 1
            let f = |u: f64| {
                let s2 = (1.0 - r).powi(2) + 4.0 * r * (0.5 * u).sin().powi(2);
                (1.0 - r * r) / s2 / (2.0 * PI)
            };
            let (lo, hi) = (a - thc, a + thc);
            let mut breaks = geometric_breakpoints(0.0, 1.0 - r, lo, hi);
            breaks.extend(geometric_breakpoints(2.0 * PI, 1.0 - r, lo, hi));
            let q = integrate_with_breakpoints(&f, lo, hi, &breaks, cfg);
            if !q.converged {
                return Err(CapfieldError::QuadratureAccuracy {
                    achieved: q.abs_error,
                    requested: cfg.abs_tol.max(cfg.rel_tol * q.value.abs()),
                });
            }
            q.value
        }
        2 => {
            let sa = a.sin();
            let f = |theta: f64| {
                // A ∓ B = 1 + r² − 2r cos(θ ∓ a) = (1−r)² + 4r sin²((θ ∓ a)/2)
                let st = theta.sin();
                let am = (1.0 - r).powi(2) + 4.0 * r * (0.5 * (theta - a)).sin().powi(2);
                let ap = (1.0 - r).powi(2) + 4.0 * r * (0.5 * (theta + a)).sin().powi(2);
                let b = 2.0 * r * sa * st;
                st * ellip_e(2.0 * b / ap) / (am * ap.sqrt())
            };
            let breaks = geometric_breakpoints(a, 1.0 - r, 0.0, thc);
            let q = integrate_with_breakpoints(&f, 0.0, thc, &breaks, cfg);
            if !q.converged {
                return Err(CapfieldError::QuadratureAccuracy {
                    achieved: q.abs_error,
                    requested: cfg.abs_tol.max(cfg.rel_tol * q.value.abs()),
                });
            }
            (1.0 - r * r) / PI * q.value
        }
        _ => cap_kernel_integral_sampled(d, r, gamma, cap_radius, 1 << 18)?,
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Stratified estimate for d ≥ 3: equal-measure radial strata of the cap, one
/// point each, fixed seed.
fn cap_kernel_integral_sampled(
    d: usize,
    r: f64,
    gamma: f64,
    cap_radius: f64,
    samples: usize,
) -> Result<f64> {
    let y = SpherePoint::north_pole(d);
    let a = angle_of_chord(gamma);
    let mut center_coords = vec![0.0; d + 1];
    center_coords[d] = a.cos();
    center_coords[0] = a.sin();
    let center = SpherePoint::normalized(center_coords)?;
    let cap = Cap::new(center, cap_radius)?;
    let total = cap.measure()?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x00ca_b1e5);
    let mut sum = 0.0;
    for i in 0..samples {
        let u = (i as f64 + 0.5) / samples as f64;
        let xi = sample_cap_at_quantile(&cap, u, &mut rng)?;
        sum += kernel_value(d, r, y.dist(&xi).min(2.0))?;
    }
    Ok(total * sum / samples as f64)
}

/// How the term/atom data is interpreted: an L¹ density (cap sums only) or a
/// signed measure (cap sums plus point masses).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionMode {
    Function,
    Measure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapTerm {
    #[serde(flatten)]
    pub cap: Cap,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: SpherePoint,
    pub mass: f64,
}

/// Finite weighted sum of cap indicators, optionally with atoms in measure
/// mode: ξ ↦ Σ_i weight_i·1[ξ ∈ cap_i] (+ Σ_j mass_j·δ_{point_j}).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapFunction {
    pub d: usize,
    pub mode: FunctionMode,
    pub terms: Vec<CapTerm>,
    #[serde(default)]
    pub atoms: Vec<Atom>,
    /// Largest dyadic level the construction is meaningful at, when built by
    /// a truncated infinite sum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<u32>,
}

impl CapFunction {
    pub fn new(
        d: usize,
        mode: FunctionMode,
        terms: Vec<CapTerm>,
        atoms: Vec<Atom>,
    ) -> Result<Self> {
        if mode == FunctionMode::Function && !atoms.is_empty() {
            return Err(CapfieldError::WrongMode(
                "atoms are permitted only in measure mode".into(),
            ));
        }
        for t in &terms {
            if t.cap.d() != d {
                return Err(CapfieldError::DimensionMismatch {
                    expected: d + 1,
                    got: t.cap.center.coords().len(),
                });
            }
            if !t.weight.is_finite() {
                return Err(CapfieldError::OutOfRange("non-finite term weight".into()));
            }
        }
        for a in &atoms {
            if a.point.d() != d {
                return Err(CapfieldError::DimensionMismatch {
                    expected: d + 1,
                    got: a.point.coords().len(),
                });
            }
            if !a.mass.is_finite() {
                return Err(CapfieldError::OutOfRange("non-finite atom mass".into()));
            }
        }
        Ok(CapFunction {
            d,
            mode,
            terms,
            atoms,
            truncation: None,
        })
    }

    pub fn with_truncation(mut self, n: u32) -> Self {
        self.truncation = Some(n);
        self
    }

    /// Pointwise value of the cap-sum part at a boundary point.
    pub fn eval(&self, xi: &SpherePoint) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.cap.contains(xi))
            .map(|t| t.weight)
            .sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.terms.iter().all(|t| t.weight >= 0.0) && self.atoms.iter().all(|a| a.mass >= 0.0)
    }

    /// Scale all weights and masses.
    pub fn scaled(&self, c: f64) -> CapFunction {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.weight *= c;
        }
        for a in &mut out.atoms {
            a.mass *= c;
        }
        out
    }

    /// Term-list concatenation (the pointwise sum of the two functions).
    pub fn plus(&self, other: &CapFunction) -> Result<CapFunction> {
        if self.d != other.d {
            return Err(CapfieldError::DimensionMismatch {
                expected: self.d + 1,
                got: other.d + 1,
            });
        }
        let mode = if self.mode == FunctionMode::Measure || other.mode == FunctionMode::Measure {
            FunctionMode::Measure
        } else {
            FunctionMode::Function
        };
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        let trunc = match (self.truncation, other.truncation) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (t, None) | (None, t) => t,
        };
        let mut f = CapFunction::new(self.d, mode, terms, atoms)?;
        f.truncation = trunc;
        Ok(f)
    }
}

/// Evaluation site r·direction with r on the dyadic ladder 1 − 2^(−n).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialPoint {
    pub n: u32,
    pub r: f64,
    pub direction: SpherePoint,
}

impl RadialPoint {
    /// r = 1 − 2^(−n), n ≥ 1.
    pub fn dyadic(n: u32, direction: SpherePoint) -> Result<Self> {
        if n == 0 {
            return Err(CapfieldError::OutOfRange(
                "dyadic sites need n ≥ 1".into(),
            ));
        }
        Ok(RadialPoint {
            n,
            r: 1.0 - 2.0_f64.powi(-(n as i32)),
            direction,
        })
    }

    /// Arbitrary radius in [0, 1); n is the nearest dyadic label.
    pub fn at_radius(r: f64, direction: SpherePoint) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(CapfieldError::OutOfRange(format!(
                "site radius must lie in [0, 1), got {r}"
            )));
        }
        let n = if r <= 0.5 {
            1
        } else {
            (-(1.0 - r).log2()).round().max(1.0) as u32
        };
        Ok(RadialPoint { n, r, direction })
    }
}

/// P[f](r·y) = Σ_i weight_i·∫_{cap_i} P(ry,·) dσ + Σ_j mass_j·P(ry, point_j).
///
/// On the circle each cap term is evaluated by the exact arc antiderivative;
/// higher dimensions go through `cap_kernel_integral`. Terms are summed in
/// index order, so results do not depend on any worker pool.
pub fn poisson_integral(f: &CapFunction, site: &RadialPoint) -> Result<f64> {
    poisson_integral_at(f, site.r, &site.direction)
}

pub fn poisson_integral_at(f: &CapFunction, r: f64, y: &SpherePoint) -> Result<f64> {
    if y.d() != f.d {
        return Err(CapfieldError::DimensionMismatch {
            expected: f.d + 1,
            got: y.coords().len(),
        });
    }
    if !(0.0..1.0).contains(&r) {
        return Err(CapfieldError::OutOfRange(format!(
            "site radius must lie in [0, 1), got {r}"
        )));
    }
    let mut sum = 0.0;
    if f.d == 1 {
        for t in &f.terms {
            let a = y.angle_to(&t.cap.center);
            let thc = angle_of_chord(t.cap.radius);
            sum += t.weight * circle_arc_integral(r, a - thc, a + thc);
        }
    } else {
        for t in &f.terms {
            let gamma = y.dist(&t.cap.center).min(2.0);
            sum += t.weight * cap_kernel_integral(f.d, r, gamma, t.cap.radius)?;
        }
    }
    for a in &f.atoms {
        sum += a.mass * kernel_value(f.d, r, y.dist(&a.point).min(2.0))?;
    }
    Ok(sum)
}

/// Σ |weight_i|·σ(cap_i): the exact L¹ norm when all weights share one sign,
/// an upper bound otherwise (`exact` says which).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L1Norm {
    pub value: f64,
    pub exact: bool,
}

pub fn l1_norm(f: &CapFunction) -> Result<L1Norm> {
    if !f.atoms.is_empty() {
        return Err(CapfieldError::WrongMode(
            "l1_norm applies to cap sums; the measure has atoms".into(),
        ));
    }
    let mut value = 0.0;
    let mut pos = false;
    let mut neg = false;
    for t in &f.terms {
        value += t.weight.abs() * cap_measure(f.d, t.cap.radius)?;
        pos |= t.weight > 0.0;
        neg |= t.weight < 0.0;
    }
    Ok(L1Norm {
        value,
        exact: !(pos && neg),
    })
}

/// Total variation bound for measure-mode data: Σ|w|σ(κ) + Σ|mass|.
pub fn total_variation_bound(f: &CapFunction) -> Result<f64> {
    let mut value = 0.0;
    for t in &f.terms {
        value += t.weight.abs() * cap_measure(f.d, t.cap.radius)?;
    }
    for a in &f.atoms {
        value += a.mass.abs();
    }
    Ok(value)
}

/// |∫_{S^d} P(rN, ξ) dσ(ξ) − 1|, computed through the cap quadrature at full
/// aperture.
pub fn kernel_normalization_check(d: usize, r: f64) -> Result<f64> {
    Ok((cap_kernel_integral(d, r, 0.0, 2.0)? - 1.0).abs())
}

/// min over the grid of ∫_{κ(N, 1−r)} P(rN, ·) dσ: the cap of radius 1−r seen
/// from its own scale keeps a fixed share of the kernel mass.
pub fn cap_lower_constant(d: usize, r_grid: &[f64]) -> Result<f64> {
    if r_grid.is_empty() {
        return Err(CapfieldError::OutOfRange("empty radius grid".into()));
    }
    let mut min = f64::INFINITY;
    for &r in r_grid {
        if !(r > 0.5 && r < 1.0) {
            return Err(CapfieldError::OutOfRange(format!(
                "cap lower constant grid needs r ∈ (1/2, 1), got {r}"
            )));
        }
        min = min.min(cap_kernel_integral(d, r, 0.0, 1.0 - r)?);
    }
    Ok(min)
}
