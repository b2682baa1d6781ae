//! Harnack-calibrated slice decomposition of the kernel and the cap-maximal
//! domination check it powers.

use serde::{Deserialize, Serialize};

use crate::error::{CapfieldError, Result};
use crate::poisson::{kernel_value, poisson_integral_at, CapFunction};
use crate::sphere::cap::{cap_intersection_measure, cap_measure, doubling_constant, Cap};
use crate::sphere::point::SpherePoint;

/// Ball Harnack constant at half radius in R^(d+1): 2^d/3^(d+1).
///
/// Any constant in (0,1) with P(rN, ξ) ≥ c0·P(rN, N) for ‖ξ−N‖ ≤ (1−r)/2
/// would do; this fixed analytic choice keeps the ladder deterministic and is
/// validated numerically in the tests.
pub fn harnack_c0(d: usize) -> f64 {
    2.0_f64.powi(d as i32) / 3.0_f64.powi(d as i32 + 1)
}

/// Kernel staircase: radii 0 = δ₀ < δ₁ = (1−r)/2 < … < δ_k = 2, levels
/// c_j = P(rN, δ_j) decaying by the factor c0 at every interior step, and
/// positive jumps d_j turning the slice sum into a sum of cap indicators,
/// Σ_j c_j·1[δ_j ≤ ‖ξ−N‖ < δ_{j+1}] = Σ_j d_j·1_{κ(N,δ_j)}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceDecomposition {
    pub d: usize,
    pub r: f64,
    pub c0: f64,
    /// k+1 radii, first 0, last 2.
    pub radii: Vec<f64>,
    /// k kernel values, levels[j] = kernel at radii[j].
    pub levels: Vec<f64>,
    /// k cap jumps, jumps[j-1] attached to κ(N, radii[j]); all positive and
    /// summing to levels[0].
    pub jumps: Vec<f64>,
}

impl SliceDecomposition {
    pub fn k(&self) -> usize {
        self.jumps.len()
    }

    /// Σ_{j: δ < δ_j} d_j, the staircase value at chordal distance δ. Equals
    /// the kernel at each δ_j and sandwiches it in between:
    /// c0·step(δ) ≤ P(rN, δ) ≤ step(δ) for δ < 2.
    pub fn step(&self, delta: f64) -> f64 {
        self.radii
            .iter()
            .skip(1)
            .zip(&self.jumps)
            .filter(|(&dj, _)| delta < dj)
            .map(|(_, &d)| d)
            .sum()
    }
}

/// Builds the ladder by exact kernel-level inversion: with s_j = (1−r)² + rδ_j²
/// the step s_{j+1} = λ·s_j, λ = c0^(−2/(d+1)), divides the kernel by exactly
/// 1/c0 until the radius caps at 2.
pub fn slice_radii(d: usize, r: f64, c0: f64) -> Result<SliceDecomposition> {
    if d == 0 {
        return Err(CapfieldError::OutOfRange("slices need d ≥ 1".into()));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(CapfieldError::OutOfRange(format!(
            "slice radius parameter must lie in (0,1), got {r}"
        )));
    }
    if !(c0 > 0.0 && c0 < 1.0) {
        return Err(CapfieldError::OutOfRange(format!(
            "harnack constant must lie in (0,1), got {c0}"
        )));
    }
    let lambda = c0.powf(-2.0 / (d as f64 + 1.0));
    let omr = 1.0 - r;
    let mut radii = vec![0.0, omr / 2.0];
    let s_full = omr * omr + 4.0 * r;
    let mut s = omr * omr + r * (omr / 2.0) * (omr / 2.0);
    while radii.last().copied().unwrap() < 2.0 {
        s *= lambda;
        if s >= s_full {
            radii.push(2.0);
        } else {
            radii.push(((s - omr * omr) / r).sqrt());
        }
    }
    let k = radii.len() - 1;
    let mut levels = Vec::with_capacity(k);
    for &dj in radii.iter().take(k) {
        levels.push(kernel_value(d, r, dj)?);
    }
    let mut jumps = Vec::with_capacity(k);
    for j in 1..k {
        jumps.push(levels[j - 1] - levels[j]);
    }
    jumps.push(levels[k - 1]);
    Ok(SliceDecomposition {
        d,
        r,
        c0,
        radii,
        levels,
        jumps,
    })
}

/// μ(κ) for a cap-sum measure with atoms: Σ_i w_i·σ(cap_i ∩ κ) + Σ masses of
/// atoms strictly inside κ.
pub fn cap_mass(mu: &CapFunction, cap: &Cap) -> Result<f64> {
    let mut m = 0.0;
    for t in &mu.terms {
        m += t.weight * cap_intersection_measure(&t.cap, cap)?;
    }
    for a in &mu.atoms {
        if cap.contains(&a.point) {
            m += a.mass;
        }
    }
    Ok(m)
}

fn absolute(mu: &CapFunction) -> CapFunction {
    let mut nu = mu.clone();
    for t in &mut nu.terms {
        t.weight = t.weight.abs();
    }
    for a in &mut nu.atoms {
        a.mass = a.mass.abs();
    }
    nu
}

/// Maximizing radius and value of δ ↦ μ(κ(y,δ))/σ(κ(y,δ)) over the given
/// radii. Signed data is replaced by its per-term absolute value first, the
/// total-variation bound.
pub fn maximal_over_caps(
    mu: &CapFunction,
    y: &SpherePoint,
    radii: &[f64],
) -> Result<(f64, f64)> {
    if radii.is_empty() {
        return Err(CapfieldError::OutOfRange("no radii to maximize over".into()));
    }
    if y.d() != mu.d {
        return Err(CapfieldError::DimensionMismatch {
            expected: mu.d + 1,
            got: y.coords().len(),
        });
    }
    let nu = if mu.is_nonnegative() {
        mu.clone()
    } else {
        absolute(mu)
    };
    let mut best = (radii[0], f64::NEG_INFINITY);
    for &delta in radii {
        let kappa = Cap::new(y.clone(), delta)?;
        let ratio = cap_mass(&nu, &kappa)? / cap_measure(mu.d, delta)?;
        if ratio > best.1 {
            best = (delta, ratio);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominationCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub delta_star: f64,
    pub ok: bool,
}

/// |P[μ](ry)| against the cap-maximal bound: rhs is the maximal ratio over the
/// slice radii doubled (so the selected cap always has δ* ≥ 1−r), scaled by
/// the doubling constant of σ and 1/c0.
pub fn check_domination(mu: &CapFunction, y: &SpherePoint, r: f64) -> Result<DominationCheck> {
    let d = mu.d;
    let c0 = harnack_c0(d);
    let decomp = slice_radii(d, r, c0)?;
    let lhs = poisson_integral_at(mu, r, y)?.abs();
    let mut doubled: Vec<f64> = decomp.radii[1..]
        .iter()
        .map(|&dj| (2.0 * dj).min(2.0))
        .collect();
    doubled.dedup();
    let nu = absolute(mu);
    let (delta_star, ratio) = maximal_over_caps(&nu, y, &doubled)?;
    let rhs = doubling_constant(d) / c0 * ratio;
    Ok(DominationCheck {
        lhs,
        rhs,
        delta_star,
        ok: lhs <= rhs,
    })
}
