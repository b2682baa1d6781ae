//! Explicit boundary constructions: limsup cover layers, saturating cap sums,
//! prescribed-divergence functions built from coverings, and residual
//! witnesses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CapfieldError, Result};
use crate::poisson::{l1_norm, CapFunction, CapTerm, FunctionMode};
use crate::sphere::cap::{uniform_in_cap, Cap, GaugeSpec};
use crate::sphere::net::Net;
use crate::sphere::point::SpherePoint;

/// The net of the requested level out of a nested family.
pub fn net_level(nets: &[Net], level: u32) -> Result<&Net> {
    nets.iter()
        .find(|n| n.level == level)
        .ok_or(CapfieldError::MissingNetLevel(level))
}

/// N_{n,α} = ⌊n/α⌋ + 1, the coarse net level whose points carry the level-n
/// cover layer.
pub fn limsup_level_index(n: u32, alpha: f64) -> u32 {
    (n as f64 / alpha).floor() as u32 + 1
}

/// One layer of the limsup family: caps of radius 2^(−n) centered at every
/// point of the level-N_{n,α} net.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimsupLevel {
    pub n: u32,
    pub net_level: u32,
    pub caps: Vec<Cap>,
}

impl LimsupLevel {
    pub fn member(&self, y: &SpherePoint) -> bool {
        self.caps.iter().any(|c| c.contains(y))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimsupFamily {
    pub d: usize,
    pub alpha: f64,
    pub levels: Vec<LimsupLevel>,
}

impl LimsupFamily {
    /// Membership in the intersection of the materialized layers, the
    /// finite-scale stand-in for the limsup set.
    pub fn member(&self, y: &SpherePoint) -> bool {
        self.levels.iter().all(|l| l.member(y))
    }
}

pub fn limsup_cover_sets(nets: &[Net], alpha: f64, n: u32) -> Result<LimsupLevel> {
    if alpha <= 1.0 {
        return Err(CapfieldError::OutOfRange(format!(
            "limsup family needs alpha > 1, got {alpha}"
        )));
    }
    let net_lv = limsup_level_index(n, alpha);
    let net = net_level(nets, net_lv)?;
    let rho = 2.0_f64.powi(-(n as i32));
    let caps = net
        .points
        .iter()
        .map(|p| Cap::new(p.clone(), rho))
        .collect::<Result<Vec<_>>>()?;
    Ok(LimsupLevel {
        n,
        net_level: net_lv,
        caps,
    })
}

pub fn limsup_family(nets: &[Net], alpha: f64, ns: &[u32]) -> Result<LimsupFamily> {
    if nets.is_empty() {
        return Err(CapfieldError::BadNetFamily);
    }
    let levels = ns
        .iter()
        .map(|&n| limsup_cover_sets(nets, alpha, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(LimsupFamily {
        d: nets[0].d,
        alpha,
        levels,
    })
}

/// Uniform draws from a cover layer: cap chosen uniformly, then a uniform
/// point inside it (uniform over the disjoint union of the caps).
pub fn sample_limsup_layer(
    level: &LimsupLevel,
    count: usize,
    seed: u64,
) -> Result<Vec<SpherePoint>> {
    if level.caps.is_empty() {
        return Err(CapfieldError::Degenerate("empty cover layer".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let cap = &level.caps[rng.gen_range(0..level.caps.len())];
        out.push(uniform_in_cap(cap, &mut rng)?);
    }
    Ok(out)
}

/// Exact measure of a union of circle caps by arc merging.
pub fn union_measure_circle(caps: &[Cap]) -> Result<f64> {
    use std::f64::consts::PI;
    let mut arcs: Vec<(f64, f64)> = Vec::with_capacity(caps.len() + 1);
    for c in caps {
        if c.d() != 1 {
            return Err(CapfieldError::DimensionMismatch {
                expected: 2,
                got: c.center.coords().len(),
            });
        }
        let hw = c.angular_radius();
        if hw >= PI {
            return Ok(1.0);
        }
        let lo = (c.center.angle()? - hw).rem_euclid(2.0 * PI);
        let hi = lo + 2.0 * hw;
        if hi > 2.0 * PI {
            arcs.push((lo, 2.0 * PI));
            arcs.push((0.0, hi - 2.0 * PI));
        } else {
            arcs.push((lo, hi));
        }
    }
    arcs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (lo, hi) in arcs {
        match cur {
            Some((clo, chi)) if lo <= chi => cur = Some((clo, chi.max(hi))),
            Some((clo, chi)) => {
                total += chi - clo;
                cur = Some((lo, hi));
            }
            None => cur = Some((lo, hi)),
        }
    }
    if let Some((clo, chi)) = cur {
        total += chi - clo;
    }
    Ok((total / (2.0 * PI)).min(1.0))
}

/// f̃_n = (1/(n+1)) Σ_{N=1}^{n+1} Σ_{x ∈ R_N} 2^{(n−N)d}·1_{κ(x, 2·2^{−n})},
/// returned together with its exact L¹ norm (the normalization constant).
pub fn saturating_function_parts(
    nets: &[Net],
    d: usize,
    n: u32,
) -> Result<(CapFunction, f64)> {
    if n == 0 {
        return Err(CapfieldError::OutOfRange(
            "saturating function needs n ≥ 1".into(),
        ));
    }
    let rho = 2.0_f64.powi(1 - n as i32);
    let mut terms = Vec::new();
    for level in 1..=n + 1 {
        let net = net_level(nets, level)?;
        if net.d != d {
            return Err(CapfieldError::BadNetFamily);
        }
        let weight = 2.0_f64.powi((n as i32 - level as i32) * d as i32) / (n as f64 + 1.0);
        for p in &net.points {
            terms.push(CapTerm {
                cap: Cap::new(p.clone(), rho)?,
                weight,
            });
        }
    }
    let raw = CapFunction::new(d, FunctionMode::Function, terms, vec![])?.with_truncation(n);
    let norm = l1_norm(&raw)?;
    Ok((raw, norm.value))
}

/// f_n = f̃_n/‖f̃_n‖₁, the saturating function at scale n: ‖f_n‖₁ = 1.
pub fn saturating_function(nets: &[Net], d: usize, n: u32) -> Result<CapFunction> {
    let (raw, norm) = saturating_function_parts(nets, d, n)?;
    if norm <= 0.0 {
        return Err(CapfieldError::Degenerate(
            "saturating sum has zero mass".into(),
        ));
    }
    Ok(raw.scaled(1.0 / norm).with_truncation(n))
}

/// One covering in a sequence: the caps R_j meant to witness
/// Σ_{κ ∈ R_j} φ(|κ|) ≤ 2^{−j} at index j.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Covering {
    pub j: u32,
    pub caps: Vec<Cap>,
}

/// Covering sequence for a prescribed-divergence construction, plus the
/// weight sequence ω_n attached to the dyadic size buckets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoveringSequence {
    pub d: usize,
    pub coverings: Vec<Covering>,
    /// omega[n-1] = ω_n for bucket n ≥ 1; positive and nondecreasing.
    pub omega: Vec<f64>,
}

impl CoveringSequence {
    pub fn new(d: usize, coverings: Vec<Covering>, omega: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(CapfieldError::OutOfRange("coverings need d ≥ 1".into()));
        }
        let mut last_j = 0;
        for cov in &coverings {
            if cov.j == 0 || (last_j > 0 && cov.j <= last_j) {
                return Err(CapfieldError::OutOfRange(
                    "covering indices must be strictly increasing and ≥ 1".into(),
                ));
            }
            last_j = cov.j;
            for c in &cov.caps {
                if c.d() != d {
                    return Err(CapfieldError::DimensionMismatch {
                        expected: d + 1,
                        got: c.center.coords().len(),
                    });
                }
            }
        }
        for w in omega.windows(2) {
            if w[1] < w[0] {
                return Err(CapfieldError::Degenerate(
                    "omega sequence must be nondecreasing".into(),
                ));
            }
        }
        if omega.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(CapfieldError::Degenerate(
                "omega sequence must be positive and finite".into(),
            ));
        }
        Ok(CoveringSequence {
            d,
            coverings,
            omega,
        })
    }
}

/// Per-covering certificate: size bound |κ| ≤ 2^{−j} and φ-sum bound
/// Σ φ(|κ|) ≤ 2^{−j}. Advisory: the divergence construction itself only needs
/// the size buckets, and useful desk-scale inputs may fail these asymptotic
/// bounds at small j.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoveringCertificate {
    pub per_covering: Vec<(u32, bool, bool)>,
    pub sizes_ok: bool,
    pub phi_sums_ok: bool,
}

pub fn covering_certificate(cov: &CoveringSequence, gauge: &GaugeSpec) -> CoveringCertificate {
    let mut per = Vec::with_capacity(cov.coverings.len());
    let mut all_sz = true;
    let mut all_phi = true;
    for c in &cov.coverings {
        let bound = 2.0_f64.powi(-(c.j as i32));
        let sz = c.caps.iter().all(|k| k.diameter() <= bound + 1e-15);
        let phi_sum: f64 = c.caps.iter().map(|k| gauge.phi(k.diameter())).sum();
        let phi = phi_sum <= bound + 1e-15;
        all_sz &= sz;
        all_phi &= phi;
        per.push((c.j, sz, phi));
    }
    CoveringCertificate {
        per_covering: per,
        sizes_ok: all_sz,
        phi_sums_ok: all_phi,
    }
}

/// Dyadic size bucket of a cap: the n ≥ 1 with 2^{−(n+1)} < |κ| ≤ 2^{−n}.
fn size_bucket(diam: f64) -> Result<u32> {
    if !(diam > 0.0 && diam.is_finite()) {
        return Err(CapfieldError::Degenerate("degenerate cap size".into()));
    }
    let n = (-diam.log2()).floor();
    if n < 1.0 {
        return Err(CapfieldError::OutOfRange(format!(
            "cap of size {diam} falls below the first dyadic bucket"
        )));
    }
    Ok(n as u32)
}

/// f = Σ_n Σ_{κ ∈ 𝓒_n} ω_n·τ(2^{−n})·1_{κ(x, 2·2^{−n})} where 𝓒_n buckets the
/// covering caps by dyadic size and each cap is re-centered at radius 2·2^{−n}.
///
/// Build-time checks: τ(s)·s^d/φ(s) bounded on the dyadic grid (depth 400,
/// headroom factor 100 over its first value), and a ratio test on the tail of
/// the bucket series ω_n·Σ φ(|κ|) as the finite proxy for Σ < ∞.
pub fn divergence_function(cov: &CoveringSequence, gauge: &GaugeSpec) -> Result<CapFunction> {
    let d = cov.d;
    // gauge compatibility on the dyadic grid
    let q = |n: i32| {
        let s = 2.0_f64.powi(-n);
        gauge.tau(s) * s.powi(d as i32) / gauge.phi(s)
    };
    let q1 = q(1);
    let cap_q = 100.0 * q1.max(1.0);
    for n in 1..=400 {
        let qn = q(n);
        if !qn.is_finite() || qn > cap_q {
            return Err(CapfieldError::GaugeIncompatible(format!(
                "tau(s)·s^d/phi(s) reaches {qn:.3e} at s = 2^-{n} (limit {cap_q:.3e})"
            )));
        }
    }

    // bucket the covering caps by dyadic size
    let mut buckets: Vec<(u32, Vec<&Cap>)> = Vec::new();
    for c in &cov.coverings {
        for k in &c.caps {
            let n = size_bucket(k.diameter())?;
            if n as usize > cov.omega.len() {
                return Err(CapfieldError::OutOfRange(format!(
                    "bucket {n} occupied but omega has only {} entries",
                    cov.omega.len()
                )));
            }
            match buckets.iter_mut().find(|(bn, _)| *bn == n) {
                Some((_, v)) => v.push(k),
                None => buckets.push((n, vec![k])),
            }
        }
    }
    buckets.sort_by_key(|&(n, _)| n);

    // finite summability proxy: tail ratio test on a_n = ω_n Σ φ(|κ|)
    let series: Vec<(u32, f64)> = buckets
        .iter()
        .map(|(n, caps)| {
            let phi_sum: f64 = caps.iter().map(|k| gauge.phi(k.diameter())).sum();
            (*n, cov.omega[*n as usize - 1] * phi_sum)
        })
        .collect();
    if series.len() >= 3 {
        let ratios: Vec<f64> = series
            .windows(2)
            .map(|w| {
                let step = (w[1].0 - w[0].0) as f64;
                (w[1].1 / w[0].1).powf(1.0 / step)
            })
            .collect();
        let tail = &ratios[ratios.len() / 2..];
        if tail.iter().all(|&r| r >= 0.995) {
            return Err(CapfieldError::DivergentSeries(format!(
                "bucket series ratio test fails: tail per-step ratios {:?} all ≥ 0.995",
                tail
            )));
        }
    }

    let mut terms = Vec::new();
    let mut trunc = 0;
    for (n, caps) in &buckets {
        let weight = cov.omega[*n as usize - 1] * gauge.tau(2.0_f64.powi(-(*n as i32)));
        let rho = (2.0_f64.powi(1 - *n as i32)).min(2.0);
        for k in caps {
            terms.push(CapTerm {
                cap: Cap::new(k.center.clone(), rho)?,
                weight,
            });
        }
        trunc = trunc.max(*n);
    }
    let mut f = CapFunction::new(d, FunctionMode::Function, terms, vec![])?;
    if trunc > 0 {
        f = f.with_truncation(trunc);
    }
    Ok(f)
}

/// The covering sequence of the single-point divergence example: R_j covers
/// {N} by one cap of radius 2^{−j} (j ≥ 2 so the size buckets start at n = 1)
/// with ω_n = n, paired with the gauge τ(s) = s^{−β}, φ(s) = s^{d−β}.
pub fn singleton_divergence_example(
    d: usize,
    beta: f64,
    n_max: u32,
) -> Result<(CoveringSequence, GaugeSpec)> {
    if !(beta > 0.0 && beta < d as f64) {
        return Err(CapfieldError::OutOfRange(format!(
            "singleton example needs beta in (0, d), got {beta}"
        )));
    }
    let pole = SpherePoint::north_pole(d);
    let coverings = (2..=n_max + 1)
        .map(|j| {
            Ok(Covering {
                j,
                caps: vec![Cap::new(pole.clone(), 2.0_f64.powi(-(j as i32)))?],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let omega = (1..=n_max).map(|n| n as f64).collect();
    let cov = CoveringSequence::new(d, coverings, omega)?;
    let gauge = GaugeSpec::power(beta, d as f64 - beta, 1.0)?;
    Ok((cov, gauge))
}

/// h_n = g + (1/n)·f_n: perturbs g by a vanishing saturating bump.
pub fn residual_witness(g: &CapFunction, nets: &[Net], n: u32) -> Result<CapFunction> {
    if n == 0 {
        return Err(CapfieldError::OutOfRange("witness needs n ≥ 1".into()));
    }
    let f_n = saturating_function(nets, g.d, n)?;
    g.plus(&f_n.scaled(1.0 / n as f64))
}
