//! Divergence exponents, level sets, and box-counting dimension proxies.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::{limsup_cover_sets, net_level, saturating_function};
use crate::error::{CapfieldError, Result};
use crate::poisson::{poisson_integral_at, CapFunction};
use crate::sphere::cap::{caps_intersect, Cap};
use crate::sphere::net::{Net, NeighborGrid};
use crate::sphere::point::SpherePoint;

/// Tail window length used by the limsup proxy when none is given.
pub const DEFAULT_TAIL_WINDOW: usize = 6;

/// One radius of a radial profile: r = 1 - 2^(-n).
///
/// `value` is None when the quadrature backing this row did not converge;
/// downstream estimators skip such rows instead of failing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub n: u32,
    pub r: f64,
    pub value: Option<f64>,
}

/// Values of P[f](r_n y) along the dyadic radii toward a fixed boundary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub y: SpherePoint,
    pub rows: Vec<ProfileRow>,
}

/// Evaluates P[f](r_n y) for n in [n_min, n_max].
pub fn radial_profile(
    f: &CapFunction,
    y: &SpherePoint,
    n_min: u32,
    n_max: u32,
) -> Result<RadialProfile> {
    if y.d() != f.d {
        return Err(CapfieldError::DimensionMismatch {
            expected: f.d,
            got: y.d(),
        });
    }
    if n_min == 0 || n_min > n_max {
        return Err(CapfieldError::OutOfRange(format!(
            "profile range [{n_min}, {n_max}] must satisfy 1 <= n_min <= n_max"
        )));
    }
    let mut rows = Vec::with_capacity((n_max - n_min + 1) as usize);
    for n in n_min..=n_max {
        let r = 1.0 - 0.5f64.powi(n as i32);
        let value = match poisson_integral_at(f, r, y) {
            Ok(v) => Some(v),
            Err(CapfieldError::QuadratureAccuracy { .. }) => None,
            Err(e) => return Err(e),
        };
        rows.push(ProfileRow { n, r, value });
    }
    Ok(RadialProfile {
        y: y.clone(),
        rows,
    })
}

/// Finite-scale divergence exponent with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    /// max over the tail window of log2|value| / n, clamped to [0, d].
    pub value: f64,
    /// The same maximum before clamping; None when every usable row was zero.
    pub unclamped: Option<f64>,
    /// Rows that actually entered the maximum.
    pub rows_used: usize,
}

/// β̂(y) = clamp(max over the last n_tail rows of log₂|P[f](r_n y)| / n, [0, d]).
///
/// Rows whose value is zero or whose quadrature failed are skipped; if the
/// whole tail is skipped the estimate is 0 by convention.
pub fn beta_hat_detail(profile: &RadialProfile, n_tail: usize) -> Result<ExponentEstimate> {
    if profile.rows.is_empty() {
        return Err(CapfieldError::OutOfRange("empty radial profile".into()));
    }
    if n_tail == 0 {
        return Err(CapfieldError::OutOfRange(
            "tail window must be nonempty".into(),
        ));
    }
    let d = profile.y.d() as f64;
    let skip = profile.rows.len().saturating_sub(n_tail);
    let mut best: Option<f64> = None;
    let mut used = 0usize;
    for row in &profile.rows[skip..] {
        let v = match row.value {
            Some(v) if v != 0.0 => v,
            _ => continue,
        };
        let e = v.abs().log2() / row.n as f64;
        used += 1;
        best = Some(best.map_or(e, |b| f64::max(b, e)));
    }
    Ok(match best {
        None => ExponentEstimate {
            value: 0.0,
            unclamped: None,
            rows_used: 0,
        },
        Some(e) => ExponentEstimate {
            value: e.clamp(0.0, d),
            unclamped: Some(e),
            rows_used: used,
        },
    })
}

/// Clamped divergence exponent; see beta_hat_detail.
pub fn beta_hat(profile: &RadialProfile, n_tail: usize) -> Result<f64> {
    beta_hat_detail(profile, n_tail).map(|e| e.value)
}

/// β̂ at every point of a probe net, in net order.
pub fn exponent_field(
    f: &CapFunction,
    probe: &Net,
    n_range: (u32, u32),
    n_tail: usize,
) -> Result<Vec<f64>> {
    if probe.d != f.d {
        return Err(CapfieldError::DimensionMismatch {
            expected: f.d,
            got: probe.d,
        });
    }
    probe
        .points
        .par_iter()
        .map(|y| {
            let p = radial_profile(f, y, n_range.0, n_range.1)?;
            beta_hat(&p, n_tail)
        })
        .collect()
}

/// Probe points whose divergence exponent lies within tol of beta.
pub fn level_set(
    f: &CapFunction,
    beta: f64,
    tol: f64,
    probe_net: &Net,
    n_range: (u32, u32),
) -> Result<Vec<SpherePoint>> {
    let field = exponent_field(f, probe_net, n_range, DEFAULT_TAIL_WINDOW)?;
    Ok(probe_net
        .points
        .iter()
        .zip(&field)
        .filter(|(_, bh)| (**bh - beta).abs() <= tol)
        .map(|(p, _)| p.clone())
        .collect())
}

/// A subset of the sphere in the form box counting can consume.
pub enum BoxSet<'a> {
    /// Finite sample; each point is charged to its nearest net point.
    Points(&'a [SpherePoint]),
    /// Union of caps; a box counts when it intersects one of them.
    Caps(&'a [Cap]),
    /// Arbitrary membership test, evaluated at the net points.
    Predicate(&'a (dyn Fn(&SpherePoint) -> bool + Sync)),
}

/// Least-squares box-counting estimate over a window of net levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDimension {
    pub dim: f64,
    pub fit_r2: f64,
    /// (level, boxes hit) per counted scale.
    pub counts: Vec<(u32, usize)>,
    /// Set when fewer than two scales produced a nonzero count; dim is then 0.
    pub degenerate: bool,
}

/// Counts level-n net caps meeting the set and fits log₂N(n) against n.
pub fn box_dimension(
    set: &BoxSet,
    n_lo: u32,
    n_hi: u32,
    nets: &[Net],
) -> Result<BoxDimension> {
    if n_lo == 0 || n_lo > n_hi {
        return Err(CapfieldError::OutOfRange(format!(
            "count range [{n_lo}, {n_hi}] must satisfy 1 <= n_lo <= n_hi"
        )));
    }
    let mut counts = Vec::with_capacity((n_hi - n_lo + 1) as usize);
    for n in n_lo..=n_hi {
        let net = net_level(nets, n)?;
        let scale = 0.5f64.powi(n as i32);
        let count = match set {
            BoxSet::Points(ps) => {
                if ps.is_empty() {
                    0
                } else {
                    if ps[0].d() != net.d {
                        return Err(CapfieldError::DimensionMismatch {
                            expected: net.d,
                            got: ps[0].d(),
                        });
                    }
                    let mut grid = NeighborGrid::new(net.d + 1, scale);
                    for p in &net.points {
                        grid.insert(p.coords());
                    }
                    let mut hit = vec![false; net.points.len()];
                    for p in *ps {
                        if let Some((i, _)) = grid.nearest(p.coords()) {
                            hit[i as usize] = true;
                        }
                    }
                    hit.iter().filter(|h| **h).count()
                }
            }
            BoxSet::Caps(caps) => {
                if caps.is_empty() {
                    0
                } else {
                    if caps[0].d() != net.d {
                        return Err(CapfieldError::DimensionMismatch {
                            expected: net.d,
                            got: caps[0].d(),
                        });
                    }
                    let mut c = 0usize;
                    for x in &net.points {
                        let b = Cap::new(x.clone(), scale)?;
                        if caps.iter().any(|k| caps_intersect(&b, k)) {
                            c += 1;
                        }
                    }
                    c
                }
            }
            BoxSet::Predicate(pred) => net.points.par_iter().filter(|x| pred(x)).count(),
        };
        counts.push((n, count));
    }
    Ok(fit_counts(counts))
}

fn fit_counts(counts: Vec<(u32, usize)>) -> BoxDimension {
    let rows: Vec<(f64, f64)> = counts
        .iter()
        .filter(|(_, c)| *c > 0)
        .map(|(n, c)| (*n as f64, (*c as f64).log2()))
        .collect();
    if rows.len() < 2 {
        return BoxDimension {
            dim: 0.0,
            fit_r2: 0.0,
            counts,
            degenerate: true,
        };
    }
    let (slope, _, r2) = fit_line(&rows);
    BoxDimension {
        dim: slope,
        fit_r2: r2,
        counts,
        degenerate: false,
    }
}

/// Box-count slope of the scale-matched cover layers D_{n,α}: at count scale
/// 2^(−n) the boxes are counted against the level-n layer itself, the cover
/// the dimension bound for limsup sets is built from. The count tracks the
/// carrier net's cardinality 2^(nd/α), so the slope estimates d/α. A fixed
/// finite intersection of layers is not used here: below its finest layer's
/// scale it has no further structure and its counts go flat.
pub fn limsup_dimension(nets: &[Net], alpha: f64, n_lo: u32, n_hi: u32) -> Result<BoxDimension> {
    if n_lo == 0 || n_lo > n_hi {
        return Err(CapfieldError::OutOfRange(format!(
            "count range [{n_lo}, {n_hi}] must satisfy 1 <= n_lo <= n_hi"
        )));
    }
    let mut counts = Vec::with_capacity((n_hi - n_lo + 1) as usize);
    for n in n_lo..=n_hi {
        let layer = limsup_cover_sets(nets, alpha, n)?;
        let net = net_level(nets, n)?;
        let scale = 0.5f64.powi(n as i32);
        let mut count = 0usize;
        for x in &net.points {
            let b = Cap::new(x.clone(), scale)?;
            if layer.caps.iter().any(|k| caps_intersect(&b, k)) {
                count += 1;
            }
        }
        counts.push((n, count));
    }
    Ok(fit_counts(counts))
}

/// Ordinary least squares: (slope, intercept, r²); r² of a constant fit is 1.
fn fit_line(rows: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = rows.len() as f64;
    let sx: f64 = rows.iter().map(|r| r.0).sum();
    let sy: f64 = rows.iter().map(|r| r.1).sum();
    let sxx: f64 = rows.iter().map(|r| r.0 * r.0).sum();
    let sxy: f64 = rows.iter().map(|r| r.0 * r.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = rows.iter().map(|r| (r.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = rows
        .iter()
        .map(|r| (r.1 - (intercept + slope * r.0)).powi(2))
        .sum();
    let r2 = if ss_tot <= 1e-12 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    (slope, intercept, r2)
}

/// Knobs for a spectrum run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumConfig {
    /// Net level supplying the probe points.
    pub probe_level: u32,
    /// Dyadic radii window feeding each profile.
    pub profile_range: (u32, u32),
    /// Tail window of the limsup proxy.
    pub n_tail: usize,
    /// Level-set membership tolerance around each beta.
    pub tol: f64,
    /// Net levels used for box counting the level sets.
    pub count_range: (u32, u32),
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            probe_level: 12,
            profile_range: (4, 12),
            n_tail: DEFAULT_TAIL_WINDOW,
            tol: 0.1,
            count_range: (6, 12),
        }
    }
}

/// One measured point beta -> dim estimate of the level set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub beta: f64,
    pub dim: f64,
    pub fit_r2: f64,
    /// Probe points that landed in the level set.
    pub cardinality: usize,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    pub d: usize,
    /// Net levels the box counts were fitted over.
    pub scale_range: (u32, u32),
    pub points: Vec<SpectrumPoint>,
}

/// Level sets and their box dimensions over a grid of target exponents.
///
/// The exponent field over the probe net is computed once and shared by all
/// betas; results are deterministic and independent of thread count.
pub fn spectrum(
    f: &CapFunction,
    betas: &[f64],
    cfg: &SpectrumConfig,
    nets: &[Net],
) -> Result<SpectrumEstimate> {
    let d = f.d;
    for &b in betas {
        if !(0.0..=d as f64).contains(&b) {
            return Err(CapfieldError::OutOfRange(format!(
                "target exponent {b} outside [0, {d}]"
            )));
        }
    }
    let probe = net_level(nets, cfg.probe_level)?;
    let field = exponent_field(f, probe, cfg.profile_range, cfg.n_tail)?;
    let mut points = Vec::with_capacity(betas.len());
    for &beta in betas {
        let members: Vec<SpherePoint> = probe
            .points
            .iter()
            .zip(&field)
            .filter(|(_, bh)| (**bh - beta).abs() <= cfg.tol)
            .map(|(p, _)| p.clone())
            .collect();
        let bd = box_dimension(
            &BoxSet::Points(&members),
            cfg.count_range.0,
            cfg.count_range.1,
            nets,
        )?;
        points.push(SpectrumPoint {
            beta,
            dim: bd.dim,
            fit_r2: bd.fit_r2,
            cardinality: members.len(),
            degenerate: bd.degenerate,
        });
    }
    Ok(SpectrumEstimate {
        d,
        scale_range: cfg.count_range,
        points,
    })
}

/// Geometric mixture of saturating functions, W = Σ_k 2^(-k) f_{2^k},
/// over every k whose component fits inside the net family.
pub fn witness_mixture(nets: &[Net], d: usize) -> Result<CapFunction> {
    let finest = nets
        .iter()
        .map(|n| n.level)
        .max()
        .ok_or(CapfieldError::BadNetFamily)?;
    let mut acc: Option<CapFunction> = None;
    let mut top = 0u32;
    for k in 1u32.. {
        let nk = 1u32 << k;
        if nk + 1 > finest {
            break;
        }
        let part = saturating_function(nets, d, nk)?.scaled(0.5f64.powi(k as i32));
        acc = Some(match acc {
            None => part,
            Some(g) => g.plus(&part)?,
        });
        top = nk;
    }
    let w = acc.ok_or_else(|| {
        CapfieldError::Degenerate("net family is too coarse for any mixture component".into())
    })?;
    Ok(w.with_truncation(top))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{divergence_function, singleton_divergence_example};
    use crate::poisson::{l1_norm, Atom, CapTerm, FunctionMode};
    use crate::sphere::cap::uniform_on_sphere;
    use crate::sphere::net::build_net;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn whole_sphere(d: usize) -> CapFunction {
        let cap = Cap::new(SpherePoint::north_pole(d), 2.0).unwrap();
        CapFunction::new(
            d,
            FunctionMode::Function,
            vec![CapTerm { cap, weight: 1.0 }],
            vec![],
        )
        .unwrap()
    }

    fn atom_at_pole(d: usize) -> CapFunction {
        CapFunction::new(
            d,
            FunctionMode::Measure,
            vec![],
            vec![Atom {
                point: SpherePoint::north_pole(d),
                mass: 1.0,
            }],
        )
        .unwrap()
    }

    #[test]
    fn constant_profile_and_exponent() {
        let f = whole_sphere(1);
        let y = SpherePoint::from_angle(1.234);
        let prof = radial_profile(&f, &y, 1, 10).unwrap();
        assert_eq!(prof.rows.len(), 10);
        for row in &prof.rows {
            assert_relative_eq!(row.value.unwrap(), 1.0, max_relative = 1e-9);
        }
        let est = beta_hat_detail(&prof, DEFAULT_TAIL_WINDOW).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.unclamped.unwrap().abs() < 1e-9);
        assert_eq!(est.rows_used, 6);

        let f2 = whole_sphere(2);
        let prof2 = radial_profile(&f2, &SpherePoint::north_pole(2), 1, 6).unwrap();
        for row in &prof2.rows {
            assert_relative_eq!(row.value.unwrap(), 1.0, max_relative = 1e-7);
        }
        assert_eq!(beta_hat(&prof2, 4).unwrap(), 0.0);
    }

    #[test]
    fn atom_profile_matches_kernel_closed_form() {
        for d in [1usize, 2] {
            let f = atom_at_pole(d);
            let prof = radial_profile(&f, &SpherePoint::north_pole(d), 1, 10).unwrap();
            for row in &prof.rows {
                let expect =
                    (2.0 - 0.5f64.powi(row.n as i32)) * 2f64.powi((row.n as usize * d) as i32);
                assert_relative_eq!(row.value.unwrap(), expect, max_relative = 1e-12);
            }
        }
        let prof = radial_profile(&atom_at_pole(1), &SpherePoint::north_pole(1), 1, 14).unwrap();
        let est = beta_hat_detail(&prof, DEFAULT_TAIL_WINDOW).unwrap();
        assert_eq!(est.value, 1.0);
        let expect_raw = (9.0 + (2.0 - 0.5f64.powi(9)).log2()) / 9.0;
        assert_relative_eq!(est.unclamped.unwrap(), expect_raw, max_relative = 1e-12);

        let prof2 = radial_profile(&atom_at_pole(2), &SpherePoint::north_pole(2), 1, 12).unwrap();
        assert_eq!(beta_hat(&prof2, DEFAULT_TAIL_WINDOW).unwrap(), 2.0);
    }

    #[test]
    fn failed_and_zero_rows_are_skipped() {
        let y = SpherePoint::north_pole(1);
        let row = |n: u32, value: Option<f64>| ProfileRow {
            n,
            r: 1.0 - 0.5f64.powi(n as i32),
            value,
        };
        let prof = RadialProfile {
            y: y.clone(),
            rows: vec![row(6, Some(4.0)), row(7, None), row(8, Some(0.0))],
        };
        let est = beta_hat_detail(&prof, 3).unwrap();
        assert_relative_eq!(est.value, 2.0 / 6.0, max_relative = 1e-12);
        assert_eq!(est.rows_used, 1);

        let dead = RadialProfile {
            y: y.clone(),
            rows: vec![row(5, Some(0.0)), row(6, None)],
        };
        let est = beta_hat_detail(&dead, 2).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.unclamped.is_none());

        let empty = RadialProfile { y, rows: vec![] };
        assert!(beta_hat_detail(&empty, 2).is_err());
    }

    #[test]
    fn scale_invariance_bound_and_dimension_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let caps = vec![
            CapTerm {
                cap: Cap::new(uniform_on_sphere(1, &mut rng), 0.05).unwrap(),
                weight: 3.0,
            },
            CapTerm {
                cap: Cap::new(uniform_on_sphere(1, &mut rng), 0.4).unwrap(),
                weight: 0.7,
            },
        ];
        let f = CapFunction::new(1, FunctionMode::Function, caps, vec![]).unwrap();
        let norm = l1_norm(&f).unwrap();
        assert!(norm.exact && norm.value >= 0.0);
        let c = 7.3;
        let cf = f.scaled(c);
        let n_range = (3u32, 10u32);
        let n_min_tail = 5.0; // last 6 rows of [3, 10] start at n = 5
        for _ in 0..5 {
            let y = uniform_on_sphere(1, &mut rng);
            let b = beta_hat(&radial_profile(&f, &y, n_range.0, n_range.1).unwrap(), 6).unwrap();
            let bc =
                beta_hat(&radial_profile(&cf, &y, n_range.0, n_range.1).unwrap(), 6).unwrap();
            assert!(bc >= b - 1e-12);
            assert!(bc - b <= c.log2() / n_min_tail + 1e-9);
            assert!(bc <= 1.0 + 1e-15);
            let raw = beta_hat_detail(&radial_profile(&f, &y, n_range.0, n_range.1).unwrap(), 6)
                .unwrap()
                .unclamped
                .unwrap();
            let bound = 1.0 + (1.0 + norm.value.max(1.0).log2()) / n_min_tail;
            assert!(raw <= bound + 1e-9);
        }
    }

    #[test]
    fn level_sets_of_constant_function() {
        let nets = build_net(1, 5, 3).unwrap();
        let probe = net_level(&nets, 5).unwrap();
        let f = whole_sphere(1);
        let at_zero = level_set(&f, 0.0, 0.01, probe, (2, 8)).unwrap();
        assert_eq!(at_zero.len(), probe.cardinality());
        let at_half = level_set(&f, 0.5, 0.01, probe, (2, 8)).unwrap();
        assert!(at_half.is_empty());
    }

    #[test]
    fn level_set_of_atom_hugs_the_peak() {
        let nets = build_net(1, 8, 3).unwrap();
        let probe = net_level(&nets, 8).unwrap();
        let f = atom_at_pole(1);
        let pole = SpherePoint::north_pole(1);
        let set = level_set(&f, 1.0, 0.05, probe, (4, 10)).unwrap();
        assert!(!set.is_empty());
        for p in &set {
            assert!(p.dist(&pole) < 0.0625);
        }
        let close_probes = probe
            .points
            .iter()
            .filter(|p| p.dist(&pole) <= 0.015625)
            .count();
        let close_members = set.iter().filter(|p| p.dist(&pole) <= 0.015625).count();
        assert!(close_probes > 0);
        assert_eq!(close_members, close_probes);
    }

    #[test]
    fn box_dimension_of_sphere_point_and_empty() {
        let nets = build_net(1, 12, 11).unwrap();
        let everything = |_: &SpherePoint| true;
        let full = box_dimension(&BoxSet::Predicate(&everything), 4, 12, &nets).unwrap();
        assert_abs_diff_eq!(full.dim, 1.0, epsilon = 0.05);
        assert!(full.fit_r2 > 0.99);

        let single = [SpherePoint::north_pole(1)];
        let point = box_dimension(&BoxSet::Points(&single), 4, 12, &nets).unwrap();
        assert_abs_diff_eq!(point.dim, 0.0, epsilon = 1e-12);
        assert_eq!(point.fit_r2, 1.0);
        assert!(!point.degenerate);
        assert!(point.counts.iter().all(|(_, c)| *c == 1));

        let none: [SpherePoint; 0] = [];
        let empty = box_dimension(&BoxSet::Points(&none), 4, 12, &nets).unwrap();
        assert!(empty.degenerate);
        assert_eq!(empty.dim, 0.0);
    }

    #[test]
    fn cap_union_is_locally_one_dimensional() {
        let nets = build_net(1, 12, 11).unwrap();
        let caps: Vec<Cap> = [0.3f64, 2.0, 4.4]
            .iter()
            .map(|&a| Cap::new(SpherePoint::from_angle(a), 0.25).unwrap())
            .collect();
        let bd = box_dimension(&BoxSet::Caps(&caps), 6, 12, &nets).unwrap();
        assert_abs_diff_eq!(bd.dim, 1.0, epsilon = 0.05);
        assert!(bd.fit_r2 > 0.99);
    }

    #[test]
    fn box_dimension_monotone_under_inclusion() {
        let nets = build_net(1, 10, 11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let big: Vec<SpherePoint> = (0..500).map(|_| uniform_on_sphere(1, &mut rng)).collect();
        let small = &big[..100];
        let a = box_dimension(&BoxSet::Points(small), 4, 10, &nets).unwrap();
        let b = box_dimension(&BoxSet::Points(&big), 4, 10, &nets).unwrap();
        assert!(a.dim <= b.dim + 0.05);
    }

    #[test]
    fn spectrum_of_constant_sits_at_zero() {
        let nets = build_net(1, 6, 7).unwrap();
        let f = whole_sphere(1);
        let cfg = SpectrumConfig {
            probe_level: 6,
            profile_range: (2, 6),
            n_tail: 4,
            tol: 0.05,
            count_range: (3, 6),
        };
        let est = spectrum(&f, &[0.0, 0.5], &cfg, &nets).unwrap();
        assert_eq!(est.points.len(), 2);
        let zero = &est.points[0];
        assert_eq!(zero.cardinality, net_level(&nets, 6).unwrap().cardinality());
        assert_abs_diff_eq!(zero.dim, 1.0, epsilon = 0.05);
        assert!(!zero.degenerate);
        let half = &est.points[1];
        assert_eq!(half.cardinality, 0);
        assert!(half.degenerate);
        assert_eq!(half.dim, 0.0);

        assert!(spectrum(&f, &[1.5], &cfg, &nets).is_err());
    }

    #[test]
    fn witness_mixture_shape() {
        let nets = build_net(1, 6, 7).unwrap();
        let w = witness_mixture(&nets, 1).unwrap();
        assert_eq!(w.truncation, Some(4));
        assert!(w.is_nonnegative());
        let norm = l1_norm(&w).unwrap();
        assert!(norm.exact);
        assert_relative_eq!(norm.value, 0.75, max_relative = 1e-12);
        let t2 = saturating_function(&nets, 1, 2).unwrap().terms.len();
        let t4 = saturating_function(&nets, 1, 4).unwrap().terms.len();
        assert_eq!(w.terms.len(), t2 + t4);

        let coarse = build_net(1, 2, 7).unwrap();
        assert!(matches!(
            witness_mixture(&coarse, 1),
            Err(CapfieldError::Degenerate(_))
        ));
    }

    #[test]
    fn exponent_buckets_cover_every_probe() {
        let nets = build_net(1, 6, 7).unwrap();
        let f = saturating_function(&nets, 1, 4).unwrap();
        let probe = net_level(&nets, 5).unwrap();
        let field = exponent_field(&f, probe, (3, 6), 4).unwrap();
        assert_eq!(field.len(), probe.cardinality());
        let grid: Vec<f64> = (0..=5).map(|k| k as f64 * 0.2).collect();
        for bh in &field {
            assert!((0.0..=1.0).contains(bh));
            assert!(grid.iter().any(|b| (bh - b).abs() <= 0.1 + 1e-12));
        }
    }

    #[test]
    fn divergence_witness_exponent_recorded() {
        let (cov, gauge) = singleton_divergence_example(1, 0.5, 14).unwrap();
        let f = divergence_function(&cov, &gauge).unwrap();
        let pole = SpherePoint::north_pole(1);
        let prof = radial_profile(&f, &pole, 1, 14).unwrap();
        let est = beta_hat_detail(&prof, DEFAULT_TAIL_WINDOW).unwrap();
        // early tail rows carry the weight factor at small n, so the raw
        // maximum overshoots; the deepest row sits inside the predicted band
        assert_eq!(est.value, 1.0);
        assert!(est.unclamped.unwrap() > 1.0);
        let last = prof.rows.last().unwrap();
        let deepest = last.value.unwrap().log2() / last.n as f64;
        assert!(deepest > 0.5 && deepest < 0.92, "deepest row {deepest}");
    }
}
