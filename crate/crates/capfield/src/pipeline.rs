//! Experiment configuration, named invariant suites, and end-to-end runs.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::analysis::{box_dimension, limsup_dimension, spectrum, witness_mixture, BoxSet, SpectrumConfig};
use crate::construct::{
    divergence_function, limsup_cover_sets, limsup_level_index, sample_limsup_layer,
    saturating_function, singleton_divergence_example,
};
use crate::error::{CapfieldError, Result};
use crate::io::sha256_hex;
use crate::poisson::{
    cap_kernel_integral_with, kernel_value, poisson_integral_at, Atom, CapFunction, CapTerm,
    FunctionMode,
};
use crate::quad::QuadConfig;
use crate::slicer::{check_domination, harnack_c0, slice_radii};
use crate::sphere::cap::{uniform_in_cap, uniform_on_sphere, Cap};
use crate::sphere::net::{build_net, verify_net, Net};
use crate::sphere::point::{angle_of_chord, SpherePoint};

/// Output file locations for a run; unset entries are simply not written.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nets: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
}

/// Everything a reproducible run depends on; its hash is embedded in outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub d: usize,
    pub n_max: u32,
    pub seed: u64,
    pub quad_abs_tol: f64,
    pub quad_rel_tol: f64,
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub outputs: OutputPaths,
}

impl ExperimentConfig {
    /// Shipped defaults for a given boundary dimension.
    pub fn for_dimension(d: usize) -> ExperimentConfig {
        ExperimentConfig {
            d,
            n_max: 12,
            seed: 7,
            quad_abs_tol: 1e-12,
            quad_rel_tol: 1e-10,
            spectrum: SpectrumConfig::default(),
            outputs: OutputPaths::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(CapfieldError::OutOfRange("d must be at least 1".into()));
        }
        if self.n_max == 0 {
            return Err(CapfieldError::OutOfRange("n_max must be at least 1".into()));
        }
        if !(self.quad_abs_tol > 0.0 && self.quad_rel_tol > 0.0) {
            return Err(CapfieldError::OutOfRange(
                "quadrature tolerances must be positive".into(),
            ));
        }
        let s = &self.spectrum;
        if !(s.tol > 0.0) {
            return Err(CapfieldError::OutOfRange(
                "level-set tolerance must be positive".into(),
            ));
        }
        if s.n_tail == 0 {
            return Err(CapfieldError::OutOfRange(
                "tail window must be nonempty".into(),
            ));
        }
        if s.probe_level > self.n_max
            || s.count_range.1 > self.n_max
            || s.count_range.0 == 0
            || s.count_range.0 > s.count_range.1
            || s.profile_range.0 == 0
            || s.profile_range.0 > s.profile_range.1
        {
            return Err(CapfieldError::OutOfRange(
                "spectrum net levels must be ordered and at most n_max".into(),
            ));
        }
        Ok(())
    }

    pub fn quad(&self) -> QuadConfig {
        QuadConfig {
            abs_tol: self.quad_abs_tol,
            rel_tol: self.quad_rel_tol,
            ..QuadConfig::default()
        }
    }

    /// Hex digest of the canonical JSON form, embedded in every output file.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("plain config serializes");
        sha256_hex(&bytes)
    }
}

/// Binary-order point count of a net family, the quantity the resource
/// guardrail compares against its budget: 2^(d·n_max), saturating.
pub fn estimated_net_points(d: usize, n_max: u32) -> u64 {
    let bits = (d as u64).saturating_mul(n_max as u64);
    if bits >= 63 {
        u64::MAX
    } else {
        1u64 << bits
    }
}

/// Operations above this estimated point count require an explicit override.
pub const POINT_BUDGET: u64 = 10_000_000;

pub fn guard_points(estimate: u64, force: bool) -> Result<()> {
    if estimate > POINT_BUDGET && !force {
        return Err(CapfieldError::ResourceLimit {
            estimate,
            limit: POINT_BUDGET,
        });
    }
    Ok(())
}

/// One named invariant suite's result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub name: String,
    pub passed: bool,
    pub details: Vec<String>,
}

/// Machine-readable verify report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config_hash: String,
    pub passed: bool,
    pub suites: Vec<SuiteOutcome>,
}

pub const SUITES: &[&str] = &[
    "kernel",
    "quadrature",
    "lower-constant",
    "slices",
    "nets",
    "growth",
    "divergence",
    "dimension",
];

struct Checks {
    details: Vec<String>,
    passed: bool,
}

impl Checks {
    fn new() -> Checks {
        Checks {
            details: Vec::new(),
            passed: true,
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.details
            .push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
        self.passed &= ok;
    }

    fn note(&mut self, line: String) {
        self.details.push(format!("     {line}"));
    }

    fn outcome(self, name: &str) -> SuiteOutcome {
        SuiteOutcome {
            name: name.into(),
            passed: self.passed,
            details: self.details,
        }
    }
}

const LOWER_GRID: [f64; 4] = [0.6, 0.9, 0.99, 0.999];

/// Midpoint Riemann sum of the circle kernel over the arc of κ(z, cap_radius)
/// seen from offset gamma = ‖y − z‖; the quadrature oracle.
pub fn circle_riemann_oracle(r: f64, gamma: f64, cap_radius: f64, points: usize) -> f64 {
    let a = angle_of_chord(gamma);
    let thc = angle_of_chord(cap_radius);
    let (lo, hi) = (a - thc, a + thc);
    let h = (hi - lo) / points as f64;
    let mut sum = 0.0;
    for i in 0..points {
        let u = lo + (i as f64 + 0.5) * h;
        let s = (0.5 * u).sin();
        sum += (1.0 - r * r) / ((1.0 - r) * (1.0 - r) + 4.0 * r * s * s);
    }
    sum * h / (2.0 * PI)
}

fn suite_kernel(cfg: &ExperimentConfig) -> Result<SuiteOutcome> {
    let mut c = Checks::new();
    let quad = cfg.quad();
    for d in [1usize, 2] {
        for r in [0.5, 0.9, 0.99, 0.999] {
            let dev = (cap_kernel_integral_with(d, r, 0.0, 2.0, &quad)? - 1.0).abs();
            c.check(
                dev < 1e-8,
                format!("normalization d={d} r={r}: |integral - 1| = {dev:.3e}"),
            );
            let peak = kernel_value(d, r, 0.0)?;
            let closed = (1.0 + r) / (1.0 - r).powi(d as i32);
            let rel = ((peak - closed) / closed).abs();
            c.check(
                rel <= 1e-12,
                format!("peak identity d={d} r={r}: rel err = {rel:.3e}"),
            );
            let bound = 2.0 / (1.0 - r).powi(d as i32);
            let mut worst: f64 = 0.0;
            for i in 0..=2000 {
                let delta = 2.0 * i as f64 / 2000.0;
                worst = worst.max(kernel_value(d, r, delta)? / bound);
            }
            c.check(
                worst <= 1.0 + 1e-12,
                format!("sup bound d={d} r={r}: max kernel/bound = {worst:.6}"),
            );
        }
    }
    Ok(c.outcome("kernel"))
}

fn suite_quadrature(cfg: &ExperimentConfig) -> Result<SuiteOutcome> {
    let mut c = Checks::new();
    let quad = cfg.quad();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x71ad);
    let mut worst: f64 = 0.0;
    for _ in 0..12 {
        let r = rng.gen_range(0.0..0.999);
        let gamma = rng.gen_range(0.0..2.0);
        let rho = rng.gen_range(1e-3..2.0);
        let engine = cap_kernel_integral_with(1, r, gamma, rho, &quad)?;
        let oracle = circle_riemann_oracle(r, gamma, rho, 1_000_000);
        worst = worst.max((engine - oracle).abs());
    }
    c.check(
        worst < 1e-6,
        format!("12 random (r, gamma, rho) triples vs 1e6-point midpoint rule: max |diff| = {worst:.3e}"),
    );
    Ok(c.outcome("quadrature"))
}

fn suite_lower_constant(cfg: &ExperimentConfig) -> Result<SuiteOutcome> {
    let mut c = Checks::new();
    let quad = cfg.quad();
    for d in [1usize, 2] {
        let mut values = Vec::new();
        for &r in &LOWER_GRID {
            values.push(cap_kernel_integral_with(d, r, 0.0, 1.0 - r, &quad)?);
        }
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = values.iter().cloned().fold(0.0, f64::max);
        c.check(min > 0.0, format!("own-scale cap integral d={d}: min = {min:.6}"));
        c.check(
            max / min <= 2.0,
            format!("own-scale spread d={d}: max/min = {:.4}", max / min),
        );
        c.note(format!("recorded lower constant C_hat({d}) = {min:.6}"));
    }
    Ok(c.outcome("lower-constant"))
}

/// One randomized (measure, boundary point, radius) domination instance.
pub fn sample_domination_case(
    d: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(CapFunction, SpherePoint, f64)> {
    let n_caps = rng.gen_range(2..=5);
    let signed = rng.gen_bool(0.3);
    let mut terms = Vec::with_capacity(n_caps);
    for _ in 0..n_caps {
        let center = uniform_on_sphere(d, rng);
        let radius = 2.0 * 10f64.powf(rng.gen_range(-3.0..0.0));
        let weight = rng.gen_range(0.1..3.0) * if signed && rng.gen_bool(0.5) { -1.0 } else { 1.0 };
        terms.push(CapTerm {
            cap: Cap::new(center, radius.min(2.0))?,
            weight,
        });
    }
    let mut atoms = Vec::new();
    let mode = if rng.gen_bool(0.4) {
        for _ in 0..rng.gen_range(1..=2) {
            atoms.push(Atom {
                point: uniform_on_sphere(d, rng),
                mass: rng.gen_range(0.05..1.0) * if signed && rng.gen_bool(0.5) { -1.0 } else { 1.0 },
            });
        }
        FunctionMode::Measure
    } else {
        FunctionMode::Function
    };
    let planted = rng.gen_bool(0.5);
    let y = if planted {
        uniform_in_cap(&terms[rng.gen_range(0..terms.len())].cap, rng)?
    } else {
        uniform_on_sphere(d, rng)
    };
    let n = rng.gen_range(3..=10);
    let r = 1.0 - 0.5f64.powi(n);
    Ok((CapFunction::new(d, mode, terms, atoms)?, y, r))
}

fn suite_slices(cfg: &ExperimentConfig) -> Result<SuiteOutcome> {
    let mut c = Checks::new();
    for d in [1usize, 2] {
        let c0 = harnack_c0(d);
        for r in [0.9, 0.99, 0.999] {
            let sd = slice_radii(d, r, c0)?;
            let k = sd.k();
            let mut worst_ratio: f64 = 0.0;
            for j in 2..k {
                worst_ratio = worst_ratio.max((sd.levels[j] / sd.levels[j - 1] - c0).abs());
            }
            c.check(
                worst_ratio <= 1e-12,
                format!("interior level ratio d={d} r={r}: |ratio - c0| = {worst_ratio:.3e}"),
            );
            let sum: f64 = sd.jumps.iter().sum();
            let rel = ((sum - sd.levels[0]) / sd.levels[0]).abs();
            c.check(
                rel <= 1e-12,
                format!("jump telescoping d={d} r={r}: rel err = {rel:.3e}"),
            );
            let positive = sd.jumps.iter().all(|&j| j > 0.0);
            c.check(positive, format!("jumps positive d={d} r={r} (k = {k})"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x51ce);
    let mut all_ok = true;
    let mut min_margin = f64::INFINITY;
    let mut delta_floor_ok = true;
    let per_d = 60;
    for d in [1usize, 2] {
        for _ in 0..per_d {
            let (mu, y, r) = sample_domination_case(d, &mut rng)?;
            let dc = check_domination(&mu, &y, r)?;
            all_ok &= dc.ok;
            delta_floor_ok &= dc.delta_star >= 1.0 - r - 1e-15;
            if dc.lhs > 0.0 {
                min_margin = min_margin.min(dc.rhs / dc.lhs);
            }
        }
    }
    c.check(
        all_ok,
        format!("domination holds on {} randomized instances", 2 * per_d),
    );
    c.check(
        delta_floor_ok,
        "maximizing radius stays at least 1 - r in every instance".to_string(),
    );
    c.note(format!("smallest rhs/lhs margin observed: {min_margin:.3}"));
    Ok(c.outcome("slices"))
}

fn suite_nets(cfg: &ExperimentConfig) -> Result<SuiteOutcome> {
    let mut c = Checks::new();
    let n_max = cfg.n_max.min(12);
    let nets = build_net(1, n_max, cfg.seed)?;
    let mut densities = Vec::new();
    for net in &nets {
        let report = verify_net(net, 4000, cfg.seed ^ u64::from(net.level));
        c.check(
            report.separation_ok,
            format!(
                "level {} separation {:.6e} at least 2^-{}",
                net.level, report.separation, net.level
            ),
        );
        let target = 0.5f64.powi(net.level as i32);
        c.check(
            report.covering_gap < target,
            format!(
                "level {} sampled covering gap {:.6e} below 2^-{}",
                net.level, report.covering_gap, net.level
            ),
        );
        densities.push(net.cardinality() as f64 * target);
    }
    let mean = densities.iter().sum::<f64>() / densities.len() as f64;
    let spread_ok = densities.iter().all(|&x| (x / mean - 1.0).abs() <= 0.2);
    c.check(
        spread_ok,
        format!(
            "density card(R_n)·2^-n within ±20% of mean {mean:.3} (min {:.3}, max {:.3})",
            densities.iter().cloned().fold(f64::INFINITY, f64::min),
            densities.iter().cloned().fold(0.0, f64::max),
        ),
    );
    Ok(c.outcome("nets"))
}

/// q = n·2^(-(n-N)d)·P[f_n](r_n y) over sampled cover-layer sites: the growth
/// statistic whose positive, n- and alpha-independent floor the suite checks.
pub fn growth_statistics(
    nets: &[crate::sphere::net::Net],
    d: usize,
    n: u32,
    alpha: f64,
    sites: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let layer = limsup_cover_sets(nets, alpha, n)?;
    let ys = sample_limsup_layer(&layer, sites, seed)?;
    let f = saturating_function(nets, d, n)?;
    let big_n = limsup_level_index(n, alpha);
    let r = 1.0 - 0.5f64.powi(n as i32);
    let scale = (n as f64) * 0.5f64.powi(((n - big_n) as usize * d) as i32);
    ys.iter()
        .map(|y| Ok(scale * poisson_integral_at(&f, r, y)?))
        .collect()
}

fn suite_growth(cfg: &ExperimentConfig) -> Result<SuiteOutcome> {
    let mut c = Checks::new();
    let nets = build_net(1, cfg.n_max.min(12), cfg.seed)?;
    let mut cell_minima = Vec::new();
    for n in [6u32, 10] {
        for alpha in [2.0, 3.0] {
            let qs = growth_statistics(&nets, 1, n, alpha, 20, cfg.seed ^ u64::from(n))?;
            let min = qs.iter().cloned().fold(f64::INFINITY, f64::min);
            c.check(min > 0.0, format!("cell n={n} alpha={alpha}: min q = {min:.4}"));
            cell_minima.push(min);
        }
    }
    let lo = cell_minima.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = cell_minima.iter().cloned().fold(0.0, f64::max);
    c.check(
        hi / lo <= 4.0,
        format!("cell minima vary by factor {:.3} across the grid", hi / lo),
    );
    Ok(c.outcome("growth"))
}

/// P[f](r_n·target)/tau(2^-n) for the canonical one-cap-per-scale divergence
/// function, n = 1..=n_max.
pub fn divergence_ratio_table(d: usize, beta: f64, n_max: u32) -> Result<Vec<(u32, f64)>> {
    let (cov, gauge) = singleton_divergence_example(d, beta, n_max)?;
    let f = divergence_function(&cov, &gauge)?;
    let target = SpherePoint::north_pole(d);
    let mut rows = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let r = 1.0 - 0.5f64.powi(n as i32);
        let p = poisson_integral_at(&f, r, &target)?;
        rows.push((n, p / gauge.tau(0.5f64.powi(n as i32))));
    }
    Ok(rows)
}

fn suite_divergence(_cfg: &ExperimentConfig) -> Result<SuiteOutcome> {
    let mut c = Checks::new();
    let n_max = 14u32;
    let rows = divergence_ratio_table(1, 0.5, n_max)?;
    let peak = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    c.check(peak >= 10.0, format!("gauge ratio reaches {peak:.2} by n = {n_max}"));
    // truncation bends the tail down; growth is checked while the sum still
    // carries the scale
    let valid = (n_max - 3) as usize;
    let increasing = rows[..valid].windows(2).all(|w| w[1].1 > w[0].1);
    c.check(
        increasing,
        format!("ratio increases on n = 1..{valid} (truncation-valid window)"),
    );
    Ok(c.outcome("divergence"))
}

fn suite_dimension(cfg: &ExperimentConfig) -> Result<SuiteOutcome> {
    let mut c = Checks::new();
    let n_max = cfg.n_max.min(12);
    let nets = build_net(1, n_max, cfg.seed)?;
    let everything = |_: &SpherePoint| true;
    let full = box_dimension(&BoxSet::Predicate(&everything), 4, n_max, &nets)?;
    c.check(
        (full.dim - 1.0).abs() <= 0.05,
        format!("whole circle: dim = {:.4} (r2 = {:.4})", full.dim, full.fit_r2),
    );
    let single = [SpherePoint::north_pole(1)];
    let point = box_dimension(&BoxSet::Points(&single), 4, n_max, &nets)?;
    c.check(
        point.dim.abs() <= 0.05,
        format!("single point: dim = {:.4}", point.dim),
    );
    let alpha = 2.0;
    let lo = 6u32.min(n_max);
    let layer = limsup_dimension(&nets, alpha, lo, n_max)?;
    c.check(
        (layer.dim - 0.5).abs() <= 0.15,
        format!(
            "alpha = 2 cover layers over [{lo},{n_max}]: dim = {:.4} (r2 = {:.4}), target d/alpha = 0.5",
            layer.dim, layer.fit_r2
        ),
    );
    Ok(c.outcome("dimension"))
}

pub fn run_suite(name: &str, cfg: &ExperimentConfig) -> Result<SuiteOutcome> {
    match name {
        "kernel" => suite_kernel(cfg),
        "quadrature" => suite_quadrature(cfg),
        "lower-constant" => suite_lower_constant(cfg),
        "slices" => suite_slices(cfg),
        "nets" => suite_nets(cfg),
        "growth" => suite_growth(cfg),
        "divergence" => suite_divergence(cfg),
        "dimension" => suite_dimension(cfg),
        other => Err(CapfieldError::OutOfRange(format!(
            "unknown suite '{other}'; available: {}",
            SUITES.join(", ")
        ))),
    }
}

/// Runs the named suites (all by default) and aggregates the report.
pub fn run_verify(cfg: &ExperimentConfig, filter: Option<&str>) -> Result<VerifyReport> {
    cfg.validate()?;
    let selected: Vec<&str> = match filter {
        Some(name) => {
            if !SUITES.contains(&name) {
                return Err(CapfieldError::OutOfRange(format!(
                    "unknown suite '{name}'; available: {}",
                    SUITES.join(", ")
                )));
            }
            vec![name]
        }
        None => SUITES.to_vec(),
    };
    let mut suites = Vec::with_capacity(selected.len());
    for name in selected {
        suites.push(run_suite(name, cfg)?);
    }
    let passed = suites.iter().all(|s| s.passed);
    Ok(VerifyReport {
        config_hash: cfg.hash(),
        passed,
        suites,
    })
}

/// One β row of a spectrum run, with its reference value d − β.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub beta: f64,
    pub dim: f64,
    pub fit_r2: f64,
    pub cardinality: usize,
    pub degenerate: bool,
    pub reference: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRun {
    pub config_hash: String,
    pub d: usize,
    pub scale_range: (u32, u32),
    pub rows: Vec<SpectrumRow>,
    /// max |dim - (d - β)| over the rows.
    pub max_deviation: f64,
    /// No row exceeds the d - β reference by more than 0.2.
    pub upper_bound_ok: bool,
}

/// End-to-end spectrum pipeline: nets → geometric mixture witness → exponent
/// field → level sets → box dimensions, compared against the d − β reference.
pub fn run_spectrum(cfg: &ExperimentConfig, betas: &[f64], force: bool) -> Result<SpectrumRun> {
    cfg.validate()?;
    guard_points(estimated_net_points(cfg.d, cfg.n_max), force)?;
    let nets = build_net(cfg.d, cfg.n_max, cfg.seed)?;
    let w = witness_mixture(&nets, cfg.d)?;
    spectrum_rows(cfg, &w, &nets, betas)
}

/// Same pipeline with a caller-supplied function instead of the default witness.
pub fn run_spectrum_with(
    cfg: &ExperimentConfig,
    f: &CapFunction,
    betas: &[f64],
    force: bool,
) -> Result<SpectrumRun> {
    cfg.validate()?;
    if f.d != cfg.d {
        return Err(CapfieldError::DimensionMismatch {
            expected: cfg.d,
            got: f.d,
        });
    }
    guard_points(estimated_net_points(cfg.d, cfg.n_max), force)?;
    let nets = build_net(cfg.d, cfg.n_max, cfg.seed)?;
    spectrum_rows(cfg, f, &nets, betas)
}

fn spectrum_rows(
    cfg: &ExperimentConfig,
    f: &CapFunction,
    nets: &[Net],
    betas: &[f64],
) -> Result<SpectrumRun> {
    let est = spectrum(f, betas, &cfg.spectrum, nets)?;
    let d = cfg.d as f64;
    let mut rows = Vec::with_capacity(est.points.len());
    let mut max_deviation: f64 = 0.0;
    let mut upper_bound_ok = true;
    for p in &est.points {
        let reference = d - p.beta;
        let deviation = p.dim - reference;
        max_deviation = max_deviation.max(deviation.abs());
        upper_bound_ok &= p.dim <= reference + 0.2;
        rows.push(SpectrumRow {
            beta: p.beta,
            dim: p.dim,
            fit_r2: p.fit_r2,
            cardinality: p.cardinality,
            degenerate: p.degenerate,
            reference,
            deviation,
        });
    }
    Ok(SpectrumRun {
        config_hash: cfg.hash(),
        d: cfg.d,
        scale_range: est.scale_range,
        rows,
        max_deviation,
        upper_bound_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation_and_hash() {
        let cfg = ExperimentConfig::for_dimension(1);
        cfg.validate().unwrap();
        let h1 = cfg.hash();
        assert_eq!(h1.len(), 64);
        assert_eq!(h1, cfg.hash());
        let mut other = cfg.clone();
        other.seed = 8;
        assert_ne!(h1, other.hash());

        let mut bad = cfg.clone();
        bad.spectrum.probe_level = 20;
        assert!(bad.validate().is_err());
        let mut bad = cfg.clone();
        bad.quad_abs_tol = 0.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn resource_guard_arithmetic() {
        assert_eq!(estimated_net_points(1, 12), 4096);
        assert_eq!(estimated_net_points(3, 12), 1u64 << 36);
        assert!(guard_points(4096, false).is_ok());
        match guard_points(1u64 << 36, false) {
            Err(CapfieldError::ResourceLimit { estimate, limit }) => {
                assert_eq!(estimate, 1u64 << 36);
                assert_eq!(limit, POINT_BUDGET);
            }
            other => panic!("expected resource refusal, got {other:?}"),
        }
        assert!(guard_points(1u64 << 36, true).is_ok());
    }

    #[test]
    fn riemann_oracle_matches_closed_form() {
        // midpoint rule against the full-circle normalization identity
        let v = circle_riemann_oracle(0.7, 0.0, 2.0, 200_000);
        assert!((v - 1.0).abs() < 1e-9, "full circle gave {v}");
    }

    #[test]
    fn unknown_suite_is_rejected() {
        let cfg = ExperimentConfig::for_dimension(1);
        assert!(run_suite("harmonics", &cfg).is_err());
        assert!(run_verify(&cfg, Some("harmonics")).is_err());
    }

    #[test]
    fn single_suite_filter_runs_alone() {
        let cfg = ExperimentConfig::for_dimension(1);
        let report = run_verify(&cfg, Some("divergence")).unwrap();
        assert_eq!(report.suites.len(), 1);
        assert_eq!(report.suites[0].name, "divergence");
        assert!(report.passed, "details: {:?}", report.suites[0].details);
        assert_eq!(report.config_hash, cfg.hash());
    }

    #[test]
    fn spectrum_runner_small_config() {
        let mut cfg = ExperimentConfig::for_dimension(1);
        cfg.n_max = 6;
        cfg.spectrum = SpectrumConfig {
            probe_level: 6,
            profile_range: (2, 6),
            n_tail: 4,
            tol: 0.1,
            count_range: (3, 6),
        };
        let run = run_spectrum(&cfg, &[0.0, 0.5, 1.0], false).unwrap();
        assert_eq!(run.rows.len(), 3);
        for row in &run.rows {
            assert_eq!(row.reference, 1.0 - row.beta);
            assert!((row.deviation - (row.dim - row.reference)).abs() < 1e-15);
        }
        assert!(run.upper_bound_ok);
        assert_eq!(run.config_hash, cfg.hash());
    }
}
