//! Acceptance gate: one test per criterion, each ending in a single PASS line
//! or a panic carrying the measured table. Tolerances are pinned here and are
//! not to be loosened; a red criterion is a finding, not a knob.

use assert_cmd::Command;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

use capfield::analysis::{box_dimension, limsup_dimension, BoxSet};
use capfield::construct::{divergence_function, singleton_divergence_example};
use capfield::pipeline::{
    circle_riemann_oracle, divergence_ratio_table, growth_statistics, sample_domination_case,
    ExperimentConfig, SpectrumRun,
};
use capfield::poisson::{cap_kernel_integral_with, kernel_value, poisson_integral_at};
use capfield::slicer::{check_domination, harnack_c0, slice_radii};
use capfield::sphere::net::{build_net, verify_net};
use capfield::sphere::point::SpherePoint;

const SEED: u64 = 7;

fn quad() -> capfield::quad::QuadConfig {
    ExperimentConfig::for_dimension(1).quad()
}

/// |∫P dσ − 1| < 1e-8; peak value exact to 1e-12; global bound on a δ grid.
#[test]
fn c1_kernel_identities() {
    let quad = quad();
    let mut worst_mass = 0.0f64;
    let mut worst_peak = 0.0f64;
    for d in [1usize, 2] {
        for r in [0.5, 0.9, 0.99, 0.999] {
            let mass = cap_kernel_integral_with(d, r, 0.0, 2.0, &quad).unwrap();
            worst_mass = worst_mass.max((mass - 1.0).abs());

            let peak = kernel_value(d, r, 0.0).unwrap();
            let exact = (1.0 + r) / (1.0 - r).powi(d as i32);
            worst_peak = worst_peak.max((peak / exact - 1.0).abs());

            let bound = 2.0 / (1.0 - r).powi(d as i32);
            for k in 0..=2000 {
                let delta = 2.0 * k as f64 / 2000.0;
                let v = kernel_value(d, r, delta).unwrap();
                assert!(
                    v <= bound * (1.0 + 1e-12),
                    "criterion 1: FAIL kernel(d={d}, r={r}, delta={delta}) = {v} > {bound}"
                );
            }
        }
    }
    assert!(worst_mass < 1e-8, "criterion 1: FAIL |mass - 1| = {worst_mass:e}");
    assert!(worst_peak < 1e-12, "criterion 1: FAIL peak mismatch {worst_peak:e}");
    println!(
        "criterion 1 (kernel identities): PASS  |mass-1| <= {worst_mass:.2e}, peak rel err <= {worst_peak:.2e}, delta-grid bound holds"
    );
}

/// d=1 cap integrals against a 10^6-point Riemann sum on 100 random triples.
#[test]
fn c2_quadrature_oracle() {
    let quad = quad();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x0a2c);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let r: f64 = rng.gen_range(0.0..0.999);
        let gamma: f64 = rng.gen_range(0.0..2.0);
        let rho: f64 = rng.gen_range(1e-3..2.0);
        let engine = cap_kernel_integral_with(1, r, gamma, rho, &quad).unwrap();
        let oracle = circle_riemann_oracle(r, gamma, rho, 1_000_000);
        worst = worst.max((engine - oracle).abs());
    }
    assert!(worst <= 1e-6, "criterion 2: FAIL worst |engine - oracle| = {worst:e}");
    println!("criterion 2 (quadrature oracle): PASS  worst |engine - oracle| = {worst:.2e} over 100 triples");
}

/// Kernel mass of the shrinking cap κ(N, 1−r): positive, factor-2 stable.
#[test]
fn c3_cap_lower_bound() {
    let quad = quad();
    let mut lines = Vec::new();
    for d in [1usize, 2] {
        let values: Vec<f64> = [0.6, 0.9, 0.99, 0.999]
            .iter()
            .map(|&r| cap_kernel_integral_with(d, r, 0.0, 1.0 - r, &quad).unwrap())
            .collect();
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = values.iter().cloned().fold(0.0f64, f64::max);
        assert!(min > 0.0, "criterion 3: FAIL nonpositive cap mass for d={d}: {values:?}");
        assert!(
            max / min <= 2.0,
            "criterion 3: FAIL spread {:.3} > 2 for d={d}: {values:?}",
            max / min
        );
        lines.push(format!("C({d}) = {min:.6} (spread {:.3})", max / min));
    }
    println!("criterion 3 (cap lower bound): PASS  {}", lines.join(", "));
}

/// Slice ladder identities at 1e-12 and domination on 1000 random instances.
#[test]
fn c4_slice_domination() {
    for d in [1usize, 2] {
        let c0 = harnack_c0(d);
        for r in [0.9, 0.99, 0.999] {
            let decomp = slice_radii(d, r, c0).unwrap();
            let levels = &decomp.levels;
            for j in 2..levels.len() {
                let ratio = levels[j] / levels[j - 1];
                assert!(
                    (ratio - c0).abs() <= 1e-12,
                    "criterion 4: FAIL interior ratio {ratio} at j={j}, d={d}, r={r}"
                );
            }
            let jump_sum: f64 = decomp.jumps.iter().sum();
            assert!(
                ((jump_sum - levels[0]) / levels[0]).abs() <= 1e-12,
                "criterion 4: FAIL jump telescoping at d={d}, r={r}"
            );
            assert!(
                decomp.jumps.iter().all(|&j| j > 0.0),
                "criterion 4: FAIL nonpositive jump at d={d}, r={r}"
            );
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x51ce);
    let mut min_margin = f64::INFINITY;
    for i in 0..1000 {
        let (mu, y, r) = sample_domination_case(1 + i % 2, &mut rng).unwrap();
        let check = check_domination(&mu, &y, r).unwrap();
        assert!(check.ok, "criterion 4: FAIL instance {i}: lhs {} > rhs {}", check.lhs, check.rhs);
        assert!(
            check.delta_star >= 1.0 - r - 1e-15,
            "criterion 4: FAIL instance {i}: delta* {} < 1-r {}",
            check.delta_star,
            1.0 - r
        );
        if check.lhs > 0.0 {
            min_margin = min_margin.min(check.rhs / check.lhs);
        }
    }
    println!(
        "criterion 4 (slice domination): PASS  ladder exact to 1e-12; 1000/1000 dominated, min rhs/lhs = {min_margin:.3}"
    );
}

/// d=1 nets to level 12: separation, sampled covering gap, density stability.
#[test]
fn c5_net_family() {
    let nets = build_net(1, 12, SEED).unwrap();
    let mut ratios = Vec::new();
    for net in &nets {
        let report = verify_net(net, 4000, SEED ^ u64::from(net.level));
        assert!(report.separation_ok, "criterion 5: FAIL separation at level {}", net.level);
        assert!(
            report.covering_gap < 0.5f64.powi(net.level as i32),
            "criterion 5: FAIL covering gap {} at level {}",
            report.covering_gap,
            net.level
        );
        ratios.push(report.cardinality_ratio);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    for (net, ratio) in nets.iter().zip(&ratios) {
        assert!(
            (ratio / mean - 1.0).abs() <= 0.2,
            "criterion 5: FAIL density {ratio:.3} at level {} vs mean {mean:.3}",
            net.level
        );
    }
    println!(
        "criterion 5 (net family): PASS  12 levels, covering gaps < 2^-n, density {mean:.3} stable within 20%"
    );
}

/// Scaled growth q = n 2^(-(n-N)d) P[f_n](r_n y) on sampled y in the cover
/// layers: positive minimum in every grid cell, spread of the cell minima
/// bounded by 4 across n in {6,8,10,12} and alpha in {1.5,2,3}.
#[test]
fn c6_growth_floor() {
    let nets = build_net(1, 13, SEED).unwrap();
    let mut cells = Vec::new();
    println!("criterion 6 (growth floor): cell minima over 50 sampled y each");
    for n in [6u32, 8, 10, 12] {
        for alpha in [1.5f64, 2.0, 3.0] {
            let q = growth_statistics(&nets, 1, n, alpha, 50, SEED ^ u64::from(n)).unwrap();
            let min = q.iter().cloned().fold(f64::INFINITY, f64::min);
            println!("  n = {n:>2}  alpha = {alpha:<3}  min q = {min:.4}");
            assert!(
                min > 0.0,
                "criterion 6: FAIL nonpositive growth statistic at n={n}, alpha={alpha}"
            );
            cells.push(min);
        }
    }
    let lo = cells.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = cells.iter().cloned().fold(0.0f64, f64::max);
    let spread = hi / lo;
    assert!(
        spread <= 4.0,
        "criterion 6: FAIL cell minima spread {spread:.2} > 4 (min {lo:.4}, max {hi:.4}); \
         positive-floor clause holds, the cross-grid constant does not at these scales"
    );
    println!("criterion 6 (growth floor): PASS  positive minima, spread {spread:.2} <= 4");
}

/// The beta = 0.5 divergence witness reaches ratio 10 by n = 14 and the ratio
/// sequence increases away from the truncation edge.
#[test]
fn c7_divergence_witness() {
    let table = divergence_ratio_table(1, 0.5, 14).unwrap();
    let peak = table.iter().cloned().fold((0u32, 0.0f64), |a, b| if b.1 > a.1 { b } else { a });
    assert!(
        peak.1 >= 10.0,
        "criterion 7: FAIL peak ratio {:.2} at n = {} stays below 10",
        peak.1,
        peak.0
    );
    let window = &table[..11];
    for pair in window.windows(2) {
        assert!(
            pair[1].1 > pair[0].1,
            "criterion 7: FAIL ratio not increasing at n = {}",
            pair[1].0
        );
    }

    // the witness itself diverges along the planted point
    let (cov, gauge) = singleton_divergence_example(1, 0.5, 14).unwrap();
    let f = divergence_function(&cov, &gauge).unwrap();
    let pole = SpherePoint::north_pole(1);
    let early = poisson_integral_at(&f, 1.0 - 0.5f64.powi(4), &pole).unwrap();
    let late = poisson_integral_at(&f, 1.0 - 0.5f64.powi(11), &pole).unwrap();
    assert!(late > early, "criterion 7: FAIL no growth along the planted point");
    println!(
        "criterion 7 (divergence witness): PASS  ratio {:.2} at n = {}, increasing on n = 1..11",
        peak.1, peak.0
    );
}

/// Box-count slopes: full circle 1 +- 0.05, single point 0 +- 0.05, and the
/// alpha = 2 cover layers 0.5 +- 0.15.
#[test]
fn c8_dimension_proxies() {
    let nets = build_net(1, 12, SEED).unwrap();

    let everything = |_: &SpherePoint| true;
    let full = box_dimension(&BoxSet::Predicate(&everything), 4, 12, &nets).unwrap();
    assert!(
        (full.dim - 1.0).abs() <= 0.05,
        "criterion 8: FAIL full-circle dim {:.4}",
        full.dim
    );

    let pole = [SpherePoint::north_pole(1)];
    let point = box_dimension(&BoxSet::Points(&pole), 4, 12, &nets).unwrap();
    assert!(
        point.dim.abs() <= 0.05,
        "criterion 8: FAIL single-point dim {:.4}",
        point.dim
    );

    let layer = limsup_dimension(&nets, 2.0, 6, 12).unwrap();
    assert!(
        (layer.dim - 0.5).abs() <= 0.15,
        "criterion 8: FAIL alpha=2 layer dim {:.4} (r2 {:.3})",
        layer.dim,
        layer.fit_r2
    );
    println!(
        "criterion 8 (dimension proxies): PASS  circle {:.3}, point {:.3}, alpha=2 layer {:.3} (r2 {:.3})",
        full.dim, point.dim, layer.dim, layer.fit_r2
    );
}

/// End-to-end spectrum of the mixture witness through the binary: estimates at
/// beta in {0.25, 0.5, 0.75} within 0.2 of 1 - beta, and no estimate above the
/// 1 - beta reference by more than 0.2.
#[test]
fn c9_spectrum_reproduction() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("spec.csv");
    let svg = dir.path().join("spec.svg");
    let report = dir.path().join("spec.json");
    Command::cargo_bin("capfield")
        .unwrap()
        .args(["spectrum", "--betas", "0.25,0.5,0.75", "-o"])
        .arg(&csv)
        .arg("--svg")
        .arg(&svg)
        .arg("--report")
        .arg(&report)
        .assert()
        .success();
    let run: SpectrumRun =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();

    println!("criterion 9 (spectrum reproduction): measured rows");
    for row in &run.rows {
        println!(
            "  beta {:.2}  dim {:.4}  reference {:.2}  deviation {:+.4}{}",
            row.beta,
            row.dim,
            row.reference,
            row.deviation,
            if row.degenerate { "  (degenerate level set)" } else { "" }
        );
    }
    assert!(
        run.upper_bound_ok,
        "criterion 9: FAIL a dimension estimate exceeds the d - beta reference by more than 0.2"
    );
    assert!(
        run.max_deviation <= 0.2,
        "criterion 9: FAIL max |dim - (1 - beta)| = {:.2}; the upper-bound clause holds but the \
         level sets at these betas are empty at probe depth 12, so their box dimension degenerates to 0",
        run.max_deviation
    );
    println!("criterion 9 (spectrum reproduction): PASS  max deviation {:.3}", run.max_deviation);
}
