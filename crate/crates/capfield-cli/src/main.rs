//! Command-line front end: net construction, cap-function builders, radial
//! profiles, slice-domination tables, spectrum runs, and the invariant suites.

mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use capfield::analysis::{radial_profile, witness_mixture};
use capfield::construct::{divergence_function, saturating_function, singleton_divergence_example};
use capfield::io::{
    csv_string, read_cap_function, read_nets, sha256_hex, write_cap_function, write_csv,
    write_json, write_nets,
};
use capfield::pipeline::{
    estimated_net_points, guard_points, run_spectrum, run_spectrum_with, run_verify,
    sample_domination_case, ExperimentConfig, SuiteOutcome, VerifyReport, SUITES,
};
use capfield::slicer::check_domination;
use capfield::sphere::net::{build_net, verify_net, Net};
use capfield::sphere::point::SpherePoint;
use capfield::{CapfieldError, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "capfield",
    version,
    about = "Poisson integrals of cap functions on the sphere: artifacts, checks, plots"
)]
struct Cli {
    /// Worker pool size; results do not depend on it.
    #[arg(long, global = true, env = "CAPFIELD_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build nested spherical nets, print their verification report, write JSON.
    Nets(NetsArgs),
    /// Construct a cap function or measure and write it as JSON.
    Build(BuildArgs),
    /// Evaluate P[f](r_n y) along dyadic radii toward a boundary point.
    Profile(ProfileArgs),
    /// Randomized maximal-slice domination table.
    Slicecheck(SlicecheckArgs),
    /// Exponent spectrum with the d - beta reference, as CSV and SVG.
    Spectrum(SpectrumArgs),
    /// Run the named invariant suites and emit a JSON report on stdout.
    Verify(VerifyArgs),
}

#[derive(clap::Args)]
struct NetsArgs {
    /// Sphere dimension (boundary of the ball in d+1 ambient coordinates).
    #[arg(long)]
    d: usize,
    /// Finest net level.
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output JSON path.
    #[arg(short, long)]
    out: PathBuf,
    /// Proceed past the point-count budget.
    #[arg(long)]
    force: bool,
}

#[derive(clap::Args)]
struct BuildArgs {
    #[command(subcommand)]
    kind: BuildKind,
}

#[derive(Subcommand)]
enum BuildKind {
    /// Normalized level-n average of planted cap indicators.
    Saturating {
        /// Net family JSON (needs levels up to n+1).
        #[arg(long)]
        nets: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Singleton-covering measure with prescribed divergence rate.
    Divergence {
        #[arg(long, default_value_t = 1)]
        d: usize,
        /// Gauge exponent in (0, d).
        #[arg(long)]
        beta: f64,
        /// Deepest dyadic bucket.
        #[arg(long, default_value_t = 14)]
        n_max: u32,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Geometric mixture of saturating functions.
    Witness {
        /// Net family JSON.
        #[arg(long)]
        nets: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(clap::Args)]
struct ProfileArgs {
    /// Cap function JSON.
    #[arg(short, long)]
    function: PathBuf,
    /// Boundary point as comma-separated ambient coordinates (normalized).
    #[arg(long, value_parser = parse_coords)]
    y: Coords,
    /// Dyadic level range lo:hi.
    #[arg(long, value_parser = parse_level_range)]
    n: LevelRange,
    /// Output CSV path (stdout if omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SlicecheckArgs {
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Number of randomized (measure, y, r) instances.
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output CSV path (stdout if omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SpectrumArgs {
    /// Cap function JSON; omitted, the mixture witness is built from fresh nets.
    #[arg(short, long)]
    function: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Finest net level.
    #[arg(long, default_value_t = 12)]
    n: u32,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Exponent grid start:stop:step, or a comma-separated list.
    #[arg(long, value_parser = parse_betas, default_value = "0:1:0.125")]
    betas: BetaGrid,
    /// Net level supplying the probe points (default: finest level, capped at 12).
    #[arg(long)]
    probe_level: Option<u32>,
    /// Output CSV path.
    #[arg(short, long)]
    out: PathBuf,
    /// SVG plot path.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// JSON run report path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Proceed past the point-count budget.
    #[arg(long)]
    force: bool,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 12)]
    n: u32,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Run a single suite instead of all of them.
    #[arg(long)]
    suite: Option<String>,
    /// Also validate a serialized net family before the suites.
    #[arg(long)]
    nets: Option<PathBuf>,
    /// Also write the JSON report to a file.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone)]
struct Coords(Vec<f64>);

fn parse_coords(s: &str) -> std::result::Result<Coords, String> {
    let coords = s
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| format!("{c:?}: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if coords.len() < 2 {
        return Err("need at least 2 comma-separated coordinates".into());
    }
    Ok(Coords(coords))
}

#[derive(Clone, Copy)]
struct LevelRange(u32, u32);

fn parse_level_range(s: &str) -> std::result::Result<LevelRange, String> {
    let (lo, hi) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo: u32 = lo.trim().parse().map_err(|e| format!("lo: {e}"))?;
    let hi: u32 = hi.trim().parse().map_err(|e| format!("hi: {e}"))?;
    if lo == 0 || lo > hi {
        return Err(format!("range {lo}:{hi} must satisfy 1 <= lo <= hi"));
    }
    Ok(LevelRange(lo, hi))
}

#[derive(Clone)]
struct BetaGrid(Vec<f64>);

fn parse_betas(s: &str) -> std::result::Result<BetaGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [start, stop, step] => {
            let start: f64 = start.trim().parse().map_err(|e| format!("start: {e}"))?;
            let stop: f64 = stop.trim().parse().map_err(|e| format!("stop: {e}"))?;
            let step: f64 = step.trim().parse().map_err(|e| format!("step: {e}"))?;
            if !(step > 0.0) || stop < start {
                return Err("need step > 0 and stop >= start".into());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize;
            (0..=count).map(|k| start + k as f64 * step).collect()
        }
        [list] => list
            .split(',')
            .map(|b| b.trim().parse::<f64>().map_err(|e| format!("{b:?}: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()?,
        _ => return Err("expected start:stop:step or a comma-separated list".into()),
    };
    if grid.is_empty() {
        return Err("empty beta grid".into());
    }
    Ok(BetaGrid(grid))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .ok();
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CapfieldError::ResourceLimit { .. } => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Nets(args) => cmd_nets(args),
        Command::Build(args) => cmd_build(args.kind),
        Command::Profile(args) => cmd_profile(args),
        Command::Slicecheck(args) => cmd_slicecheck(args),
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn spec_hash(value: &serde_json::Value) -> String {
    sha256_hex(&serde_json::to_vec(value).expect("json spec serializes"))
}

fn net_report_line(net: &Net, seed: u64) -> (bool, String) {
    let report = verify_net(net, 4000, seed ^ u64::from(net.level));
    let ok = report.separation_ok && report.covering_ok;
    let line = format!(
        "level {:>2}  card {:>8}  separation {:.6e}  gap {:.6e}  density {:.3}  {}",
        report.level,
        report.cardinality,
        report.separation,
        report.covering_gap,
        report.cardinality_ratio,
        if ok { "ok" } else { "FAIL" },
    );
    (ok, line)
}

fn cmd_nets(args: NetsArgs) -> Result<ExitCode> {
    guard_points(estimated_net_points(args.d, args.n), args.force)?;
    let cfg = clamped_config(args.d, args.n, args.seed, None);
    let nets = build_net(args.d, args.n, args.seed)?;
    let mut all_ok = true;
    for net in &nets {
        let (ok, line) = net_report_line(net, args.seed);
        all_ok &= ok;
        println!("{line}");
    }
    write_nets(&args.out, &nets, Some(cfg.hash()))?;
    println!("wrote {} (config {})", args.out.display(), cfg.hash());
    Ok(if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn load_nets(path: &Path) -> Result<(Vec<Net>, String)> {
    let file = read_nets(path)?;
    let hash = file.config_hash.unwrap_or_else(|| "none".into());
    Ok((file.nets, hash))
}

fn cmd_build(kind: BuildKind) -> Result<ExitCode> {
    let (f, out, hash) = match kind {
        BuildKind::Saturating { nets, n, out } => {
            let (nets, nets_hash) = load_nets(&nets)?;
            let d = nets
                .first()
                .ok_or(CapfieldError::BadNetFamily)?
                .d;
            let f = saturating_function(&nets, d, n)?;
            let hash = spec_hash(&json!({
                "command": "build saturating", "d": d, "n": n, "nets": nets_hash,
            }));
            (f, out, hash)
        }
        BuildKind::Divergence { d, beta, n_max, out } => {
            let (cov, gauge) = singleton_divergence_example(d, beta, n_max)?;
            let f = divergence_function(&cov, &gauge)?;
            let hash = spec_hash(&json!({
                "command": "build divergence", "d": d, "beta": beta, "n_max": n_max,
            }));
            (f, out, hash)
        }
        BuildKind::Witness { nets, out } => {
            let (nets, nets_hash) = load_nets(&nets)?;
            let d = nets
                .first()
                .ok_or(CapfieldError::BadNetFamily)?
                .d;
            let f = witness_mixture(&nets, d)?;
            let hash = spec_hash(&json!({
                "command": "build witness", "d": d, "nets": nets_hash,
            }));
            (f, out, hash)
        }
    };
    write_cap_function(&out, &f, Some(hash.clone()))?;
    println!(
        "wrote {} (d={} terms={} atoms={} config {hash})",
        out.display(),
        f.d,
        f.terms.len(),
        f.atoms.len(),
    );
    Ok(ExitCode::SUCCESS)
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn emit_csv(
    out: Option<&Path>,
    name: &str,
    hash: &str,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    match out {
        Some(path) => {
            write_csv(path, name, hash, header, rows)?;
            println!("wrote {} ({} rows, config {hash})", path.display(), rows.len());
            Ok(())
        }
        None => {
            print!("{}", csv_string(name, hash, header, rows));
            Ok(())
        }
    }
}

fn cmd_profile(args: ProfileArgs) -> Result<ExitCode> {
    let file = read_cap_function(&args.function)?;
    let y = SpherePoint::normalized(args.y.0.clone())?;
    let LevelRange(lo, hi) = args.n;
    let profile = radial_profile(&file.function, &y, lo, hi)?;
    let hash = spec_hash(&json!({
        "command": "profile",
        "function": file.config_hash,
        "y": y.coords(),
        "n": [lo, hi],
    }));
    let rows: Vec<Vec<String>> = profile
        .rows
        .iter()
        .map(|row| {
            vec![
                row.n.to_string(),
                fmt_f64(row.r),
                row.value.map(fmt_f64).unwrap_or_default(),
            ]
        })
        .collect();
    emit_csv(args.out.as_deref(), "profile", &hash, &["n", "r", "value"], &rows)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_slicecheck(args: SlicecheckArgs) -> Result<ExitCode> {
    let hash = spec_hash(&json!({
        "command": "slicecheck", "d": args.d, "count": args.count, "seed": args.seed,
    }));
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut rows = Vec::with_capacity(args.count);
    let mut failures = 0usize;
    for i in 0..args.count {
        let (mu, y, r) = sample_domination_case(args.d, &mut rng)?;
        let check = check_domination(&mu, &y, r)?;
        failures += usize::from(!check.ok);
        rows.push(vec![
            i.to_string(),
            fmt_f64(r),
            fmt_f64(check.lhs),
            fmt_f64(check.rhs),
            fmt_f64(check.delta_star),
            check.ok.to_string(),
        ]);
    }
    emit_csv(
        args.out.as_deref(),
        "slicecheck",
        &hash,
        &["instance", "r", "lhs", "rhs", "delta_star", "ok"],
        &rows,
    )?;
    if failures > 0 {
        eprintln!("{failures}/{} instances violate the domination bound", args.count);
        return Ok(ExitCode::from(1));
    }
    eprintln!("all {} instances dominated", args.count);
    Ok(ExitCode::SUCCESS)
}

/// Shipped defaults at (d, n, seed), with the spectrum windows pulled inside
/// the available net levels.
fn clamped_config(d: usize, n: u32, seed: u64, probe_level: Option<u32>) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::for_dimension(d);
    cfg.n_max = n;
    cfg.seed = seed;
    let probe = probe_level.unwrap_or(cfg.spectrum.probe_level).min(n);
    cfg.spectrum.probe_level = probe;
    cfg.spectrum.profile_range = (cfg.spectrum.profile_range.0.min((probe / 2).max(1)), probe);
    cfg.spectrum.count_range = (cfg.spectrum.count_range.0.min((n / 2).max(1)), n);
    cfg
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<ExitCode> {
    let cfg = clamped_config(args.d, args.n, args.seed, args.probe_level);
    let run = match &args.function {
        Some(path) => {
            let file = read_cap_function(path)?;
            run_spectrum_with(&cfg, &file.function, &args.betas.0, args.force)?
        }
        None => run_spectrum(&cfg, &args.betas.0, args.force)?,
    };
    let rows: Vec<Vec<String>> = run
        .rows
        .iter()
        .map(|row| {
            vec![
                fmt_f64(row.beta),
                fmt_f64(row.dim),
                fmt_f64(row.fit_r2),
                row.cardinality.to_string(),
                row.degenerate.to_string(),
                fmt_f64(row.reference),
                fmt_f64(row.deviation),
            ]
        })
        .collect();
    write_csv(
        &args.out,
        "spectrum",
        &run.config_hash,
        &["beta", "dim", "fit_r2", "cardinality", "degenerate", "reference", "deviation"],
        &rows,
    )?;
    println!(
        "wrote {} ({} rows, config {})",
        args.out.display(),
        rows.len(),
        run.config_hash
    );
    if let Some(path) = &args.svg {
        std::fs::write(path, svg::spectrum_plot(&run))
            .map_err(|e| CapfieldError::Io(format!("{}: {e}", path.display())))?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = &args.report {
        write_json(path, &run)?;
        println!("wrote {}", path.display());
    }
    for row in &run.rows {
        println!(
            "beta {:>6.3}  dim {:>7.4}  reference {:>6.3}  deviation {:+.4}{}",
            row.beta,
            row.dim,
            row.reference,
            row.deviation,
            if row.degenerate { "  (degenerate)" } else { "" },
        );
    }
    println!(
        "max deviation {:.4}; upper bound {}",
        run.max_deviation,
        if run.upper_bound_ok { "ok" } else { "VIOLATED" },
    );
    if run.max_deviation > 0.2 {
        eprintln!("note: max deviation exceeds 0.2; see the report for degenerate level sets");
    }
    Ok(if run.upper_bound_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// Pre-suite validation of a serialized net family, reported like a suite.
fn netfile_outcome(path: &Path) -> SuiteOutcome {
    let mut details = Vec::new();
    let mut passed = true;
    match read_nets(path) {
        Ok(file) => {
            for net in &file.nets {
                let (ok, line) = net_report_line(net, net.seed);
                passed &= ok;
                details.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
            }
        }
        Err(e) => {
            passed = false;
            details.push(format!("FAIL {}: {e}", path.display()));
        }
    }
    SuiteOutcome {
        name: "netfile".into(),
        passed,
        details,
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    if let Some(name) = args.suite.as_deref() {
        if !SUITES.contains(&name) {
            eprintln!("unknown suite '{name}'; available: {}", SUITES.join(", "));
            return Ok(ExitCode::from(2));
        }
    }
    let cfg = clamped_config(args.d, args.n, args.seed, None);
    let mut report = VerifyReport {
        config_hash: cfg.hash(),
        passed: true,
        suites: Vec::new(),
    };
    let netfile_ok = match &args.nets {
        Some(path) => {
            let outcome = netfile_outcome(path);
            let ok = outcome.passed;
            report.suites.push(outcome);
            ok
        }
        None => true,
    };
    if netfile_ok {
        let inner = run_verify(&cfg, args.suite.as_deref())?;
        report.suites.extend(inner.suites);
    }
    report.passed = report.suites.iter().all(|s| s.passed);
    for suite in &report.suites {
        eprintln!("suite {:<14} {}", suite.name, if suite.passed { "pass" } else { "FAIL" });
        for line in &suite.details {
            eprintln!("  {line}");
        }
    }
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    if let Some(path) = &args.report {
        write_json(path, &report)?;
    }
    Ok(if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
