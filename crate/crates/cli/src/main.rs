use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use compound_bc::compound_id::{
    alpha0_solve, listed_id_system, bit_recombination, brute_force_weighted, capacity_c2,
    curve_points, d_a_curve, t0, t1, BecBscParams, CurveKind, LambdaGrid, SearchBudget, SupportingLineEval,
};
use compound_bc::format_sig;
use compound_bc::info::{conv, h2};
use compound_bc::miso::{region_boundary, Boundary, BoundaryConfig, BoundaryKind, MisoChannel};
use compound_bc::miso_outer::{outer_region_with, scheme_pairs, OuterConfig, OuterFamily, OuterRegion};
use compound_bc::polyhedra::RegionSystem;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const DEFAULT_SEED: u64 = 20_240_601;
const DEFAULT_A: f64 = 0.92;
const DEFAULT_SNR_DB: f64 = 10.0;
const THREADS_VAR: &str = "COMPOUND_BC_THREADS";

#[derive(Debug, Error)]
enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{op} failed: {msg}")]
    Numeric { op: &'static str, msg: String },
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric { .. } => 3,
        }
    }
}

fn numeric<E: std::fmt::Display>(op: &'static str) -> impl Fn(E) -> CliError {
    move |e| CliError::Numeric { op, msg: e.to_string() }
}

fn config<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "compound-bc", version, about = "Rate regions for two-user compound broadcast channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON parameter file.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Output directory, created when missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Restart budget of the randomized searches.
    #[arg(long)]
    budget: Option<usize>,
    /// Ignore the parameter file and use the built-in figure settings.
    #[arg(long)]
    defaults: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Capacity, interference-decoding and Mrs. Gerber curves on the BEC/BSC compound.
    BecbscRegions {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 201)]
        alpha_steps: usize,
    },
    /// Normalized gain d_a of the capacity region over the Marton-type bound.
    BecbscDa {
        #[command(flatten)]
        common: Common,
    },
    /// CD and MD dirty-paper boundaries on the 2x1 compound MISO channel.
    Miso {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        snr_db: Option<f64>,
        /// Also write convex hulls of the boundaries.
        #[arg(long)]
        time_sharing: bool,
        /// Also sample the outer bound and check containment.
        #[arg(long)]
        outer: bool,
    },
    /// Fourier-Motzkin elimination on a region system.
    Fme {
        #[command(flatten)]
        common: Common,
        /// Comma-separated rate variables to eliminate.
        #[arg(long, value_delimiter = ',')]
        eliminate: Vec<String>,
        /// Fold private rates into the common rate and drop it afterwards.
        #[arg(long)]
        recombine: bool,
    },
}

/// Parameter file for the BEC/BSC subcommands; missing fields take defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    p: Option<f64>,
    p1: Option<f64>,
    e2: Option<f64>,
    a: Option<f64>,
    seed: Option<u64>,
    budget: Option<usize>,
}

#[derive(Debug, Clone)]
struct RunConfig {
    params: BecBscParams,
    a: f64,
    seed: u64,
    budget: SearchBudget,
    out: PathBuf,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn becbsc_config(common: &Common) -> Result<RunConfig, CliError> {
    let file: ParamsFile = match (&common.params, common.defaults) {
        (Some(p), false) => read_json(p)?,
        _ => ParamsFile::default(),
    };
    let d = BecBscParams::default();
    let params = BecBscParams::new(file.p.unwrap_or(d.p), file.p1.unwrap_or(d.p1), file.e2.unwrap_or(d.e2)).map_err(config)?;
    let restarts = common.budget.or(file.budget).unwrap_or(SearchBudget::default().restarts);
    if restarts == 0 {
        return Err(CliError::Config("budget must be at least 1".into()));
    }
    Ok(RunConfig {
        params,
        a: file.a.unwrap_or(DEFAULT_A),
        seed: common.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        budget: SearchBudget { restarts, ..SearchBudget::default() },
        out: common.out.clone(),
    })
}

fn write(dir: &Path, name: &str, body: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(numeric("create output directory"))?;
    fs::write(dir.join(name), body).map_err(numeric("write output"))?;
    Ok(())
}

fn csv(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = format!("{header}\n");
    for r in rows {
        s.push_str(&r.into_iter().map(format_sig).collect::<Vec<_>>().join(","));
        s.push('\n');
    }
    s
}

fn cmd_becbsc_regions(common: &Common, steps: usize) -> Result<(), CliError> {
    if steps < 2 {
        return Err(CliError::Config("alpha-steps must be at least 2".into()));
    }
    let cfg = becbsc_config(common)?;
    let p = &cfg.params;
    let alphas: Vec<f64> = (0..steps).map(|k| 0.5 * k as f64 / (steps - 1) as f64).collect();
    let curve = |kind| -> Result<String, CliError> {
        let pts = curve_points(p, kind, &alphas).map_err(numeric("curve evaluation"))?;
        Ok(csv("alpha,R1,R2", pts.iter().map(|c| vec![c.alpha, c.r1, c.r2])))
    };
    write(&cfg.out, "c1.csv", &curve(CurveKind::Capacity)?)?;
    write(&cfg.out, "id.csv", &curve(CurveKind::InterferenceDecoding)?)?;
    write(&cfg.out, "mrs_gerber.csv", &curve(CurveKind::MrsGerber)?)?;
    let c = 1.0 - p.e2;
    let mut c2 = Vec::with_capacity(steps);
    for &a in &alphas {
        capacity_c2(p, a).map_err(numeric("second capacity piece"))?;
        let r2 = (1.0 - h2(conv(p.p, a))).min(c);
        c2.push(vec![a, (c * h2(a)).min(c - r2), r2]);
    }
    write(&cfg.out, "c2.csv", &csv("alpha,R1,R2", c2))?;
    println!("wrote c1.csv, c2.csv, id.csv, mrs_gerber.csv ({steps} rows each) to {}", cfg.out.display());
    Ok(())
}

fn cmd_becbsc_da(common: &Common) -> Result<(), CliError> {
    let cfg = becbsc_config(common)?;
    if !(0.0..=1.0).contains(&cfg.a) {
        return Err(CliError::Config(format!("a = {} outside [0, 1]", cfg.a)));
    }
    let p = &cfg.params;
    let r1_max = 1.0 - h2(conv(p.p1, alpha0_solve(p).map_err(numeric("alpha0 root"))?));
    let grid: Vec<f64> = (0..99).map(|k| r1_max * (k + 1) as f64 / 100.0).collect();
    let c = d_a_curve(cfg.a, p, &grid, 401, LambdaGrid::default()).map_err(numeric("d_a curve"))?;
    write(&cfg.out, "da.csv", &csv("R1,d_a", c.r1.iter().zip(&c.d).map(|(r, d)| vec![*r, *d])))?;

    let x_max = 1.0 - h2(p.p);
    let xs: Vec<f64> = (0..101).map(|k| x_max * k as f64 / 100.0).collect();
    let ta = SupportingLineEval::new(cfg.a, p, LambdaGrid::default()).evaluate(&xs, p).t_values;
    let mut rows = Vec::with_capacity(xs.len());
    for (x, t) in xs.iter().zip(&ta) {
        rows.push(vec![*x, *t, t1(p, *x).map_err(numeric("t1"))?, t0(p, *x).map_err(numeric("t0"))?]);
    }
    write(&cfg.out, "supporting.csv", &csv("x,t_a,t_1,t_0", rows))?;

    let mut bf = Vec::new();
    for k in 0..5 {
        let x = x_max * (k as f64 + 0.5) / 5.0;
        let r = brute_force_weighted(cfg.a, x, p, cfg.budget, cfg.seed).map_err(numeric("brute-force search"))?;
        let upper = SupportingLineEval::new(cfg.a, p, LambdaGrid::default()).upper(x, p);
        bf.push(vec![x, r.value, upper, r.residual]);
    }
    write(&cfg.out, "brute_force.csv", &csv("x,search,t_a,residual", bf))?;

    let min = c.d.iter().cloned().fold(f64::INFINITY, f64::min);
    println!("min(d_a) = {} over {} points (a = {}, max raw gap {})", format_sig(min), c.d.len(), cfg.a, format_sig(c.max_abs));
    Ok(())
}

/// Largest amount by which a point of `a` lies above the staircase of `b`.
fn excess(a: &Boundary, b: &Boundary) -> f64 {
    let stairs = b.curve();
    a.points.iter().map(|p| p.r2 - stairs.staircase_r2_at(p.r1)).fold(0.0, f64::max)
}

#[derive(Serialize)]
struct MisoReport {
    channel: MisoChannel,
    snr_db: f64,
    seed: u64,
    points: Vec<(String, usize)>,
    /// `(a, b, e)`: points of `a` exceed the staircase of `b` by at most `e`.
    inner_excess: Vec<(String, String, f64)>,
    outer_violation: Option<Vec<(String, f64)>>,
}

fn cmd_miso(common: &Common, snr_db: Option<f64>, time_sharing: bool, outer: bool) -> Result<(), CliError> {
    let snr = snr_db.unwrap_or(DEFAULT_SNR_DB);
    if !snr.is_finite() {
        return Err(CliError::Config(format!("snr-db {snr} is not finite")));
    }
    let channel = match (&common.params, common.defaults) {
        (Some(path), false) => {
            let ch: MisoChannel = read_json(path)?;
            match snr_db {
                Some(s) => ch.with_power(ch.noise() * 10f64.powf(s / 10.0)).map_err(config)?,
                None => ch,
            }
        }
        _ => MisoChannel::figure(snr).map_err(config)?,
    };
    let seed = common.seed.unwrap_or(DEFAULT_SEED);
    let cfg = BoundaryConfig { time_sharing, ..BoundaryConfig::default() };
    let bounds: Vec<Boundary> = BoundaryKind::ALL.iter().map(|k| region_boundary(*k, &channel, &cfg)).collect();
    for b in &bounds {
        write(&common.out, &format!("{}.csv", b.kind.file_stem()), &b.to_csv())?;
        if let Some(h) = &b.hull {
            write(&common.out, &format!("{}_hull.csv", b.kind.file_stem()), &OuterRegion::curve_csv(h))?;
        }
    }
    let mut inner_excess = Vec::new();
    for a in &bounds {
        for b in &bounds {
            if a.kind != b.kind {
                inner_excess.push((a.kind.file_stem().into(), b.kind.file_stem().into(), excess(a, b)));
            }
        }
    }
    let outer_violation = if outer {
        let ocfg = match common.budget {
            Some(n) => OuterConfig { random_pairs: n, ..OuterConfig::default() },
            None => OuterConfig::default(),
        };
        let pts: Vec<_> = bounds.iter().flat_map(|b| b.points.iter().copied()).collect();
        let region = outer_region_with(&channel, &ocfg, seed, &scheme_pairs(&pts));
        let mut rows = String::from("family,R1,R2\n");
        let mut push = |name: &str, curve: &compound_bc::polyhedra::RateCurve2D| {
            for p in &curve.points {
                rows.push_str(&format!("{name},{},{}\n", format_sig(p[0]), format_sig(p[1])));
            }
        };
        for f in OuterFamily::ALL {
            push(f.name(), &region.family(f).frontier);
        }
        push("intersection", &region.intersection);
        write(&common.out, "outer.csv", &rows)?;
        let v: Vec<(String, f64)> = bounds
            .iter()
            .map(|b| (b.kind.file_stem().to_string(), b.points.iter().map(|p| region.violation(p.rates())).fold(0.0, f64::max)))
            .collect();
        Some(v)
    } else {
        None
    };
    let report = MisoReport {
        channel,
        snr_db: snr,
        seed,
        points: bounds.iter().map(|b| (b.kind.file_stem().to_string(), b.points.len())).collect(),
        inner_excess,
        outer_violation,
    };
    for (a, b, e) in &report.inner_excess {
        println!("{a} above {b} by at most {}", format_sig(*e));
    }
    if let Some(v) = &report.outer_violation {
        for (k, e) in v {
            println!("{k} inside outer bound: {} (max violation {})", if *e <= 1e-6 { "yes" } else { "no" }, format_sig(*e));
        }
    }
    write(&common.out, "report.json", &serde_json::to_string_pretty(&report).map_err(numeric("report"))?)?;
    Ok(())
}

fn cmd_fme(common: &Common, eliminate: &[String], recombine: bool) -> Result<(), CliError> {
    let (sys, eliminate, recombine) = match (&common.params, common.defaults) {
        (Some(path), false) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            (RegionSystem::from_json(&text).map_err(config)?, eliminate.to_vec(), recombine)
        }
        (None, false) => return Err(CliError::Config("fme needs --params FILE or --defaults".into())),
        _ => (listed_id_system(), vec!["T1".to_string(), "T2".to_string()], true),
    };
    let known: BTreeSet<&String> = sys.rate_vars().iter().collect();
    if let Some(v) = eliminate.iter().find(|v| !known.contains(v)) {
        return Err(CliError::Config(format!("unknown variable {v}")));
    }
    let model = sys.valuation_model().map_err(numeric("valuation model"))?;
    let mut out = sys.fme_eliminate_all(&eliminate).map_err(numeric("elimination"))?;
    if recombine {
        out = bit_recombination(&out).map_err(numeric("bit recombination"))?;
    }
    let out = out.with_model(model);
    let vals = out.sample_valuations(100, common.seed.unwrap_or(DEFAULT_SEED)).map_err(numeric("valuation sampling"))?;
    let pruned = if eliminate.is_empty() && !recombine {
        out.clone()
    } else {
        out.prune_redundant(&vals).map_err(numeric("pruning"))?
    };
    println!("inequalities: {} input, {} after elimination, {} after pruning", sys.len(), out.len(), pruned.len());
    if pruned.rate_vars().is_empty() {
        let mut feasible = 0;
        for v in &vals {
            if pruned.instantiate(v).map_err(numeric("instantiation"))?.conditions_hold(1e-9) {
                feasible += 1;
            }
        }
        println!("no rate variables left: conditions hold in {feasible}/{} sampled valuations", vals.len());
    }
    write(&common.out, "projected.json", &pruned.to_json())?;
    Ok(())
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| CliError::Config(format!("{THREADS_VAR}={v} is not a thread count")))?;
    if n == 0 {
        return Err(CliError::Config(format!("{THREADS_VAR} must be at least 1")));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(config)
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match &cli.command {
        Command::BecbscRegions { common, alpha_steps } => cmd_becbsc_regions(common, *alpha_steps),
        Command::BecbscDa { common } => cmd_becbsc_da(common),
        Command::Miso { common, snr_db, time_sharing, outer } => cmd_miso(common, *snr_db, *time_sharing, *outer),
        Command::Fme { common, eliminate, recombine } => cmd_fme(common, eliminate, *recombine),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
