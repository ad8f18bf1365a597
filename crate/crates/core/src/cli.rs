//! The `aniso` command-line front end.
//!
//! Subcommands: `simulate` (walk ensembles and single paths), `verify`
//! (statistical test suites with JSON reports), `density` (closed-form
//! law tables as CSV), `lil` (iterated-logarithm diagnostics),
//! `equivalence` (constructive sampler vs exact law) and `export`
//! (consolidation of a run directory).
//!
//! Configuration comes from an optional JSON file plus flag overrides;
//! the fully resolved config is written next to every run's outputs, so
//! a run is reproducible from that file alone. `ANISO_SEED` overrides
//! the master seed when no `--seed` flag is given. Exit codes: 0 all
//! pass, 1 failure or runtime error, 2 usage error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, RunManifest};
use crate::env::{self, EnvSpec};
use crate::error::{Error, Result};
use crate::seed;
use crate::timechange::{self, DensityVariant, DENSITY_INTERVALS};
use crate::verify::{self, LilKind, Report};
use crate::walk::{self, PathMode};

#[derive(Debug, Parser)]
#[command(
    name = "aniso",
    version,
    about = "Anisotropic lattice walks: simulation, limit-law checks, data export"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate walk ensembles; single-replica runs also keep the path.
    Simulate(SimulateArgs),
    /// Run verification suites and write JSON reports.
    Verify(VerifyArgs),
    /// Tabulate the closed-form inverse or complement law as CSV.
    Density(DensityArgs),
    /// Track iterated-logarithm statistics along one long trajectory.
    Lil(LilArgs),
    /// Compare the constructive sampler against the exact law.
    Equivalence(EquivalenceArgs),
    /// Merge the reports of a finished run into one file.
    Export(ExportArgs),
}

/// Flags shared by every config-driven subcommand; each flag overrides
/// the corresponding field of `--config` (or of the defaults).
#[derive(Debug, Clone, Default, Args)]
struct ConfigArgs {
    /// Environment: preset (comb, hphc, uniform(p)), inline JSON, or a
    /// JSON file path.
    #[arg(long)]
    env: Option<String>,

    /// JSON experiment config; flags override individual fields.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Master seed; every replica stream is derived from it.
    #[arg(long, env = "ANISO_SEED")]
    seed: Option<u64>,

    /// Worker threads for ensembles; 0 uses all cores.
    #[arg(long)]
    workers: Option<usize>,

    /// Walk horizon.
    #[arg(long = "N")]
    n: Option<u64>,

    /// Horizon grid for exponent scans, comma separated.
    #[arg(long = "n-grid", value_delimiter = ',')]
    n_grid: Option<Vec<u64>>,

    /// Ensemble size.
    #[arg(long)]
    replicas: Option<u64>,

    /// Wiener grid resolution.
    #[arg(long)]
    dt: Option<f64>,

    /// Override the fitted upper half-plane constant.
    #[arg(long)]
    g1: Option<f64>,

    /// Override the fitted lower half-plane constant.
    #[arg(long)]
    g2: Option<f64>,

    /// Override the fitted approximation-rate exponent.
    #[arg(long)]
    tau: Option<f64>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(raw) = &self.env {
            cfg.env = parse_env_spec(raw)?;
        }
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(grid) = &self.n_grid {
            cfg.n_grid = grid.clone();
        }
        if let Some(r) = self.replicas {
            cfg.replicas = r;
        }
        if let Some(dt) = self.dt {
            cfg.dt = dt;
        }
        if self.g1.is_some() {
            cfg.gamma1 = self.g1;
        }
        if self.g2.is_some() {
            cfg.gamma2 = self.g2;
        }
        if self.tau.is_some() {
            cfg.tau = self.tau;
        }
        Ok(cfg)
    }
}

/// Parses `--env`: a preset name, `uniform(p)` with `p` a decimal or a
/// fraction, an inline JSON object, or a path to a JSON file.
pub fn parse_env_spec(raw: &str) -> Result<EnvSpec> {
    let s = raw.trim();
    match s {
        "comb" => return Ok(EnvSpec::Comb),
        "hphc" => return Ok(EnvSpec::Hphc),
        _ => {}
    }
    if let Some(inner) = s.strip_prefix("uniform(").and_then(|r| r.strip_suffix(')')) {
        return Ok(EnvSpec::Uniform { p: parse_probability(inner)? });
    }
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(Error::from);
    }
    let path = Path::new(s);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        return serde_json::from_str(&text).map_err(Error::from);
    }
    Err(Error::InvalidParameter(format!(
        "unrecognized environment `{raw}`; expected comb, hphc, uniform(p), inline JSON, or a JSON file"
    )))
}

fn parse_probability(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("bad probability `{s}`"));
    if let Some((num, den)) = s.split_once('/') {
        let n: f64 = num.trim().parse().map_err(|_| bad())?;
        let d: f64 = den.trim().parse().map_err(|_| bad())?;
        if d == 0.0 {
            return Err(bad());
        }
        return Ok(n / d);
    }
    s.parse().map_err(|_| bad())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Direct,
    Constructive,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    config: ConfigArgs,

    /// Transition sampler: the Markov kernel or the geometric-block
    /// construction.
    #[arg(long, value_enum, default_value_t = Method::Direct)]
    method: Method,

    /// Output directory. [replicas default: 1 unless set by flag or config]
    #[arg(long, default_value = "aniso_out")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    config: ConfigArgs,

    /// Suites to run, comma separated, or "all".
    #[arg(long, value_delimiter = ',', default_value = "all")]
    suite: Vec<String>,

    /// Output directory for reports and the manifest.
    #[arg(long, default_value = "aniso_out")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    /// Law of the inverse time change at t.
    Inverse,
    /// Law of t minus the inverse time change.
    Complement,
}

impl From<VariantArg> for DensityVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Inverse => DensityVariant::Inverse,
            VariantArg::Complement => DensityVariant::Complement,
        }
    }
}

#[derive(Debug, Args)]
struct DensityArgs {
    /// Time parameter.
    #[arg(long, default_value_t = 1.0)]
    t: f64,

    /// Upper half-plane constant.
    #[arg(long)]
    g1: f64,

    /// Lower half-plane constant.
    #[arg(long)]
    g2: f64,

    /// Quadrature subintervals across the support.
    #[arg(long, default_value_t = DENSITY_INTERVALS)]
    grid_points: usize,

    #[arg(long, value_enum, default_value_t = VariantArg::Inverse)]
    variant: VariantArg,

    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    WalkMax,
    LocalTimeMax,
    C1,
    C2,
    All,
}

#[derive(Debug, Args)]
struct LilArgs {
    #[command(flatten)]
    config: ConfigArgs,

    /// Statistic to track.
    #[arg(long, value_enum, default_value_t = KindArg::All)]
    kind: KindArg,

    /// Largest horizon; a power of two, at least 2^16.
    #[arg(long = "n-max")]
    n_max: Option<u64>,

    /// Optional directory for reports and the manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EquivalenceArgs {
    #[command(flatten)]
    config: ConfigArgs,

    /// Monte Carlo sample count.
    #[arg(long = "mc-samples")]
    mc_samples: Option<u64>,

    /// Optional directory for the report and the manifest.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct ExportArgs {
    /// Run directory containing a manifest.
    dir: PathBuf,

    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,

    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// The consolidated document produced by `export --format json`.
#[derive(Debug, Serialize, Deserialize)]
pub struct ExportDoc {
    pub manifest: RunManifest,
    pub reports: Vec<Report>,
}

/// Parses the process arguments and runs the selected command,
/// returning the process exit code. Usage errors exit with code 2
/// before this returns; runtime errors print one `error:` line.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::UnknownSuite(_) => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(command: &Command) -> Result<i32> {
    match command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Density(args) => cmd_density(args),
        Command::Lil(args) => cmd_lil(args),
        Command::Equivalence(args) => cmd_equivalence(args),
        Command::Export(args) => cmd_export(args),
    }
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::io(path, e))
}

/// Writes to stdout, treating a closed pipe as an orderly stop so that
/// piping into `head` and friends works.
fn print_stdout(content: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(content.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        other => other.map_err(|e| Error::io("<stdout>", e)),
    }
}

fn prepare_run_dir(dir: &Path, cfg: &ExperimentConfig) -> Result<RunManifest> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut manifest = RunManifest::new(cfg);
    cfg.save(&dir.join("config.json"))?;
    manifest.record_output("config.json");
    Ok(manifest)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<i32> {
    let cfg = args.config.resolve()?;
    // Ensemble checks default to thousands of replicas; a bare simulate
    // invocation means one trajectory.
    let replicas = match (args.config.replicas, &args.config.config) {
        (Some(r), _) => r,
        (None, Some(_)) => cfg.replicas,
        (None, None) => 1,
    };
    let env = env::make_environment(cfg.env.clone())?;
    let manifest = prepare_run_dir(&args.out, &cfg)?;
    let mut manifest = manifest;
    let n = cfg.n;

    let mut endpoints_csv = String::from("replica,c1,c2\n");
    if replicas == 1 {
        let seed = seed::derive_u64(cfg.master_seed, "simulate", 0);
        let mode = if n <= walk::FULL_STORAGE_LIMIT { PathMode::Full } else { PathMode::Summary };
        let path = match args.method {
            Method::Direct => walk::simulate_direct_with(&env, n, seed, mode),
            Method::Constructive => {
                let (path, dec) = walk::simulate_constructive_with(&env, n, seed, mode);
                let json = serde_json::to_string_pretty(&dec)?;
                write_file(&args.out.join("decomposition.json"), &json)?;
                manifest.record_output("decomposition.json");
                path
            }
        };
        let end = path.end();
        endpoints_csv.push_str(&format!("0,{},{}\n", end.0, end.1));
        if mode == PathMode::Full {
            write_file(&args.out.join("path.csv"), &path.to_csv()?)?;
            manifest.record_output("path.csv");
        } else {
            eprintln!("note: horizon {n} exceeds the full-path storage limit; path.csv skipped");
        }
    } else {
        let endpoints: Vec<(i64, i64)> = seed::with_worker_pool(cfg.workers, || {
            (0..replicas)
                .into_par_iter()
                .map(|r| {
                    let seed = seed::derive_u64(cfg.master_seed, "simulate", r);
                    match args.method {
                        Method::Direct => {
                            walk::simulate_direct_with(&env, n, seed, PathMode::Summary).end()
                        }
                        Method::Constructive => {
                            walk::simulate_constructive_with(&env, n, seed, PathMode::Summary)
                                .0
                                .end()
                        }
                    }
                })
                .collect()
        });
        for (r, (x, y)) in endpoints.iter().enumerate() {
            endpoints_csv.push_str(&format!("{r},{x},{y}\n"));
        }
    }
    write_file(&args.out.join("endpoints.csv"), &endpoints_csv)?;
    manifest.record_output("endpoints.csv");
    manifest.save_dir(&args.out)?;
    print_stdout(&format!("wrote {replicas} endpoint row(s) to {}\n", args.out.display()))?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let mut cfg = args.config.resolve()?;
    let requested: Vec<String> = args.suite.iter().map(|s| s.trim().to_string()).collect();
    let suites: Vec<&str> = if requested.iter().any(|s| s == "all") {
        verify::suite_names()
    } else {
        let names = verify::suite_names();
        let mut picked = Vec::new();
        for s in &requested {
            match names.iter().find(|n| *n == s) {
                Some(n) => picked.push(*n),
                None => return Err(Error::UnknownSuite(s.clone())),
            }
        }
        picked
    };
    // A lone equivalence run reads --N as the exact-law horizon.
    if suites == ["equivalence"] {
        if let Some(n) = args.config.n {
            cfg.equivalence_n = n;
        }
    }
    let mut manifest = prepare_run_dir(&args.out, &cfg)?;
    let reports: Vec<Report> = seed::with_worker_pool(cfg.workers, || {
        let mut all = Vec::new();
        for suite in &suites {
            all.extend(verify::run_suite(suite, &cfg)?);
        }
        Ok::<_, Error>(all)
    })?;
    for report in &reports {
        persist_report(&args.out, &mut manifest, report)?;
    }
    manifest.save_dir(&args.out)?;
    Ok(if manifest.all_pass() { 0 } else { 1 })
}

fn report_line(report: &Report) -> String {
    format!(
        "{} {} statistic={:.6e} threshold={:.6e}\n",
        if report.pass { "PASS" } else { "FAIL" },
        report.test,
        report.statistic,
        report.threshold
    )
}

fn persist_report(dir: &Path, manifest: &mut RunManifest, report: &Report) -> Result<()> {
    let file = format!("report_{}.json", report.test);
    write_file(&dir.join(&file), &serde_json::to_string_pretty(report)?)?;
    manifest.record_output(&file);
    manifest.record_result(&report.test, report.pass);
    print_stdout(&report_line(report))?;
    Ok(())
}

fn cmd_density(args: &DensityArgs) -> Result<i32> {
    let table =
        timechange::density_table(args.t, args.g1, args.g2, args.variant.into(), args.grid_points)?;
    if let Some(v) = table.point_mass {
        eprintln!("note: gamma1 = gamma2 = {}; the law is a point mass at v = {v}", args.g1);
    }
    let csv = table.to_csv();
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => print_stdout(&csv)?,
    }
    Ok(0)
}

fn lil_kinds(kind: KindArg) -> Vec<LilKind> {
    match kind {
        KindArg::WalkMax => vec![LilKind::WalkMax],
        KindArg::LocalTimeMax => vec![LilKind::LocalTimeMax],
        KindArg::C1 => vec![LilKind::C1],
        KindArg::C2 => vec![LilKind::C2],
        KindArg::All => LilKind::all().to_vec(),
    }
}

fn cmd_lil(args: &LilArgs) -> Result<i32> {
    let mut cfg = args.config.resolve()?;
    if let Some(n_max) = args.n_max {
        cfg.lil_n_max = n_max;
    }
    let kinds = lil_kinds(args.kind);
    let reports: Vec<Report> = seed::with_worker_pool(cfg.workers, || {
        let mut all = Vec::new();
        for kind in &kinds {
            all.extend(verify::lil_reports(*kind, &cfg)?);
        }
        Ok::<_, Error>(all)
    })?;
    finish_reports(&reports, args.out.as_deref(), &cfg)
}

fn cmd_equivalence(args: &EquivalenceArgs) -> Result<i32> {
    let mut cfg = args.config.resolve()?;
    if let Some(n) = args.config.n {
        cfg.equivalence_n = n;
    }
    if let Some(mc) = args.mc_samples {
        cfg.mc_samples = mc;
    }
    let reports = seed::with_worker_pool(cfg.workers, || verify::run_suite("equivalence", &cfg))?;
    finish_reports(&reports, args.out.as_deref(), &cfg)
}

/// Prints one line per report, optionally persists them with a
/// manifest, and turns the aggregate outcome into an exit code.
fn finish_reports(reports: &[Report], out: Option<&Path>, cfg: &ExperimentConfig) -> Result<i32> {
    match out {
        Some(dir) => {
            let mut manifest = prepare_run_dir(dir, cfg)?;
            for report in reports {
                persist_report(dir, &mut manifest, report)?;
            }
            manifest.save_dir(dir)?;
        }
        None => {
            for report in reports {
                print_stdout(&report_line(report))?;
            }
        }
    }
    Ok(if reports.iter().all(|r| r.pass) { 0 } else { 1 })
}

fn cmd_export(args: &ExportArgs) -> Result<i32> {
    let manifest = RunManifest::load_dir(&args.dir)?;
    let mut reports = Vec::new();
    for name in &manifest.outputs {
        if name.starts_with("report_") && name.ends_with(".json") {
            let path = args.dir.join(name);
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            reports.push(serde_json::from_str::<Report>(&text)?);
        }
    }
    let output = match args.format {
        FormatArg::Json => {
            let doc = ExportDoc { manifest, reports };
            let mut text = serde_json::to_string_pretty(&doc)?;
            text.push('\n');
            text
        }
        FormatArg::Csv => {
            let mut csv = String::from("test,statistic,threshold,pass,slope,intercept,r_squared\n");
            for r in &reports {
                let param = |key: &str| {
                    r.params
                        .get(key)
                        .and_then(|v| v.as_f64())
                        .map(|v| v.to_string())
                        .unwrap_or_default()
                };
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    r.test,
                    r.statistic,
                    r.threshold,
                    r.pass,
                    param("slope"),
                    param("intercept"),
                    param("r_squared"),
                ));
            }
            csv
        }
    };
    match &args.out {
        Some(path) => write_file(path, &output)?,
        None => print_stdout(&output)?,
    }
    Ok(0)
}
