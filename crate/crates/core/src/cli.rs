//! Command-line front end. [`execute`] returns the process exit code:
//! 0 when every check passes, 1 on a violated inequality, 2 on usage or
//! configuration errors and 3 when a case could not be evaluated or failed
//! on a numerically degenerate discretization.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::inequalities::{InequalityReport, Settings};
use crate::profiles::Profile;
use crate::report::{Num, Report};
use crate::spaces::{build_space, SpaceSpec};
use crate::suites::{custom_cases, run_cases, select, Context, Custom, FunctionSpec, Suite};
use crate::weights::{analyze_weight, build_weight, LevelOptions, WeightSpec, DEFAULT_MIN_ATOMS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "isoperim", version, about = "Numerical checks of isoperimetric and symmetrization inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite and write report.json plus curve CSVs.
    Verify(VerifyArgs),
    /// Weight diagnostics.
    #[command(subcommand)]
    Weights(WeightsCommand),
    /// Evaluate an isoperimetric profile.
    Profile(ProfileArgs),
    /// Compare reports.
    #[command(subcommand)]
    Report(ReportCommand),
}

#[derive(Args, Debug, Default)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// JSON configuration; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: ISOPERIM_JOBS, then the number of CPUs).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum WeightsCommand {
    /// Isoperimetric constant, Marcinkiewicz norm and level-set diagnostics.
    Analyze(AnalyzeArgs),
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// JSON configuration with `spaces` and `weights`.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    min_atoms: Option<usize>,
    /// Also tabulate the level-set necessary condition.
    #[arg(long)]
    necessary: bool,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProfileKind {
    Euclidean,
    HalfPlane,
    Sphere,
    LogConcave,
    Gaussian,
}

#[derive(Args, Debug)]
struct ProfileArgs {
    #[arg(long, value_enum)]
    kind: ProfileKind,
    #[arg(long, default_value_t = 2)]
    n: u32,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    /// Comma-separated measures at which to evaluate.
    #[arg(long, value_delimiter = ',', required = true)]
    eval: Vec<f64>,
    /// Print t / I(t) as well.
    #[arg(long)]
    phi: bool,
}

#[derive(Subcommand, Debug)]
enum ReportCommand {
    /// Per-case differences between two report.json files.
    Diff { a: PathBuf, b: PathBuf },
}

/// Contents of a `--config` file.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: Option<Suite>,
    pub seed: Option<u64>,
    pub resolution: Option<usize>,
    pub tolerance: Option<f64>,
    pub exact_tolerance: Option<f64>,
    pub min_atoms: Option<usize>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    #[serde(default)]
    pub spaces: Vec<SpaceSpec>,
    #[serde(default)]
    pub functions: Vec<FunctionSpec>,
    #[serde(default)]
    pub weights: Vec<WeightSpec>,
}

impl SuiteConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn execute<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Verify(a) => verify(a, &argv),
        Command::Weights(WeightsCommand::Analyze(a)) => analyze(a),
        Command::Profile(a) => profile(a),
        Command::Report(ReportCommand::Diff { a, b }) => diff(&a, &b),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::InvalidParams(_) | Error::Io(_) | Error::Json(_) => EXIT_USAGE,
                _ => EXIT_NUMERIC,
            }
        }
    }
}

fn unix_seconds() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Exit code for a finished run. A failure on a numerically degenerate
/// case counts as a numeric failure rather than a violation.
pub fn exit_code(results: &[InequalityReport]) -> i32 {
    if results.iter().any(|r| r.error.is_some() || (!r.pass && r.degenerate)) {
        EXIT_NUMERIC
    } else if results.iter().any(|r| !r.pass) {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    }
}

fn resolve_jobs(flag: Option<usize>) -> Result<usize> {
    if let Some(j) = flag {
        return Ok(j);
    }
    match std::env::var("ISOPERIM_JOBS") {
        Ok(v) => v.trim().parse().map_err(|_| Error::Config(format!("ISOPERIM_JOBS: not a count: {v:?}"))),
        Err(_) => Ok(0),
    }
}

fn verify(a: VerifyArgs, argv: &[OsString]) -> Result<i32> {
    let cfg = match &a.config {
        Some(p) => SuiteConfig::load(p)?,
        None => SuiteConfig::default(),
    };
    let suite = a.suite.or(cfg.suite).unwrap_or(Suite::Core);
    let seed = a.seed.or(cfg.seed).unwrap_or(0);
    let resolution = a.resolution.or(cfg.resolution).unwrap_or(256);
    let tolerance = a.tolerance.or(cfg.tolerance).unwrap_or(0.05);
    if !(tolerance >= 0.0 && tolerance.is_finite()) {
        return Err(Error::Config(format!("tolerance must be a nonnegative number, got {tolerance}")));
    }
    let exact_tolerance = cfg.exact_tolerance.unwrap_or(1e-9);
    let min_atoms = cfg.min_atoms.unwrap_or(DEFAULT_MIN_ATOMS);
    let out = a.out.or(cfg.out.clone()).unwrap_or_else(|| PathBuf::from("isoperim-out"));
    let jobs = resolve_jobs(a.jobs.or(cfg.jobs))?;

    let settings = Settings { tolerance, exact_tolerance, levels: LevelOptions { min_atoms } };
    let ctx = Context::new(settings, seed, resolution)?;
    let mut cases = select(suite);
    cases.extend(custom_cases(&Custom {
        spaces: cfg.spaces.clone(),
        functions: cfg.functions.clone(),
        weights: cfg.weights.clone(),
    }));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let started = unix_seconds();
    let results = pool.install(|| run_cases(&ctx, &cases));
    let finished = unix_seconds();
    let code = exit_code(&results);
    let report = Report::new(seed, resolution, tolerance, suite.name(), results);
    report.write(&out)?;
    let meta = serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "argv": argv.iter().map(|s| s.to_string_lossy().into_owned()).collect::<Vec<_>>(),
        "jobs": pool.current_num_threads(),
        "started_unix": started,
        "finished_unix": finished,
        "elapsed_seconds": finished - started,
        "hash": report.run.hash,
    });
    std::fs::write(out.join("run_metadata.json"), serde_json::to_string_pretty(&meta)? + "\n")?;

    let s = &report.summary;
    for r in report.results.iter().filter(|r| !r.pass) {
        match &r.error {
            Some(e) => eprintln!("ERROR {}: {e}", r.case),
            None => eprintln!("FAIL  {}: ratio {}", r.case, crate::report::fmt_num(r.ratio)),
        }
    }
    println!(
        "suite {}: {} results, {} passed, {} failed, {} report-only, {} degenerate; hash {}",
        suite.name(),
        s.total,
        s.passed,
        s.failed,
        s.report_only,
        s.degenerate,
        report.run.hash
    );
    println!("wrote {}", out.join("report.json").display());
    Ok(code)
}

#[derive(Serialize)]
struct AnalysisRow {
    space: String,
    weight: String,
    #[serde(flatten)]
    analysis: crate::weights::WeightAnalysis,
}

fn default_analysis_catalog() -> (Vec<SpaceSpec>, Vec<WeightSpec>) {
    (
        vec![
            SpaceSpec::EuclideanBox { n: 2, halfwidth: 4.0, resolution: 256, bounded: false },
            SpaceSpec::Sphere { n: 2, resolution: 128 },
            SpaceSpec::LogConcave { p: 2.0, n: 1, resolution: 4096, truncation: None },
        ],
        vec![WeightSpec::Distance { scale: 1.0, power: 1.0, offset: 0.0 }, WeightSpec::Prototype],
    )
}

fn analyze(a: AnalyzeArgs) -> Result<i32> {
    let (spaces, weights, cfg_atoms) = match &a.config {
        Some(p) => {
            let cfg = SuiteConfig::load(p)?;
            let (ds, dw) = default_analysis_catalog();
            let spaces = if cfg.spaces.is_empty() { ds } else { cfg.spaces };
            let weights = if cfg.weights.is_empty() { dw } else { cfg.weights };
            (spaces, weights, cfg.min_atoms)
        }
        None => {
            let (s, w) = default_analysis_catalog();
            (s, w, None)
        }
    };
    let opts = LevelOptions { min_atoms: a.min_atoms.or(cfg_atoms).unwrap_or(DEFAULT_MIN_ATOMS) };
    let mut rows = Vec::new();
    for spec in &spaces {
        let space = build_space(spec)?;
        let profile = space.natural_profile()?;
        for ws in &weights {
            let w = build_weight(&space, ws)?;
            let analysis = analyze_weight(&space, &w, &profile, &opts, a.necessary)?;
            rows.push(AnalysisRow { space: space.label(), weight: ws.label(), analysis });
        }
    }
    let text = serde_json::to_string_pretty(&rows)? + "\n";
    match &a.out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(EXIT_OK)
}

fn profile(a: ProfileArgs) -> Result<i32> {
    let p = match a.kind {
        ProfileKind::Euclidean => Profile::euclidean(a.n)?,
        ProfileKind::HalfPlane => Profile::half_plane(),
        ProfileKind::Sphere => Profile::sphere(a.n)?,
        ProfileKind::LogConcave => Profile::log_concave(a.p)?,
        ProfileKind::Gaussian => Profile::gaussian(),
    };
    let rows: Vec<Value> = a
        .eval
        .iter()
        .map(|&t| {
            let v = p.eval(t)?;
            let mut row = serde_json::json!({ "t": Num(t), "value": Num(v) });
            if a.phi {
                row["phi"] = serde_json::to_value(Num(t / v))?;
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let doc = serde_json::json!({ "profile": p.label(), "rows": rows });
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(EXIT_OK)
}

fn load_report(path: &Path) -> Result<Value> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn diff(a: &Path, b: &Path) -> Result<i32> {
    let (ra, rb) = (load_report(a)?, load_report(b)?);
    let index = |r: &Value| -> Result<std::collections::BTreeMap<String, Value>> {
        let list = r["results"]
            .as_array()
            .ok_or_else(|| Error::Config("report has no `results` array".into()))?;
        Ok(list.iter().map(|x| (x["case"].as_str().unwrap_or("").to_string(), x.clone())).collect())
    };
    let (ia, ib) = (index(&ra)?, index(&rb)?);
    let mut changed = 0;
    for (case, x) in &ia {
        match ib.get(case) {
            None => {
                println!("- {case}");
                changed += 1;
            }
            Some(y) if x != y => {
                let verdict = if x["pass"] != y["pass"] { " VERDICT" } else { "" };
                println!("~ {case}: ratio {} -> {}{verdict}", x["ratio"], y["ratio"]);
                changed += 1;
            }
            Some(_) => {}
        }
    }
    for case in ib.keys().filter(|k| !ia.contains_key(*k)) {
        println!("+ {case}");
        changed += 1;
    }
    println!("{changed} case(s) differ; hashes {} / {}", ra["run"]["hash"], rb["run"]["hash"]);
    Ok(if changed == 0 { EXIT_OK } else { EXIT_VIOLATION })
}
