mod cache;
mod config;
mod report;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use pencil_core::fiber::{build_fiber, FiberModel};
use pencil_core::genericity::{certify, CriticalData, GenericityReport, PencilSpec, Precision, Verdict};
use pencil_core::monodromy::{audit, monodromy, MonodromyRep};
use pencil_core::pipeline::base_value;
use pencil_core::rng;
use pencil_core::theorems::{verify, Budget, CheckKind};
use serde::de::DeserializeOwned;
use serde::Serialize;

use cache::Cache;
use config::{load_spec, RunConfig, Tolerances};
use report::{FiberSummary, MonodromyStage, Report, Stages, SCHEMA_VERSION};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Stage(pencil_core::Error),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Stage(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<pencil_core::Error> for CliError {
    fn from(e: pencil_core::Error) -> Self {
        CliError::Stage(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Stage(pencil_core::Error::Inconclusive(_)) => 3,
            CliError::Stage(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PrecisionArg {
    Double,
    DoubleDouble,
}

#[derive(Parser)]
#[command(name = "pencil", version, about = "Monodromy of pencils F^p / G^q on the projective plane")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value = "double")]
    precision: PrecisionArg,
    /// Multiplies the tracker's initial step and Newton tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol_scale: f64,
    /// Continue past a failed genericity check.
    #[arg(long, global = true)]
    force: bool,
    #[arg(long, global = true, env = "PENCIL_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Genericity certificate.
    Check { spec: PathBuf },
    /// Critical points, values and base points.
    Critical { spec: PathBuf },
    /// Combinatorial model of a regular fiber.
    Fiber { spec: PathBuf },
    /// Loop matrices and vanishing cycles along a distinguished path system.
    Monodromy {
        spec: PathBuf,
        #[arg(long)]
        svg_out: Option<PathBuf>,
    },
    /// Generation and transitivity checks.
    Verify {
        spec: PathBuf,
        /// Comma-separated subset of: generation, closure, orbit-single,
        /// transitivity, intersection-graph, khaste.
        #[arg(long, value_delimiter = ',')]
        check: Vec<String>,
    },
    /// Every stage and every check.
    Report {
        spec: PathBuf,
        #[arg(long)]
        svg_out: Option<PathBuf>,
    },
    /// Write a seeded random spec.
    RandomSpec {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        d: u32,
    },
}

struct Timing {
    stage: &'static str,
    seconds: f64,
    cached: bool,
}

struct Runner {
    config: RunConfig,
    tolerances: Tolerances,
    spec: PencilSpec,
    cache: Option<Cache>,
    timings: Vec<Timing>,
}

impl Runner {
    fn new(config: RunConfig) -> Result<Self, CliError> {
        let tolerances = config.tolerances()?;
        let spec = load_spec(&config.spec_path)?;
        let cache = match &config.cache_dir {
            Some(dir) => Some(Cache::open(dir.clone()).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?),
            None => None,
        };
        Ok(Self { config, tolerances, spec, cache, timings: Vec::new() })
    }

    fn cached<T: Serialize + DeserializeOwned>(
        &mut self,
        stage: &'static str,
        compute: impl FnOnce(&Self) -> Result<T, CliError>,
    ) -> Result<T, CliError> {
        let start = Instant::now();
        let key = Cache::key(
            &self.spec.canonical_text(),
            self.config.seed,
            &serde_json::to_string(&self.tolerances).expect("tolerances serialize"),
            stage,
        );
        if let Some(hit) = self.cache.as_ref().and_then(|c| c.get::<T>(&key)) {
            self.timings.push(Timing { stage, seconds: start.elapsed().as_secs_f64(), cached: true });
            return Ok(hit);
        }
        let value = compute(self)?;
        if let Some(c) = &self.cache {
            c.put(&key, &value).map_err(|e| CliError::Io(format!("cache write: {e}")))?;
        }
        self.timings.push(Timing { stage, seconds: start.elapsed().as_secs_f64(), cached: false });
        Ok(value)
    }

    fn critical(&mut self) -> Result<(GenericityReport, Option<CriticalData>), CliError> {
        self.cached("critical", |r| Ok(certify(&r.spec, r.config.seed, r.config.precision)?))
    }

    /// Critical data when genericity passed or is overridden.
    fn certified(&mut self, stages: &mut Stages) -> Result<Option<CriticalData>, CliError> {
        let (generic, data) = self.critical()?;
        let ok = generic.passed() || self.config.force;
        stages.genericity = Some(generic);
        stages.critical = data.clone();
        Ok(if ok { data } else { None })
    }

    fn fiber(&mut self, data: &CriticalData) -> Result<FiberModel, CliError> {
        self.cached("fiber", |r| {
            let base = base_value(&r.spec, data, r.config.seed);
            Ok(build_fiber(&r.spec, base, &data.base_points, r.config.seed, &r.tolerances.tracker)?)
        })
    }

    fn monodromy(&mut self, model: &FiberModel, data: &CriticalData) -> Result<MonodromyRep, CliError> {
        self.cached("monodromy", |r| Ok(monodromy(&r.spec, model, &data.values, &r.tolerances.tracker)?))
    }

    fn report(&self, stages: Stages) -> Report {
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: cache::TOOL_VERSION,
            spec_hash: self.spec.hash(),
            seed: self.config.seed,
            tolerances: self.tolerances.clone(),
            stages,
        }
    }
}

fn combine(a: Verdict, b: Verdict) -> Verdict {
    match (a, b) {
        (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
        (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
        _ => Verdict::Pass,
    }
}

fn genericity_verdict(stages: &Stages) -> Verdict {
    stages.genericity.as_ref().map_or(Verdict::Fail, |g| g.verdict())
}

enum Depth {
    Critical,
    Fiber,
    Monodromy,
    Verify,
}

/// Run the stages up to `depth` and return the report with its verdict.
fn run(runner: &mut Runner, depth: Depth, svg_out: Option<&Path>) -> Result<(Report, Verdict), CliError> {
    let mut stages = Stages::default();
    let data = runner.certified(&mut stages)?;
    let generic = genericity_verdict(&stages);
    if matches!(depth, Depth::Critical) {
        return Ok((runner.report(stages), generic));
    }
    let Some(data) = data else {
        return Ok((runner.report(stages), combine(generic, Verdict::Fail)));
    };
    let mut verdict = if runner.config.force { Verdict::Pass } else { generic };
    let model = runner.fiber(&data)?;
    stages.fiber = Some(FiberSummary::new(&model));
    if matches!(depth, Depth::Fiber) {
        return Ok((runner.report(stages), verdict));
    }
    let rep = runner.monodromy(&model, &data)?;
    let audited = audit(&rep)?;
    if !audited.passed() {
        verdict = Verdict::Fail;
    }
    if let Some(path) = svg_out {
        let text = svg::render(&rep, runner.spec.q() > 1);
        std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    if matches!(depth, Depth::Verify) && audited.passed() {
        let start = Instant::now();
        let (p, q) = (runner.spec.p(), runner.spec.q());
        let report = verify(&rep, &model, p, q, &runner.config.checks, Budget::default())?;
        runner.timings.push(Timing { stage: "verify", seconds: start.elapsed().as_secs_f64(), cached: false });
        verdict = combine(verdict, report.verdict());
        stages.verify = Some(report);
    }
    stages.monodromy = Some(MonodromyStage { rep, audit: audited });
    Ok((runner.report(stages), verdict))
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_checks(names: &[String]) -> Result<Vec<CheckKind>, CliError> {
    if names.is_empty() {
        return Ok(CheckKind::ALL.to_vec());
    }
    names
        .iter()
        .map(|n| CheckKind::parse(n.trim()).ok_or_else(|| CliError::Usage(format!("unknown check {n:?}"))))
        .collect()
}

fn execute(cli: Cli) -> Result<Verdict, CliError> {
    let precision = match cli.precision {
        PrecisionArg::Double => Precision::Double,
        PrecisionArg::DoubleDouble => Precision::DoubleDouble,
    };
    let config = |spec: PathBuf, checks: Vec<CheckKind>| RunConfig {
        spec_path: spec,
        seed: cli.seed,
        precision,
        tol_scale: cli.tol_scale,
        force: cli.force,
        cache_dir: cli.cache_dir.clone(),
        checks,
    };
    let (depth, spec, svg_out, checks) = match cli.command {
        Command::RandomSpec { p, q, d } => {
            let spec = PencilSpec::random(&mut rng::stream(cli.seed, "spec"), p, q, d)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            emit(&spec.to_file(), cli.out.as_deref())?;
            return Ok(Verdict::Pass);
        }
        Command::Check { spec } | Command::Critical { spec } => (Depth::Critical, spec, None, Vec::new()),
        Command::Fiber { spec } => (Depth::Fiber, spec, None, Vec::new()),
        Command::Monodromy { spec, svg_out } => (Depth::Monodromy, spec, svg_out, Vec::new()),
        Command::Verify { spec, check } => (Depth::Verify, spec, None, parse_checks(&check)?),
        Command::Report { spec, svg_out } => (Depth::Verify, spec, svg_out, CheckKind::ALL.to_vec()),
    };
    let mut runner = Runner::new(config(spec, checks))?;
    let (report, verdict) = run(&mut runner, depth, svg_out.as_deref())?;
    emit(&report, cli.out.as_deref())?;
    let timings: Vec<serde_json::Value> = runner
        .timings
        .iter()
        .map(|t| serde_json::json!({"stage": t.stage, "seconds": t.seconds, "cached": t.cached}))
        .collect();
    eprintln!("{}", serde_json::json!({ "timings": timings }));
    Ok(verdict)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Ok(Verdict::Inconclusive) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
