//! The `qabench` command line. The binary only forwards to [`run`].
//!
//! Exit codes: 0 success, 1 every bench item failed, 2 usage or parameter
//! error, 3 malformed input file. The worker pool size comes from the
//! `QABENCH_WORKERS` environment variable.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bench::{
    bayesian_bootstrap, scaling_fit, stopping_reward, success_prob, tts, tts_curve_from_table, tts_table, ttt,
    weighted_mean, BenchReport, Estimate, ScanOptions, SizeMeasure, StubSolver,
};
use crate::error::{Error, Result};
use crate::formats::{self, InstanceFile};
use crate::instances::{self, load_schedule, IsingInstance, Schedule, ENERGY_TOLERANCE};
use crate::qac::{CodeFamily, DecodeStrategy, NestedCode, PenaltyMode, QacCode};
use crate::quantum_sim;
use crate::rng::derive_seed;
use crate::solvers::{
    solve_exact_with_limit, Acceptance, ParallelTempering, SampleSet, SimulatedAnnealing, SimulatedQuantumAnnealing,
    SliceReadout, Solver, SolverConfig, SpinVectorMonteCarlo,
};
use crate::topology::build_chimera;

pub const WORKERS_ENV: &str = "QABENCH_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "qabench", version, about = "Ising annealer benchmarking toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a problem instance.
    Gen(GenArgs),
    /// Sample an instance with one solver.
    Solve(SolveArgs),
    /// Encode an instance with QAC or nested QAC.
    Encode(EncodeArgs),
    /// Run a benchmark manifest.
    Bench(BenchArgs),
    /// Scan the spectrum of H(s) and optionally run a closed-system anneal.
    Spectrum(SpectrumArgs),
    /// Summarize a results file.
    Report(ReportArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
#[value(rename_all = "snake_case")]
enum Family {
    RandomPm1,
    RangeK,
    Signature,
    WeakStrong,
    FrustratedLoops,
}

#[derive(Args, Debug)]
struct GenArgs {
    family: Family,
    /// Chimera grid size.
    #[arg(long, default_value_t = 2)]
    grid: usize,
    /// Inactive qubits, comma separated.
    #[arg(long, value_delimiter = ',')]
    inactive: Vec<usize>,
    #[arg(long, default_value_t = 7)]
    k: u32,
    #[arg(long, default_value_t = 4)]
    n_core: usize,
    #[arg(long, default_value_t = 0.25)]
    hl: f64,
    /// Loop density for frustrated loops.
    #[arg(long, default_value_t = 0.25)]
    alpha: f64,
    /// Coupler cap R for frustrated loops.
    #[arg(long, default_value_t = 3.0)]
    cap: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip the device-range renormalization.
    #[arg(long)]
    raw: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SolverKind {
    Exact,
    Sa,
    Svmc,
    Sqa,
    Pt,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
enum DecodeKind {
    Majority,
    EnergyMin,
}

impl DecodeKind {
    fn strategy(self, seed: u64) -> DecodeStrategy {
        match self {
            DecodeKind::Majority => DecodeStrategy::Majority,
            DecodeKind::EnergyMin => DecodeStrategy::EnergyMin { seed },
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum)]
    solver: SolverKind,
    /// Base configuration as JSON; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    sweeps: Option<u64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    beta_initial: Option<f64>,
    #[arg(long)]
    beta_final: Option<f64>,
    #[arg(long)]
    temperature: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    slices: Option<usize>,
    /// Trotter slice to read out, or `best`.
    #[arg(long)]
    readout: Option<String>,
    /// Single-spin acceptance rule for SA and PT.
    #[arg(long, value_enum)]
    acceptance: Option<AcceptanceArg>,
    /// Parallel-tempering inverse temperatures, hottest first.
    #[arg(long, value_delimiter = ',')]
    ladder: Vec<f64>,
    /// Schedule CSV with header `s,A,B`.
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Ground states listed by the exact solver.
    #[arg(long, default_value_t = 1 << 16)]
    exact_limit: usize,
    /// Decode samples of an encoded instance.
    #[arg(long, value_enum)]
    decode: Option<DecodeKind>,
    /// Record measured wall times (makes output irreproducible).
    #[arg(long)]
    wall_time: bool,
    #[arg(long)]
    out: PathBuf,
    /// Sidecar path; defaults to the results path with a `.json` extension.
    #[arg(long)]
    sidecar: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
#[value(rename_all = "snake_case")]
enum AcceptanceArg {
    Metropolis,
    HeatBath,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CodeKind {
    Qac,
    Nqac,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Layout {
    Linear,
    Chimera,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
#[value(rename_all = "snake_case")]
enum PenaltyArg {
    Uniform,
    ScaledToMean,
}

#[derive(Args, Debug)]
struct EncodeArgs {
    code: CodeKind,
    instance: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, value_enum, default_value_t = PenaltyArg::Uniform)]
    penalty_mode: PenaltyArg,
    #[arg(long, value_enum, default_value_t = Layout::Linear)]
    layout: Layout,
    /// Chimera grid size for the chimera layout.
    #[arg(long, default_value_t = 2)]
    grid: usize,
    #[arg(long)]
    no_penalty_qubits: bool,
    /// Nesting level.
    #[arg(long, default_value_t = 2)]
    c: usize,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long)]
    field_boost: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    raw: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    manifest: PathBuf,
    #[arg(long, default_value = "bench_out")]
    out_dir: PathBuf,
    /// Overrides the manifest's master seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    instance: PathBuf,
    #[arg(long)]
    schedule: Option<PathBuf>,
    #[arg(long, default_value_t = 101)]
    points: usize,
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// Also anneal for this many ns from the uniform superposition.
    #[arg(long)]
    anneal: Option<f64>,
    #[arg(long, default_value_t = quantum_sim::DEFAULT_STEPS)]
    steps: usize,
    /// Distribution CSV of the anneal.
    #[arg(long)]
    dist_out: Option<PathBuf>,
    /// JSON summary: minimum gap, and anneal diagnostics when annealing.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
#[value(rename_all = "snake_case")]
enum Reward {
    Indicator,
    NegEnergy,
}

#[derive(Args, Debug)]
struct ReportArgs {
    results: PathBuf,
    /// Instance file giving (or allowing exact computation of) the ground energy.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    ground_energy: Option<f64>,
    #[arg(long, default_value_t = 0.99)]
    p_d: f64,
    /// Run time of one repetition.
    #[arg(long, default_value_t = 1.0)]
    t_f: f64,
    #[arg(long, allow_negative_numbers = true)]
    target: Option<f64>,
    /// Cost per draw for the optimal-stopping summary.
    #[arg(long)]
    cost: Option<f64>,
    #[arg(long, value_enum, default_value_t = Reward::Indicator)]
    reward: Reward,
    #[arg(long, default_value_t = 1000)]
    resamples: usize,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Errors are printed to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(e) = configure_workers() {
        eprintln!("error: {e}");
        return 2;
    }
    let outcome = match cli.command {
        Command::Gen(a) => cmd_gen(a).map(|_| 0),
        Command::Solve(a) => cmd_solve(a).map(|_| 0),
        Command::Encode(a) => cmd_encode(a).map(|_| 0),
        Command::Bench(a) => cmd_bench(a),
        Command::Spectrum(a) => cmd_spectrum(a).map(|_| 0),
        Command::Report(a) => cmd_report(a).map(|_| 0),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Format(_) | Error::Json(_) | Error::Csv(_) | Error::Schedule { .. } => 3,
        _ => 2,
    }
}

fn configure_workers() -> Result<()> {
    let Ok(text) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let workers: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&w| w > 0)
        .ok_or_else(|| Error::param(format!("{WORKERS_ENV} must be a positive integer, got {text:?}")))?;
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    Ok(())
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn json_text(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    text
}

fn device_ready(instance: IsingInstance, raw: bool) -> IsingInstance {
    if raw {
        instance
    } else {
        instance.renormalized()
    }
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let instance = match a.family {
        Family::RandomPm1 => instances::gen_random_pm1(&build_chimera(a.grid, &a.inactive)?, a.seed),
        Family::RangeK => instances::gen_range_k(&build_chimera(a.grid, &a.inactive)?, a.k, a.seed)?,
        Family::Signature => instances::gen_signature(a.n_core)?,
        Family::WeakStrong => instances::gen_weak_strong(a.hl)?,
        Family::FrustratedLoops => {
            instances::gen_frustrated_loops(&build_chimera(a.grid, &a.inactive)?, a.alpha, a.cap, a.seed, None)?
        }
    };
    let file = InstanceFile::plain(device_ready(instance, a.raw));
    write_output(a.out.as_deref(), &formats::instance_to_json(&file))
}

fn read_input(path: &Path) -> Result<InstanceFile> {
    formats::read_instance(path).map_err(|e| match e {
        Error::Io(io) => Error::param(format!("cannot read {}: {io}", path.display())),
        other => other,
    })
}

fn read_schedule(path: Option<&Path>) -> Result<Schedule> {
    match path {
        Some(p) => load_schedule(p),
        None => Ok(Schedule::default()),
    }
}

fn solve_config(a: &SolveArgs) -> Result<SolverConfig> {
    let mut cfg = match &a.config {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?).map_err(|e| Error::Format(e.to_string()))?,
        None => SolverConfig::default(),
    };
    cfg.seed = a.seed;
    if let Some(v) = a.sweeps {
        cfg.sweeps = v;
    }
    if let Some(v) = a.reps {
        cfg.repetitions = v;
    }
    if let Some(v) = a.beta_initial {
        cfg.beta_initial = v;
    }
    if let Some(v) = a.beta_final {
        cfg.beta_final = v;
    }
    if let Some(v) = a.temperature {
        cfg.temperature = v;
    }
    if let Some(v) = a.beta {
        cfg.beta = v;
    }
    if let Some(v) = a.slices {
        cfg.trotter_slices = v;
    }
    if let Some(acc) = a.acceptance {
        cfg.acceptance = match acc {
            AcceptanceArg::Metropolis => Acceptance::Metropolis,
            AcceptanceArg::HeatBath => Acceptance::HeatBath,
        };
    }
    if !a.ladder.is_empty() {
        cfg.ladder = a.ladder.clone();
    }
    if let Some(r) = &a.readout {
        cfg.readout = if r == "best" {
            SliceReadout::Best
        } else {
            SliceReadout::Fixed(r.parse().map_err(|_| Error::param(format!("readout must be `best` or a slice index, got {r:?}")))?)
        };
    }
    Ok(cfg)
}

fn sampler(kind: SolverKind, schedule: Schedule) -> Box<dyn Solver> {
    match kind {
        SolverKind::Sa | SolverKind::Exact => Box::new(SimulatedAnnealing),
        SolverKind::Pt => Box::new(ParallelTempering),
        SolverKind::Svmc => Box::new(SpinVectorMonteCarlo { schedule }),
        SolverKind::Sqa => Box::new(SimulatedQuantumAnnealing { schedule }),
    }
}

fn sidecar_path(a: &SolveArgs) -> PathBuf {
    a.sidecar.clone().unwrap_or_else(|| a.out.with_extension("json"))
}

fn cmd_solve(a: SolveArgs) -> Result<()> {
    let file = read_input(&a.instance)?;
    let inst = &file.instance;
    let cfg = solve_config(&a)?;
    let schedule = read_schedule(a.schedule.as_deref())?;
    let mut sidecar = BTreeMap::<String, Value>::new();
    sidecar.insert("version".into(), crate::VERSION.into());
    sidecar.insert("command".into(), "solve".into());
    sidecar.insert("instance".into(), a.instance.display().to_string().into());
    sidecar.insert("wall_time_recorded".into(), a.wall_time.into());
    let set = if a.solver == SolverKind::Exact {
        let exact = solve_exact_with_limit(inst, a.exact_limit)?;
        sidecar.insert("solver".into(), "exact".into());
        sidecar.insert(
            "exact".into(),
            json!({
                "ground_energy": exact.ground_energy,
                "degeneracy": exact.degeneracy,
                "listed": exact.ground_states.len(),
                "truncated": exact.truncated,
                "enumeration_width": exact.enumeration_width,
            }),
        );
        sidecar.insert("exact_limit".into(), a.exact_limit.into());
        let mut set = SampleSet::from_states("exact", inst, &cfg, exact.ground_states)?;
        set.wall_times.iter_mut().for_each(|t| *t = 0.0);
        set
    } else {
        let solver = sampler(a.solver, schedule.clone());
        sidecar.insert("solver".into(), solver.id().into());
        sidecar.insert("config".into(), serde_json::to_value(&cfg)?);
        sidecar.insert("seeds".into(), json!({ "master": cfg.seed, "repetition_streams": cfg.repetitions }));
        if matches!(a.solver, SolverKind::Svmc | SolverKind::Sqa) {
            sidecar.insert("schedule".into(), serde_json::to_value(schedule.samples())?);
        }
        solver.solve(inst, &cfg)?
    };
    sidecar.insert("repetitions".into(), set.len().into());
    sidecar.insert("min_energy".into(), serde_json::to_value(set.min_energy())?);
    sidecar.insert("known_ground_energy".into(), serde_json::to_value(inst.known_ground_energy())?);
    if let Some(kind) = a.decode {
        let (code, logical) = file
            .code
            .as_ref()
            .ok_or_else(|| Error::param("--decode needs an encoded instance with a code block"))?;
        let mut rows = Vec::with_capacity(set.len());
        for (rep, s) in set.states.iter().enumerate() {
            let d = code.decode(s, kind.strategy(derive_seed(cfg.seed, rep as u64)), logical)?;
            rows.push(vec![
                rep.to_string(),
                logical.energy(&d.state)?.to_string(),
                formats::state_bits(&d.state),
                d.broken.iter().filter(|&&b| b).count().to_string(),
                d.ties.iter().filter(|&&b| b).count().to_string(),
            ]);
        }
        let path = a.out.with_extension("decoded.csv");
        std::fs::write(&path, formats::csv_text(&["rep", "logical_energy", "state_bits", "broken", "ties"], rows))?;
        sidecar.insert("decoded".into(), json!({ "strategy": kind, "path": path.display().to_string() }));
    }
    std::fs::write(&a.out, formats::results_csv(&set, a.wall_time))?;
    std::fs::write(sidecar_path(&a), json_text(&sidecar))?;
    Ok(())
}

fn cmd_encode(a: EncodeArgs) -> Result<()> {
    let file = read_input(&a.instance)?;
    let logical = file.instance;
    let family = match a.code {
        CodeKind::Qac => {
            let code = match a.layout {
                Layout::Linear => QacCode::linear(logical.n(), a.alpha, a.beta, !a.no_penalty_qubits)?,
                Layout::Chimera => QacCode::chimera(&build_chimera(a.grid, &[])?, a.alpha, a.beta)?,
            };
            let mode = match a.penalty_mode {
                PenaltyArg::Uniform => PenaltyMode::Uniform,
                PenaltyArg::ScaledToMean => PenaltyMode::ScaledToMean,
            };
            CodeFamily::Qac(code.with_penalty_mode(mode))
        }
        CodeKind::Nqac => {
            let mut code = NestedCode::new(logical.n(), a.c, a.gamma)?;
            if let Some(b) = a.field_boost {
                code = code.with_field_boost(b);
            }
            CodeFamily::Nqac(code)
        }
    };
    let physical = device_ready(family.encode(&logical)?, a.raw);
    let out = InstanceFile {
        instance: physical,
        code: Some((family, logical)),
    };
    write_output(a.out.as_deref(), &formats::instance_to_json(&out))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSpec {
    name: String,
    /// Output file prefix; defaults to the name and position.
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    config: SolverConfig,
    #[serde(default)]
    schedule: Option<String>,
    /// Success curve for the `stub` solver: `[[sweeps, p], …]`.
    #[serde(default)]
    curve: Option<Vec<(u64, f64)>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum Metric {
    Tts,
    Ttt,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BootstrapSpec {
    #[serde(default = "default_resamples")]
    resamples: usize,
    #[serde(default = "default_level")]
    level: f64,
}

impl Default for BootstrapSpec {
    fn default() -> Self {
        BootstrapSpec {
            resamples: default_resamples(),
            level: default_level(),
        }
    }
}

fn default_resamples() -> usize {
    1000
}
fn default_level() -> f64 {
    0.95
}
fn default_one() -> usize {
    1
}
fn default_p_d() -> f64 {
    0.99
}
fn default_percentile() -> f64 {
    crate::bench::DEFAULT_PERCENTILE
}
fn default_time_per_sweep() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScalingSpec {
    measure: SizeMeasure,
}

/// A benchmark manifest. Instance and schedule paths are relative to the
/// manifest's directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    instances: Vec<String>,
    solvers: Vec<SolverSpec>,
    /// Sweep counts scanned for the optimal annealing time.
    axis: Vec<u64>,
    #[serde(default = "default_one")]
    gauges: usize,
    #[serde(default = "default_metric")]
    metric: Metric,
    /// TTT target energy above the ground energy.
    #[serde(default)]
    target_offset: f64,
    #[serde(default = "default_percentile")]
    percentile: f64,
    #[serde(default = "default_p_d")]
    p_d: f64,
    #[serde(default = "default_time_per_sweep")]
    time_per_sweep: f64,
    #[serde(default)]
    bootstrap: BootstrapSpec,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    decode: Option<DecodeKind>,
    #[serde(default)]
    scaling: Option<ScalingSpec>,
}

fn default_metric() -> Metric {
    Metric::Tts
}

#[derive(Debug, Clone, Serialize)]
struct ItemStatus {
    item: String,
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

struct Loaded {
    name: String,
    file: InstanceFile,
    /// Energy a sample (decoded when decoding) must reach to count.
    target: f64,
    grid_size: Option<f64>,
}

fn bench_solver(spec: &SolverSpec, dir: &Path) -> Result<Box<dyn Solver>> {
    let schedule = || -> Result<Schedule> {
        match &spec.schedule {
            Some(p) => load_schedule(dir.join(p)),
            None => Ok(Schedule::default()),
        }
    };
    Ok(match spec.name.as_str() {
        "sa" => Box::new(SimulatedAnnealing),
        "pt" => Box::new(ParallelTempering),
        "svmc" => Box::new(SpinVectorMonteCarlo { schedule: schedule()? }),
        "sqa" => Box::new(SimulatedQuantumAnnealing { schedule: schedule()? }),
        "stub" => Box::new(StubSolver::new(
            spec.curve.clone().ok_or_else(|| Error::param("stub solver needs a `curve`"))?,
        )?),
        other => return Err(Error::param(format!("unknown bench solver {other:?}"))),
    })
}

fn load_item(path: &Path, name: &str, manifest: &Manifest) -> Result<Loaded> {
    let file = formats::read_instance(path)?;
    let decoding = manifest.decode.is_some() && file.code.is_some();
    let reference = if decoding { &file.code.as_ref().unwrap().1 } else { &file.instance };
    let ground = crate::bench::scan_ground_energy(reference)?;
    let offset = match manifest.metric {
        Metric::Tts => 0.0,
        Metric::Ttt => manifest.target_offset,
    };
    let grid_size = file.instance.metadata().params.get("grid_size").and_then(Value::as_f64);
    Ok(Loaded {
        name: name.to_string(),
        target: ground + offset + ENERGY_TOLERANCE,
        grid_size,
        file,
    })
}

fn cmd_bench(a: BenchArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&a.manifest).map_err(|e| Error::param(format!("cannot read manifest: {e}")))?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Error::Format(format!("manifest: {e}")))?;
    let master = a.seed.unwrap_or(manifest.seed);
    let dir = a.manifest.parent().map(Path::to_path_buf).unwrap_or_default();
    std::fs::create_dir_all(&a.out_dir)?;
    let options = ScanOptions {
        p_d: manifest.p_d,
        percentile: manifest.percentile,
        resamples: manifest.bootstrap.resamples,
        level: manifest.bootstrap.level,
        seed: derive_seed(master, 1),
        gauges: manifest.gauges,
        time_per_sweep: manifest.time_per_sweep,
    };
    let mut items = Vec::new();
    let mut loaded = Vec::new();
    for name in &manifest.instances {
        match load_item(&dir.join(name), name, &manifest) {
            Ok(l) => {
                items.push(ItemStatus { item: format!("instance {name}"), ok: true, error: None });
                loaded.push(l);
            }
            Err(e) => items.push(ItemStatus {
                item: format!("instance {name}"),
                ok: false,
                error: Some(e.to_string()),
            }),
        }
    }
    let mut reports = BTreeMap::new();
    let mut fits = BTreeMap::new();
    let mut any_ok = false;
    for (k, spec) in manifest.solvers.iter().enumerate() {
        let label = spec.label.clone().unwrap_or_else(|| format!("{}_{k}", spec.name));
        let solver_seed = derive_seed(master, 100 + k as u64);
        let result = run_bench_solver(spec, &dir, &loaded, &manifest, &options, solver_seed, &label, &a.out_dir);
        match result {
            Ok((report, fit)) => {
                any_ok = true;
                items.push(ItemStatus { item: format!("solver {label}"), ok: true, error: None });
                reports.insert(label.clone(), report);
                match fit {
                    Some(Ok(f)) => {
                        fits.insert(label.clone(), f);
                    }
                    Some(Err(e)) => items.push(ItemStatus {
                        item: format!("scaling {label}"),
                        ok: false,
                        error: Some(e.to_string()),
                    }),
                    None => {}
                }
            }
            Err(e) => items.push(ItemStatus {
                item: format!("solver {label}"),
                ok: false,
                error: Some(e.to_string()),
            }),
        }
    }
    if items.iter().any(|i| !i.ok) {
        for r in reports.values_mut() {
            r.flags.push(crate::bench::Flag::ItemFailed);
            r.flags.sort();
        }
    }
    let summary = json!({
        "version": crate::VERSION,
        "manifest": serde_json::to_value(&manifest)?,
        "seeds": { "master": master, "bootstrap": options.seed },
        "items": items,
        "reports": reports,
        "scaling": fits,
    });
    std::fs::write(a.out_dir.join("report.json"), json_text(&summary))?;
    Ok(if any_ok { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn run_bench_solver(
    spec: &SolverSpec,
    dir: &Path,
    loaded: &[Loaded],
    manifest: &Manifest,
    options: &ScanOptions,
    seed: u64,
    label: &str,
    out_dir: &Path,
) -> Result<(BenchReport, Option<Result<BenchReport>>)> {
    if loaded.is_empty() {
        return Err(Error::param("no instance loaded"));
    }
    let solver = bench_solver(spec, dir)?;
    let template = spec.config.clone().with_seed(seed);
    let table = tts_table(loaded.len(), &manifest.axis, options, |i, sweeps| {
        let item = &loaded[i];
        let cfg = template.clone().with_sweeps(sweeps).with_seed(derive_seed(template.seed, i as u64));
        let avg = crate::bench::gauge_average(
            &item.file.instance,
            solver.as_ref(),
            &cfg,
            options.gauges,
            derive_seed(options.seed, i as u64),
        )?;
        let energies: Vec<f64> = match (&manifest.decode, &item.file.code) {
            (Some(kind), Some((code, logical))) => avg
                .pooled
                .states
                .iter()
                .enumerate()
                .map(|(r, s)| {
                    let d = code.decode(s, kind.strategy(derive_seed(cfg.seed, r as u64)), logical)?;
                    logical.energy(&d.state)
                })
                .collect::<Result<_>>()?,
            _ => avg.pooled.energies.clone(),
        };
        Ok(energies.iter().filter(|&&e| e <= item.target).count() as f64 / energies.len() as f64)
    })?;
    let mut report = tts_curve_from_table(&table, &manifest.axis, options)?;
    report.metric = match manifest.metric {
        Metric::Tts => "tts".into(),
        Metric::Ttt => "ttt".into(),
    };
    report.seeds.insert("solver".into(), seed);
    report.params.insert("solver".into(), solver.id().into());
    report.params.insert("label".into(), label.into());
    std::fs::write(out_dir.join(format!("{label}_tts.csv")), report.to_csv())?;
    std::fs::write(out_dir.join(format!("{label}_tts.json")), json_text(&report))?;
    let rows = loaded.iter().zip(&table).flat_map(|(item, row)| {
        manifest
            .axis
            .iter()
            .zip(row)
            .map(move |(s, t)| vec![item.name.clone(), s.to_string(), t.to_string()])
    });
    std::fs::write(
        out_dir.join(format!("{label}_instances.csv")),
        formats::csv_text(&["instance", "sweeps", "tts"], rows),
    )?;
    let fit = manifest.scaling.as_ref().map(|s| {
        let r = bench_scaling(loaded, &table, s.measure, options)?;
        std::fs::write(out_dir.join(format!("{label}_scaling.csv")), r.to_csv())?;
        Ok(r)
    });
    Ok((report, fit))
}

/// Groups instances by grid size, takes each group's TTS at its own optimal
/// axis point and fits the percentile series.
fn bench_scaling(loaded: &[Loaded], table: &[Vec<Estimate>], measure: SizeMeasure, options: &ScanOptions) -> Result<BenchReport> {
    let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, item) in loaded.iter().enumerate() {
        let l = item
            .grid_size
            .ok_or_else(|| Error::param(format!("instance {} has no grid_size in its metadata", item.name)))?;
        groups.entry(l.to_bits()).or_default().push(i);
    }
    let mut sizes = Vec::new();
    let mut series = Vec::new();
    for (bits, members) in &groups {
        let columns = table[0].len();
        let best = (0..columns)
            .min_by(|&x, &y| {
                let q = |c: usize| {
                    let keys: Vec<f64> = members.iter().map(|&i| table[i][c].key()).collect();
                    let w = vec![1.0; keys.len()];
                    crate::bench::weighted_quantile(&keys, &w, options.percentile)
                };
                q(x).total_cmp(&q(y))
            })
            .unwrap_or(0);
        sizes.push(f64::from_bits(*bits));
        series.push(members.iter().map(|&i| table[i][best]).collect());
    }
    Ok(scaling_fit(&sizes, measure, &series, options)?.report())
}

fn cmd_spectrum(a: SpectrumArgs) -> Result<()> {
    let file = read_input(&a.instance)?;
    let schedule = read_schedule(a.schedule.as_deref())?;
    if a.points < 2 {
        return Err(Error::param("spectrum scan needs at least 2 points"));
    }
    let grid: Vec<f64> = (0..a.points).map(|k| k as f64 / (a.points - 1) as f64).collect();
    let scan = quantum_sim::spectrum_scan(&file.instance, &schedule, &grid, a.levels)?;
    write_output(a.out.as_deref(), &scan.to_csv())?;
    let mut summary = BTreeMap::<String, Value>::new();
    summary.insert("version".into(), crate::VERSION.into());
    summary.insert("min_gap".into(), scan.min_gap.into());
    summary.insert("min_gap_s".into(), scan.min_gap_s.into());
    summary.insert("seed".into(), a.seed.into());
    if let Some(t_f) = a.anneal {
        let psi = quantum_sim::anneal_amplitudes(&file.instance, &schedule, t_f, a.steps)?;
        let probabilities: Vec<f64> = psi.iter().map(|c| c.norm_sqr()).collect();
        let dist = quantum_sim::Distribution {
            n: file.instance.n(),
            norm_drift: (probabilities.iter().sum::<f64>() - 1.0).abs(),
            probabilities,
        };
        if let Some(p) = &a.dist_out {
            std::fs::write(p, dist.to_csv())?;
        }
        summary.insert("t_f_ns".into(), t_f.into());
        summary.insert("steps".into(), a.steps.into());
        summary.insert("norm_drift".into(), dist.norm_drift.into());
        if file.instance.n() >= 2 && file.instance.n() <= quantum_sim::MAX_GEOMETRIC_MEAN_QUBITS {
            let norm = dist.probabilities.iter().sum::<f64>().sqrt();
            let normalized: Vec<_> = psi.iter().map(|c| c / norm).collect();
            summary.insert(
                "geometric_mean_negativity".into(),
                quantum_sim::geometric_mean_negativity(&normalized)?.into(),
            );
        }
    }
    if let Some(p) = &a.summary {
        std::fs::write(p, json_text(&summary))?;
    }
    Ok(())
}

fn cmd_report(a: ReportArgs) -> Result<()> {
    let table = formats::parse_results_csv(std::fs::File::open(&a.results)?)?;
    if table.energies.is_empty() {
        return Err(Error::param("results file has no rows"));
    }
    let ground = match (a.ground_energy, &a.instance) {
        (Some(e), _) => e,
        (None, Some(p)) => crate::bench::scan_ground_energy(&read_input(p)?.instance)?,
        (None, None) => return Err(Error::param("pass --instance or --ground-energy")),
    };
    let dummy = IsingInstance::new(table.states[0].len(), vec![0.0; table.states[0].len()], [])?;
    let mut set = SampleSet::from_states("results", &dummy, &SolverConfig::default(), table.states.clone())?;
    set.energies = table.energies.clone();
    let hits: Vec<f64> = table
        .energies
        .iter()
        .map(|&e| f64::from(u8::from(e <= ground + ENERGY_TOLERANCE)))
        .collect();
    let p = success_prob(&set, ground, ENERGY_TOLERANCE)?;
    let interval = bayesian_bootstrap(&hits, weighted_mean, a.resamples, a.level, a.seed)?;
    let mut out = BTreeMap::<String, Value>::new();
    out.insert("version".into(), crate::VERSION.into());
    out.insert("results".into(), a.results.display().to_string().into());
    out.insert("repetitions".into(), table.energies.len().into());
    out.insert("ground_energy".into(), ground.into());
    out.insert("min_energy".into(), serde_json::to_value(set.min_energy())?);
    out.insert("success".into(), serde_json::to_value(interval)?);
    out.insert("p_d".into(), a.p_d.into());
    out.insert("t_f".into(), a.t_f.into());
    out.insert("tts".into(), serde_json::to_value(tts(p, a.p_d, a.t_f)?)?);
    out.insert(
        "tts_interval".into(),
        serde_json::to_value([tts(interval.upper, a.p_d, a.t_f)?, tts(interval.lower, a.p_d, a.t_f)?])?,
    );
    out.insert("seeds".into(), json!({ "bootstrap": a.seed }));
    if let Some(target) = a.target {
        out.insert("target".into(), target.into());
        out.insert("ttt".into(), serde_json::to_value(ttt(&set, target, a.p_d, a.t_f)?)?);
    }
    if let Some(cost) = a.cost {
        let values: Vec<f64> = match a.reward {
            Reward::Indicator => hits.clone(),
            Reward::NegEnergy => table.energies.iter().map(|e| -e).collect(),
        };
        out.insert("stopping".into(), serde_json::to_value(stopping_reward(&values, cost, None)?)?);
    }
    let distinct: BTreeSet<u64> = table.energies.iter().map(|e| e.to_bits()).collect();
    out.insert("distinct_energies".into(), distinct.len().into());
    write_output(a.out.as_deref(), &json_text(&out))
}
