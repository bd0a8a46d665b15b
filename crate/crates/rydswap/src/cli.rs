//! `rydswap` command line. Frequencies on the command line and in files are
//! in MHz; the core works in rad/μs.

use std::{
    ffi::OsString,
    io::Write,
    path::{Path, PathBuf},
    str::FromStr,
};

use clap::{Args, Parser, Subcommand};
use rydswap_core::{
    dynamics::{
        evolve, evolve_computational,
        hamiltonian::{full_dim, FULL_LABELS},
        Channel, Trajectory,
    },
    gate::{decay_estimate, gate_map, TargetChoice},
    mhz,
    presets::{self, PresetId},
    scan::{Axis, AxisKind, Grid, ScanSpec},
    BlockadeModel, IntegratorConfig, WaveformSet, C64,
};
use serde::Serialize;
use serde_json::json;

use crate::{
    error::CliError,
    format::{self, BlockadeFile, IntegratorFile, OutcomeJson, SearchSpecFile, WaveformFile},
    manifest::{self, ManifestBuilder, RunManifest},
    parallel,
};

#[derive(Debug, Parser)]
#[command(
    name = "rydswap",
    version,
    about = "Rydberg-blockade SWAP gate simulation, scoring, scans and pulse search",
    after_help = "All frequencies (blockade, detuning offsets, Fourier coefficients) are in MHz; \
                  they are multiplied by 2π internally. Times are in μs."
)]
pub struct Cli {
    /// Relative tolerance of the adaptive integrator [default: 1e-11]
    #[arg(long, global = true)]
    pub tol_rel: Option<f64>,
    /// Absolute tolerance of the adaptive integrator [default: 1e-13]
    #[arg(long, global = true)]
    pub tol_abs: Option<f64>,
    /// Seed for randomized subcommands [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for scans and searches (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List or export the built-in waveform sets
    Presets {
        #[command(subcommand)]
        action: PresetsAction,
    },
    /// Write populations and phases of one initial state over the gate
    Simulate(SimulateArgs),
    /// Score the gate against a SWAP target and print the outcome as JSON
    Fidelity(FidelityArgs),
    /// Evaluate the gate error on a 1D or 2D grid of perturbations
    Scan(ScanArgs),
    /// Search Fourier coefficients for a SWAP waveform
    Optimize(OptimizeArgs),
}

#[derive(Debug, Subcommand)]
pub enum PresetsAction {
    /// One line per preset: id, SWAP format, blockade model
    List,
    /// Waveform JSON of one preset
    Dump {
        id: String,
        /// Output file (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct Source {
    /// Waveform JSON file
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub waveform: Option<PathBuf>,
    /// Built-in waveform set (see `presets list`)
    #[arg(long)]
    pub preset: Option<String>,
    /// `ideal` or `B_MHz[,deltaq_MHz]`; defaults to the source's own model, else ideal
    #[arg(long)]
    pub blockade: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: Source,
    /// 00, 01, 10, 11, singlet, or triplet:<k>
    #[arg(long, default_value = "00")]
    pub initial: String,
    /// Number of sample times from 0 to τ inclusive
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    /// Output CSV (stdout if omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FidelityArgs {
    #[command(flatten)]
    pub source: Source,
    /// standard, opposite or auto; defaults to the source's own format, else auto
    #[arg(long)]
    pub target: Option<String>,
    /// Rydberg decay rate γ_r in 1/μs; adds decay estimates to the output
    #[arg(long)]
    pub gamma_r: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub source: Source,
    /// standard, opposite or auto; defaults to the source's own format, else auto
    #[arg(long)]
    pub target: Option<String>,
    /// Axis name (repeat for a 2D grid): rabi_ratio[_0|_1],
    /// detuning_offset[_0|_1|_antisym], blockade_b (alias B)
    #[arg(long = "axis", required = true)]
    pub axes: Vec<String>,
    /// min:max:points per axis, in MHz for detuning and blockade axes
    #[arg(long = "range")]
    pub ranges: Vec<String>,
    /// Output CSV; the manifest is written next to it
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Search settings JSON (amplitude-only defaults if omitted)
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Best waveform JSON; the manifest is written next to it
    #[arg(long)]
    pub out: PathBuf,
    /// Best-so-far history CSV
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Override the per-restart evaluation budget
    #[arg(long)]
    pub budget: Option<usize>,
    /// Override the number of restarts
    #[arg(long)]
    pub restarts: Option<usize>,
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = parallel::with_threads(cli.threads, || dispatch(&cli))
        .map_err(|e| CliError::input(format!("cannot start thread pool: {e}")))
        .and_then(|r| r);
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Presets { action } => cmd_presets(action),
        Command::Simulate(a) => cmd_simulate(cli, a),
        Command::Fidelity(a) => cmd_fidelity(cli, a),
        Command::Scan(a) => cmd_scan(cli, a),
        Command::Optimize(a) => cmd_optimize(cli, a),
    }
}

fn integrator(cli: &Cli) -> Result<IntegratorConfig, CliError> {
    let d = IntegratorConfig::default();
    let cfg = IntegratorConfig::with_tolerances(
        cli.tol_rel.unwrap_or(d.rel_tol),
        cli.tol_abs.unwrap_or(d.abs_tol),
    );
    cfg.validate()?;
    Ok(cfg)
}

fn parse_preset(id: &str) -> Result<PresetId, CliError> {
    PresetId::from_str(id).map_err(|_| {
        let known: Vec<&str> = PresetId::ALL.iter().map(|p| p.as_str()).collect();
        CliError::input(format!(
            "unknown preset `{id}` (known: {})",
            known.join(", ")
        ))
    })
}

/// Waveforms plus the blockade and target they were designed for.
struct Resolved {
    waveforms: WaveformSet,
    blockade: BlockadeModel,
    target: Option<TargetChoice>,
    origin: serde_json::Value,
}

fn resolve_source(src: &Source, m: &mut ManifestBuilder) -> Result<Resolved, CliError> {
    let mut resolved = match (&src.preset, &src.waveform) {
        (Some(id), _) => {
            let p = presets::lookup(parse_preset(id)?);
            Resolved {
                waveforms: p.waveforms,
                blockade: p.blockade,
                target: Some(TargetChoice::Fixed(
                    rydswap_core::TargetGate::from_kind(p.target)
                        .expect("preset targets are fixed"),
                )),
                origin: json!({ "preset": p.id.as_str() }),
            }
        }
        (None, Some(path)) => {
            let text = m.read_input(path)?;
            let file: WaveformFile = format::parse_json(&text, &path.display().to_string())?;
            Resolved {
                waveforms: file.to_set()?,
                blockade: file.blockade_model()?.unwrap_or(BlockadeModel::Ideal),
                target: file.target_choice()?,
                origin: json!({ "waveform": path.display().to_string() }),
            }
        }
        (None, None) => return Err(CliError::input("either --waveform or --preset is required")),
    };
    if let Some(b) = &src.blockade {
        resolved.blockade = format::parse_blockade(b)?;
    }
    Ok(resolved)
}

fn resolve_target(arg: &Option<String>, source: &Resolved) -> Result<TargetChoice, CliError> {
    match arg {
        Some(t) => format::parse_target(t),
        None => Ok(source.target.clone().unwrap_or(TargetChoice::Auto)),
    }
}

fn source_config(r: &Resolved, cfg: &IntegratorConfig) -> serde_json::Value {
    json!({
        "source": r.origin,
        "waveforms": WaveformFile::from_set(&r.waveforms),
        "blockade": BlockadeFile::from_model(&r.blockade),
        "integrator": IntegratorFile::from_config(cfg),
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => format::write_text(path, text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::input(format!("cannot write to stdout: {e}"))),
    }
}

fn cmd_presets(action: &PresetsAction) -> Result<(), CliError> {
    match action {
        PresetsAction::List => {
            for p in presets::all() {
                let blockade = match p.blockade {
                    BlockadeModel::Ideal => "ideal".to_string(),
                    BlockadeModel::Finite { b, .. } => format!("B={}MHz", format::to_mhz(b)),
                };
                println!(
                    "{:<22} target={:<9} blockade={:<12} phase_convention={}",
                    p.id.as_str(),
                    p.target.as_str(),
                    blockade,
                    p.waveforms.phase_convention.as_str()
                );
            }
            Ok(())
        }
        PresetsAction::Dump { id, out } => {
            let p = presets::lookup(parse_preset(id)?);
            emit(out, &format::to_json_string(&WaveformFile::from_preset(&p)))
        }
    }
}

/// Initial state of `simulate`, with the basis its output is expressed in.
enum Initial {
    Computational([C64; 4]),
    Channel(Channel, usize),
}

fn parse_initial(s: &str, bm: &BlockadeModel) -> Result<Initial, CliError> {
    let one = C64::new(1.0, 0.0);
    let mut amps = [C64::new(0.0, 0.0); 4];
    let k = match s {
        "00" => 0,
        "01" => 1,
        "10" => 2,
        "11" => 3,
        "singlet" => return Ok(Initial::Channel(Channel::Singlet, 0)),
        _ => {
            let bad = || {
                CliError::input(format!(
                    "invalid initial state `{s}`: expected 00, 01, 10, 11, singlet or triplet:<k>"
                ))
            };
            let k: usize = s
                .strip_prefix("triplet:")
                .ok_or_else(bad)?
                .parse()
                .map_err(|_| bad())?;
            let dim = Channel::Triplet.dim(bm);
            if k >= dim {
                return Err(CliError::input(format!(
                    "triplet index {k} out of range for dimension {dim}"
                )));
            }
            return Ok(Initial::Channel(Channel::Triplet, k));
        }
    };
    amps[k] = one;
    Ok(Initial::Computational(amps))
}

pub fn sample_times(tau: f64, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|k| {
            if k + 1 == n {
                tau
            } else {
                tau * k as f64 / last
            }
        })
        .collect()
}

fn cmd_simulate(cli: &Cli, a: &SimulateArgs) -> Result<(), CliError> {
    let mut m = ManifestBuilder::start("simulate");
    let cfg = integrator(cli)?;
    let src = resolve_source(&a.source, &mut m)?;
    if a.samples < 2 {
        return Err(CliError::input("--samples must be at least 2"));
    }
    let times = sample_times(src.waveforms.tau, a.samples);
    let (labels, tr): (Vec<&str>, Trajectory) = match parse_initial(&a.initial, &src.blockade)? {
        Initial::Computational(amps) => (
            FULL_LABELS[..full_dim(&src.blockade)].to_vec(),
            evolve_computational(&src.waveforms, &src.blockade, amps, &cfg, &times)?,
        ),
        Initial::Channel(channel, k) => {
            let mut psi0 = vec![C64::new(0.0, 0.0); channel.dim(&src.blockade)];
            psi0[k] = C64::new(1.0, 0.0);
            (
                channel.labels(&src.blockade).to_vec(),
                evolve(&src.waveforms, &src.blockade, channel, &psi0, &cfg, &times)?,
            )
        }
    };
    let mut buf = Vec::new();
    format::write_trajectory_csv(&mut buf, &labels, &tr)?;
    emit(&a.out, std::str::from_utf8(&buf).expect("CSV is UTF-8"))?;
    if let Some(path) = &a.out {
        let mut config = source_config(&src, &cfg);
        config["initial"] = json!(a.initial);
        config["samples"] = json!(a.samples);
        manifest::write_sidecar(path, &m.finish(config))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    #[serde(flatten)]
    body: T,
    manifest: RunManifest,
}

fn cmd_fidelity(cli: &Cli, a: &FidelityArgs) -> Result<(), CliError> {
    let mut m = ManifestBuilder::start("fidelity");
    let cfg = integrator(cli)?;
    let src = resolve_source(&a.source, &mut m)?;
    let target = resolve_target(&a.target, &src)?;
    let outcome = gate_map(&src.waveforms, &src.blockade, &cfg)?.score_choice(&target);
    let decay = a
        .gamma_r
        .map(|g| decay_estimate(&outcome, g, src.waveforms.tau))
        .transpose()?;
    let mut config = source_config(&src, &cfg);
    config["target"] = json!(format::target_label(&target));
    if let Some(g) = a.gamma_r {
        config["gamma_r_per_us"] = json!(g);
    }
    let report = Report {
        body: OutcomeJson::new(&outcome, decay),
        manifest: m.finish(config),
    };
    print!("{}", format::to_json_string(&report));
    Ok(())
}

/// Axis name, with the CLI alias `B` for the blockade axis.
fn parse_axis(name: &str) -> Result<AxisKind, CliError> {
    match name {
        "B" | "blockade" => Ok(AxisKind::Blockade),
        _ => AxisKind::parse(name).ok_or_else(|| CliError::input(format!("unknown axis `{name}`"))),
    }
}

/// Default range in CLI units.
fn default_range(kind: AxisKind) -> (f64, f64, usize) {
    match kind {
        AxisKind::RabiRatio(_) => (0.95, 1.05, 21),
        AxisKind::DetuningOffset(_) => (-2.0, 2.0, 21),
        AxisKind::Blockade => (50.0, 500.0, 46),
    }
}

fn build_axes(names: &[String], ranges: &[String]) -> Result<Vec<Axis>, CliError> {
    if !ranges.is_empty() && ranges.len() != names.len() {
        return Err(CliError::input(
            "give one --range per --axis, or none for the defaults",
        ));
    }
    names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let kind = parse_axis(name)?;
            let (lo, hi, n) = match ranges.get(i) {
                Some(r) => format::parse_range(r)?,
                None => default_range(kind),
            };
            let to_core = |x: f64| match kind {
                AxisKind::RabiRatio(_) => x,
                AxisKind::DetuningOffset(_) | AxisKind::Blockade => mhz(x),
            };
            Ok(Axis {
                kind,
                grid: Grid::new(to_core(lo), to_core(hi), n),
            })
        })
        .collect()
}

fn cmd_scan(cli: &Cli, a: &ScanArgs) -> Result<(), CliError> {
    let mut m = ManifestBuilder::start("scan");
    let cfg = integrator(cli)?;
    let src = resolve_source(&a.source, &mut m)?;
    let target = resolve_target(&a.target, &src)?;
    let axes = build_axes(&a.axes, &a.ranges)?;
    let spec = ScanSpec {
        waveforms: src.waveforms.clone(),
        blockade: src.blockade,
        target: target.clone(),
        axes: axes.clone(),
        integrator: cfg,
    };
    let result = parallel::run_scan(&spec)?;
    if result.failed > 0 {
        eprintln!(
            "warning: {} of {} grid points failed to integrate (NaN cells)",
            result.failed,
            result.points.len()
        );
    }
    let mut buf = Vec::new();
    format::write_scan_csv(&mut buf, &result)?;
    format::write_text(&a.out, std::str::from_utf8(&buf).expect("CSV is UTF-8"))?;

    let mut config = source_config(&src, &cfg);
    config["target"] = json!(format::target_label(&target));
    config["axes"] = axes
        .iter()
        .map(|ax| {
            let (column, conv) = format::axis_column(ax);
            json!({
                "axis": ax.kind.name(),
                "column": column,
                "min": conv(ax.grid.min),
                "max": conv(ax.grid.max),
                "points": ax.grid.points,
            })
        })
        .collect();
    config["failed_points"] = json!(result.failed);
    manifest::write_sidecar(&a.out, &m.finish(config))
}

#[derive(Serialize)]
struct HistoryRow {
    evaluation: usize,
    restart: usize,
    best_error: f64,
}

fn write_history(
    path: &Path,
    history: &[rydswap_core::optimize::HistoryEntry],
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
    for h in history {
        w.serialize(HistoryRow {
            evaluation: h.evaluation,
            restart: h.restart,
            best_error: h.best_objective,
        })
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
    }
    w.flush()
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

fn cmd_optimize(cli: &Cli, a: &OptimizeArgs) -> Result<(), CliError> {
    let mut m = ManifestBuilder::start("optimize");
    let mut file: SearchSpecFile = match &a.spec {
        Some(path) => {
            let text = m.read_input(path)?;
            format::parse_json(&text, &path.display().to_string())?
        }
        None => SearchSpecFile::default(),
    };
    if let Some(seed) = cli.seed {
        file.rng_seed = Some(seed);
    }
    if let Some(b) = a.budget {
        file.budget = b;
    }
    if let Some(r) = a.restarts {
        file.restarts = r;
    }
    if cli.tol_rel.is_some() || cli.tol_abs.is_some() {
        file.final_integrator = IntegratorFile::from_config(&integrator(cli)?);
    }
    let spec = file.to_spec(0)?;
    m.seed(spec.rng_seed);
    let result = parallel::search(&spec)?;

    let mut best = WaveformFile::from_set(&result.best_waveform);
    best.blockade = Some(BlockadeFile::from_model(&spec.blockade));
    best.target = Some(result.resolved_target.as_str().to_string());
    format::write_text(&a.out, &format::to_json_string(&best))?;
    if let Some(log) = &a.log {
        write_history(log, &result.history)?;
    }

    let config = json!({
        "spec": SearchSpecFile::from_spec(&spec),
        "result": {
            "best_error": result.best_error,
            "best_objective": result.best_objective,
            "best_restart": result.best_restart,
            "resolved_target": result.resolved_target.as_str(),
            "evaluations_used": result.evaluations_used,
            "budget_exhausted": result.budget_exhausted,
            "restart_objectives": result.restarts.iter().map(|r| r.best_objective).collect::<Vec<_>>(),
        },
    });
    manifest::write_sidecar(&a.out, &m.finish(config))?;
    eprintln!(
        "best gate error {:.3e} ({}) from restart {} after {} evaluations",
        result.best_error,
        result.resolved_target.as_str(),
        result.best_restart,
        result.evaluations_used
    );
    Ok(())
}
