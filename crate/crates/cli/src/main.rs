//! `gazeguide`: demo export, scenario validation, headless simulation, trace analysis and
//! the session server.
//!
//! Exit codes: 0 on success, 2 when validation reports findings, 1 on any other error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gazeguide_core::engine::EngineOptions;
use gazeguide_core::geometry::{ColliderSpec, IndexedMesh};
use gazeguide_core::mediation::ModeKind;
use gazeguide_core::scenario::{
    make_viktoria_demo, read_scenario, scenario_id_from_path, validate_scenario, Exhibit, Finding, ScenarioError,
    Violation,
};
use gazeguide_core::sim::{
    orbit_generator, run_agent, run_headless, scripted_generator, Explorer, HeadlessRun, OrbitSpec, RandomAgent,
    RandomAgentConfig, RunReport, Target, ViewBook, Waypoint,
};
use gazeguide_core::trace::{
    derive_rois, fixation_detect, hit_points, roi_stats, Fixation, GazeTrace, RoiStats, FIXATION_MIN_DURATION,
    FIXATION_RADIUS,
};
use gazeguide_service::{ScenarioRegistry, ServerConfig};

#[derive(Debug, Parser)]
#[command(name = "gazeguide", version, about = "Gaze-driven museum mediation engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the bundled demo scenario and its meshes.
    Demo {
        #[arg(long, default_value = "demo")]
        out: PathBuf,
    },
    /// Check a scenario file and its meshes.
    Validate {
        scenario: PathBuf,
        /// Print findings as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run a session headless and print its report.
    Simulate(SimulateArgs),
    /// Fixations, per-ROI totals and derived ROIs of a recorded trace.
    Analyze(AnalyzeArgs),
    /// Run the session server.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Generator {
    /// Visit every ROI in guided order, holding long enough to hear its unit.
    Scripted,
    /// Walk around the statue looking at its axis.
    Orbit,
    /// Closed loop: follow cues, otherwise pick the next unseen enabled ROI.
    Explorer,
    /// Closed loop: random glances, sometimes at the cue.
    Random,
}

#[derive(Debug, clap::Args)]
struct SimulateArgs {
    #[arg(long)]
    mode: ModeKind,
    /// Scenario file; the built-in demo when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Replay a recorded trace.
    #[arg(long, conflicts_with = "gen")]
    trace: Option<PathBuf>,
    /// Generate the gaze instead (default: scripted).
    #[arg(long)]
    gen: Option<Generator>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seconds of gaze for orbit, or the time limit for closed-loop generators.
    #[arg(long)]
    duration: Option<f64>,
    /// Angular noise (rad) added to scripted and orbit poses.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Run this many sessions with seeds `seed..seed+batch`, in parallel.
    #[arg(long, default_value_t = 1)]
    batch: u64,
    /// Write trace, events, directives and report here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct AnalyzeArgs {
    #[arg(long)]
    trace: PathBuf,
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long, default_value_t = FIXATION_RADIUS)]
    radius: f64,
    #[arg(long, default_value_t = FIXATION_MIN_DURATION)]
    min_duration: f64,
    /// Fixations closer than this join one derived ROI (m).
    #[arg(long, default_value_t = 0.25)]
    cluster_radius: f64,
    /// Seconds of fixation a derived ROI needs.
    #[arg(long, default_value_t = 1.0)]
    min_total: f64,
    /// Print the per-ROI totals as CSV instead of the JSON summary.
    #[arg(long)]
    csv: bool,
    /// Write fixations.json, roi_stats.csv and derived_rois.json here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// Load every `*.scenario.json` in this directory next to the built-in demo.
    #[arg(long)]
    scenario_dir: Option<PathBuf>,
    /// Serve the UI bundle from this directory.
    #[arg(long = "static")]
    static_dir: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Demo { out } => {
            let path = make_viktoria_demo().write_to(&out).with_context(|| format!("writing {}", out.display()))?;
            println!("{}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { scenario, json } => validate(&scenario, json),
        Command::Simulate(args) => simulate(args),
        Command::Analyze(args) => analyze(args),
        Command::Serve(args) => serve(args),
    }
}

#[derive(Serialize)]
#[serde(untagged)]
enum Problem {
    Violation(Violation),
    Finding(Finding),
}

fn validate(path: &Path, json: bool) -> Result<ExitCode> {
    let problems: Vec<Problem> = match read_scenario(path) {
        Ok((file, world)) => validate_scenario(&file, &world).into_iter().map(Problem::Finding).collect(),
        Err(ScenarioError::Invalid(v)) => v.into_iter().map(Problem::Violation).collect(),
        Err(e) => return Err(e).with_context(|| format!("loading {}", path.display())),
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&problems)?);
    } else if problems.is_empty() {
        println!("{}: ok", path.display());
    } else {
        for p in &problems {
            match p {
                Problem::Violation(v) => println!("{}: {v}", path.display()),
                Problem::Finding(f) => println!("{}: {f}", path.display()),
            }
        }
    }
    Ok(if problems.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn load_exhibit(path: Option<&Path>) -> Result<Arc<Exhibit>> {
    let ex = match path {
        Some(p) => Exhibit::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => Exhibit::viktoria(),
    };
    Ok(Arc::new(ex))
}

/// One pass through every ROI in guided order. The first hold also covers the introduction and
/// the last one the conclusion, which locks selection while it plays.
fn scripted_tour(ex: &Exhibit) -> Vec<Waypoint> {
    let cfg = ex.selection_config();
    let select = cfg.hover_duration + cfg.dwell_duration + 1.0;
    let duration = |u| ex.unit(u).map_or(0.0, |u| u.duration);
    let script = ex.script();
    let mut tour: Vec<Waypoint> = script
        .guided_order
        .iter()
        .map(|&roi| Waypoint { target: Target::Roi(roi), hold: select + script.unit_of(roi).map_or(0.0, duration), transit: 1.0 })
        .collect();
    if let Some(first) = tour.first_mut() {
        first.hold += duration(script.intro);
    }
    if let Some(last) = tour.last_mut() {
        last.hold += duration(script.conclusion) + 1.0;
    }
    tour
}

struct SimOutput {
    trace: GazeTrace,
    run: HeadlessRun,
}

fn simulate_one(ex: &Arc<Exhibit>, args: &SimulateArgs, seed: u64) -> Result<SimOutput> {
    let opts = EngineOptions::default();
    if let Some(path) = &args.trace {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let trace = GazeTrace::from_jsonl(&text).with_context(|| format!("parsing {}", path.display()))?;
        let run = run_headless(ex, args.mode, &trace, opts)?;
        return Ok(SimOutput { trace, run });
    }
    let limit = args.duration.unwrap_or(1200.0);
    let agent_run = |agent: &mut dyn gazeguide_core::sim::GazeAgent| -> Result<SimOutput> {
        let r = run_agent(ex, args.mode, agent, limit, opts)?;
        Ok(SimOutput { trace: r.trace, run: r.run })
    };
    let mut trace = match args.gen.unwrap_or(Generator::Scripted) {
        Generator::Scripted => scripted_generator(ex, &scripted_tour(ex), args.noise, seed)?,
        Generator::Orbit => {
            let spec = OrbitSpec { duration: args.duration.unwrap_or(20.0), noise_sigma: args.noise, ..OrbitSpec::default() };
            orbit_generator(&spec, ex.tick_hz(), seed)?
        }
        Generator::Explorer => return agent_run(&mut Explorer::new(ViewBook::new(ex)?, ex.script().clone())),
        Generator::Random => {
            let mut agent = RandomAgent::new(ViewBook::new(ex)?, RandomAgentConfig::default(), seed, ex.tick_hz());
            return agent_run(&mut agent);
        }
    };
    trace.scenario = Some(ex.id.clone());
    trace.mode = Some(args.mode);
    let run = run_headless(ex, args.mode, &trace, opts)?;
    Ok(SimOutput { trace, run })
}

fn write_run(dir: &Path, ex: &Exhibit, mode: ModeKind, out: &SimOutput) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let write = |name: &str, text: String| {
        let p = dir.join(name);
        std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))
    };
    write("trace.jsonl", out.trace.to_jsonl())?;
    write("events.jsonl", out.run.log.to_jsonl())?;
    write("directives.jsonl", out.run.directives.to_jsonl(&ex.id, mode, ex.tick_hz()))?;
    write("report.json", serde_json::to_string_pretty(&out.run.report)? + "\n")?;
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<ExitCode> {
    if args.batch == 0 {
        bail!("--batch must be at least 1");
    }
    if args.trace.is_some() && args.batch > 1 {
        bail!("--batch needs a generator, not a recorded trace");
    }
    let ex = load_exhibit(args.scenario.as_deref())?;
    let seeds: Vec<u64> = (0..args.batch).map(|i| args.seed.wrapping_add(i)).collect();
    let (exr, argsr) = (&ex, &args);
    let outputs: Vec<Result<SimOutput>> = std::thread::scope(|s| {
        let handles: Vec<_> = seeds.iter().map(|&seed| s.spawn(move || simulate_one(exr, argsr, seed))).collect();
        handles.into_iter().map(|h| h.join().expect("simulation thread panicked")).collect()
    });
    let outputs = outputs.into_iter().collect::<Result<Vec<_>>>()?;
    if let Some(dir) = &args.out_dir {
        for (seed, out) in seeds.iter().zip(&outputs) {
            let d = if outputs.len() == 1 { dir.clone() } else { dir.join(format!("seed-{seed}")) };
            write_run(&d, &ex, args.mode, out)?;
        }
    }
    let reports: Vec<&RunReport> = outputs.iter().map(|o| &o.run.report).collect();
    let text = if reports.len() == 1 { serde_json::to_string_pretty(reports[0])? } else { serde_json::to_string_pretty(&reports)? };
    println!("{text}");
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct Analysis<'a> {
    scenario: &'a str,
    duration: f64,
    samples: usize,
    fixations: &'a [Fixation],
    roi_stats: &'a RoiStats,
    derived_rois: &'a [ColliderSpec],
}

fn analyze(args: AnalyzeArgs) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&args.trace).with_context(|| format!("reading {}", args.trace.display()))?;
    let trace = GazeTrace::from_jsonl(&text).with_context(|| format!("parsing {}", args.trace.display()))?;
    let (id, world, colliders) = match &args.scenario {
        Some(p) => {
            // Highlights are irrelevant here, so broken ones should not stop an analysis.
            let (file, world) = read_scenario(p).with_context(|| format!("loading {}", p.display()))?;
            let colliders = file.colliders.iter().map(|r| r.collider()).collect::<Vec<_>>();
            (scenario_id_from_path(p), IndexedMesh::new(world), colliders)
        }
        None => {
            let ex = Exhibit::viktoria();
            (ex.id, ex.world, ex.colliders)
        }
    };
    let hits = hit_points(&trace, &world);
    let fixations = fixation_detect(&hits, args.radius, args.min_duration);
    let stats = roi_stats(&trace.samples, &world, &colliders);
    let derived = derive_rois(&fixations, args.cluster_radius, args.min_total);
    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        std::fs::write(dir.join("fixations.json"), serde_json::to_string_pretty(&fixations)? + "\n")?;
        std::fs::write(dir.join("roi_stats.csv"), stats.to_csv())?;
        std::fs::write(dir.join("derived_rois.json"), serde_json::to_string_pretty(&derived)? + "\n")?;
    }
    if args.csv {
        print!("{}", stats.to_csv());
    } else {
        let a = Analysis {
            scenario: &id,
            duration: trace.duration(),
            samples: trace.samples.len(),
            fixations: &fixations,
            roi_stats: &stats,
            derived_rois: &derived,
        };
        println!("{}", serde_json::to_string_pretty(&a)?);
    }
    Ok(ExitCode::SUCCESS)
}

fn serve(args: ServeArgs) -> Result<ExitCode> {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    let mut registry = ScenarioRegistry::builtin();
    if let Some(dir) = &args.scenario_dir {
        let ids = registry.load_dir(dir)?;
        eprintln!("loaded {} scenario(s) from {}", ids.len(), dir.display());
    }
    let config = ServerConfig { registry: Arc::new(registry), static_dir: args.static_dir };
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((args.host.as_str(), args.port))
            .await
            .with_context(|| format!("binding {}:{}", args.host, args.port))?;
        let addr = listener.local_addr()?;
        println!("listening on http://{addr}");
        use std::io::Write;
        std::io::stdout().flush()?;
        gazeguide_service::serve(listener, config).await?;
        Ok(ExitCode::SUCCESS)
    })
}
