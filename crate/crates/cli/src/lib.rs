//! Command implementations behind the `swarm-alloc` binary.
//!
//! Every option can also come from a `SWARM_ALLOC_*` environment variable.
//! Explicit flags win over values in the scenario file, which win over the
//! built-in defaults.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use swarm_alloc::allocation::{self, Algorithm, DEFAULT_BRUTE_FORCE_CAP};
use swarm_alloc::composition::{compose_all, ComposedEntry, ProfitMode};
use swarm_alloc::metrics::{self, RunMetrics, SweepManifest, SweepSettings};
use swarm_alloc::prelude::*;
use swarm_alloc::scenario::{generate_network, load_scenario, save_scenario};

#[derive(Debug, Parser)]
#[command(name = "swarm-alloc", version, about = "Drone swarm composition and allocation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Route every request of a scenario and write compositions.json.
    Compose(ComposeArgs),
    /// Compose, then allocate with one or all strategies.
    Allocate(AllocateArgs),
    /// Run the request-count and fleet-size sweeps.
    Sweep(SweepArgs),
    /// Generate a scenario file.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoChoice {
    Request,
    Time,
    Heuristic,
    Brute,
    All,
}

impl AlgoChoice {
    fn algorithms(self) -> Vec<Algorithm> {
        match self {
            AlgoChoice::Request => vec![Algorithm::Request],
            AlgoChoice::Time => vec![Algorithm::Time],
            AlgoChoice::Heuristic => vec![Algorithm::Heuristic],
            AlgoChoice::Brute => vec![Algorithm::Brute],
            AlgoChoice::All => Algorithm::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfitChoice {
    Rtt,
    Distance,
}

impl From<ProfitChoice> for ProfitMode {
    fn from(p: ProfitChoice) -> Self {
        match p {
            ProfitChoice::Rtt => ProfitMode::RttBased,
            ProfitChoice::Distance => ProfitMode::DistanceBased,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Requests,
    Fleet,
    Both,
}

/// Overrides applied on top of a scenario's config.
#[derive(Debug, Args)]
pub struct Overrides {
    #[arg(long, env = "SWARM_ALLOC_PROFIT_MODE", value_enum)]
    pub profit_mode: Option<ProfitChoice>,
    #[arg(long, env = "SWARM_ALLOC_PROFIT_RATE")]
    pub profit_rate: Option<f64>,
    #[arg(long, env = "SWARM_ALLOC_FLEET")]
    pub fleet: Option<u32>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ScenarioConfig) {
        if let Some(p) = self.profit_mode {
            cfg.profit_mode = p.into();
        }
        if let Some(r) = self.profit_rate {
            cfg.profit_rate = r;
        }
        if let Some(f) = self.fleet {
            cfg.fleet_size = f;
        }
    }
}

#[derive(Debug, Args)]
pub struct ComposeArgs {
    #[arg(long, env = "SWARM_ALLOC_SCENARIO")]
    pub scenario: PathBuf,
    #[arg(long, env = "SWARM_ALLOC_OUT")]
    pub out: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct AllocateArgs {
    #[arg(long, env = "SWARM_ALLOC_SCENARIO")]
    pub scenario: PathBuf,
    #[arg(long, env = "SWARM_ALLOC_OUT")]
    pub out: PathBuf,
    #[arg(long, env = "SWARM_ALLOC_ALGO", value_enum, default_value = "all")]
    pub algo: AlgoChoice,
    /// Largest accepted request count brute force will attempt.
    #[arg(long, env = "SWARM_ALLOC_CAP", default_value_t = DEFAULT_BRUTE_FORCE_CAP)]
    pub cap: usize,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Scenario whose config and network are reused; its requests are
    /// ignored. Without it a network is generated from the defaults.
    #[arg(long, env = "SWARM_ALLOC_SCENARIO")]
    pub scenario: Option<PathBuf>,
    #[arg(long, env = "SWARM_ALLOC_OUT")]
    pub out: PathBuf,
    #[arg(long, env = "SWARM_ALLOC_KIND", value_enum, default_value = "both")]
    pub kind: SweepKind,
    #[arg(long, env = "SWARM_ALLOC_ALGO", value_enum, default_value = "all")]
    pub algo: AlgoChoice,
    #[arg(long, env = "SWARM_ALLOC_SEED", value_delimiter = ',', default_value = "0")]
    pub seed: Vec<u64>,
    #[arg(long, env = "SWARM_ALLOC_CAP", default_value_t = DEFAULT_BRUTE_FORCE_CAP)]
    pub cap: usize,
    #[arg(long, env = "SWARM_ALLOC_REQUESTS", value_delimiter = ',', default_value = "10,50,110,200")]
    pub requests: Vec<usize>,
    #[arg(long, env = "SWARM_ALLOC_FLEETS", value_delimiter = ',', default_value = "5,10,15,20,25,30,35,40")]
    pub fleets: Vec<u32>,
    /// Request count used by the fleet sweep.
    #[arg(long, env = "SWARM_ALLOC_FIXED_REQUESTS", default_value_t = 50)]
    pub fixed_requests: usize,
    /// Record allocation wall time. Timed CSVs are not reproducible.
    #[arg(long, env = "SWARM_ALLOC_TIMING")]
    pub timing: bool,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Output scenario file.
    #[arg(long, env = "SWARM_ALLOC_OUT")]
    pub out: PathBuf,
    #[arg(long, env = "SWARM_ALLOC_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "SWARM_ALLOC_REQUESTS", default_value_t = 50)]
    pub requests: usize,
    #[arg(long, env = "SWARM_ALLOC_NODES")]
    pub nodes: Option<usize>,
    #[arg(long, env = "SWARM_ALLOC_WINDOWS")]
    pub windows: Option<usize>,
    #[command(flatten)]
    pub overrides: Overrides,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Compose(a) => compose_cmd(&a),
        Command::Allocate(a) => allocate_cmd(&a),
        Command::Sweep(a) => sweep_cmd(&a),
        Command::Gen(a) => gen_cmd(&a),
    }
}

fn load(path: &Path, overrides: &Overrides) -> Result<Scenario> {
    let mut sc = load_scenario(path)?;
    overrides.apply(&mut sc.config);
    sc.validate()?;
    Ok(sc)
}

fn compose_scenario(sc: &Scenario) -> Result<Vec<ComposedEntry>> {
    let cfg = &sc.config;
    Ok(compose_all(&sc.network, &cfg.drone, &cfg.composition(), cfg.source, &sc.requests)?)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("failed to write {}", path.display()))
}

fn out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("failed to create {}", dir.display()))
}

pub fn compose_cmd(a: &ComposeArgs) -> Result<()> {
    let sc = load(&a.scenario, &a.overrides)?;
    let composed = compose_scenario(&sc)?;
    out_dir(&a.out)?;
    write_json(&a.out.join("compositions.json"), &composed)?;
    let infeasible: Vec<String> = composed
        .iter()
        .filter(|c| !c.result.feasible)
        .map(|c| c.request_id.to_string())
        .collect();
    println!("composed {} requests, {} infeasible", composed.len(), infeasible.len());
    if !infeasible.is_empty() {
        println!("infeasible: {}", infeasible.join(","));
    }
    Ok(())
}

pub fn allocate_cmd(a: &AllocateArgs) -> Result<()> {
    let sc = load(&a.scenario, &a.overrides)?;
    let cfg = &sc.config;
    let grid = TimeWindowGrid::new(cfg.window_count, cfg.window_length)?;
    let composed = compose_scenario(&sc)?;
    let intake = intake(&sc.requests, &composed, &grid);
    let algorithms = a.algo.algorithms();
    if algorithms.contains(&Algorithm::Brute) && intake.accepted.len() > a.cap {
        bail!(
            "brute force refused: {} accepted requests exceed the cap of {}",
            intake.accepted.len(),
            a.cap
        );
    }
    out_dir(&a.out)?;
    write_json(&a.out.join("compositions.json"), &composed)?;
    write_json(&a.out.join("intake.json"), &json!({ "rejected": intake.rejected }))?;
    for algorithm in algorithms {
        let result = allocation::run(algorithm, &intake.accepted, cfg.fleet_size, &grid, a.cap)?;
        allocation::verify(&intake.accepted, &result)
            .with_context(|| format!("{algorithm} result failed the replay check"))?;
        write_json(&a.out.join(format!("allocation_{algorithm}.json")), &result)?;
        println!(
            "{algorithm}: served {}/{} profit {:.4}",
            result.served.len(),
            sc.requests.len(),
            result.total_profit
        );
    }
    for r in &intake.rejected {
        println!("rejected {}: {}", r.request_id, r.reason);
    }
    Ok(())
}

pub fn sweep_cmd(a: &SweepArgs) -> Result<()> {
    let (mut cfg, net) = match &a.scenario {
        Some(path) => {
            let sc = load_scenario(path)?;
            (sc.config, sc.network)
        }
        None => {
            let cfg = ScenarioConfig::default();
            let net = generate_network(&cfg)?;
            (cfg, net)
        }
    };
    a.overrides.apply(&mut cfg);
    cfg.validate()?;
    let settings = SweepSettings {
        algorithms: a.algo.algorithms(),
        seeds: a.seed.clone(),
        brute_cap: a.cap,
        measure_time: a.timing,
    };
    out_dir(&a.out)?;
    if matches!(a.kind, SweepKind::Requests | SweepKind::Both) {
        let rows = metrics::sweep_requests(&net, &cfg, &settings, &a.requests)?;
        let xs = a.requests.iter().map(|&c| c as u64).collect();
        write_sweep(&a.out, "requests", &rows, &SweepManifest::new("requests", &cfg, &settings, xs))?;
    }
    if matches!(a.kind, SweepKind::Fleet | SweepKind::Both) {
        let rows = metrics::sweep_fleet(&net, &cfg, &settings, &a.fleets, a.fixed_requests)?;
        let xs = a.fleets.iter().map(|&f| u64::from(f)).collect();
        write_sweep(&a.out, "fleet", &rows, &SweepManifest::new("fleet", &cfg, &settings, xs))?;
    }
    Ok(())
}

fn write_sweep(dir: &Path, kind: &str, rows: &[RunMetrics], manifest: &SweepManifest) -> Result<()> {
    let csv = dir.join(format!("sweep_{kind}.csv"));
    let mut buf = Vec::new();
    metrics::write_csv(&mut buf, rows)?;
    fs::write(&csv, buf).with_context(|| format!("failed to write {}", csv.display()))?;
    write_json(&dir.join(format!("sweep_{kind}.json")), manifest)?;
    println!("{kind} sweep: {} rows -> {}", rows.len(), csv.display());
    Ok(())
}

pub fn gen_cmd(a: &GenArgs) -> Result<()> {
    let mut cfg = ScenarioConfig { seed: a.seed, request_count: a.requests, ..ScenarioConfig::default() };
    if let Some(n) = a.nodes {
        cfg.node_count = n;
    }
    if let Some(t) = a.windows {
        cfg.window_count = t;
        cfg.window_length = swarm_alloc::scenario::SECONDS_PER_DAY / t as f64;
    }
    a.overrides.apply(&mut cfg);
    let sc = Scenario::generate(cfg)?;
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        out_dir(parent)?;
    }
    save_scenario(&a.out, &sc)?;
    println!(
        "wrote {} ({} nodes, {} requests)",
        a.out.display(),
        sc.network.node_count(),
        sc.requests.len()
    );
    Ok(())
}
