//! Evaluation sweeps over request counts and fleet sizes.
//!
//! Each request is composed once per (seed, fleet size) and the result is
//! shared by every algorithm. Wall time covers the allocation call only and
//! is recorded only on request, so untimed sweeps are reproducible byte for
//! byte.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::allocation::{self, Algorithm, AllocationError, AllocationResult, TimeWindowGrid};
use crate::composition::{compose_all, ComposedEntry, CompositionError};
use crate::network::SkywayNetwork;
use crate::scenario::{generate_requests, Request, ScenarioConfig, ScenarioError, RNG_ALGORITHM};

pub const CSV_HEADER: &str =
    "algorithm,request_count,fleet_size,seed,total_profit,fulfillment_pct,utilization_pct,wall_time_s";

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Composition(#[from] CompositionError),
    #[error("{algorithm} at request_count={request_count} fleet_size={fleet_size} seed={seed}: {source}")]
    Allocation {
        algorithm: Algorithm,
        request_count: usize,
        fleet_size: u32,
        seed: u64,
        #[source]
        source: AllocationError,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Measured {
    pub total_profit: f64,
    pub fulfillment_pct: f64,
    pub utilization_pct: f64,
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetrics {
    pub algorithm: Algorithm,
    pub request_count: usize,
    pub fleet_size: u32,
    pub seed: u64,
    /// `None` when brute force was skipped because of its cap.
    pub measured: Option<Measured>,
}

/// `100 * served / requests`; an empty day counts as fully served.
pub fn fulfillment_pct(served: usize, requests: usize) -> f64 {
    if requests == 0 {
        100.0
    } else {
        100.0 * served as f64 / requests as f64
    }
}

/// Booked drone-windows as a share of `fleet_size * window_count`.
pub fn utilization_pct(result: &AllocationResult) -> f64 {
    let s = &result.schedule;
    let capacity = f64::from(s.fleet_size()) * s.used_drones().len() as f64;
    if capacity == 0.0 {
        0.0
    } else {
        100.0 * s.total_occupancy() as f64 / capacity
    }
}

#[derive(Debug, Clone)]
pub struct SweepSettings {
    pub algorithms: Vec<Algorithm>,
    pub seeds: Vec<u64>,
    pub brute_cap: usize,
    pub measure_time: bool,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            algorithms: Algorithm::ALL.to_vec(),
            seeds: vec![0],
            brute_cap: allocation::DEFAULT_BRUTE_FORCE_CAP,
            measure_time: false,
        }
    }
}

struct Cell<'a> {
    requests: &'a [Request],
    composed: &'a [ComposedEntry],
    fleet_size: u32,
    seed: u64,
}

fn evaluate(
    cell: Cell<'_>,
    grid: &TimeWindowGrid,
    settings: &SweepSettings,
    rows: &mut Vec<RunMetrics>,
) -> Result<(), MetricsError> {
    let intake = allocation::intake(cell.requests, cell.composed, grid);
    let count = cell.requests.len();
    for &algorithm in &settings.algorithms {
        let mut row = RunMetrics {
            algorithm,
            request_count: count,
            fleet_size: cell.fleet_size,
            seed: cell.seed,
            measured: None,
        };
        if algorithm == Algorithm::Brute && intake.accepted.len() > settings.brute_cap {
            rows.push(row);
            continue;
        }
        let wrap = |source| MetricsError::Allocation {
            algorithm,
            request_count: count,
            fleet_size: cell.fleet_size,
            seed: cell.seed,
            source,
        };
        let started = Instant::now();
        let result = allocation::run(algorithm, &intake.accepted, cell.fleet_size, grid, settings.brute_cap)
            .map_err(wrap)?;
        let elapsed = started.elapsed().as_secs_f64();
        allocation::verify(&intake.accepted, &result).map_err(wrap)?;
        row.measured = Some(Measured {
            total_profit: result.total_profit,
            fulfillment_pct: fulfillment_pct(result.served.len(), count),
            utilization_pct: utilization_pct(&result),
            wall_time_s: settings.measure_time.then_some(elapsed),
        });
        rows.push(row);
    }
    Ok(())
}

fn grid_of(cfg: &ScenarioConfig) -> Result<TimeWindowGrid, MetricsError> {
    TimeWindowGrid::new(cfg.window_count, cfg.window_length).map_err(|e| {
        MetricsError::Scenario(ScenarioError::Invalid(e.to_string()))
    })
}

fn requests_for(cfg: &ScenarioConfig, net: &SkywayNetwork, seed: u64, count: usize) -> Result<Vec<Request>, MetricsError> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let c = ScenarioConfig { seed, request_count: count, ..cfg.clone() };
    Ok(generate_requests(&c, net, cfg.source)?)
}

fn sort_rows(rows: &mut [RunMetrics]) {
    rows.sort_by(|a, b| {
        (a.algorithm, a.request_count, a.fleet_size, a.seed)
            .cmp(&(b.algorithm, b.request_count, b.fleet_size, b.seed))
    });
}

/// One row per (algorithm, request count, seed) at `cfg.fleet_size`.
/// Smaller counts reuse a prefix of the same seed's request stream.
pub fn sweep_requests(
    net: &SkywayNetwork,
    cfg: &ScenarioConfig,
    settings: &SweepSettings,
    request_counts: &[usize],
) -> Result<Vec<RunMetrics>, MetricsError> {
    let grid = grid_of(cfg)?;
    let comp = cfg.composition();
    let max = request_counts.iter().copied().max().unwrap_or(0);
    let mut rows = Vec::new();
    for &seed in &settings.seeds {
        let requests = requests_for(cfg, net, seed, max)?;
        let composed = compose_all(net, &cfg.drone, &comp, cfg.source, &requests)?;
        for &count in request_counts {
            let cell = Cell {
                requests: &requests[..count],
                composed: &composed[..count],
                fleet_size: cfg.fleet_size,
                seed,
            };
            evaluate(cell, &grid, settings, &mut rows)?;
        }
    }
    sort_rows(&mut rows);
    Ok(rows)
}

/// One row per (algorithm, fleet size, seed) with `fixed_requests`
/// requests. Composition is redone per fleet size because pad congestion
/// depends on it.
pub fn sweep_fleet(
    net: &SkywayNetwork,
    cfg: &ScenarioConfig,
    settings: &SweepSettings,
    fleet_sizes: &[u32],
    fixed_requests: usize,
) -> Result<Vec<RunMetrics>, MetricsError> {
    let grid = grid_of(cfg)?;
    let mut rows = Vec::new();
    for &seed in &settings.seeds {
        let requests = requests_for(cfg, net, seed, fixed_requests)?;
        for &fleet_size in fleet_sizes {
            let comp = ScenarioConfig { fleet_size, ..cfg.clone() }.composition();
            let composed = compose_all(net, &cfg.drone, &comp, cfg.source, &requests)?;
            let cell = Cell { requests: &requests, composed: &composed, fleet_size, seed };
            evaluate(cell, &grid, settings, &mut rows)?;
        }
    }
    sort_rows(&mut rows);
    Ok(rows)
}

/// Writes rows under [`CSV_HEADER`]. Skipped brute-force rows carry
/// `skipped (cap)` in the profit column; untimed rows leave
/// `wall_time_s` empty.
pub fn write_csv<W: Write>(mut out: W, rows: &[RunMetrics]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        write!(out, "{},{},{},{},", r.algorithm, r.request_count, r.fleet_size, r.seed)?;
        match &r.measured {
            None => writeln!(out, "skipped (cap),,,")?,
            Some(m) => {
                write!(out, "{},{},{},", m.total_profit, m.fulfillment_pct, m.utilization_pct)?;
                match m.wall_time_s {
                    Some(t) => writeln!(out, "{t}")?,
                    None => writeln!(out)?,
                }
            }
        }
    }
    Ok(())
}

/// Seed-averaged metric per x value for one algorithm, skipping rows
/// without measurements.
pub fn seed_average(
    rows: &[RunMetrics],
    algorithm: Algorithm,
    x: impl Fn(&RunMetrics) -> u64,
    metric: impl Fn(&Measured) -> f64,
) -> BTreeMap<u64, f64> {
    let mut acc: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.algorithm == algorithm) {
        if let Some(m) = &r.measured {
            let e = acc.entry(x(r)).or_default();
            e.0 += metric(m);
            e.1 += 1;
        }
    }
    acc.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect()
}

/// Companion record written next to each sweep CSV.
#[derive(Debug, Clone, Serialize)]
pub struct SweepManifest {
    pub kind: String,
    pub rng: &'static str,
    pub config: ScenarioConfig,
    pub algorithms: Vec<Algorithm>,
    pub seeds: Vec<u64>,
    pub x_values: Vec<u64>,
    pub brute_cap: usize,
    pub timed: bool,
}

impl SweepManifest {
    pub fn new(kind: &str, cfg: &ScenarioConfig, settings: &SweepSettings, x_values: Vec<u64>) -> Self {
        SweepManifest {
            kind: kind.to_string(),
            rng: RNG_ALGORITHM,
            config: cfg.clone(),
            algorithms: settings.algorithms.clone(),
            seeds: settings.seeds.clone(),
            x_values,
            brute_cap: settings.brute_cap,
            timed: settings.measure_time,
        }
    }
}
