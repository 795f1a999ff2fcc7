//! Requests, scenario configuration, seeded instance generation and the
//! scenario JSON file.
//!
//! All randomness comes from ChaCha8 (`rand_chacha` 0.3) seeded with
//! `seed_from_u64(seed)`. Stream 0 drives request generation, stream 1
//! drives network generation. Integer draws only: weights are drawn in
//! hundredths of a kilogram. Files record this as `"rng": "chacha8-v1"`.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::composition::{CompositionConfig, ProfitMode};
use crate::drone::DroneSpec;
use crate::network::{random_pads, NetworkError, NetworkRepr, NodeId, NodeRepr, SkywayNetwork};

pub const SCENARIO_VERSION: u32 = 1;
pub const RNG_ALGORITHM: &str = "chacha8-v1";
pub const SECONDS_PER_DAY: f64 = 86_400.0;

const REQUEST_STREAM: u64 = 0;
const NETWORK_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RequestId(pub u32);

impl fmt::Display for RequestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A consumer's delivery request: one drone per package, delivered to a
/// single destination within one time window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Request {
    pub id: RequestId,
    #[serde(rename = "dest")]
    pub destination: NodeId,
    /// Package weights in kg.
    #[serde(rename = "weights")]
    pub packages: Vec<f64>,
    pub window: usize,
}

impl Request {
    pub fn drones_needed(&self) -> u32 {
        self.packages.len() as u32
    }
}

fn default_max_packages() -> u32 {
    5
}
fn default_max_weight() -> f64 {
    1.4
}
fn default_pad_range() -> (u32, u32) {
    (1, 4)
}
fn default_profit_rate() -> f64 {
    0.01
}
fn default_node_count() -> usize {
    129
}
fn default_area_side() -> f64 {
    6000.0
}
fn default_neighbors() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    #[serde(default)]
    pub request_count: usize,
    pub window_count: usize,
    /// Seconds per window.
    pub window_length: f64,
    #[serde(default = "default_max_packages")]
    pub max_packages_per_request: u32,
    #[serde(default = "default_max_weight")]
    pub max_package_weight: f64,
    #[serde(default = "default_pad_range")]
    pub pad_range: (u32, u32),
    pub fleet_size: u32,
    pub source: NodeId,
    #[serde(default = "default_profit_rate")]
    pub profit_rate: f64,
    #[serde(default)]
    pub profit_mode: ProfitMode,
    #[serde(default)]
    pub drone: DroneSpec,
    /// Generated networks only: node count, square side in meters, and the
    /// number of nearest neighbors each node links to.
    #[serde(default = "default_node_count")]
    pub node_count: usize,
    #[serde(default = "default_area_side")]
    pub area_side: f64,
    #[serde(default = "default_neighbors")]
    pub neighbors: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            seed: 0,
            request_count: 50,
            window_count: 7,
            window_length: SECONDS_PER_DAY / 7.0,
            max_packages_per_request: default_max_packages(),
            max_package_weight: default_max_weight(),
            pad_range: default_pad_range(),
            fleet_size: 30,
            source: NodeId(0),
            profit_rate: default_profit_rate(),
            profit_mode: ProfitMode::default(),
            drone: DroneSpec::default(),
            node_count: default_node_count(),
            area_side: default_area_side(),
            neighbors: default_neighbors(),
        }
    }
}

impl ScenarioConfig {
    pub fn composition(&self) -> CompositionConfig {
        CompositionConfig {
            max_swarm_size: self.max_packages_per_request,
            fleet_size: self.fleet_size,
            profit_rate: self.profit_rate,
            profit_mode: self.profit_mode,
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let bad = |m: String| Err(ScenarioError::Invalid(m));
        if self.window_count < 1 {
            return bad("window_count must be at least 1".into());
        }
        if !(self.window_length.is_finite() && self.window_length > 0.0) {
            return bad(format!("window_length must be positive, got {}", self.window_length));
        }
        if self.max_packages_per_request < 1 {
            return bad("max_packages_per_request must be at least 1".into());
        }
        if !(self.max_package_weight >= 0.01 && self.max_package_weight.is_finite()) {
            return bad(format!(
                "max_package_weight must be at least 0.01 kg, got {}",
                self.max_package_weight
            ));
        }
        if self.pad_range.0 < 1 || self.pad_range.1 < self.pad_range.0 {
            return bad(format!("pad_range {:?} must satisfy 1 <= min <= max", self.pad_range));
        }
        if self.fleet_size < 1 {
            return bad("fleet_size must be at least 1".into());
        }
        self.drone
            .validate()
            .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("failed to access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("unsupported scenario version {0}, expected {SCENARIO_VERSION}")]
    Version(u32),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Draws `cfg.request_count` requests from the seeded request stream.
///
/// Destinations are uniform over nodes other than `source`, package counts
/// uniform in `1..=max_packages_per_request`, weights uniform over
/// `0.01..=max_package_weight` in 0.01 kg steps, windows uniform.
/// A shorter count yields a prefix of a longer one for the same seed.
pub fn generate_requests(
    cfg: &ScenarioConfig,
    net: &SkywayNetwork,
    source: NodeId,
) -> Result<Vec<Request>, ScenarioError> {
    if cfg.request_count < 1 {
        return Err(ScenarioError::Invalid("request_count must be at least 1".into()));
    }
    cfg.validate()?;
    net.node(source)?;
    let n = net.node_count();
    if n < 2 {
        return Err(ScenarioError::Invalid("network needs a node besides the source".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(REQUEST_STREAM);
    let max_centi = (cfg.max_package_weight * 100.0).round() as u32;
    Ok((0..cfg.request_count)
        .map(|i| {
            let mut dest = rng.gen_range(0..n - 1);
            if dest >= source.0 {
                dest += 1;
            }
            let count = rng.gen_range(1..=cfg.max_packages_per_request);
            let packages = (0..count)
                .map(|_| f64::from(rng.gen_range(1..=max_centi)) / 100.0)
                .collect();
            let window = rng.gen_range(0..cfg.window_count);
            Request { id: RequestId(i as u32), destination: NodeId(dest), packages, window }
        })
        .collect())
}

/// Random connected skyway: nodes uniform on a square, linked by a
/// Euclidean minimum spanning tree plus each node's nearest neighbors.
/// Segment lengths are whole meters.
pub fn generate_network(cfg: &ScenarioConfig) -> Result<SkywayNetwork, ScenarioError> {
    cfg.validate()?;
    let n = cfg.node_count;
    if n < 2 {
        return Err(ScenarioError::Invalid("node_count must be at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(NETWORK_STREAM);
    let side = cfg.area_side.max(1.0).round() as i64;
    let pos: Vec<(i64, i64)> = (0..n)
        .map(|_| (rng.gen_range(0..=side), rng.gen_range(0..=side)))
        .collect();
    let dist = |a: usize, b: usize| {
        let (dx, dy) = ((pos[a].0 - pos[b].0) as f64, (pos[a].1 - pos[b].1) as f64);
        dx.hypot(dy).round().max(1.0)
    };

    let mut edges = BTreeSet::new();
    // Prim over the complete graph
    let mut in_tree = vec![false; n];
    let mut best = vec![(f64::INFINITY, 0usize); n];
    in_tree[0] = true;
    for v in 1..n {
        best[v] = (dist(0, v), 0);
    }
    for _ in 1..n {
        let (v, _) = (0..n)
            .filter(|&v| !in_tree[v])
            .map(|v| (v, best[v]))
            .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then(a.0.cmp(&b.0)))
            .expect("nodes remain");
        in_tree[v] = true;
        let p = best[v].1;
        edges.insert((p.min(v), p.max(v)));
        for u in 0..n {
            if !in_tree[u] {
                let d = dist(v, u);
                if d < best[u].0 {
                    best[u] = (d, v);
                }
            }
        }
    }
    for a in 0..n {
        let mut others: Vec<usize> = (0..n).filter(|&b| b != a).collect();
        others.sort_by(|&x, &y| dist(a, x).total_cmp(&dist(a, y)).then(x.cmp(&y)));
        for &b in others.iter().take(cfg.neighbors) {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    // pads draw from their own seed so the layout is independent of them
    let pads = random_pads(n, cfg.seed.wrapping_add(0x9e37_79b9_7f4a_7c15), cfg.pad_range)?;
    let edges = edges.into_iter().map(|(a, b)| (a, b, dist(a, b))).collect();
    Ok(SkywayNetwork::new(pads, edges)?)
}

/// A complete experiment instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub network: SkywayNetwork,
    pub requests: Vec<Request>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    version: u32,
    #[serde(default = "default_rng")]
    rng: String,
    config: ScenarioConfig,
    nodes: Vec<NodeRepr>,
    edges: Vec<(usize, usize, f64)>,
    #[serde(default)]
    requests: Vec<Request>,
}

fn default_rng() -> String {
    RNG_ALGORITHM.to_string()
}

impl Scenario {
    /// Generates network and requests from `config.seed`.
    pub fn generate(config: ScenarioConfig) -> Result<Self, ScenarioError> {
        let network = generate_network(&config)?;
        let requests = generate_requests(&config, &network, config.source)?;
        let s = Scenario { config, network, requests };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.config.validate()?;
        let cfg = &self.config;
        self.network.node(cfg.source)?;
        let mut ids = BTreeSet::new();
        for r in &self.requests {
            let bad = |m: String| Err(ScenarioError::Invalid(format!("request {}: {m}", r.id)));
            if !ids.insert(r.id) {
                return bad("duplicate id".into());
            }
            if !self.network.contains(r.destination) {
                return bad(format!("destination {} is not a network node", r.destination));
            }
            if r.destination == cfg.source {
                return bad("destination equals the source".into());
            }
            let n = r.packages.len();
            if n < 1 || n > cfg.max_packages_per_request as usize {
                return bad(format!(
                    "{n} packages, expected 1..={}",
                    cfg.max_packages_per_request
                ));
            }
            if let Some(w) = r
                .packages
                .iter()
                .find(|&&w| !(w > 0.0 && w <= cfg.max_package_weight))
            {
                return bad(format!(
                    "package weight {w} outside (0, {}]",
                    cfg.max_package_weight
                ));
            }
            if r.window >= cfg.window_count {
                return bad(format!("window {} outside 0..{}", r.window, cfg.window_count));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let repr = NetworkRepr::from(self.network.clone());
        let file = ScenarioFile {
            version: SCENARIO_VERSION,
            rng: RNG_ALGORITHM.to_string(),
            config: self.config.clone(),
            nodes: repr.nodes,
            edges: repr.edges,
            requests: self.requests.clone(),
        };
        serde_json::to_string_pretty(&file).expect("scenario serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ScenarioError::Schema { path, message: e.into_inner().to_string() }
        })?;
        if file.version != SCENARIO_VERSION {
            return Err(ScenarioError::Version(file.version));
        }
        if file.rng != RNG_ALGORITHM {
            return Err(ScenarioError::Invalid(format!(
                "unknown rng {:?}, expected {RNG_ALGORITHM:?}",
                file.rng
            )));
        }
        let network = SkywayNetwork::try_from(NetworkRepr { nodes: file.nodes, edges: file.edges })?;
        let s = Scenario { config: file.config, network, requests: file.requests };
        s.validate()?;
        Ok(s)
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Scenario::from_json(&text)
}

pub fn save_scenario(path: &Path, scenario: &Scenario) -> Result<(), ScenarioError> {
    fs::write(path, scenario.to_json()).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })
}
