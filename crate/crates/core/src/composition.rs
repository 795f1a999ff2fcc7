//! Congestion-aware composition of a single request into a round trip.
//!
//! The swarm leaves the source fully charged. At every node it first checks
//! whether each drone can cover the remaining shortest-path distance on its
//! current battery; if so it flies there without stopping. Otherwise it hops
//! to the neighbor that minimizes travel time plus node time (longest charge
//! plus pad queueing), recharges to full and checks again. Pads at every
//! node are discounted by the worst-case presence of the provider's other
//! drones (see [`available_pads`]).
//!
//! Payloads are released at the destination and the return leg is composed
//! the same way. Both terminals charge the swarm to full and that node time
//! is part of the round-trip time.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::drone::{DroneError, DroneSpec, DroneState, NodeTime};
use crate::network::{NetworkError, Node, NodeId, SkywayNetwork};
use crate::scenario::{Request, RequestId};

pub const METERS_PER_MILE: f64 = 1609.344;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfitMode {
    /// drones × round-trip seconds × rate
    #[default]
    #[serde(alias = "rtt")]
    RttBased,
    /// drones × flown miles × rate
    #[serde(alias = "distance")]
    DistanceBased,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositionConfig {
    /// Largest swarm a request may need (maximum packages per request).
    pub max_swarm_size: u32,
    /// Drones owned by the provider.
    pub fleet_size: u32,
    pub profit_rate: f64,
    #[serde(default)]
    pub profit_mode: ProfitMode,
}

impl Default for CompositionConfig {
    fn default() -> Self {
        CompositionConfig {
            max_swarm_size: 5,
            fleet_size: 30,
            profit_rate: 0.01,
            profit_mode: ProfitMode::RttBased,
        }
    }
}

impl CompositionConfig {
    pub fn validate(&self) -> Result<(), CompositionError> {
        if self.max_swarm_size < 1 {
            return Err(CompositionError::Config("max_swarm_size must be at least 1".into()));
        }
        if self.fleet_size < self.max_swarm_size {
            return Err(CompositionError::Config(format!(
                "fleet_size {} is smaller than max_swarm_size {}",
                self.fleet_size, self.max_swarm_size
            )));
        }
        if !(self.profit_rate.is_finite() && self.profit_rate > 0.0) {
            return Err(CompositionError::Config(format!(
                "profit_rate must be positive, got {}",
                self.profit_rate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum CompositionError {
    #[error("invalid composition config: {0}")]
    Config(String),
    #[error("request {id}: {message}")]
    Request { id: RequestId, message: String },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Drone(#[from] DroneError),
}

/// Pads a swarm of `swarm_size` drones can count on at `node` when the rest
/// of the fleet is assumed to be sitting there too, capped at one
/// maximum-size swarm. A result below one means the node is unusable.
pub fn available_pads(node: &Node, cfg: &CompositionConfig, swarm_size: u32) -> i64 {
    let others = i64::from(cfg.fleet_size) - i64::from(swarm_size);
    let m = i64::from(cfg.max_swarm_size);
    let total = i64::from(node.pad_count);
    if others < m {
        total - others
    } else {
        total - m
    }
}

/// One node on a composed leg. The first stop of a leg is its start node
/// with a zero segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stop {
    pub node: NodeId,
    /// Length of the segment flown to reach this node.
    pub segment_distance: f64,
    pub travel_time: f64,
    pub charge_time: f64,
    pub wait_time: f64,
}

impl Stop {
    fn start(node: NodeId) -> Self {
        Stop { node, segment_distance: 0.0, travel_time: 0.0, charge_time: 0.0, wait_time: 0.0 }
    }

    pub fn node_time(&self) -> f64 {
        self.charge_time + self.wait_time
    }

    pub fn is_recharge(&self) -> bool {
        self.node_time() > 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionResult {
    pub feasible: bool,
    /// Worst-case round-trip time in seconds, zero when infeasible.
    pub rtt: f64,
    pub profit: f64,
    pub swarm_size: u32,
    /// Total flown distance in meters over both legs.
    pub distance: f64,
    pub outbound_path: Vec<Stop>,
    pub return_path: Vec<Stop>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl CompositionResult {
    pub fn outbound_nodes(&self) -> Vec<NodeId> {
        self.outbound_path.iter().map(|s| s.node).collect()
    }

    pub fn return_nodes(&self) -> Vec<NodeId> {
        self.return_path.iter().map(|s| s.node).collect()
    }

    /// Sum of flight times over both legs.
    pub fn flight_time(&self) -> f64 {
        self.outbound_path
            .iter()
            .chain(&self.return_path)
            .fold(0.0, |acc, s| acc + s.travel_time)
    }
}

struct Composer<'a> {
    net: &'a SkywayNetwork,
    spec: &'a DroneSpec,
    cfg: &'a CompositionConfig,
    swarm_size: u32,
    drones: Vec<DroneState>,
    rtt: f64,
    distance: f64,
}

/// Flight on the current battery is allowed up to this relative slack.
const ENERGY_EPS: f64 = 1e-9;

impl Composer<'_> {
    fn pads_at(&self, node: NodeId) -> i64 {
        available_pads(&self.net.nodes()[node.0], self.cfg, self.swarm_size)
    }

    fn can_fly(&self, distance: f64) -> Result<Option<Vec<f64>>, DroneError> {
        let slack = ENERGY_EPS * self.spec.battery_capacity;
        let mut needs = Vec::with_capacity(self.drones.len());
        for d in &self.drones {
            let need = self.spec.energy_for(distance, d.payload)?;
            if need > d.battery_level + slack {
                return Ok(None);
            }
            needs.push(need);
        }
        Ok(Some(needs))
    }

    fn deficits_after(&self, spent: &[f64]) -> Vec<f64> {
        self.drones
            .iter()
            .zip(spent)
            .map(|(d, e)| (self.spec.battery_capacity - (d.battery_level - e)).max(0.0))
            .collect()
    }

    fn recharge_full(&mut self) {
        for d in &mut self.drones {
            d.battery_level = self.spec.battery_capacity;
        }
    }

    /// Charges every drone to full at `node`. Terminal nodes cannot be
    /// skipped, so an exhausted pad budget still leaves one pad to queue on.
    fn terminal_charge(&mut self, node: NodeId) -> Result<NodeTime, DroneError> {
        let deficits: Vec<f64> = self
            .drones
            .iter()
            .map(|d| self.spec.battery_capacity - d.battery_level)
            .collect();
        let nt = self.spec.node_service_time(&deficits, self.pads_at(node).max(1))?;
        self.rtt += nt.total();
        self.recharge_full();
        Ok(nt)
    }

    /// Composes one leg ending at `target`; `stops` must already hold the
    /// start node. Returns `Ok(Err(reason))` when the swarm gets stuck.
    fn leg(&mut self, target: NodeId, stops: &mut Vec<Stop>) -> Result<Result<(), String>, CompositionError> {
        let field = self.net.distances_to(target)?;
        let mut cur = stops.last().expect("leg starts at a node").node;
        while cur != target {
            let remaining = field[cur.0];
            if let Some(needs) = self.can_fly(remaining)? {
                let (_, path) = self.net.path_along(&field, cur, target)?;
                for hop in path.windows(2) {
                    let seg = self.net.edge_distance(hop[0], hop[1]).expect("path follows edges");
                    stops.push(Stop {
                        node: hop[1],
                        segment_distance: seg,
                        travel_time: self.spec.travel_time(seg),
                        charge_time: 0.0,
                        wait_time: 0.0,
                    });
                }
                for (d, need) in self.drones.iter_mut().zip(needs) {
                    d.battery_level = (d.battery_level - need).max(0.0);
                }
                self.rtt += self.spec.travel_time(remaining);
                self.distance += remaining;
                break;
            }

            let mut best: Option<(f64, NodeId, f64, NodeTime)> = None;
            for &(next, seg) in self.net.neighbors(cur)? {
                if field[next.0] >= remaining {
                    continue;
                }
                let Some(spent) = self.can_fly(seg)? else {
                    continue;
                };
                let pads = self.pads_at(next);
                if pads < 1 {
                    continue;
                }
                let nt = self.spec.node_service_time(&self.deficits_after(&spent), pads)?;
                let score = self.spec.travel_time(seg) + nt.total();
                // neighbors come sorted by id, so the first minimum wins ties
                if best.as_ref().is_none_or(|b| score < b.0) {
                    best = Some((score, next, seg, nt));
                }
            }
            let Some((score, next, seg, nt)) = best else {
                return Ok(Err(format!(
                    "stuck at node {cur}: no neighbor closer to {target} is reachable with usable pads"
                )));
            };
            stops.push(Stop {
                node: next,
                segment_distance: seg,
                travel_time: self.spec.travel_time(seg),
                charge_time: nt.charge_time,
                wait_time: nt.wait_time,
            });
            self.rtt += score;
            self.distance += seg;
            self.recharge_full();
            cur = next;
        }

        let nt = self.terminal_charge(target)?;
        let last = stops.last_mut().expect("leg has stops");
        last.charge_time = nt.charge_time;
        last.wait_time = nt.wait_time;
        Ok(Ok(()))
    }
}

fn validate_request(
    net: &SkywayNetwork,
    spec: &DroneSpec,
    cfg: &CompositionConfig,
    source: NodeId,
    request: &Request,
) -> Result<(), CompositionError> {
    let bad = |message: String| CompositionError::Request { id: request.id, message };
    net.node(source)?;
    net.node(request.destination)?;
    if request.destination == source {
        return Err(bad(format!("destination {} equals the source", source)));
    }
    let n = request.packages.len();
    if n == 0 || n > cfg.max_swarm_size as usize {
        return Err(bad(format!(
            "{n} packages, expected between 1 and {}",
            cfg.max_swarm_size
        )));
    }
    if let Some(w) = request
        .packages
        .iter()
        .find(|&&w| !(w > 0.0 && w <= spec.max_payload))
    {
        return Err(bad(format!(
            "package weight {w} kg outside (0, {}] kg",
            spec.max_payload
        )));
    }
    Ok(())
}

/// Composes the round trip for `request` from `source` and prices it.
///
/// Malformed inputs are errors. A well-formed request that cannot be routed
/// under the pad constraints yields `feasible == false`.
pub fn compose(
    net: &SkywayNetwork,
    spec: &DroneSpec,
    cfg: &CompositionConfig,
    source: NodeId,
    request: &Request,
) -> Result<CompositionResult, CompositionError> {
    spec.validate()?;
    cfg.validate()?;
    validate_request(net, spec, cfg, source, request)?;

    let swarm_size = request.packages.len() as u32;
    let drones = request
        .packages
        .iter()
        .map(|&w| DroneState::fully_charged(spec, w))
        .collect::<Result<Vec<_>, _>>()?;
    let mut c = Composer { net, spec, cfg, swarm_size, drones, rtt: 0.0, distance: 0.0 };

    let mut outbound = vec![Stop::start(source)];
    let mut inbound = Vec::new();
    let mut outcome = c.leg(request.destination, &mut outbound)?;
    if outcome.is_ok() {
        for d in &mut c.drones {
            d.payload = 0.0;
        }
        inbound.push(Stop::start(request.destination));
        outcome = c.leg(source, &mut inbound)?;
    }

    Ok(match outcome {
        Ok(()) => {
            let profit = match cfg.profit_mode {
                ProfitMode::RttBased => f64::from(swarm_size) * c.rtt * cfg.profit_rate,
                ProfitMode::DistanceBased => {
                    f64::from(swarm_size) * (c.distance / METERS_PER_MILE) * cfg.profit_rate
                }
            };
            CompositionResult {
                feasible: true,
                rtt: c.rtt,
                profit,
                swarm_size,
                distance: c.distance,
                outbound_path: outbound,
                return_path: inbound,
                failure: None,
            }
        }
        Err(reason) => CompositionResult {
            feasible: false,
            rtt: 0.0,
            profit: 0.0,
            swarm_size,
            distance: c.distance,
            outbound_path: outbound,
            return_path: inbound,
            failure: Some(reason),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComposedEntry {
    pub request_id: RequestId,
    #[serde(flatten)]
    pub result: CompositionResult,
}

/// Composes every request. Any malformed request aborts the batch.
pub fn compose_all(
    net: &SkywayNetwork,
    spec: &DroneSpec,
    cfg: &CompositionConfig,
    source: NodeId,
    requests: &[Request],
) -> Result<Vec<ComposedEntry>, CompositionError> {
    requests
        .iter()
        .map(|r| {
            compose(net, spec, cfg, source, r).map(|result| ComposedEntry { request_id: r.id, result })
        })
        .collect()
}
