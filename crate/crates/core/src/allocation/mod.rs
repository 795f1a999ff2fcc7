//! Allocation of the provider's fleet to composed requests over the day's
//! time windows.
//!
//! Capacity is counted per window: a drone serves at most one request per
//! window, and a request whose round trip is longer than a window books its
//! drones in the following window as well. Four strategies are provided:
//!
//! - [`request_greedy`]: most profitable request first.
//! - [`time_greedy`]: earliest window first, then most profitable.
//! - [`heuristic`]: first-fit over every rotation of the intake order,
//!   keeping the most profitable rotation.
//! - [`brute_force`]: exhaustive search over all request subsets.
//!
//! All orderings break ties by ascending request id so results are
//! reproducible.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::composition::ComposedEntry;
use crate::scenario::{Request, RequestId};

mod brute;
mod greedy;
mod heuristic;

pub use brute::{brute_force, DEFAULT_BRUTE_FORCE_CAP};
pub use greedy::{request_greedy, time_greedy};
pub use heuristic::{heuristic, heuristic_with, HeuristicOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeWindowGrid {
    pub window_count: usize,
    /// Seconds.
    pub window_length: f64,
}

impl TimeWindowGrid {
    pub fn new(window_count: usize, window_length: f64) -> Result<Self, AllocationError> {
        if window_count < 1 {
            return Err(AllocationError::Grid("window_count must be at least 1".into()));
        }
        if !(window_length.is_finite() && window_length > 0.0) {
            return Err(AllocationError::Grid(format!(
                "window_length must be positive, got {window_length}"
            )));
        }
        Ok(TimeWindowGrid { window_count, window_length })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum AllocationError {
    #[error("invalid time window grid: {0}")]
    Grid(String),
    #[error("request {id} rejected: {reason}")]
    Intake { id: RequestId, reason: String },
    #[error("brute force refused: {count} requests exceed the cap of {cap}")]
    BruteForceCap { count: usize, cap: usize },
    #[error("replay check failed: {0}")]
    Replay(String),
    #[error("unknown algorithm {0:?}, expected one of request, time, heuristic, brute")]
    UnknownAlgorithm(String),
}

/// A feasible request ready for scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComposedRequest {
    pub request_id: RequestId,
    pub window_index: usize,
    pub drones_needed: u32,
    pub rtt: f64,
    pub profit: f64,
    /// The round trip runs into the next window.
    pub spans_next: bool,
}

impl ComposedRequest {
    /// Checks the request fits the grid: its round trip may run into the
    /// next window but not beyond, and never past the last window.
    pub fn new(
        request_id: RequestId,
        window_index: usize,
        drones_needed: u32,
        rtt: f64,
        profit: f64,
        grid: &TimeWindowGrid,
    ) -> Result<Self, AllocationError> {
        let reject = |reason: String| Err(AllocationError::Intake { id: request_id, reason });
        if window_index >= grid.window_count {
            return reject(format!("window {window_index} outside 0..{}", grid.window_count));
        }
        if drones_needed < 1 {
            return reject("needs no drones".into());
        }
        if !(rtt.is_finite() && rtt > 0.0) {
            return reject(format!("round-trip time {rtt} is not positive"));
        }
        if !(profit.is_finite() && profit >= 0.0) {
            return reject(format!("profit {profit} is negative"));
        }
        if rtt > 2.0 * grid.window_length {
            return reject(format!(
                "round-trip time {rtt:.1} s exceeds two windows ({:.1} s)",
                2.0 * grid.window_length
            ));
        }
        let spans_next = rtt > grid.window_length;
        if spans_next && window_index + 1 >= grid.window_count {
            return reject(format!("round-trip time {rtt:.1} s runs past the last window"));
        }
        Ok(ComposedRequest { request_id, window_index, drones_needed, rtt, profit, spans_next })
    }

    /// Windows this request occupies.
    pub fn windows(&self) -> impl Iterator<Item = usize> {
        let w = self.window_index;
        std::iter::once(w).chain(self.spans_next.then_some(w + 1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub request_id: RequestId,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Intake {
    pub accepted: Vec<ComposedRequest>,
    pub rejected: Vec<Rejection>,
}

/// Pairs requests with their compositions and keeps the schedulable ones,
/// in request order. Infeasible compositions and trips that do not fit the
/// grid are rejected with a reason.
pub fn intake(requests: &[Request], composed: &[ComposedEntry], grid: &TimeWindowGrid) -> Intake {
    let by_id: BTreeMap<RequestId, &ComposedEntry> =
        composed.iter().map(|c| (c.request_id, c)).collect();
    let mut out = Intake::default();
    let mut seen = BTreeSet::new();
    for r in requests {
        let reject = |reason: String| Rejection { request_id: r.id, reason };
        if !seen.insert(r.id) {
            out.rejected.push(reject("duplicate request id".into()));
            continue;
        }
        let Some(entry) = by_id.get(&r.id) else {
            out.rejected.push(reject("no composition".into()));
            continue;
        };
        let c = &entry.result;
        if !c.feasible {
            out.rejected.push(reject(format!(
                "infeasible composition: {}",
                c.failure.as_deref().unwrap_or("unknown")
            )));
            continue;
        }
        match ComposedRequest::new(r.id, r.window, r.drones_needed(), c.rtt, c.profit, grid) {
            Ok(cr) => out.accepted.push(cr),
            Err(AllocationError::Intake { reason, .. }) => out.rejected.push(reject(reason)),
            Err(e) => out.rejected.push(reject(e.to_string())),
        }
    }
    out
}

/// Drones booked in each window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    #[serde(rename = "occupancy")]
    used_drones: Vec<u32>,
    fleet_size: u32,
}

impl Schedule {
    pub fn new(fleet_size: u32, grid: &TimeWindowGrid) -> Self {
        Schedule { used_drones: vec![0; grid.window_count], fleet_size }
    }

    pub fn used_drones(&self) -> &[u32] {
        &self.used_drones
    }

    pub fn fleet_size(&self) -> u32 {
        self.fleet_size
    }

    fn fits(&self, w: usize, drones: u32) -> bool {
        self.used_drones
            .get(w)
            .is_some_and(|&u| u + drones <= self.fleet_size)
    }

    /// Books `r` if every window it touches has room; otherwise leaves the
    /// schedule unchanged. A spanning request that does not fit the next
    /// window is dropped, not retried as a single-window trip.
    pub fn try_allocate(&mut self, r: &ComposedRequest) -> bool {
        if !r.windows().all(|w| self.fits(w, r.drones_needed)) {
            return false;
        }
        for w in r.windows() {
            self.used_drones[w] += r.drones_needed;
        }
        true
    }

    /// Sum of booked drone-windows.
    pub fn total_occupancy(&self) -> u64 {
        self.used_drones.iter().map(|&u| u64::from(u)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Request,
    Time,
    Heuristic,
    Brute,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] =
        [Algorithm::Request, Algorithm::Time, Algorithm::Heuristic, Algorithm::Brute];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Request => "request",
            Algorithm::Time => "time",
            Algorithm::Heuristic => "heuristic",
            Algorithm::Brute => "brute",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = AllocationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| AllocationError::UnknownAlgorithm(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationResult {
    pub algorithm: Algorithm,
    /// Served request ids in the order they were booked.
    pub served: Vec<RequestId>,
    pub total_profit: f64,
    /// Drones dispatched over all served requests.
    pub drones_utilized: u32,
    #[serde(flatten)]
    pub schedule: Schedule,
}

impl AllocationResult {
    pub(crate) fn empty(algorithm: Algorithm, fleet_size: u32, grid: &TimeWindowGrid) -> Self {
        AllocationResult {
            algorithm,
            served: Vec::new(),
            total_profit: 0.0,
            drones_utilized: 0,
            schedule: Schedule::new(fleet_size, grid),
        }
    }

    /// Books `r` into this result if it fits. Leaves `total_profit` to
    /// [`id_ordered_profit`] so equal sets always report equal totals.
    pub(crate) fn offer(&mut self, r: &ComposedRequest) -> bool {
        let ok = self.schedule.try_allocate(r);
        if ok {
            self.served.push(r.request_id);
            self.drones_utilized += r.drones_needed;
        }
        ok
    }
}

/// Sum of profits in ascending id order, independent of booking order.
pub(crate) fn id_ordered_profit(mut booked: Vec<(RequestId, f64)>) -> f64 {
    booked.sort_by_key(|b| b.0);
    booked.into_iter().fold(0.0, |acc, b| acc + b.1)
}

/// First-fit over `order`, shared by both greedy strategies and every
/// heuristic rotation.
pub(crate) fn first_fit<'a>(
    algorithm: Algorithm,
    order: impl IntoIterator<Item = &'a ComposedRequest>,
    fleet_size: u32,
    grid: &TimeWindowGrid,
) -> AllocationResult {
    let mut res = AllocationResult::empty(algorithm, fleet_size, grid);
    let mut booked = Vec::new();
    for r in order {
        if res.offer(r) {
            booked.push((r.request_id, r.profit));
        }
    }
    res.total_profit = id_ordered_profit(booked);
    res
}

/// Rebuilds occupancy from the served set and checks it against the
/// result: known unique ids, no window over capacity, matching totals.
pub fn verify(requests: &[ComposedRequest], result: &AllocationResult) -> Result<(), AllocationError> {
    let fail = |m: String| Err(AllocationError::Replay(m));
    let by_id: BTreeMap<RequestId, &ComposedRequest> =
        requests.iter().map(|r| (r.request_id, r)).collect();
    let fleet = result.schedule.fleet_size;
    let mut occ = vec![0u32; result.schedule.used_drones.len()];
    let mut seen = BTreeSet::new();
    let mut booked = Vec::new();
    let mut drones = 0u32;
    for id in &result.served {
        if !seen.insert(*id) {
            return fail(format!("request {id} served twice"));
        }
        let Some(r) = by_id.get(id) else {
            return fail(format!("served request {id} is not among the inputs"));
        };
        for w in r.windows() {
            let Some(slot) = occ.get_mut(w) else {
                return fail(format!("request {id} books window {w} outside the grid"));
            };
            *slot += r.drones_needed;
        }
        booked.push((r.request_id, r.profit));
        drones += r.drones_needed;
    }
    if let Some((w, &u)) = occ.iter().enumerate().find(|&(_, &u)| u > fleet) {
        return fail(format!("window {w} books {u} drones, fleet has {fleet}"));
    }
    if occ != result.schedule.used_drones {
        return fail(format!(
            "recomputed occupancy {occ:?} differs from reported {:?}",
            result.schedule.used_drones
        ));
    }
    if drones != result.drones_utilized {
        return fail(format!("drones_utilized {} but served sum is {drones}", result.drones_utilized));
    }
    let profit = id_ordered_profit(booked);
    let tol = 1e-9 * profit.abs().max(1.0);
    if (profit - result.total_profit).abs() > tol {
        return fail(format!("total_profit {} but served sum is {profit}", result.total_profit));
    }
    Ok(())
}

/// Runs one strategy. `brute_cap` only applies to [`Algorithm::Brute`].
pub fn run(
    algorithm: Algorithm,
    requests: &[ComposedRequest],
    fleet_size: u32,
    grid: &TimeWindowGrid,
    brute_cap: usize,
) -> Result<AllocationResult, AllocationError> {
    Ok(match algorithm {
        Algorithm::Request => request_greedy(requests, fleet_size, grid),
        Algorithm::Time => time_greedy(requests, fleet_size, grid),
        Algorithm::Heuristic => heuristic(requests, fleet_size, grid),
        Algorithm::Brute => brute_force(requests, fleet_size, grid, brute_cap)?,
    })
}
