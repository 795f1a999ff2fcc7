//! Provider-centric allocation of drone swarms to delivery requests.
//!
//! A provider owns a finite fleet of identical drones at one source node of
//! a skyway network. Each request asks for one drone per package, delivered
//! to a destination within one of the day's time windows. The crate works in
//! two stages:
//!
//! 1. [`composition`] routes each request out and back under battery and
//!    recharging-pad constraints and yields its worst-case round-trip time
//!    and profit.
//! 2. [`allocation`] books the fleet across windows to maximize total profit
//!    using two greedy orders, a rotation heuristic, or exhaustive search.
//!
//! [`scenario`] generates and stores reproducible instances and [`metrics`]
//! runs the sweeps that compare the allocation strategies.
//!
//! ```
//! use swarm_alloc::prelude::*;
//!
//! let config = ScenarioConfig { node_count: 30, request_count: 12, seed: 7, ..Default::default() };
//! let scenario = Scenario::generate(config).unwrap();
//! let cfg = &scenario.config;
//!
//! let composed = compose_all(
//!     &scenario.network, &cfg.drone, &cfg.composition(), cfg.source, &scenario.requests,
//! ).unwrap();
//! let grid = TimeWindowGrid::new(cfg.window_count, cfg.window_length).unwrap();
//! let intake = intake(&scenario.requests, &composed, &grid);
//!
//! let greedy = request_greedy(&intake.accepted, cfg.fleet_size, &grid);
//! let best = brute_force(&intake.accepted, cfg.fleet_size, &grid, 25).unwrap();
//! assert!(best.total_profit >= greedy.total_profit);
//! ```
//!
//! The guide in `book/` walks through each stage; its code listings are
//! compiled and run as doctests of this crate.

pub mod allocation;
pub mod composition;
pub mod drone;
pub mod metrics;
pub mod network;
pub mod scenario;

pub mod prelude {
    pub use crate::allocation::{
        brute_force, heuristic, intake, request_greedy, time_greedy, verify, Algorithm,
        AllocationResult, ComposedRequest, Schedule, TimeWindowGrid,
    };
    pub use crate::composition::{
        available_pads, compose, compose_all, CompositionConfig, CompositionResult, ProfitMode,
    };
    pub use crate::drone::{DroneSpec, DroneState, NodeTime};
    pub use crate::network::{NodeId, SkywayNetwork};
    pub use crate::scenario::{Request, RequestId, Scenario, ScenarioConfig};
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/network.md")]
    mod network {}
    #[doc = include_str!("../../../book/src/energy.md")]
    mod energy {}
    #[doc = include_str!("../../../book/src/composition.md")]
    mod composition {}
    #[doc = include_str!("../../../book/src/allocation.md")]
    mod allocation {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
