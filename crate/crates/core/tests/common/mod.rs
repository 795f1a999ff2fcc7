#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swarm_alloc::allocation::{ComposedRequest, TimeWindowGrid};
use swarm_alloc::prelude::*;
use swarm_alloc::scenario::generate_network;

/// Round-trip times traced by hand with the default drone.
pub const DIRECT_RTT: f64 = 1513.377926;
pub const RELAY_RTT: f64 = 8628.762542;
pub const DETOUR_RTT: f64 = 8876.811594;

pub fn cfg(fleet: u32) -> CompositionConfig {
    CompositionConfig { max_swarm_size: 5, fleet_size: fleet, ..CompositionConfig::default() }
}

pub fn request(dest: usize, weights: &[f64]) -> Request {
    Request { id: RequestId(0), destination: NodeId(dest), packages: weights.to_vec(), window: 0 }
}

/// 0 - 1, 3 km, one usable pad at each end.
pub fn direct_fixture() -> (SkywayNetwork, Request) {
    let net = SkywayNetwork::new(vec![4, 4], vec![(0, 1, 3000.0)]).unwrap();
    (net, request(1, &[1.0, 0.5]))
}

/// 0 - 1 - 2, 9 km segments: loaded drones must recharge at 1.
pub fn relay_fixture() -> (SkywayNetwork, Request) {
    let net = SkywayNetwork::new(vec![4, 5, 4], vec![(0, 1, 9000.0), (1, 2, 9000.0)]).unwrap();
    (net, request(2, &[1.4, 1.4]))
}

/// Diamond where the shorter relay 1 has no pad left under congestion, so
/// the outbound leg detours through 2.
pub fn detour_fixture() -> (SkywayNetwork, Request) {
    let net = SkywayNetwork::new(
        vec![4, 3, 5, 4],
        vec![(0, 1, 9000.0), (1, 3, 9000.0), (0, 2, 9500.0), (2, 3, 9500.0)],
    )
    .unwrap();
    (net, request(3, &[1.4, 1.4]))
}

/// Sparse random networks wide enough that loaded swarms need relays.
pub fn random_fixture(seed: u64) -> (SkywayNetwork, CompositionConfig, Request) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sc = ScenarioConfig {
        seed,
        node_count: rng.gen_range(6..=14),
        area_side: rng.gen_range(12_000.0..30_000.0),
        neighbors: 2,
        pad_range: (1, 8),
        ..ScenarioConfig::default()
    };
    let net = generate_network(&sc).unwrap();
    let fleet = rng.gen_range(5..=9);
    let dest = rng.gen_range(1..net.node_count());
    let count = rng.gen_range(1..=5);
    let weights: Vec<f64> = (0..count).map(|_| rng.gen_range(1..=140) as f64 / 100.0).collect();
    (net, cfg(fleet), request(dest, &weights))
}

pub fn with_pads(net: &SkywayNetwork, pads: u32) -> SkywayNetwork {
    let edges = net.edges().iter().map(|e| (e.a.0, e.b.0, e.distance)).collect();
    SkywayNetwork::new(vec![pads; net.node_count()], edges).unwrap()
}

/// Random allocation instance with ids equal to positions.
pub fn random_instance(rng: &mut ChaCha8Rng, n: usize, windows: usize) -> Vec<ComposedRequest> {
    let grid = TimeWindowGrid::new(windows, 100.0).unwrap();
    (0..n)
        .map(|i| {
            let last = windows - 1;
            let window = rng.gen_range(0..windows);
            let spans = window < last && rng.gen_bool(0.3);
            let rtt = if spans { rng.gen_range(101.0..200.0) } else { rng.gen_range(10.0..100.0) };
            let drones = rng.gen_range(1..=5);
            let profit = (drones as f64 * rtt * 0.01 * 100.0).round() / 100.0;
            ComposedRequest::new(RequestId(i as u32), window, drones, rtt, profit, &grid).unwrap()
        })
        .collect()
}
