mod common;

use common::*;
use swarm_alloc::prelude::*;

fn run(net: &SkywayNetwork, fleet: u32, r: &Request) -> CompositionResult {
    compose(net, &DroneSpec::default(), &cfg(fleet), NodeId(0), r).unwrap()
}

#[test]
fn direct_round_trip() {
    let (net, r) = direct_fixture();
    let c = run(&net, 5, &r);
    assert!(c.feasible);
    assert!((c.rtt - DIRECT_RTT).abs() < 1e-3, "{}", c.rtt);
    assert_eq!(c.outbound_nodes(), vec![NodeId(0), NodeId(1)]);
    assert_eq!(c.return_nodes(), vec![NodeId(1), NodeId(0)]);
    // one usable pad at each end: the second drone waits
    assert!(c.outbound_path[1].wait_time > 0.0);
}

#[test]
fn relay_recharge() {
    let (net, r) = relay_fixture();
    let c = run(&net, 5, &r);
    assert!(c.feasible);
    assert!((c.rtt - RELAY_RTT).abs() < 1e-3, "{}", c.rtt);
    assert_eq!(c.outbound_nodes(), vec![NodeId(0), NodeId(1), NodeId(2)]);
    let relay = c.outbound_path[1];
    assert!(relay.charge_time > 0.0);
    assert_eq!(relay.wait_time, 0.0);
    // unloaded drones fly home without stopping
    assert!(!c.return_path[1].is_recharge());
}

#[test]
fn congestion_detour() {
    let (net, r) = detour_fixture();
    let c = run(&net, 5, &r);
    assert!(c.feasible);
    assert!((c.rtt - DETOUR_RTT).abs() < 1e-3, "{}", c.rtt);
    assert_eq!(c.outbound_nodes(), vec![NodeId(0), NodeId(2), NodeId(3)]);
    assert_eq!(c.return_nodes(), vec![NodeId(3), NodeId(1), NodeId(0)]);

    let open = with_pads(&net, 5);
    let c = run(&open, 5, &r);
    assert_eq!(c.outbound_nodes(), vec![NodeId(0), NodeId(1), NodeId(3)]);
}

#[test]
fn rtt_lower_bound_and_profit_sign() {
    let spec = DroneSpec::default();
    for seed in 0..60 {
        let (net, cfg, r) = random_fixture(seed);
        let c = compose(&net, &spec, &cfg, NodeId(0), &r).unwrap();
        if c.feasible {
            let sp = net.shortest_path(NodeId(0), r.destination).unwrap().0;
            assert!(c.rtt >= 2.0 * sp / spec.speed - 1e-9);
            assert!(c.profit > 0.0);
            // every recorded segment is a network edge
            for leg in [&c.outbound_path, &c.return_path] {
                for w in leg.windows(2) {
                    assert_eq!(net.edge_distance(w[0].node, w[1].node), Some(w[1].segment_distance));
                }
            }
            assert!((c.flight_time() * spec.speed - c.distance).abs() < 1e-6);
        } else {
            assert_eq!(c.profit, 0.0);
        }
        assert_eq!(c, compose(&net, &spec, &cfg, NodeId(0), &r).unwrap());
    }
}

#[test]
fn one_charge_follows_dijkstra() {
    let spec = DroneSpec::default();
    let net = SkywayNetwork::new(
        vec![2; 5],
        vec![(0, 1, 800.0), (1, 2, 900.0), (0, 3, 1000.0), (3, 2, 600.0), (2, 4, 1200.0)],
    )
    .unwrap();
    let r = request(4, &[1.4, 1.4, 0.2]);
    let c = compose(&net, &spec, &cfg(5), NodeId(0), &r).unwrap();
    let (_, path) = net.shortest_path(NodeId(0), NodeId(4)).unwrap();
    assert_eq!(c.outbound_nodes(), path);
}

#[test]
fn composition_json_shape() {
    let (net, r) = relay_fixture();
    let c = run(&net, 5, &r);
    let v = serde_json::to_value(&c).unwrap();
    assert_eq!(v["feasible"], true);
    assert!(v["rtt"].as_f64().unwrap() > 0.0);
    assert_eq!(v["outbound_path"][1]["node"], 1);
    assert!(v["outbound_path"][1]["charge_time"].as_f64().unwrap() > 0.0);
    assert!(v.get("failure").is_none());
}

/// Rtt ordering used by the monotonicity checks; infeasible counts as
/// infinitely long.
pub fn rtt_or_inf(c: &CompositionResult) -> f64 {
    if c.feasible { c.rtt } else { f64::INFINITY }
}

#[test]
fn more_pads_never_increase_rtt() {
    let spec = DroneSpec::default();
    let mut violations = Vec::new();
    for seed in 0..100 {
        let (net, cfg, r) = random_fixture(seed);
        let actual = compose(&net, &spec, &cfg, NodeId(0), &r).unwrap();
        let open = compose(&with_pads(&net, 1000), &spec, &cfg, NodeId(0), &r).unwrap();
        if rtt_or_inf(&open) > rtt_or_inf(&actual) + 1e-6 {
            violations.push((seed, rtt_or_inf(&open), rtt_or_inf(&actual)));
        }
    }
    assert!(violations.is_empty(), "{violations:?}");
}

fn heavier(r: &Request) -> Request {
    let mut heavy = r.clone();
    for w in &mut heavy.packages {
        *w = (*w + 0.3).min(1.4);
    }
    heavy
}

fn relay_stops(c: &CompositionResult) -> usize {
    let n = c.outbound_path.len();
    c.outbound_path[1..n - 1].iter().filter(|s| s.is_recharge()).count()
}

#[test]
fn heavier_payload_never_decreases_direct_rtt() {
    let spec = DroneSpec::default();
    let mut checked = 0;
    for seed in 0..300 {
        let (net, cfg, r) = random_fixture(seed);
        let light = compose(&net, &spec, &cfg, NodeId(0), &r).unwrap();
        let heavy = compose(&net, &spec, &cfg, NodeId(0), &heavier(&r)).unwrap();
        if !light.feasible || (heavy.feasible && relay_stops(&heavy) > 0) {
            continue;
        }
        checked += 1;
        assert!(rtt_or_inf(&heavy) + 1e-6 >= light.rtt, "seed {seed}");
    }
    assert!(checked > 50);
}

/// A heavier swarm forced onto a relay with many pads can finish sooner
/// than a lighter one flying straight to a destination with a single
/// usable pad, because the relay splits its charging.
#[test]
fn relay_can_shorten_heavier_trip() {
    let spec = DroneSpec::default();
    let (net, cfg, r) = random_fixture(42);
    let light = compose(&net, &spec, &cfg, NodeId(0), &r).unwrap();
    let heavy = compose(&net, &spec, &cfg, NodeId(0), &heavier(&r)).unwrap();
    assert_eq!(relay_stops(&light), 0);
    assert_eq!(relay_stops(&heavy), 1);
    assert!(heavy.rtt < light.rtt);
}
