mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use swarm_alloc::allocation::{
    brute_force, heuristic, request_greedy, time_greedy, verify, Algorithm, ComposedRequest,
    TimeWindowGrid, DEFAULT_BRUTE_FORCE_CAP,
};

fn grid(t: usize) -> TimeWindowGrid {
    TimeWindowGrid::new(t, 100.0).unwrap()
}

fn instance(seed: u64, n: usize, t: usize) -> Vec<ComposedRequest> {
    common::random_instance(&mut ChaCha8Rng::seed_from_u64(seed), n, t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn outputs_respect_capacity(seed in any::<u64>(), n in 0usize..40, t in 1usize..6, fleet in 5u32..12) {
        let reqs = instance(seed, n, t);
        for res in [
            request_greedy(&reqs, fleet, &grid(t)),
            time_greedy(&reqs, fleet, &grid(t)),
            heuristic(&reqs, fleet, &grid(t)),
        ] {
            prop_assert!(verify(&reqs, &res).is_ok());
            prop_assert!(res.schedule.used_drones().iter().all(|&u| u <= fleet));
        }
    }

    #[test]
    fn brute_force_dominates(seed in any::<u64>(), n in 0usize..12, fleet in 5u32..=10) {
        let reqs = instance(seed, n, 4);
        let g = grid(4);
        let best = brute_force(&reqs, fleet, &g, DEFAULT_BRUTE_FORCE_CAP).unwrap();
        prop_assert!(verify(&reqs, &best).is_ok());
        for res in [request_greedy(&reqs, fleet, &g), time_greedy(&reqs, fleet, &g), heuristic(&reqs, fleet, &g)] {
            prop_assert!(best.total_profit + 1e-9 >= res.total_profit, "{} beat brute force", res.algorithm);
        }
    }

    #[test]
    fn equal_sets_report_identical_totals(seed in any::<u64>(), n in 0usize..12, fleet in 20u32..40) {
        // large fleets often let every strategy serve everything
        let reqs = instance(seed, n, 4);
        let g = grid(4);
        let best = brute_force(&reqs, fleet, &g, DEFAULT_BRUTE_FORCE_CAP).unwrap();
        let sorted = |ids: &[swarm_alloc::scenario::RequestId]| {
            let mut v = ids.to_vec();
            v.sort();
            v
        };
        for res in [request_greedy(&reqs, fleet, &g), time_greedy(&reqs, fleet, &g), heuristic(&reqs, fleet, &g)] {
            prop_assert!(best.total_profit >= res.total_profit);
            if sorted(&res.served) == sorted(&best.served) {
                prop_assert_eq!(res.total_profit.to_bits(), best.total_profit.to_bits());
            }
        }
    }

    #[test]
    fn heuristic_beats_intake_order(seed in any::<u64>(), n in 0usize..40, fleet in 5u32..12) {
        let reqs = instance(seed, n, 5);
        let g = grid(5);
        let h = heuristic(&reqs, fleet, &g);
        let mut first_come = swarm_alloc::allocation::Schedule::new(fleet, &g);
        let profit: f64 = reqs.iter().filter(|r| first_come.try_allocate(r)).map(|r| r.profit).sum();
        prop_assert!(h.total_profit + 1e-9 >= profit);
    }

    #[test]
    fn greedy_ignores_intake_order(seed in any::<u64>(), n in 0usize..30, fleet in 5u32..12) {
        let reqs = instance(seed, n, 4);
        let mut shuffled = reqs.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 1));
        let g = grid(4);
        prop_assert_eq!(request_greedy(&reqs, fleet, &g), request_greedy(&shuffled, fleet, &g));
        prop_assert_eq!(time_greedy(&reqs, fleet, &g), time_greedy(&shuffled, fleet, &g));
    }
}

#[test]
fn brute_force_profit_grows_with_fleet() {
    for seed in 0..30 {
        let reqs = instance(seed, 10, 4);
        let mut last = 0.0;
        for fleet in 5..=15 {
            let p = brute_force(&reqs, fleet, &grid(4), DEFAULT_BRUTE_FORCE_CAP).unwrap().total_profit;
            assert!(p + 1e-9 >= last);
            last = p;
        }
    }
}

#[test]
fn heuristic_evaluates_every_rotation() {
    // the only profitable packing starts at the last position
    let g = grid(1);
    let mk = |id, drones, profit| {
        ComposedRequest::new(swarm_alloc::scenario::RequestId(id), 0, drones, 50.0, profit, &g).unwrap()
    };
    let reqs = vec![mk(0, 4, 10.0), mk(1, 4, 10.0), mk(2, 3, 9.0), mk(3, 3, 9.0)];
    let h = heuristic(&reqs, 6, &g);
    assert_eq!(h.total_profit, 18.0);
    assert_eq!(h.served.len(), 2);
    assert_eq!(h.algorithm, Algorithm::Heuristic);
}
