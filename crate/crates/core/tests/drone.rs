use proptest::prelude::*;
use swarm_alloc::drone::DroneSpec;

fn spec() -> DroneSpec {
    DroneSpec::default()
}

proptest! {
    #[test]
    fn energy_is_additive(d1 in 0.0..20_000.0f64, d2 in 0.0..20_000.0f64, p in 0.0..1.5f64) {
        let s = spec();
        let whole = s.energy_for(d1 + d2, p).unwrap();
        let parts = s.energy_for(d1, p).unwrap() + s.energy_for(d2, p).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-9 * whole.max(1.0));
    }

    #[test]
    fn energy_is_monotone(d in 0.0..20_000.0f64, dd in 0.0..5_000.0f64, p in 0.0..1.4f64, dp in 0.0..0.1f64) {
        let s = spec();
        let e = s.energy_for(d, p).unwrap();
        prop_assert!(s.energy_for(d + dd, p).unwrap() >= e);
        prop_assert!(s.energy_for(d, p + dp).unwrap() >= e);
    }

    #[test]
    fn enough_pads_means_no_wait(deficits in proptest::collection::vec(0.0..4480.0f64, 1..8), extra in 0i64..4) {
        let nt = spec().node_service_time(&deficits, deficits.len() as i64 + extra).unwrap();
        prop_assert_eq!(nt.wait_time, 0.0);
    }

    #[test]
    fn more_pads_never_slower(deficits in proptest::collection::vec(0.0..4480.0f64, 1..9), pads in 1i64..8) {
        let s = spec();
        let a = s.node_service_time(&deficits, pads).unwrap().total();
        let b = s.node_service_time(&deficits, pads + 1).unwrap().total();
        prop_assert!(b <= a + 1e-9);
    }
}

/// Direct FIFO simulation: every drone waits for the whole previous
/// wave when charge times are equal.
#[test]
fn equal_deficits_charge_in_waves() {
    let s = spec();
    for drones in 1..=8usize {
        for pads in 1..=5i64 {
            let nt = s.node_service_time(&vec![1234.0; drones], pads).unwrap();
            let waves = drones.div_ceil(pads as usize) as f64;
            assert!((nt.total() - waves * s.charge_time(1234.0).unwrap()).abs() < 1e-9);
        }
    }
}
