use std::cmp::Ordering;

use super::{AllocationError, AllocationResult, Algorithm, ComposedRequest, TimeWindowGrid};

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 25;

/// Exhaustive search over every subset of `requests`.
///
/// Subsets are visited in Gray-code order so each step toggles one request
/// and updates window occupancy in constant time; nothing is materialized.
/// A subset is feasible when no window books more than `fleet_size` drones.
/// Among the most profitable feasible subsets the lexicographically
/// smallest sorted id list wins. Inputs longer than `cap` are refused.
pub fn brute_force(
    requests: &[ComposedRequest],
    fleet_size: u32,
    grid: &TimeWindowGrid,
    cap: usize,
) -> Result<AllocationResult, AllocationError> {
    let n = requests.len();
    if n > cap || n >= 64 {
        return Err(AllocationError::BruteForceCap { count: n, cap: cap.min(63) });
    }

    // positions sorted by id, for exact sums and tie-breaks
    let mut by_id: Vec<usize> = (0..n).collect();
    by_id.sort_by_key(|&i| requests[i].request_id);
    let exact_profit = |mask: u64| -> f64 {
        by_id
            .iter()
            .filter(|&&i| mask >> i & 1 == 1)
            .fold(0.0, |acc, &i| acc + requests[i].profit)
    };
    let id_order = |a: u64, b: u64| -> Ordering {
        let ids = |m: u64| by_id.iter().filter(move |&&i| m >> i & 1 == 1).map(|&i| requests[i].request_id);
        ids(a).cmp(ids(b))
    };

    let tol = 1e-9 * requests.iter().map(|r| r.profit.abs()).sum::<f64>().max(1.0);
    let mut occupancy = vec![0u32; grid.window_count];
    let mut overloaded = 0usize;
    let mut running = 0.0_f64;
    let mut mask = 0u64;
    let mut best_mask = 0u64;
    let mut best_profit = 0.0_f64;

    for k in 1..(1u64 << n) {
        let i = k.trailing_zeros() as usize;
        let r = &requests[i];
        let adding = mask >> i & 1 == 0;
        mask ^= 1 << i;
        for w in r.windows() {
            let before = occupancy[w] > fleet_size;
            if adding {
                occupancy[w] += r.drones_needed;
            } else {
                occupancy[w] -= r.drones_needed;
            }
            let after = occupancy[w] > fleet_size;
            match (before, after) {
                (false, true) => overloaded += 1,
                (true, false) => overloaded -= 1,
                _ => {}
            }
        }
        running += if adding { r.profit } else { -r.profit };

        if overloaded > 0 || running < best_profit - tol {
            continue;
        }
        let exact = exact_profit(mask);
        let better = match exact.total_cmp(&best_profit) {
            Ordering::Greater => true,
            Ordering::Equal => id_order(mask, best_mask) == Ordering::Less,
            Ordering::Less => false,
        };
        if better {
            best_profit = exact;
            best_mask = mask;
        }
    }

    let mut res = AllocationResult::empty(Algorithm::Brute, fleet_size, grid);
    for &i in &by_id {
        if best_mask >> i & 1 == 1 {
            let booked = res.offer(&requests[i]);
            debug_assert!(booked, "best subset is feasible");
        }
    }
    res.total_profit = best_profit;
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::super::{verify, Schedule};
    use super::*;
    use crate::scenario::RequestId;

    #[test]
    fn empty_input() {
        let r = brute_force(&[], 6, &grid(2), DEFAULT_BRUTE_FORCE_CAP).unwrap();
        assert!(r.served.is_empty());
        assert_eq!(r.total_profit, 0.0);
    }

    #[test]
    fn jointly_feasible_all_served() {
        let reqs = [req(0, 0, 2, 1.0, false), req(1, 0, 2, 2.0, true), req(2, 1, 2, 4.0, false)];
        let r = brute_force(&reqs, 6, &grid(3), DEFAULT_BRUTE_FORCE_CAP).unwrap();
        assert_eq!(r.served.len(), 3);
        assert_eq!(r.total_profit, 7.0);
        verify(&reqs, &r).unwrap();
    }

    #[test]
    fn finds_the_better_pair() {
        let reqs = [req(8, 0, 5, 60.0, false), req(5, 0, 3, 35.0, false), req(6, 0, 3, 34.0, false)];
        let r = brute_force(&reqs, 6, &grid(1), DEFAULT_BRUTE_FORCE_CAP).unwrap();
        assert_eq!(r.served, vec![RequestId(5), RequestId(6)]);
        assert_eq!(r.total_profit, 69.0);
    }

    #[test]
    fn ties_pick_smallest_ids() {
        let reqs = [req(2, 0, 6, 10.0, false), req(1, 0, 6, 10.0, false), req(3, 0, 6, 10.0, false)];
        let r = brute_force(&reqs, 6, &grid(1), DEFAULT_BRUTE_FORCE_CAP).unwrap();
        assert_eq!(r.served, vec![RequestId(1)]);
    }

    #[test]
    fn refuses_above_cap() {
        let reqs: Vec<_> = (0..12).map(|i| req(i, 0, 1, 1.0, false)).collect();
        assert_eq!(
            brute_force(&reqs, 6, &grid(1), 8),
            Err(AllocationError::BruteForceCap { count: 12, cap: 8 })
        );
    }

    /// Independent enumeration: materialize every subset and check it by
    /// replaying it into a fresh schedule.
    fn oracle(reqs: &[ComposedRequest], fleet: u32, g: &TimeWindowGrid) -> f64 {
        let n = reqs.len();
        let mut best = 0.0_f64;
        for mask in 0u32..(1 << n) {
            let subset: Vec<_> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let mut s = Schedule::new(fleet, g);
            if subset.iter().all(|&i| s.try_allocate(&reqs[i])) {
                best = best.max(subset.iter().map(|&i| reqs[i].profit).sum());
            }
        }
        best
    }

    #[test]
    fn matches_subset_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.gen_range(0..10);
            let reqs: Vec<_> = (0..n)
                .map(|i| {
                    req(i, rng.gen_range(0..3), rng.gen_range(1..=5), rng.gen_range(1..100) as f64, rng.gen_bool(0.3))
                })
                .collect();
            let fleet = rng.gen_range(5..=10);
            let r = brute_force(&reqs, fleet, &grid(4), DEFAULT_BRUTE_FORCE_CAP).unwrap();
            verify(&reqs, &r).unwrap();
            assert!((r.total_profit - oracle(&reqs, fleet, &grid(4))).abs() < 1e-9);
        }
    }
}
