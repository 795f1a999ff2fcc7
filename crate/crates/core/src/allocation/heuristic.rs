use super::{first_fit, Algorithm, AllocationResult, ComposedRequest, TimeWindowGrid};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HeuristicOptions {
    /// Also try the profit-sorted and window-sorted orders after the
    /// rotations, so the result is never worse than either greedy.
    pub include_greedy_orders: bool,
}

/// First-fit starting from every position of the intake order in turn,
/// wrapping around. Keeps the most profitable rotation; the earliest start
/// wins ties.
pub fn heuristic(requests: &[ComposedRequest], fleet_size: u32, grid: &TimeWindowGrid) -> AllocationResult {
    heuristic_with(requests, fleet_size, grid, HeuristicOptions::default())
}

pub fn heuristic_with(
    requests: &[ComposedRequest],
    fleet_size: u32,
    grid: &TimeWindowGrid,
    opts: HeuristicOptions,
) -> AllocationResult {
    let n = requests.len();
    let mut best = AllocationResult::empty(Algorithm::Heuristic, fleet_size, grid);
    let keep = |cand: AllocationResult, best: &mut AllocationResult| {
        if cand.total_profit > best.total_profit {
            *best = cand;
        }
    };
    for start in 0..n {
        let rotation = requests[start..].iter().chain(&requests[..start]);
        keep(first_fit(Algorithm::Heuristic, rotation, fleet_size, grid), &mut best);
    }
    if opts.include_greedy_orders {
        for mut cand in [
            super::request_greedy(requests, fleet_size, grid),
            super::time_greedy(requests, fleet_size, grid),
        ] {
            cand.algorithm = Algorithm::Heuristic;
            keep(cand, &mut best);
        }
    }
    best
}
