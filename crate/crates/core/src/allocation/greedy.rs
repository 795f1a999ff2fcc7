use super::{first_fit, Algorithm, AllocationResult, ComposedRequest, TimeWindowGrid};

/// Serves requests in descending profit order.
pub fn request_greedy(requests: &[ComposedRequest], fleet_size: u32, grid: &TimeWindowGrid) -> AllocationResult {
    let mut order: Vec<&ComposedRequest> = requests.iter().collect();
    order.sort_by(|a, b| {
        b.profit
            .total_cmp(&a.profit)
            .then(a.request_id.cmp(&b.request_id))
    });
    first_fit(Algorithm::Request, order, fleet_size, grid)
}

/// Serves requests window by window, most profitable first within a window.
pub fn time_greedy(requests: &[ComposedRequest], fleet_size: u32, grid: &TimeWindowGrid) -> AllocationResult {
    let mut order: Vec<&ComposedRequest> = requests.iter().collect();
    order.sort_by(|a, b| {
        a.window_index
            .cmp(&b.window_index)
            .then(b.profit.total_cmp(&a.profit))
            .then(a.request_id.cmp(&b.request_id))
    });
    first_fit(Algorithm::Time, order, fleet_size, grid)
}
