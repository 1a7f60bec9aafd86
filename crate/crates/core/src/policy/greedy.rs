use crate::model::Request;
use crate::routing::{best_insertion, CostWeights, InsertionTable, RoutingContext, VehiclePath};
use crate::sim::{Decision, State};

/// Inserts `requests`, in the given order, one at a time into the idle
/// vehicle whose path grows least in modified cost. Vehicles holding `cap`
/// requests accept no more; requests that fit nowhere stay unassigned.
pub fn greedy_assign(
    state: &State,
    ctx: &RoutingContext,
    weights: &CostWeights,
    requests: &[Request],
    cap: Option<usize>,
) -> Decision {
    let cap = cap.unwrap_or(usize::MAX);
    let mut paths: Vec<VehiclePath> =
        state.idle_vehicles().map(|v| VehiclePath::empty(v.id, v.position, state.time)).collect();
    for r in requests {
        let mut best: Option<(f64, usize, crate::routing::Insertion)> = None;
        for (k, p) in paths.iter().enumerate() {
            if p.num_requests() >= cap {
                continue;
            }
            let ins = best_insertion(p, &InsertionTable::new(p), ctx, weights, r, 0.0);
            if best.as_ref().map_or(true, |b| ins.delta < b.0) {
                best = Some((ins.delta, k, ins));
            }
        }
        if let Some((_, k, ins)) = best {
            paths[k] = paths[k].with_insertion(ctx, r, &ins);
        }
    }
    Decision { paths: paths.into_iter().filter(|p| !p.is_empty()).collect() }
}
