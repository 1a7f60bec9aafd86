use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{Location, Request, Time, VehicleId};
use crate::routing::{best_insertion, CostWeights, InsertionTable, RoutingContext, VehiclePath};

/// Reduced costs at or above this are not improving.
pub const IMPROVING: f64 = -1e-6;

#[derive(Debug, Clone, Copy)]
pub struct PricingParams {
    /// Randomized constructions per call.
    pub samples: usize,
    /// Most negative candidates returned.
    pub keep: usize,
    /// Upper bound on requests per path.
    pub max_requests: Option<usize>,
}

/// A priced column.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub reduced_cost: f64,
    pub path: VehiclePath,
}

/// Randomized cheapest-insertion pricing for one vehicle.
///
/// Each construction shuffles the requests and inserts them one at a time at
/// their cheapest position under the reduced-cost objective, skipping any
/// request whose best insertion does not lower it. Every intermediate and
/// final path with reduced cost below [`IMPROVING`] is a candidate. Returns at
/// most `keep` distinct candidates, most negative first.
#[allow(clippy::too_many_arguments)]
pub fn price_vehicle<R: Rng>(
    rng: &mut R,
    ctx: &RoutingContext,
    weights: &CostWeights,
    requests: &[Request],
    rewards: &[f64],
    vehicle: VehicleId,
    vehicle_dual: f64,
    start: (Location, Time),
    params: &PricingParams,
) -> Vec<Candidate> {
    debug_assert_eq!(requests.len(), rewards.len());
    if requests.is_empty() || params.keep == 0 {
        return Vec::new();
    }
    let cap = params.max_requests.unwrap_or(usize::MAX);
    let empty = VehiclePath::empty(vehicle, start.0, start.1);
    let mut order: Vec<usize> = (0..requests.len()).collect();
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut found: Vec<Candidate> = Vec::new();

    for _ in 0..params.samples {
        order.shuffle(rng);
        let mut path = empty.clone();
        for &i in &order {
            if path.num_requests() >= cap {
                break;
            }
            let table = InsertionTable::new(&path);
            let ins = best_insertion(&path, &table, ctx, weights, &requests[i], rewards[i]);
            if ins.delta >= 0.0 {
                continue;
            }
            path = path.with_insertion(ctx, &requests[i], &ins);
            let rc = exact_reduced_cost(&path, weights, requests, rewards, vehicle_dual);
            if rc < IMPROVING && seen.insert(path.sequence_key()) {
                found.push(Candidate { reduced_cost: rc, path: path.clone() });
            }
        }
    }
    found.sort_by(|a, b| {
        a.reduced_cost.total_cmp(&b.reduced_cost).then_with(|| a.path.sequence_key().cmp(&b.path.sequence_key()))
    });
    found.truncate(params.keep);
    found
}

fn exact_reduced_cost(
    path: &VehiclePath,
    weights: &CostWeights,
    requests: &[Request],
    rewards: &[f64],
    vehicle_dual: f64,
) -> f64 {
    let reward: f64 = path
        .covered()
        .iter()
        .map(|r| {
            let i = requests.iter().position(|q| q.id == *r).expect("path covers a priced request");
            rewards[i]
        })
        .sum();
    path.modified_cost(weights) - vehicle_dual - reward
}
