//! Fixtures shared by the benchmarks.

use dpdp_core::lp::{LinearProgram, Relation};
use dpdp_core::model::{Location, RequestId, Time, VehicleId};
use dpdp_core::routing::{cheapest_insertion, PathObjective, RoutingContext, VehiclePath};
use dpdp_core::{CostWeights, Request};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random set-packing relaxation shaped like a master problem: `rows`
/// cover rows, `columns` columns covering up to four rows each.
pub fn packing_lp(columns: usize, rows: usize, seed: u64) -> LinearProgram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lp = LinearProgram::new(columns);
    let mut cover: Vec<Vec<(usize, f64)>> = vec![Vec::new(); rows];
    for j in 0..columns {
        lp.objective[j] = rng.gen_range(1.0..50.0);
        for _ in 0..rng.gen_range(1..=4) {
            let i = rng.gen_range(0..rows);
            if cover[i].last().map_or(true, |&(k, _)| k != j) {
                cover[i].push((j, 1.0));
            }
        }
    }
    for (i, coeffs) in cover.into_iter().enumerate() {
        let eta = lp.add_var(1.0);
        let h = 20.0 + i as f64;
        let mut row: Vec<(usize, f64)> = coeffs.into_iter().map(|(j, _)| (j, -h)).collect();
        row.push((eta, -1.0));
        lp.add_row(row, Relation::Le, -h);
    }
    lp
}

pub fn random_request(rng: &mut ChaCha8Rng, id: u32) -> Request {
    let mut pt = || Location::new(rng.gen_range(0.0..1000.0), rng.gen_range(0.0..1000.0));
    let (store, customer) = (pt(), pt());
    let order_time = Time::from_secs_i(rng.gen_range(0..3600));
    Request {
        id: RequestId(id),
        order_id: id,
        store,
        customer,
        order_time,
        deadline: order_time + Time::from_secs_i(7200),
    }
}

/// A path of `n` requests built by cheapest insertion.
pub fn built_path(ctx: &RoutingContext, weights: &CostWeights, n: u32, seed: u64) -> (VehiclePath, Vec<Request>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reqs: Vec<Request> = (0..n).map(|i| random_request(&mut rng, i)).collect();
    let reward = |_| 1e6;
    let obj = PathObjective { ctx, weights, reward: &reward, constant: 0.0 };
    let mut path = VehiclePath::empty(VehicleId(0), Location::new(500.0, 500.0), Time::ZERO);
    for r in &reqs {
        path = cheapest_insertion(&path, r, &obj).0;
    }
    (path, reqs)
}
