//! Straightforward reimplementations of path timing and cost, used to check
//! the incremental routines in the library.

use dpdp_core::model::{Location, Request, RequestId, Time};
use dpdp_core::routing::{Stop, StopKind};
use rand::Rng;

pub fn leg_ms(a: &Location, b: &Location, speed: f64) -> i64 {
    let d = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
    (d / speed * 1000.0).round() as i64
}

/// Arrival times (ms) obtained by folding rounded legs from the start.
pub fn leg_fold(start: &Location, start_ms: i64, stops: &[Stop], speed: f64) -> Vec<i64> {
    let mut t = start_ms;
    let mut at = *start;
    stops
        .iter()
        .map(|s| {
            t += leg_ms(&at, &s.location, speed);
            at = s.location;
            t
        })
        .collect()
}

pub fn late_cost(fixed: f64, rate_per_hour: f64, deadline_ms: i64, arrival_ms: i64) -> f64 {
    if arrival_ms <= deadline_ms {
        0.0
    } else {
        fixed + rate_per_hour * (arrival_ms - deadline_ms) as f64 / 3_600_000.0
    }
}

pub struct Objective {
    pub speed: f64,
    pub fixed: f64,
    pub rate: f64,
    pub alpha: f64,
    pub first_leg: bool,
}

impl Objective {
    /// `alpha * length + sum of delivery penalties`.
    pub fn cost(&self, start: &Location, start_ms: i64, stops: &[Stop]) -> f64 {
        let arr = leg_fold(start, start_ms, stops, self.speed);
        let mut len = 0.0;
        let mut at = *start;
        for (k, s) in stops.iter().enumerate() {
            let d = ((at.x - s.location.x).powi(2) + (at.y - s.location.y).powi(2)).sqrt();
            if k > 0 || self.first_leg {
                len += d;
            }
            at = s.location;
        }
        let pen: f64 = stops
            .iter()
            .zip(&arr)
            .filter(|(s, _)| s.kind == StopKind::Delivery)
            .map(|(s, &t)| late_cost(self.fixed, self.rate, s.deadline.millis(), t))
            .sum();
        self.alpha * len + pen
    }
}

/// Every way of inserting `r` into `stops`, as (pickup gap, delivery gap, sequence).
pub fn all_insertions(stops: &[Stop], r: &Request) -> Vec<(usize, usize, Vec<Stop>)> {
    let q = stops.len();
    let mut out = Vec::new();
    for i in 0..=q {
        for j in i..=q {
            let mut s = stops[..i].to_vec();
            s.push(Stop::pickup(r));
            s.extend_from_slice(&stops[i..j]);
            s.push(Stop::delivery(r));
            s.extend_from_slice(&stops[j..]);
            out.push((i, j, s));
        }
    }
    out
}

/// Location on a coarse grid so coincident points occur regularly.
pub fn grid_point(rng: &mut impl Rng) -> Location {
    if rng.gen_bool(0.3) {
        Location::new(rng.gen_range(0..5) as f64 * 250.0, rng.gen_range(0..5) as f64 * 250.0)
    } else {
        Location::new(rng.gen_range(0.0..1000.0), rng.gen_range(0.0..1000.0))
    }
}

pub fn random_request(rng: &mut impl Rng, id: u32) -> Request {
    let order_time = Time::from_millis(rng.gen_range(0..3_600_000));
    Request {
        id: RequestId(id),
        order_id: id,
        store: grid_point(rng),
        customer: grid_point(rng),
        order_time,
        deadline: order_time + Time::from_millis(rng.gen_range(0..7_200_000)),
    }
}
