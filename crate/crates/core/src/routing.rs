//! Vehicle paths (columns): feasibility, scheduling, true and modified cost,
//! reduced cost against master-problem duals, and cheapest insertion.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Location, PenaltySpec, Request, RequestId, Time, TravelMetric, VehicleId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StopKind {
    Pickup,
    Delivery,
}

/// A visit to a store (pickup) or customer (delivery) on behalf of a request.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stop {
    pub request: RequestId,
    pub kind: StopKind,
    pub location: Location,
    pub deadline: Time,
}

impl Stop {
    pub fn pickup(r: &Request) -> Self {
        Stop { request: r.id, kind: StopKind::Pickup, location: r.store, deadline: r.deadline }
    }

    pub fn delivery(r: &Request) -> Self {
        Stop { request: r.id, kind: StopKind::Delivery, location: r.customer, deadline: r.deadline }
    }

    #[inline]
    fn key(&self) -> u32 {
        self.request.0 * 2 + u32::from(self.kind == StopKind::Delivery)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("request {0} is picked up but never delivered")]
    MissingDelivery(RequestId),
    #[error("request {0} is delivered but never picked up")]
    MissingPickup(RequestId),
    #[error("request {0} is delivered before it is picked up")]
    DeliveryBeforePickup(RequestId),
    #[error("stop for request {0} appears more than once")]
    DuplicateStop(RequestId),
}

/// Everything needed to turn a stop sequence into times and costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoutingContext {
    pub metric: TravelMetric,
    pub penalty: PenaltySpec,
}

/// Weight on path length in the modified cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    pub alpha: f64,
    /// Count the repositioning leg from the vehicle's position to the first stop.
    pub alpha_includes_first_leg: bool,
}

impl CostWeights {
    pub fn new(alpha: f64) -> Self {
        CostWeights { alpha, alpha_includes_first_leg: true }
    }

    #[inline]
    fn first_leg_weight(&self) -> f64 {
        if self.alpha_includes_first_leg {
            1.0
        } else {
            0.0
        }
    }
}

/// A scheduled stop sequence for one vehicle. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehiclePath {
    pub vehicle: VehicleId,
    pub start_pos: Location,
    pub start_time: Time,
    stops: Vec<Stop>,
    arrivals: Vec<Time>,
    covered: Vec<RequestId>,
    length: f64,
    first_leg: f64,
    cost: f64,
}

/// Schedules `stops` for `vehicle` departing `start_pos` at `start_time`.
///
/// Arrival times accumulate millisecond-rounded legs; the true cost sums the
/// penalty of every delivery stop.
pub fn schedule_path(
    ctx: &RoutingContext,
    vehicle: VehicleId,
    start_pos: Location,
    start_time: Time,
    stops: Vec<Stop>,
) -> Result<VehiclePath, PathError> {
    let covered = check_precedence(&stops)?;
    Ok(schedule_unchecked(ctx, vehicle, start_pos, start_time, stops, covered))
}

fn check_precedence(stops: &[Stop]) -> Result<Vec<RequestId>, PathError> {
    let mut seen: HashMap<RequestId, (bool, bool)> = HashMap::with_capacity(stops.len());
    for s in stops {
        let e = seen.entry(s.request).or_insert((false, false));
        match s.kind {
            StopKind::Pickup => {
                if e.0 {
                    return Err(PathError::DuplicateStop(s.request));
                }
                e.0 = true;
            }
            StopKind::Delivery => {
                if e.1 {
                    return Err(PathError::DuplicateStop(s.request));
                }
                if !e.0 {
                    // Either missing entirely or appearing later.
                    return if stops.iter().any(|o| o.request == s.request && o.kind == StopKind::Pickup) {
                        Err(PathError::DeliveryBeforePickup(s.request))
                    } else {
                        Err(PathError::MissingPickup(s.request))
                    };
                }
                e.1 = true;
            }
        }
    }
    let mut covered = Vec::with_capacity(seen.len());
    for (id, (p, d)) in seen {
        if p && !d {
            return Err(PathError::MissingDelivery(id));
        }
        covered.push(id);
    }
    covered.sort_unstable();
    Ok(covered)
}

fn schedule_unchecked(
    ctx: &RoutingContext,
    vehicle: VehicleId,
    start_pos: Location,
    start_time: Time,
    stops: Vec<Stop>,
    covered: Vec<RequestId>,
) -> VehiclePath {
    let mut arrivals = Vec::with_capacity(stops.len());
    let mut length = 0.0;
    let mut first_leg = 0.0;
    let mut cost = 0.0;
    let mut pos = start_pos;
    let mut t = start_time;
    for (k, s) in stops.iter().enumerate() {
        let d = ctx.metric.distance(&pos, &s.location);
        if k == 0 {
            first_leg = d;
        }
        length += d;
        t = t + ctx.metric.leg(&pos, &s.location);
        arrivals.push(t);
        if s.kind == StopKind::Delivery {
            cost += ctx.penalty.penalty(s.deadline, t);
        }
        pos = s.location;
    }
    VehiclePath { vehicle, start_pos, start_time, stops, arrivals, covered, length, first_leg, cost }
}

impl VehiclePath {
    pub fn empty(vehicle: VehicleId, start_pos: Location, start_time: Time) -> Self {
        VehiclePath {
            vehicle,
            start_pos,
            start_time,
            stops: Vec::new(),
            arrivals: Vec::new(),
            covered: Vec::new(),
            length: 0.0,
            first_leg: 0.0,
            cost: 0.0,
        }
    }

    pub fn stops(&self) -> &[Stop] {
        &self.stops
    }

    pub fn arrivals(&self) -> &[Time] {
        &self.arrivals
    }

    /// Sorted ids of the requests this path serves.
    pub fn covered(&self) -> &[RequestId] {
        &self.covered
    }

    pub fn covers(&self, r: RequestId) -> bool {
        self.covered.binary_search(&r).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.stops.is_empty()
    }

    pub fn num_requests(&self) -> usize {
        self.covered.len()
    }

    /// Total driven distance, including the leg from the start position.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn first_leg_length(&self) -> f64 {
        self.first_leg
    }

    /// Sum of the delivery penalties.
    pub fn true_cost(&self) -> f64 {
        self.cost
    }

    /// Time the vehicle reaches its final stop (the start time when empty).
    pub fn end_time(&self) -> Time {
        self.arrivals.last().copied().unwrap_or(self.start_time)
    }

    pub fn end_pos(&self) -> Location {
        self.stops.last().map(|s| s.location).unwrap_or(self.start_pos)
    }

    pub fn delivery_time(&self, r: RequestId) -> Option<Time> {
        self.stops
            .iter()
            .zip(&self.arrivals)
            .find(|(s, _)| s.request == r && s.kind == StopKind::Delivery)
            .map(|(_, t)| *t)
    }

    pub fn alpha_length(&self, weights: &CostWeights) -> f64 {
        if weights.alpha_includes_first_leg {
            self.length
        } else {
            self.length - self.first_leg
        }
    }

    /// True cost plus `alpha` times the path length.
    pub fn modified_cost(&self, weights: &CostWeights) -> f64 {
        self.cost + weights.alpha * self.alpha_length(weights)
    }

    /// Identity of the stop sequence, used for deduplication.
    pub fn sequence_key(&self) -> Vec<u32> {
        self.stops.iter().map(Stop::key).collect()
    }

    /// Re-times the same stop sequence from a new start.
    pub fn reanchor(&self, ctx: &RoutingContext, start_pos: Location, start_time: Time) -> VehiclePath {
        schedule_unchecked(ctx, self.vehicle, start_pos, start_time, self.stops.clone(), self.covered.clone())
    }
}

/// Free-function form of [`VehiclePath::modified_cost`].
pub fn modified_cost(path: &VehiclePath, weights: &CostWeights) -> f64 {
    path.modified_cost(weights)
}

/// Duals of one request's cover row and urgency row.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RequestDuals {
    pub cover: f64,
    /// Nonpositive: dual of a `<=` row in a minimization.
    pub urgency: f64,
}

/// Dual prices of the master-problem relaxation.
///
/// Sign convention: every row is `<=` in a minimization, so all duals are
/// nonpositive. The reduced cost of a column is then
/// `c~ - lambda_v - sum_r (pi_r - beta * h_r * mu_r)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DualPrices {
    pub vehicle: HashMap<VehicleId, f64>,
    pub requests: HashMap<RequestId, RequestDuals>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DualError {
    #[error("no dual price for vehicle {0}")]
    MissingVehicle(VehicleId),
    #[error("no dual price for request {0}")]
    MissingRequest(RequestId),
}

/// Reduced cost of `path` given duals, `beta` and the urgency of each request.
pub fn reduced_cost(
    path: &VehiclePath,
    weights: &CostWeights,
    duals: &DualPrices,
    beta: f64,
    urgencies: &HashMap<RequestId, f64>,
) -> Result<f64, DualError> {
    let lambda = *duals.vehicle.get(&path.vehicle).ok_or(DualError::MissingVehicle(path.vehicle))?;
    let mut rc = path.modified_cost(weights) - lambda;
    for r in path.covered() {
        let d = duals.requests.get(r).ok_or(DualError::MissingRequest(*r))?;
        let h = *urgencies.get(r).ok_or(DualError::MissingRequest(*r))?;
        rc -= d.cover - beta * h * d.urgency;
    }
    Ok(rc)
}

/// An objective of the form `c~(path) - sum_{r covered} reward(r) - constant`.
///
/// Modified cost (no rewards) and reduced cost (rewards from duals) are both
/// instances of this shape.
pub struct PathObjective<'a> {
    pub ctx: &'a RoutingContext,
    pub weights: &'a CostWeights,
    pub reward: &'a dyn Fn(RequestId) -> f64,
    pub constant: f64,
}

impl PathObjective<'_> {
    pub fn evaluate(&self, path: &VehiclePath) -> f64 {
        path.modified_cost(self.weights) - path.covered().iter().map(|r| (self.reward)(*r)).sum::<f64>() - self.constant
    }
}

/// Where to place a request's pickup and delivery.
///
/// The pickup goes into gap `pickup_gap` of the original stop sequence and
/// the delivery into gap `delivery_gap >= pickup_gap`; equal gaps put the
/// delivery directly after the pickup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Insertion {
    pub pickup_gap: usize,
    pub delivery_gap: usize,
    pub delta: f64,
}

impl VehiclePath {
    /// Stop sequence with `r` inserted at the given gaps.
    pub fn inserted_stops(&self, r: &Request, pickup_gap: usize, delivery_gap: usize) -> Vec<Stop> {
        assert!(pickup_gap <= delivery_gap && delivery_gap <= self.stops.len());
        let mut out = Vec::with_capacity(self.stops.len() + 2);
        out.extend_from_slice(&self.stops[..pickup_gap]);
        out.push(Stop::pickup(r));
        out.extend_from_slice(&self.stops[pickup_gap..delivery_gap]);
        out.push(Stop::delivery(r));
        out.extend_from_slice(&self.stops[delivery_gap..]);
        out
    }

    pub fn with_insertion(&self, ctx: &RoutingContext, r: &Request, ins: &Insertion) -> VehiclePath {
        let stops = self.inserted_stops(r, ins.pickup_gap, ins.delivery_gap);
        let mut covered = self.covered.clone();
        let pos = covered.binary_search(&r.id).unwrap_err();
        covered.insert(pos, r.id);
        schedule_unchecked(ctx, self.vehicle, self.start_pos, self.start_time, stops, covered)
    }
}

/// Per-path tables that make each insertion candidate O(1) to evaluate in the
/// common case where downstream deliveries keep their on-time/late status.
pub struct InsertionTable {
    late_suffix: Vec<u32>,
    slack_suffix: Vec<i64>,
}

impl InsertionTable {
    pub fn new(path: &VehiclePath) -> Self {
        let q = path.stops.len();
        let mut late_suffix = vec![0u32; q + 1];
        let mut slack_suffix = vec![i64::MAX; q + 1];
        for k in (0..q).rev() {
            let s = &path.stops[k];
            late_suffix[k] = late_suffix[k + 1];
            slack_suffix[k] = slack_suffix[k + 1];
            if s.kind == StopKind::Delivery {
                let slack = (s.deadline - path.arrivals[k]).millis();
                if slack < 0 {
                    late_suffix[k] += 1;
                } else {
                    slack_suffix[k] = slack_suffix[k].min(slack);
                }
            }
        }
        InsertionTable { late_suffix, slack_suffix }
    }
}

#[inline]
fn shifted_penalty_delta(p: &PenaltySpec, s: &Stop, arrival: Time, shift: i64) -> f64 {
    if s.kind == StopKind::Pickup || shift == 0 {
        return 0.0;
    }
    p.penalty(s.deadline, arrival + Time::from_millis(shift)) - p.penalty(s.deadline, arrival)
}

/// Finds the cheapest insertion of `r` into `path`, where the objective change
/// is `delta c~ - reward`. Ties keep the earliest (pickup gap, delivery gap).
pub fn best_insertion(
    path: &VehiclePath,
    table: &InsertionTable,
    ctx: &RoutingContext,
    weights: &CostWeights,
    r: &Request,
    reward: f64,
) -> Insertion {
    let stops = &path.stops;
    let arr = &path.arrivals;
    let q = stops.len();
    let m = &ctx.metric;
    let pen = &ctx.penalty;
    let rate_ms = pen.rate_per_ms();
    let alpha = weights.alpha;
    let fw = weights.first_leg_weight();
    let pk = r.store;
    let dl = r.customer;
    let pd_dist = m.distance(&pk, &dl);
    let pd_leg = m.leg(&pk, &dl);

    let prev_loc = |g: usize| if g == 0 { path.start_pos } else { stops[g - 1].location };
    let prev_time = |g: usize| if g == 0 { path.start_time } else { arr[g - 1] };
    let leg_weight = |g: usize| if g == 0 { fw } else { 1.0 };

    // Penalty change of stops k..q when all of them shift by `shift` ms.
    let suffix_delta = |k: usize, shift: i64| -> f64 {
        if k >= q || shift == 0 {
            return 0.0;
        }
        if shift > 0 && shift <= table.slack_suffix[k] {
            return table.late_suffix[k] as f64 * rate_ms * shift as f64;
        }
        (k..q).map(|i| shifted_penalty_delta(pen, &stops[i], arr[i], shift)).sum()
    };

    let mut best = Insertion { pickup_gap: q, delivery_gap: q, delta: f64::INFINITY };

    for i in 0..=q {
        let pl = prev_loc(i);
        let pt = prev_time(i);
        let w = leg_weight(i);
        let d_prev_p = m.distance(&pl, &pk);
        let arr_p = pt + m.leg(&pl, &pk);

        // Delivery right after the pickup.
        {
            let arr_d = arr_p + pd_leg;
            let mut dlen = w * d_prev_p + pd_dist;
            let mut shift = 0;
            if i < q {
                let nl = stops[i].location;
                dlen += m.distance(&dl, &nl) - w * m.distance(&pl, &nl);
                shift = (arr_d + m.leg(&dl, &nl) - arr[i]).millis();
            }
            let base = alpha * dlen - reward + pen.penalty(r.deadline, arr_d);
            if base < best.delta || shift < 0 {
                let v = base + suffix_delta(i, shift);
                if v < best.delta {
                    best = Insertion { pickup_gap: i, delivery_gap: i, delta: v };
                }
            }
        }
        if i == q {
            break;
        }

        // Pickup alone in gap i, delivery further down.
        let nl = stops[i].location;
        let dlen_p = w * (d_prev_p - m.distance(&pl, &nl)) + m.distance(&pk, &nl);
        let s1 = (arr_p + m.leg(&pk, &nl) - arr[i]).millis();
        let mut mid = 0.0;
        for j in (i + 1)..=q {
            mid += shifted_penalty_delta(pen, &stops[j - 1], arr[j - 1], s1);
            let jl = stops[j - 1].location;
            let arr_prev_j = arr[j - 1] + Time::from_millis(s1);
            let arr_d = arr_prev_j + m.leg(&jl, &dl);
            let mut dlen = dlen_p + m.distance(&jl, &dl);
            let mut shift = s1;
            if j < q {
                let jn = stops[j].location;
                dlen += m.distance(&dl, &jn) - m.distance(&jl, &jn);
                shift = (arr_d + m.leg(&dl, &jn) - arr[j]).millis();
            }
            let base = alpha * dlen - reward + pen.penalty(r.deadline, arr_d) + mid;
            if base < best.delta || shift < 0 {
                let v = base + suffix_delta(j, shift);
                if v < best.delta {
                    best = Insertion { pickup_gap: i, delivery_gap: j, delta: v };
                }
            }
        }
    }
    best
}

/// Cheapest insertion of `r` under `objective`, returning the new path and
/// the objective change.
pub fn cheapest_insertion(
    path: &VehiclePath,
    r: &Request,
    objective: &PathObjective<'_>,
) -> (VehiclePath, f64) {
    debug_assert!(!path.covers(r.id));
    let table = InsertionTable::new(path);
    let ins = best_insertion(path, &table, objective.ctx, objective.weights, r, (objective.reward)(r.id));
    (path.with_insertion(objective.ctx, r, &ins), ins.delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RequestId;

    fn ctx() -> RoutingContext {
        RoutingContext { metric: TravelMetric::new(0.4), penalty: PenaltySpec::BASE }
    }

    fn req(id: u32, store: (f64, f64), customer: (f64, f64), deadline_s: i64) -> Request {
        Request {
            id: RequestId(id),
            order_id: id,
            store: Location::new(store.0, store.1),
            customer: Location::new(customer.0, customer.1),
            order_time: Time::ZERO,
            deadline: Time::from_secs_i(deadline_s),
        }
    }

    #[test]
    fn empty_sequence() {
        let p = schedule_path(&ctx(), VehicleId(0), Location::default(), Time::ZERO, vec![]).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.true_cost(), 0.0);
        assert_eq!(p.length(), 0.0);
    }

    #[test]
    fn single_request_on_time_and_late() {
        let r = req(0, (0.0, 400.0), (0.0, 800.0), 3000);
        let stops = vec![Stop::pickup(&r), Stop::delivery(&r)];
        let p = schedule_path(&ctx(), VehicleId(0), Location::default(), Time::ZERO, stops.clone()).unwrap();
        assert_eq!(p.arrivals(), &[Time::from_secs_i(1000), Time::from_secs_i(2000)]);
        assert_eq!(p.true_cost(), 0.0);
        assert_eq!(p.length(), 800.0);

        let r = req(0, (0.0, 400.0), (0.0, 800.0), 1000);
        let stops = vec![Stop::pickup(&r), Stop::delivery(&r)];
        let p = schedule_path(&ctx(), VehicleId(0), Location::default(), Time::ZERO, stops).unwrap();
        let expected = 50.0 + 100.0 * 1000.0 / 3600.0;
        assert!((p.true_cost() - expected).abs() < 1e-9);
        assert!((p.true_cost() - 77.78).abs() < 0.005);
    }

    #[test]
    fn precedence_errors() {
        let r = req(3, (0.0, 1.0), (0.0, 2.0), 10);
        let c = ctx();
        let s = |v| schedule_path(&c, VehicleId(0), Location::default(), Time::ZERO, v);
        assert_eq!(s(vec![Stop::pickup(&r)]).unwrap_err(), PathError::MissingDelivery(RequestId(3)));
        assert_eq!(s(vec![Stop::delivery(&r)]).unwrap_err(), PathError::MissingPickup(RequestId(3)));
        assert_eq!(
            s(vec![Stop::delivery(&r), Stop::pickup(&r)]).unwrap_err(),
            PathError::DeliveryBeforePickup(RequestId(3))
        );
        assert_eq!(
            s(vec![Stop::pickup(&r), Stop::pickup(&r), Stop::delivery(&r)]).unwrap_err(),
            PathError::DuplicateStop(RequestId(3))
        );
    }

    #[test]
    fn modified_cost_is_affine_in_alpha() {
        let r = req(0, (0.0, 400.0), (0.0, 800.0), 1000);
        let p = schedule_path(
            &ctx(),
            VehicleId(0),
            Location::new(0.0, -1200.0),
            Time::ZERO,
            vec![Stop::pickup(&r), Stop::delivery(&r)],
        )
        .unwrap();
        let at = |a| p.modified_cost(&CostWeights::new(a));
        assert_eq!(at(0.0), p.true_cost());
        assert!((at(1.0) - at(0.0) - 2000.0).abs() < 1e-9);
        assert!((at(2.0) - at(0.0) - 2.0 * (at(1.0) - at(0.0))).abs() < 1e-9);
        let excl = CostWeights { alpha: 1.0, alpha_includes_first_leg: false };
        assert!((p.modified_cost(&excl) - p.true_cost() - 400.0).abs() < 1e-9);
    }

    fn one_request_path(reqs: &[Request]) -> VehiclePath {
        let stops = reqs.iter().flat_map(|r| [Stop::pickup(r), Stop::delivery(r)]).collect();
        schedule_path(&ctx(), VehicleId(1), Location::default(), Time::ZERO, stops).unwrap()
    }

    #[test]
    fn reduced_cost_examples() {
        let r = req(7, (0.0, 400.0), (0.0, 800.0), 1000);
        let p = one_request_path(&[r]);
        let w = CostWeights::new(0.0);
        let mut duals = DualPrices::default();
        duals.vehicle.insert(VehicleId(1), 0.0);
        duals.requests.insert(r.id, RequestDuals::default());
        let urg: HashMap<_, _> = [(r.id, 1.5)].into_iter().collect();
        let c = p.modified_cost(&w);
        assert!((reduced_cost(&p, &w, &duals, 3.0, &urg).unwrap() - c).abs() < 1e-12);
        duals.vehicle.insert(VehicleId(1), c);
        assert!(reduced_cost(&p, &w, &duals, 3.0, &urg).unwrap().abs() < 1e-12);

        // c~ = 10 via alpha on an on-time path of length 800.
        let r = req(7, (0.0, 400.0), (0.0, 800.0), 100_000);
        let p = one_request_path(&[r]);
        let w = CostWeights::new(10.0 / 800.0);
        duals.vehicle.insert(VehicleId(1), 2.0);
        duals.requests.insert(r.id, RequestDuals { cover: 3.0, urgency: -1.0 });
        let urg: HashMap<_, _> = [(r.id, 2.0)].into_iter().collect();
        // beta * h = 4
        let rc = reduced_cost(&p, &w, &duals, 2.0, &urg).unwrap();
        assert!((rc - 1.0).abs() < 1e-12, "{rc}");
    }

    #[test]
    fn reduced_cost_missing_dual() {
        let r = req(7, (0.0, 400.0), (0.0, 800.0), 1000);
        let p = one_request_path(&[r]);
        let mut duals = DualPrices::default();
        duals.vehicle.insert(VehicleId(1), 0.0);
        let urg = HashMap::new();
        assert_eq!(
            reduced_cost(&p, &CostWeights::new(0.0), &duals, 1.0, &urg).unwrap_err(),
            DualError::MissingRequest(r.id)
        );
    }

    #[test]
    fn insertion_into_empty_path() {
        let r = req(0, (10.0, 0.0), (20.0, 0.0), 5000);
        let c = ctx();
        let w = CostWeights::new(0.01);
        let empty = VehiclePath::empty(VehicleId(0), Location::default(), Time::ZERO);
        let reward = |_| 0.0;
        let obj = PathObjective { ctx: &c, weights: &w, reward: &reward, constant: 0.0 };
        let (p, delta) = cheapest_insertion(&empty, &r, &obj);
        assert_eq!(p.stops(), &[Stop::pickup(&r), Stop::delivery(&r)]);
        assert!((delta - 0.2).abs() < 1e-12);
    }

    #[test]
    fn insertion_with_coincident_locations() {
        let a = req(0, (0.0, 300.0), (0.0, 600.0), 100_000);
        let b = req(1, (0.0, 300.0), (0.0, 600.0), 100_000);
        let c = ctx();
        let w = CostWeights::new(1.0);
        let path = one_request_path(&[a]);
        let reward = |_| 0.0;
        let obj = PathObjective { ctx: &c, weights: &w, reward: &reward, constant: 0.0 };
        let (p, delta) = cheapest_insertion(&path, &b, &obj);
        // Riding along costs nothing extra.
        assert!(delta.abs() < 1e-12);
        assert_eq!(p.length(), path.length());
        assert_eq!(p.num_requests(), 2);
    }
}
