use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::scenario::Scenario;
use crate::model::{Location, Request, RequestId, Time, VehicleId};
use crate::routing::{schedule_path, RoutingContext, Stop, VehiclePath};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    pub id: VehicleId,
    /// Time the vehicle finishes its current path; `<= now` means idle.
    pub free_at: Time,
    /// Position at `free_at`.
    pub position: Location,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub epoch: u64,
    pub time: Time,
    /// Arrived and not yet assigned, in arrival (id) order.
    pub unassigned: Vec<Request>,
    pub vehicles: Vec<VehicleState>,
    /// Index of the next order in the scenario that has not arrived.
    pub next_order: usize,
}

/// Paths for a subset of the idle vehicles. Vehicles not listed stay idle.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub paths: Vec<VehiclePath>,
}

impl Decision {
    pub fn none() -> Self {
        Decision::default()
    }

    pub fn num_assigned(&self) -> usize {
        self.paths.iter().map(|p| p.num_requests()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecisionError {
    #[error("vehicle {0} does not exist")]
    UnknownVehicle(VehicleId),
    #[error("vehicle {0} is busy until {1}")]
    VehicleBusy(VehicleId, Time),
    #[error("vehicle {0} receives more than one path")]
    VehicleTwice(VehicleId),
    #[error("path for vehicle {0} does not start at the vehicle's position and the current time")]
    WrongAnchor(VehicleId),
    #[error("request {0} is not waiting for assignment")]
    NotUnassigned(RequestId),
    #[error("request {0} is assigned more than once")]
    RequestTwice(RequestId),
    #[error("path for vehicle {0} is inconsistent with its requests")]
    Inconsistent(VehicleId),
}

/// Outcome of committing one request to a vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeliveryRecord {
    pub request: RequestId,
    pub vehicle: VehicleId,
    pub order_time: Time,
    pub deadline: Time,
    pub assigned_at: Time,
    pub delivered_at: Time,
    pub penalty: f64,
}

impl State {
    pub fn initial(scenario: &Scenario) -> Self {
        let depot = scenario.config.depot;
        State {
            epoch: 0,
            time: Time::ZERO,
            unassigned: Vec::new(),
            vehicles: (0..scenario.config.num_vehicles)
                .map(|i| VehicleState { id: VehicleId(i as u32), free_at: Time::ZERO, position: depot })
                .collect(),
            next_order: 0,
        }
    }

    pub fn idle_vehicles(&self) -> impl Iterator<Item = &VehicleState> {
        self.vehicles.iter().filter(move |v| v.free_at <= self.time)
    }

    pub fn num_idle(&self) -> usize {
        self.idle_vehicles().count()
    }

    pub fn all_idle(&self) -> bool {
        self.vehicles.iter().all(|v| v.free_at <= self.time)
    }

    pub fn arrivals_exhausted(&self, scenario: &Scenario) -> bool {
        self.next_order >= scenario.orders.len()
    }

    /// Checks and commits `decision`. Returns the realized lateness cost of
    /// the committed paths and one record per assigned request.
    pub fn apply_decision(
        &mut self,
        ctx: &RoutingContext,
        decision: &Decision,
    ) -> Result<(f64, Vec<DeliveryRecord>), DecisionError> {
        self.validate(ctx, decision)?;
        let mut cost = 0.0;
        let mut records = Vec::new();
        let assigned: HashSet<RequestId> = decision.paths.iter().flat_map(|p| p.covered().iter().copied()).collect();
        for path in decision.paths.iter().filter(|p| !p.is_empty()) {
            for r in self.unassigned.iter().filter(|r| path.covers(r.id)) {
                let delivered_at = path.delivery_time(r.id).expect("validated path delivers every covered request");
                records.push(DeliveryRecord {
                    request: r.id,
                    vehicle: path.vehicle,
                    order_time: r.order_time,
                    deadline: r.deadline,
                    assigned_at: self.time,
                    delivered_at,
                    penalty: ctx.penalty.penalty(r.deadline, delivered_at),
                });
            }
            cost += path.true_cost();
            let v = &mut self.vehicles[path.vehicle.index()];
            v.free_at = path.end_time();
            v.position = path.end_pos();
        }
        self.unassigned.retain(|r| !assigned.contains(&r.id));
        records.sort_by_key(|d| d.request);
        Ok((cost, records))
    }

    fn validate(&self, ctx: &RoutingContext, decision: &Decision) -> Result<(), DecisionError> {
        let mut vehicles_seen = HashSet::new();
        let mut requests_seen = HashSet::new();
        for path in &decision.paths {
            let vid = path.vehicle;
            let v = self.vehicles.get(vid.index()).ok_or(DecisionError::UnknownVehicle(vid))?;
            if !vehicles_seen.insert(vid) {
                return Err(DecisionError::VehicleTwice(vid));
            }
            if v.free_at > self.time {
                return Err(DecisionError::VehicleBusy(vid, v.free_at));
            }
            if path.is_empty() {
                continue;
            }
            if path.start_time != self.time || path.start_pos != v.position {
                return Err(DecisionError::WrongAnchor(vid));
            }
            for r in path.covered() {
                if !requests_seen.insert(*r) {
                    return Err(DecisionError::RequestTwice(*r));
                }
            }
            // Rebuild the stops from the request data and reschedule.
            let mut stops = Vec::with_capacity(path.stops().len());
            for s in path.stops() {
                let r = self
                    .unassigned
                    .iter()
                    .find(|r| r.id == s.request)
                    .ok_or(DecisionError::NotUnassigned(s.request))?;
                stops.push(match s.kind {
                    crate::routing::StopKind::Pickup => Stop::pickup(r),
                    crate::routing::StopKind::Delivery => Stop::delivery(r),
                });
            }
            let rebuilt = schedule_path(ctx, vid, v.position, self.time, stops)
                .map_err(|_| DecisionError::Inconsistent(vid))?;
            if rebuilt.arrivals() != path.arrivals() || rebuilt.stops() != path.stops() {
                return Err(DecisionError::Inconsistent(vid));
            }
        }
        Ok(())
    }

    /// Time of the next decision epoch, or `None` once the episode is over.
    ///
    /// The next epoch is the earliest of: a busy vehicle becoming free, the
    /// next order arrival, and (if requests wait while a vehicle idles) a
    /// timer `max(max_gap, min_gap)` after the current epoch.
    pub fn next_epoch_time(&self, scenario: &Scenario) -> Option<Time> {
        let c = &scenario.config;
        let busy = self.vehicles.iter().map(|v| v.free_at).filter(|&f| f > self.time).min();
        let arrival = scenario.orders.get(self.next_order).map(|o| o.arrival_time);
        let timer = (!self.unassigned.is_empty() && self.vehicles.iter().any(|v| v.free_at <= self.time))
            .then(|| self.time + c.epoch_max_gap().max(c.epoch_min_gap()));
        [busy, arrival, timer].into_iter().flatten().min()
    }

    /// Advances the clock to `until`, appends every order arriving in
    /// `(time, until]` and moves idle vehicles' free time up to `until`.
    pub fn advance(&mut self, scenario: &Scenario, until: Time) {
        debug_assert!(until >= self.time);
        while let Some(o) = scenario.orders.get(self.next_order) {
            if o.arrival_time > until {
                break;
            }
            self.unassigned.extend_from_slice(&o.requests);
            self.next_order += 1;
        }
        self.time = until;
        for v in &mut self.vehicles {
            if v.free_at < until {
                v.free_at = until;
            }
        }
        self.epoch += 1;
    }
}
