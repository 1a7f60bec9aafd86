use std::collections::{BTreeMap, HashMap, HashSet};

use crate::model::{Location, RequestId, Time, VehicleId};
use crate::routing::{CostWeights, RoutingContext, VehiclePath};

/// Columns kept across pricing rounds and epochs, per vehicle.
#[derive(Debug, Clone, Default)]
pub struct ColumnPool {
    capacity: usize,
    paths: BTreeMap<VehicleId, Vec<VehiclePath>>,
    keys: HashSet<(VehicleId, Vec<u32>)>,
}

impl ColumnPool {
    /// `capacity` bounds the number of paths per vehicle.
    pub fn new(capacity: usize) -> Self {
        ColumnPool { capacity: capacity.max(1), ..Default::default() }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.paths.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vehicle_len(&self, v: VehicleId) -> usize {
        self.paths.get(&v).map_or(0, Vec::len)
    }

    pub fn contains(&self, path: &VehiclePath) -> bool {
        self.keys.contains(&(path.vehicle, path.sequence_key()))
    }

    /// Adds `path` unless an identical stop sequence exists for its vehicle.
    pub fn insert(&mut self, path: VehiclePath) -> bool {
        if path.is_empty() || !self.keys.insert((path.vehicle, path.sequence_key())) {
            return false;
        }
        self.paths.entry(path.vehicle).or_default().push(path);
        true
    }

    /// All columns, vehicle by vehicle in id order, each in insertion order.
    pub fn columns(&self) -> Vec<&VehiclePath> {
        self.paths.values().flatten().collect()
    }

    /// Evicts the largest modified cost paths of any vehicle over capacity.
    pub fn enforce_capacity(&mut self, weights: &CostWeights) {
        for list in self.paths.values_mut() {
            if list.len() <= self.capacity {
                continue;
            }
            let mut order: Vec<(f64, usize)> =
                list.iter().enumerate().map(|(i, p)| (p.modified_cost(weights), i)).collect();
            order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut keep = vec![false; list.len()];
            for &(_, i) in order.iter().take(self.capacity) {
                keep[i] = true;
            }
            let mut i = 0;
            list.retain(|p| {
                let k = keep[i];
                i += 1;
                if !k {
                    self.keys.remove(&(p.vehicle, p.sequence_key()));
                }
                k
            });
        }
    }

    /// Prepares the pool for a new epoch: keeps only paths of idle vehicles
    /// whose requests are all still unassigned, and re-times them from the
    /// vehicle's current position and time.
    pub fn carry_over(
        &mut self,
        ctx: &RoutingContext,
        weights: &CostWeights,
        idle: &[(VehicleId, Location)],
        now: Time,
        open: &HashSet<RequestId>,
        max_requests: Option<usize>,
    ) {
        let anchors: HashMap<VehicleId, Location> = idle.iter().copied().collect();
        let old = std::mem::take(&mut self.paths);
        self.keys.clear();
        for (v, list) in old {
            let Some(&pos) = anchors.get(&v) else { continue };
            for p in list {
                if !p.covered().iter().all(|r| open.contains(r)) {
                    continue;
                }
                if max_requests.is_some_and(|m| p.num_requests() > m) {
                    continue;
                }
                let p = if p.start_pos == pos && p.start_time == now { p } else { p.reanchor(ctx, pos, now) };
                self.insert(p);
            }
        }
        self.enforce_capacity(weights);
    }

    pub fn clear(&mut self) {
        self.paths.clear();
        self.keys.clear();
    }
}
