use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::lp::{solve_lp, LinearProgram, LpError, LpSolution, LpStatus, Relation};
use crate::model::{RequestId, VehicleId};
use crate::routing::{CostWeights, DualPrices, RequestDuals, VehiclePath};

/// How requests enter the master problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MasterMode {
    /// Set packing with a charge of `beta * h_r` for every uncovered request.
    Packing { beta: f64 },
    /// Set partitioning: uncovered requests cost `big_m` each.
    Partition { big_m: f64 },
}

/// The restricted master problem of one epoch and its LP relaxation.
///
/// Variable layout: one `y` per column, then one auxiliary per request
/// (`eta_r` in packing mode, the cover slack in partition mode). Row layout:
/// one convexity row per idle vehicle, one cover row per request and, in
/// packing mode, one urgency row per request.
#[derive(Debug, Clone)]
pub struct RmpModel {
    pub mode: MasterMode,
    pub vehicles: Vec<VehicleId>,
    pub requests: Vec<RequestId>,
    /// Urgency of each request, aligned with `requests`.
    pub urgency: Vec<f64>,
    pub column_vehicle: Vec<VehicleId>,
    pub column_cost: Vec<f64>,
    /// Request rows covered by each column.
    pub column_rows: Vec<Vec<usize>>,
    pub lp: LinearProgram,
}

impl RmpModel {
    pub fn num_columns(&self) -> usize {
        self.column_cost.len()
    }

    pub fn aux_var(&self, r: usize) -> usize {
        self.num_columns() + r
    }

    fn cover_row(&self, r: usize) -> usize {
        self.vehicles.len() + r
    }

    fn urgency_row(&self, r: usize) -> usize {
        self.vehicles.len() + self.requests.len() + r
    }

    /// Charge for leaving request `r` uncovered.
    pub fn uncovered_charge(&self, r: usize) -> f64 {
        match self.mode {
            MasterMode::Packing { beta } => beta * self.urgency[r],
            MasterMode::Partition { big_m } => big_m,
        }
    }

    /// Objective of an integer selection of columns, with the auxiliaries
    /// at their cheapest feasible values.
    pub fn integer_objective(&self, selected: &[usize]) -> f64 {
        let mut covered = vec![false; self.requests.len()];
        let mut obj = 0.0;
        for &c in selected {
            obj += self.column_cost[c];
            for &r in &self.column_rows[c] {
                covered[r] = true;
            }
        }
        obj + (0..self.requests.len()).filter(|&r| !covered[r]).map(|r| self.uncovered_charge(r)).sum::<f64>()
    }

    /// Coverage `sum_p delta_rp y_p` of each request under `y`.
    pub fn coverage(&self, y: &[f64]) -> Vec<f64> {
        let mut cov = vec![0.0; self.requests.len()];
        for (c, rows) in self.column_rows.iter().enumerate() {
            for &r in rows {
                cov[r] += y[c];
            }
        }
        cov
    }

    /// Duals in the form expected by pricing and reduced-cost evaluation.
    pub fn dual_prices(&self, sol: &LpSolution) -> DualPrices {
        let mut d = DualPrices::default();
        for (i, v) in self.vehicles.iter().enumerate() {
            d.vehicle.insert(*v, sol.dual[i]);
        }
        for (r, id) in self.requests.iter().enumerate() {
            let urgency = match self.mode {
                MasterMode::Packing { .. } => sol.dual[self.urgency_row(r)],
                MasterMode::Partition { .. } => 0.0,
            };
            d.requests.insert(*id, RequestDuals { cover: sol.dual[self.cover_row(r)], urgency });
        }
        d
    }

    /// Per-request reward `pi_r - beta h_r mu_r`, aligned with `requests`.
    pub fn request_rewards(&self, sol: &LpSolution) -> Vec<f64> {
        (0..self.requests.len())
            .map(|r| {
                let pi = sol.dual[self.cover_row(r)];
                match self.mode {
                    MasterMode::Packing { beta } => pi - beta * self.urgency[r] * sol.dual[self.urgency_row(r)],
                    MasterMode::Partition { .. } => pi,
                }
            })
            .collect()
    }

    pub fn vehicle_dual(&self, sol: &LpSolution, v: VehicleId) -> f64 {
        let i = self.vehicles.iter().position(|x| *x == v).expect("vehicle has a convexity row");
        sol.dual[i]
    }

    /// `beta` used when evaluating reduced costs with the routing helpers.
    pub fn beta(&self) -> f64 {
        match self.mode {
            MasterMode::Packing { beta } => beta,
            MasterMode::Partition { .. } => 0.0,
        }
    }

    pub fn urgency_map(&self) -> HashMap<RequestId, f64> {
        self.requests.iter().copied().zip(self.urgency.iter().copied()).collect()
    }
}

/// Builds the master problem over `columns` for the given idle vehicles and
/// requests. Columns must belong to listed vehicles and cover listed requests.
pub fn build_rmp(
    mode: MasterMode,
    vehicles: &[VehicleId],
    requests: &[RequestId],
    urgency: &[f64],
    columns: &[&VehiclePath],
    weights: &CostWeights,
) -> RmpModel {
    assert_eq!(requests.len(), urgency.len());
    let row_of: HashMap<RequestId, usize> = requests.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    let veh_of: HashMap<VehicleId, usize> = vehicles.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let n = columns.len();
    let nr = requests.len();
    let nv = vehicles.len();

    let mut column_vehicle = Vec::with_capacity(n);
    let mut column_cost = Vec::with_capacity(n);
    let mut column_rows = Vec::with_capacity(n);
    let mut vehicle_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nv];
    let mut cover_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nr];
    for (j, p) in columns.iter().enumerate() {
        let vi = veh_of[&p.vehicle];
        vehicle_rows[vi].push((j, 1.0));
        let rows: Vec<usize> = p.covered().iter().map(|r| row_of[r]).collect();
        for &r in &rows {
            cover_rows[r].push((j, 1.0));
        }
        column_vehicle.push(p.vehicle);
        column_cost.push(p.modified_cost(weights));
        column_rows.push(rows);
    }

    let mut lp = LinearProgram::new(0);
    for &c in &column_cost {
        lp.add_var(c);
    }
    let aux_cost = match mode {
        MasterMode::Packing { .. } => 1.0,
        MasterMode::Partition { big_m } => big_m,
    };
    for _ in 0..nr {
        lp.add_var(aux_cost);
    }
    for row in vehicle_rows {
        lp.add_row(row, Relation::Le, 1.0);
    }
    match mode {
        MasterMode::Packing { beta } => {
            for row in &cover_rows {
                lp.add_row(row.clone(), Relation::Le, 1.0);
            }
            for (r, row) in cover_rows.iter().enumerate() {
                let bh = beta * urgency[r];
                let mut coeffs: Vec<(usize, f64)> = row.iter().map(|&(j, _)| (j, -bh)).collect();
                coeffs.push((n + r, -1.0));
                lp.add_row(coeffs, Relation::Le, -bh);
            }
        }
        MasterMode::Partition { .. } => {
            for (r, row) in cover_rows.into_iter().enumerate() {
                let mut coeffs = row;
                coeffs.push((n + r, 1.0));
                lp.add_row(coeffs, Relation::Eq, 1.0);
            }
        }
    }

    RmpModel {
        mode,
        vehicles: vehicles.to_vec(),
        requests: requests.to_vec(),
        urgency: urgency.to_vec(),
        column_vehicle,
        column_cost,
        column_rows,
        lp,
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RmpError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("relaxation ended with status {0:?}")]
    Status(LpStatus),
}

pub fn solve_relaxation(rmp: &RmpModel) -> Result<LpSolution, RmpError> {
    let sol = solve_lp(&rmp.lp)?;
    if sol.is_optimal() {
        Ok(sol)
    } else {
        Err(RmpError::Status(sol.status))
    }
}
