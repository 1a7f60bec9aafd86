//! Column-generation engine behind the CFA, DSP and LIML policies.
//!
//! Each epoch: carry the column pool over, price new columns against the
//! duals of the master relaxation for a bounded number of rounds, then solve
//! the master problem over the pool as an integer program.

mod bnb;
mod pool;
mod pricing;
mod rmp;

use std::collections::HashSet;
use std::fmt;
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use bnb::{solve_integer_rmp, BnbLimits, IntegerSolution};
pub use pool::ColumnPool;
pub use pricing::{price_vehicle, Candidate, PricingParams, IMPROVING};
pub use rmp::{build_rmp, solve_relaxation, MasterMode, RmpError, RmpModel};

use crate::model::{Location, Request, RequestId, Time, UrgencySpec, VehicleId};
use crate::routing::{CostWeights, RoutingContext};
use crate::sim::{Decision, ScenarioConfig, State};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CfaParams {
    pub alpha: f64,
    pub beta: f64,
    /// Pricing rounds per epoch.
    pub rounds: usize,
    /// Randomized constructions per idle vehicle per round.
    pub samples: usize,
    /// Candidates kept per vehicle per round.
    pub keep: usize,
    /// Columns added to the pool per round.
    pub columns_per_round: usize,
    pub integer_time_limit_s: f64,
    pub node_limit: usize,
    /// Paths kept per vehicle across epochs.
    pub pool_capacity: usize,
    pub urgency: UrgencySpec,
    pub alpha_includes_first_leg: bool,
    pub seed: u64,
}

impl Default for CfaParams {
    fn default() -> Self {
        CfaParams {
            alpha: 0.03,
            beta: 8.0,
            rounds: 10,
            samples: 250,
            keep: 500,
            columns_per_round: 1000,
            integer_time_limit_s: 20.0,
            node_limit: 10_000,
            pool_capacity: 20_000,
            urgency: UrgencySpec::default(),
            alpha_includes_first_leg: true,
            seed: 0,
        }
    }
}

impl CfaParams {
    pub fn weights(&self) -> CostWeights {
        CostWeights { alpha: self.alpha, alpha_includes_first_leg: self.alpha_includes_first_leg }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) || !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err("alpha and beta must be finite and nonnegative".into());
        }
        if self.rounds == 0 || self.samples == 0 || self.keep == 0 || self.columns_per_round == 0 {
            return Err("rounds, samples, keep and columns_per_round must be positive".into());
        }
        if !(self.integer_time_limit_s > 0.0) || self.node_limit == 0 || self.pool_capacity == 0 {
            return Err("integer_time_limit_s, node_limit and pool_capacity must be positive".into());
        }
        Ok(())
    }
}

/// Restriction of the engine used by the limited-length policies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthLimit {
    /// Path size cap; also sizes the candidate set to `m` per idle vehicle.
    pub m: usize,
}

/// Summary of one epoch, one line in the trace output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochTrace {
    pub time_s: f64,
    pub idle: usize,
    pub unassigned: usize,
    pub rounds: usize,
    pub columns_added: usize,
    pub pool_size: usize,
    pub relaxation_objective: f64,
    pub integer_objective: f64,
    pub nodes: usize,
    pub assigned: usize,
    pub fallback: bool,
}

impl EpochTrace {
    pub const HEADER: &'static str =
        "time_s\tidle\tunassigned\trounds\tcolumns_added\tpool_size\trelaxation_objective\tinteger_objective\tnodes\tassigned\tfallback";
}

impl fmt::Display for EpochTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.time_s,
            self.idle,
            self.unassigned,
            self.rounds,
            self.columns_added,
            self.pool_size,
            self.relaxation_objective,
            self.integer_objective,
            self.nodes,
            self.assigned,
            u8::from(self.fallback)
        )
    }
}

/// Result of the column-generation phase.
pub struct Relaxed {
    pub rmp: RmpModel,
    pub solution: crate::lp::LpSolution,
    pub rounds: usize,
    pub columns_added: usize,
}

pub struct CfaEngine {
    params: CfaParams,
    mode: MasterMode,
    limit: Option<LengthLimit>,
    ctx: RoutingContext,
    window: Time,
    pool: ColumnPool,
    rng: ChaCha8Rng,
}

impl CfaEngine {
    pub fn new(params: CfaParams, mode: MasterMode, limit: Option<LengthLimit>, config: &ScenarioConfig) -> Self {
        CfaEngine {
            pool: ColumnPool::new(params.pool_capacity),
            rng: ChaCha8Rng::seed_from_u64(params.seed),
            ctx: config.routing(),
            window: config.deadline_window(),
            params,
            mode,
            limit,
        }
    }

    pub fn params(&self) -> &CfaParams {
        &self.params
    }

    pub fn mode(&self) -> MasterMode {
        self.mode
    }

    pub fn routing(&self) -> &RoutingContext {
        &self.ctx
    }

    pub fn pool(&self) -> &ColumnPool {
        &self.pool
    }

    fn pricing_params(&self) -> PricingParams {
        PricingParams { samples: self.params.samples, keep: self.params.keep, max_requests: self.limit.map(|l| l.m) }
    }

    /// Requests the master problem sees: all unassigned ones, or for a length
    /// limit the `m` per idle vehicle with the earliest deadlines.
    pub fn candidate_requests(&self, state: &State) -> Vec<Request> {
        let mut reqs = state.unassigned.clone();
        if let Some(l) = self.limit {
            reqs.sort_by_key(|r| (r.deadline, r.id));
            reqs.truncate(l.m.saturating_mul(state.num_idle()));
        }
        reqs.sort_by_key(|r| r.id);
        reqs
    }

    pub fn urgencies(&self, now: Time, requests: &[Request]) -> Vec<f64> {
        requests.iter().map(|r| self.params.urgency.urgency(now, r.deadline, self.window)).collect()
    }

    /// Carries the pool over and runs column generation on `state`.
    pub fn generate_columns(&mut self, state: &State) -> Result<Relaxed, RmpError> {
        let weights = self.params.weights();
        let idle: Vec<(VehicleId, Location)> = state.idle_vehicles().map(|v| (v.id, v.position)).collect();
        let vehicles: Vec<VehicleId> = idle.iter().map(|v| v.0).collect();
        let requests = self.candidate_requests(state);
        let ids: Vec<RequestId> = requests.iter().map(|r| r.id).collect();
        let open: HashSet<RequestId> = ids.iter().copied().collect();
        let urgency = self.urgencies(state.time, &requests);
        self.pool.carry_over(&self.ctx, &weights, &idle, state.time, &open, self.limit.map(|l| l.m));
        let pricing = self.pricing_params();

        let mut added = 0;
        let mut round = 0;
        loop {
            let rmp = build_rmp(self.mode, &vehicles, &ids, &urgency, &self.pool.columns(), &weights);
            let solution = solve_relaxation(&rmp)?;
            if round == self.params.rounds || requests.is_empty() {
                return Ok(Relaxed { rmp, solution, rounds: round, columns_added: added });
            }
            round += 1;
            let rewards = rmp.request_rewards(&solution);
            let mut candidates = Vec::new();
            for &(v, pos) in &idle {
                let dual = rmp.vehicle_dual(&solution, v);
                let found = price_vehicle(
                    &mut self.rng,
                    &self.ctx,
                    &weights,
                    &requests,
                    &rewards,
                    v,
                    dual,
                    (pos, state.time),
                    &pricing,
                );
                candidates.extend(found.into_iter().filter(|c| !self.pool.contains(&c.path)));
            }
            if candidates.is_empty() {
                return Ok(Relaxed { rmp, solution, rounds: round, columns_added: added });
            }
            candidates.sort_by(|a, b| {
                a.reduced_cost
                    .total_cmp(&b.reduced_cost)
                    .then(a.path.vehicle.cmp(&b.path.vehicle))
                    .then_with(|| a.path.sequence_key().cmp(&b.path.sequence_key()))
            });
            candidates.truncate(self.params.columns_per_round);
            for c in candidates {
                if self.pool.insert(c.path) {
                    added += 1;
                }
            }
            self.pool.enforce_capacity(&weights);
        }
    }

    /// Full epoch: column generation, then the integer master problem.
    pub fn decide(&mut self, state: &State) -> Result<(Decision, EpochTrace), RmpError> {
        let mut trace = EpochTrace {
            time_s: state.time.secs(),
            idle: state.num_idle(),
            unassigned: state.unassigned.len(),
            rounds: 0,
            columns_added: 0,
            pool_size: 0,
            relaxation_objective: 0.0,
            integer_objective: 0.0,
            nodes: 0,
            assigned: 0,
            fallback: false,
        };
        if trace.idle == 0 || state.unassigned.is_empty() {
            if trace.idle == 0 {
                self.pool.clear();
            }
            return Ok((Decision::none(), trace));
        }
        let relaxed = self.generate_columns(state)?;
        let limits = BnbLimits {
            time_limit: Duration::from_secs_f64(self.params.integer_time_limit_s),
            node_limit: self.params.node_limit,
        };
        let int = solve_integer_rmp(&relaxed.rmp, Some(&relaxed.solution), &limits);
        let columns = self.pool.columns();
        let paths: Vec<_> = int.selected.iter().map(|&j| columns[j].clone()).collect();
        let decision = Decision { paths };
        trace.rounds = relaxed.rounds;
        trace.columns_added = relaxed.columns_added;
        trace.pool_size = columns.len();
        trace.relaxation_objective = relaxed.solution.objective_value;
        trace.integer_objective = int.objective;
        trace.nodes = int.nodes;
        trace.assigned = decision.num_assigned();
        Ok((decision, trace))
    }
}
