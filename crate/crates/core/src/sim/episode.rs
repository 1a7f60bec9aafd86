use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::scenario::Scenario;
use super::state::{DecisionError, DeliveryRecord, State};
use crate::model::Time;
use crate::policy::Policy;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeOptions {
    /// Abort if the episode needs more epochs than this.
    pub max_epochs: u64,
}

impl Default for EpisodeOptions {
    fn default() -> Self {
        EpisodeOptions { max_epochs: 100_000 }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("policy {policy} returned an invalid decision at epoch {epoch}: {source}")]
    InvalidDecision {
        policy: String,
        epoch: u64,
        #[source]
        source: DecisionError,
    },
    #[error("episode exceeded {0} epochs")]
    EpochCap(u64),
    #[error("invalid scenario config: {0}")]
    Config(String),
}

/// Everything that happened in one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub policy: String,
    pub seed: u64,
    pub epochs: u64,
    pub num_requests: usize,
    /// One record per request, sorted by request id.
    pub deliveries: Vec<DeliveryRecord>,
    /// Distance driven by each vehicle.
    pub vehicle_distance: Vec<f64>,
    pub total_penalty: f64,
    /// Time the last vehicle becomes free.
    pub end_time: Time,
}

impl EpisodeLog {
    /// Canonical serialization; equal logs give equal bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("episode log is always serializable")
    }
}

/// Runs `policy` on `scenario` from the initial state until every request is
/// delivered and no more orders can arrive.
pub fn run_episode(scenario: &Scenario, policy: &mut dyn Policy, opts: &EpisodeOptions) -> Result<EpisodeLog, SimError> {
    scenario.config.validate().map_err(SimError::Config)?;
    let ctx = scenario.config.routing();
    let mut state = State::initial(scenario);
    let mut log = EpisodeLog {
        policy: policy.name(),
        seed: scenario.config.seed,
        epochs: 0,
        num_requests: scenario.num_requests(),
        deliveries: Vec::with_capacity(scenario.num_requests()),
        vehicle_distance: vec![0.0; state.vehicles.len()],
        total_penalty: 0.0,
        end_time: Time::ZERO,
    };
    // The first epoch happens when the first order arrives.
    match state.next_epoch_time(scenario) {
        Some(t) => state.advance(scenario, t),
        None => return Ok(log),
    }
    loop {
        if state.epoch > opts.max_epochs {
            return Err(SimError::EpochCap(opts.max_epochs));
        }
        let decision = policy.decide(&state);
        let (cost, records) = state.apply_decision(&ctx, &decision).map_err(|source| SimError::InvalidDecision {
            policy: log.policy.clone(),
            epoch: state.epoch,
            source,
        })?;
        for p in &decision.paths {
            log.vehicle_distance[p.vehicle.index()] += p.length();
        }
        log.total_penalty += cost;
        log.deliveries.extend(records);
        match state.next_epoch_time(scenario) {
            Some(t) => state.advance(scenario, t),
            None => break,
        }
    }
    log.epochs = state.epoch;
    log.end_time = state.vehicles.iter().map(|v| v.free_at).max().unwrap_or(Time::ZERO);
    log.deliveries.sort_by_key(|d| d.request);
    Ok(log)
}
