//! Event-driven simulation of the delivery process.

mod config;
mod episode;
mod scenario;
mod state;

pub use config::{KindDraw, ScenarioConfig};
pub use episode::{run_episode, EpisodeLog, EpisodeOptions, SimError};
pub use scenario::{generate_scenario, read_scenario, write_scenario, Scenario, ScenarioParseError};
pub use state::{Decision, DecisionError, DeliveryRecord, State, VehicleState};
