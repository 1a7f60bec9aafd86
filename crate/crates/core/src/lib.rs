//! Dynamic pickup-and-delivery for local delivery platforms: an event-driven
//! simulator, a column-generation dispatching engine with its own simplex
//! solver, the dispatching policies built on it, and the experiment harness.

pub mod cfa;
pub mod experiments;
pub mod lp;
pub mod model;
pub mod policy;
pub mod routing;
pub mod sim;

pub use cfa::{CfaEngine, CfaParams, EpochTrace, MasterMode};
pub use experiments::{
    base_system_config, grid_search, run_batch, AggregateReport, ExperimentConfig, GridResult, KpiReport, Table,
};
pub use model::{Location, Order, OrderKind, PenaltySpec, Request, RequestId, Time, UrgencySpec, VehicleId};
pub use policy::{Policy, PolicyKind, PolicySpec};
pub use routing::{CostWeights, RoutingContext, VehiclePath};
pub use sim::{
    generate_scenario, read_scenario, run_episode, write_scenario, Decision, EpisodeLog, EpisodeOptions, KindDraw,
    Scenario, ScenarioConfig, State,
};
