use serde::{Deserialize, Serialize};

use crate::model::{Location, PenaltySpec, Time, TravelMetric};
use crate::routing::RoutingContext;

/// How order kinds are drawn in each arrival interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindDraw {
    /// One draw per interval; a successful draw picks either kind with equal
    /// probability.
    Shared,
    /// One independent draw per kind per interval.
    PerKind,
}

impl KindDraw {
    pub fn as_str(self) -> &'static str {
        match self {
            KindDraw::Shared => "shared",
            KindDraw::PerKind => "per_kind",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "shared" => Some(KindDraw::Shared),
            "per_kind" => Some(KindDraw::PerKind),
            _ => None,
        }
    }
}

/// Parameters of the stochastic order stream and the fleet.
///
/// Times are in seconds (or minutes where the name says so) so configuration
/// files stay readable; simulation internals convert to [`Time`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Orders arrive during `[0, horizon_s]`.
    pub horizon_s: f64,
    /// Length of each arrival interval in minutes.
    pub interval_min: f64,
    /// Probability of an order arrival per interval (per kind for
    /// [`KindDraw::PerKind`]).
    pub arrival_prob: f64,
    pub kind_draw: KindDraw,
    pub max_order_size: u32,
    pub deadline_s: f64,
    pub num_stores: usize,
    pub num_vehicles: usize,
    pub depot: Location,
    pub square_side: f64,
    /// Distance units per second.
    pub speed: f64,
    pub penalty: PenaltySpec,
    pub epoch_min_gap_s: f64,
    pub epoch_max_gap_s: f64,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            horizon_s: 8.0 * 3600.0,
            interval_min: 4.0,
            arrival_prob: 0.2,
            kind_draw: KindDraw::Shared,
            max_order_size: 1,
            deadline_s: 7200.0,
            num_stores: 10,
            num_vehicles: 2,
            depot: Location::new(500.0, 500.0),
            square_side: 1000.0,
            speed: 0.4,
            penalty: PenaltySpec::BASE,
            epoch_min_gap_s: 120.0,
            epoch_max_gap_s: 300.0,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("horizon_s", self.horizon_s),
            ("interval_min", self.interval_min),
            ("deadline_s", self.deadline_s),
            ("square_side", self.square_side),
            ("speed", self.speed),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        if !(0.0..=1.0).contains(&self.arrival_prob) {
            return Err(format!("arrival_prob must lie in [0, 1], got {}", self.arrival_prob));
        }
        if self.max_order_size == 0 || self.num_stores == 0 || self.num_vehicles == 0 {
            return Err("max_order_size, num_stores and num_vehicles must be at least 1".into());
        }
        if !(self.epoch_min_gap_s >= 0.0 && self.epoch_min_gap_s <= self.epoch_max_gap_s) {
            return Err("need 0 <= epoch_min_gap_s <= epoch_max_gap_s".into());
        }
        if self.epoch_max_gap_s <= 0.0 {
            return Err("epoch_max_gap_s must be positive".into());
        }
        if self.penalty.fixed < 0.0 || self.penalty.rate < 0.0 {
            return Err("penalty terms must be nonnegative".into());
        }
        if !self.depot.is_finite() {
            return Err("depot must be finite".into());
        }
        Ok(())
    }

    pub fn metric(&self) -> TravelMetric {
        TravelMetric::new(self.speed)
    }

    pub fn routing(&self) -> RoutingContext {
        RoutingContext { metric: self.metric(), penalty: self.penalty }
    }

    pub fn horizon(&self) -> Time {
        Time::from_secs(self.horizon_s)
    }

    pub fn deadline_window(&self) -> Time {
        Time::from_secs(self.deadline_s)
    }

    pub fn interval(&self) -> Time {
        Time::from_secs(self.interval_min * 60.0)
    }

    pub fn epoch_min_gap(&self) -> Time {
        Time::from_secs(self.epoch_min_gap_s)
    }

    pub fn epoch_max_gap(&self) -> Time {
        Time::from_secs(self.epoch_max_gap_s)
    }

    /// Same config with the order size drawn from `1..=n` and the arrival
    /// probability scaled by `2 / (n + 1)`, keeping the expected number of
    /// requests equal to the single-request case.
    pub fn with_equalized_order_size(&self, n: u32) -> Self {
        ScenarioConfig {
            max_order_size: n,
            arrival_prob: self.arrival_prob * 2.0 / (n as f64 + 1.0),
            ..self.clone()
        }
    }
}
