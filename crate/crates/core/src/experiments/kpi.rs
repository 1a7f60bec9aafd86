use serde::{Deserialize, Serialize};

use crate::sim::EpisodeLog;

/// Performance of one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiReport {
    pub seed: u64,
    pub request_count: usize,
    pub total_penalty: f64,
    pub penalty_per_request: f64,
    pub late_count: usize,
    /// Percentage of requests delivered after their deadline.
    pub pct_late: f64,
    /// Mean minutes past the deadline over late requests; 0 if none.
    pub mean_lateness_min: f64,
    pub total_travel_min: f64,
    pub epochs: u64,
    /// Delivery time minus deadline, seconds, one per request.
    pub delivery_delta_samples: Vec<f64>,
}

impl KpiReport {
    /// `speed` converts driven distance into travel time.
    pub fn from_log(log: &EpisodeLog, speed: f64) -> Self {
        let n = log.deliveries.len();
        let deltas: Vec<f64> = log.deliveries.iter().map(|d| (d.delivered_at - d.deadline).secs()).collect();
        let late: Vec<f64> = deltas.iter().copied().filter(|d| *d > 0.0).collect();
        let total_penalty: f64 = log.deliveries.iter().map(|d| d.penalty).sum();
        let ratio = |a: f64| if n == 0 { 0.0 } else { a / n as f64 };
        KpiReport {
            seed: log.seed,
            request_count: n,
            total_penalty,
            penalty_per_request: ratio(total_penalty),
            late_count: late.len(),
            pct_late: 100.0 * ratio(late.len() as f64),
            mean_lateness_min: if late.is_empty() { 0.0 } else { late.iter().sum::<f64>() / late.len() as f64 / 60.0 },
            total_travel_min: log.vehicle_distance.iter().sum::<f64>() / speed / 60.0,
            epochs: log.epochs,
            delivery_delta_samples: deltas,
        }
    }
}

/// Mean and standard error of one KPI over replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std_error: f64,
    /// Replications contributing to the estimate.
    pub n: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Summary { mean: 0.0, std_error: 0.0, n };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std_error = if n < 2 {
            0.0
        } else {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        };
        Summary { mean, std_error, n }
    }
}

/// KPIs aggregated over replications.
///
/// Conditional lateness averages only replications with at least one late
/// delivery; every other KPI averages all replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub label: String,
    pub penalty_per_request: Summary,
    pub pct_late: Summary,
    pub mean_lateness_min: Summary,
    pub total_travel_min: Summary,
    pub rows: Vec<KpiReport>,
}

impl AggregateReport {
    pub fn from_rows(label: impl Into<String>, rows: Vec<KpiReport>) -> Self {
        let col = |f: fn(&KpiReport) -> f64| rows.iter().map(f).collect::<Vec<_>>();
        let lateness: Vec<f64> = rows.iter().filter(|r| r.late_count > 0).map(|r| r.mean_lateness_min).collect();
        AggregateReport {
            label: label.into(),
            penalty_per_request: Summary::of(&col(|r| r.penalty_per_request)),
            pct_late: Summary::of(&col(|r| r.pct_late)),
            mean_lateness_min: Summary::of(&lateness),
            total_travel_min: Summary::of(&col(|r| r.total_travel_min)),
            rows,
        }
    }

    pub fn replications(&self) -> usize {
        self.rows.len()
    }

    /// All delivery deltas, in replication order.
    pub fn pooled_deltas(&self) -> Vec<f64> {
        self.rows.iter().flat_map(|r| r.delivery_delta_samples.iter().copied()).collect()
    }
}
