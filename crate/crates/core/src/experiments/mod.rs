//! Replicated batch runs, parameter grid search, KPI aggregation and table
//! exports.

mod kpi;
mod table;

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use kpi::{AggregateReport, KpiReport, Summary};
pub use table::{Cell, Format, Table, TableError};

use crate::policy::PolicySpec;
use crate::sim::{generate_scenario, run_episode, EpisodeOptions, ScenarioConfig, SimError};

/// Default search range for the path-length weight.
pub const ALPHA_GRID: [f64; 8] = [0.005, 0.01, 0.02, 0.03, 0.05, 0.08, 0.12, 0.2];
/// Default search range for the urgency weight.
pub const BETA_GRID: [f64; 10] = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0];
/// Default histogram bin width for delivery densities, seconds.
pub const DENSITY_BIN_S: f64 = 300.0;

/// The base system: two vehicles, ten stores, one order per four minutes
/// with probability 0.2, two-hour deadlines over an eight-hour day.
pub fn base_system_config() -> ScenarioConfig {
    ScenarioConfig::default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: ScenarioConfig,
    pub policy: PolicySpec,
    pub replications: usize,
    /// Replication `i` uses scenario and policy seed `seed_base + i`.
    pub seed_base: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(scenario: ScenarioConfig, policy: PolicySpec, replications: usize, seed_base: u64) -> Self {
        ExperimentConfig { scenario, policy, replications, seed_base, output: None }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.replications == 0 {
            return Err("replications must be at least 1".into());
        }
        self.scenario.validate()?;
        self.policy.validate()
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.replications as u64).map(|i| self.seed_base + i)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum BatchError {
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("replication with seed {seed} aborted: {source}")]
    Episode {
        seed: u64,
        #[source]
        source: SimError,
    },
}

/// Runs one replication: the scenario and the policy both use `seed`.
pub fn run_replication(scenario: &ScenarioConfig, policy: &PolicySpec, seed: u64) -> Result<KpiReport, BatchError> {
    let cfg = ScenarioConfig { seed, ..scenario.clone() };
    let s = generate_scenario(&cfg);
    let mut p = policy.build(&cfg, seed);
    let log = run_episode(&s, p.as_mut(), &EpisodeOptions::default())
        .map_err(|source| BatchError::Episode { seed, source })?;
    Ok(KpiReport::from_log(&log, cfg.speed))
}

/// Runs all replications in parallel; rows come back in seed order.
pub fn run_batch(config: &ExperimentConfig) -> Result<AggregateReport, BatchError> {
    config.validate().map_err(BatchError::Config)?;
    let seeds: Vec<u64> = config.seeds().collect();
    let rows = seeds
        .par_iter()
        .map(|&s| run_replication(&config.scenario, &config.policy, s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AggregateReport::from_rows(config.policy.label(), rows))
}

/// One evaluated parameter pair.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub alpha: f64,
    pub beta: f64,
    pub report: AggregateReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    /// Index into `points` of the lowest mean penalty per request.
    pub best: usize,
    /// Alpha-major order: `points[i * betas + j]` is `(alphas[i], betas[j])`.
    pub points: Vec<GridPoint>,
}

impl GridResult {
    pub fn best_pair(&self) -> (f64, f64) {
        let p = &self.points[self.best];
        (p.alpha, p.beta)
    }

    pub fn best_report(&self) -> &AggregateReport {
        &self.points[self.best].report
    }

    /// Points with the given alpha, in grid order.
    pub fn slice_alpha(&self, alpha: f64) -> Vec<&GridPoint> {
        self.points.iter().filter(|p| p.alpha == alpha).collect()
    }

    pub const SURFACE_COLUMNS: [&'static str; 8] = [
        "alpha",
        "beta",
        "penalty_per_request",
        "penalty_per_request_se",
        "pct_late",
        "mean_lateness_min",
        "total_travel_min",
        "replications",
    ];

    pub fn surface_table(&self) -> Table {
        let mut t = Table::new(Self::SURFACE_COLUMNS);
        for p in &self.points {
            let r = &p.report;
            t.push(vec![
                p.alpha.into(),
                p.beta.into(),
                r.penalty_per_request.mean.into(),
                r.penalty_per_request.std_error.into(),
                r.pct_late.mean.into(),
                r.mean_lateness_min.mean.into(),
                r.total_travel_min.mean.into(),
                r.replications().into(),
            ]);
        }
        t
    }
}

/// Evaluates every `(alpha, beta)` pair of the CFA described by `config` on
/// the same seeds. The best pair minimizes mean penalty per request, ties
/// broken towards smaller alpha, then smaller beta.
pub fn grid_search(config: &ExperimentConfig, alphas: &[f64], betas: &[f64]) -> Result<GridResult, BatchError> {
    if alphas.is_empty() || betas.is_empty() {
        return Err(BatchError::Config("parameter grids must be non-empty".into()));
    }
    config.validate().map_err(BatchError::Config)?;
    let pairs: Vec<(f64, f64)> = alphas.iter().flat_map(|&a| betas.iter().map(move |&b| (a, b))).collect();
    let specs: Vec<PolicySpec> = pairs
        .iter()
        .map(|&(alpha, beta)| {
            let mut p = config.policy.clone();
            p.engine.alpha = alpha;
            p.engine.beta = beta;
            p
        })
        .collect();
    for s in &specs {
        s.validate().map_err(BatchError::Config)?;
    }
    let seeds: Vec<u64> = config.seeds().collect();
    let jobs: Vec<(usize, u64)> = (0..specs.len()).flat_map(|k| seeds.iter().map(move |&s| (k, s))).collect();
    let mut rows = jobs
        .par_iter()
        .map(|&(k, s)| run_replication(&config.scenario, &specs[k], s))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter();
    let points: Vec<GridPoint> = pairs
        .iter()
        .zip(&specs)
        .map(|(&(alpha, beta), spec)| GridPoint {
            alpha,
            beta,
            report: AggregateReport::from_rows(spec.label(), rows.by_ref().take(seeds.len()).collect()),
        })
        .collect();
    let best = (0..points.len())
        .min_by(|&i, &j| {
            let (a, b) = (&points[i], &points[j]);
            a.report
                .penalty_per_request
                .mean
                .total_cmp(&b.report.penalty_per_request.mean)
                .then(a.alpha.total_cmp(&b.alpha))
                .then(a.beta.total_cmp(&b.beta))
        })
        .expect("grid is non-empty");
    Ok(GridResult { best, points })
}

/// One histogram bin of delivery time minus deadline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityBin {
    pub center_min: f64,
    /// Probability density per minute.
    pub density: f64,
}

/// Histogram of `deltas` (seconds) over bins `(k·w, (k+1)·w]`, covering every
/// bin from the lowest to the highest occupied one. Densities are per
/// minute and integrate to one.
pub fn delivery_density(deltas: &[f64], bin_width_s: f64) -> Vec<DensityBin> {
    assert!(bin_width_s > 0.0, "bin width must be positive");
    if deltas.is_empty() {
        return Vec::new();
    }
    let bin = |x: f64| (x / bin_width_s).ceil() as i64 - 1;
    let lo = deltas.iter().map(|&x| bin(x)).min().expect("non-empty");
    let hi = deltas.iter().map(|&x| bin(x)).max().expect("non-empty");
    let mut counts = vec![0usize; (hi - lo + 1) as usize];
    for &x in deltas {
        counts[(bin(x) - lo) as usize] += 1;
    }
    let width_min = bin_width_s / 60.0;
    let total = deltas.len() as f64;
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| DensityBin {
            center_min: ((lo + i as i64) as f64 + 0.5) * width_min,
            density: c as f64 / total / width_min,
        })
        .collect()
}

/// Probability mass the histogram puts on late deliveries.
pub fn late_mass(bins: &[DensityBin], bin_width_s: f64) -> f64 {
    bins.iter().filter(|b| b.center_min > 0.0).map(|b| b.density * bin_width_s / 60.0).sum()
}

pub fn density_table(bins: &[DensityBin]) -> Table {
    let mut t = Table::new(["bin_center_min", "density"]);
    for b in bins {
        t.push(vec![b.center_min.into(), b.density.into()]);
    }
    t
}

pub const REPLICATION_COLUMNS: [&str; 9] = [
    "seed",
    "request_count",
    "total_penalty",
    "penalty_per_request",
    "pct_late",
    "late_count",
    "mean_lateness_min",
    "total_travel_min",
    "epochs",
];

/// Per-replication KPI rows.
pub fn replication_table(report: &AggregateReport) -> Table {
    let mut t = Table::new(REPLICATION_COLUMNS);
    for r in &report.rows {
        t.push(vec![
            r.seed.into(),
            r.request_count.into(),
            r.total_penalty.into(),
            r.penalty_per_request.into(),
            r.pct_late.into(),
            r.late_count.into(),
            r.mean_lateness_min.into(),
            r.total_travel_min.into(),
            r.epochs.into(),
        ]);
    }
    t
}

/// Delivery time minus deadline of every request, seconds.
pub fn deltas_table(report: &AggregateReport) -> Table {
    let mut t = Table::new(["seed", "delta_s"]);
    for r in &report.rows {
        for &d in &r.delivery_delta_samples {
            t.push(vec![r.seed.into(), d.into()]);
        }
    }
    t
}

/// Rebuilds a report from [`replication_table`] and [`deltas_table`] output.
pub fn report_from_tables(label: &str, replications: &Table, deltas: &Table) -> Result<AggregateReport, String> {
    let col = |t: &Table, name: &str| t.column_f64(name).ok_or_else(|| format!("missing numeric column {name}"));
    let cols: Vec<Vec<f64>> = REPLICATION_COLUMNS.iter().map(|c| col(replications, c)).collect::<Result<_, _>>()?;
    let (dseed, dval) = (col(deltas, "seed")?, col(deltas, "delta_s")?);
    let rows = (0..replications.rows.len())
        .map(|i| {
            let seed = cols[0][i] as u64;
            KpiReport {
                seed,
                request_count: cols[1][i] as usize,
                total_penalty: cols[2][i],
                penalty_per_request: cols[3][i],
                pct_late: cols[4][i],
                late_count: cols[5][i] as usize,
                mean_lateness_min: cols[6][i],
                total_travel_min: cols[7][i],
                epochs: cols[8][i] as u64,
                delivery_delta_samples: dseed.iter().zip(&dval).filter(|(s, _)| **s as u64 == seed).map(|(_, d)| *d).collect(),
            }
        })
        .collect();
    Ok(AggregateReport::from_rows(label, rows))
}

/// One row per report: mean and standard error of every KPI.
pub fn summary_table(reports: &[AggregateReport]) -> Table {
    let mut t = Table::new([
        "policy",
        "replications",
        "penalty_per_request",
        "penalty_per_request_se",
        "pct_late",
        "pct_late_se",
        "mean_lateness_min",
        "mean_lateness_min_se",
        "total_travel_min",
        "total_travel_min_se",
    ]);
    for r in reports {
        t.push(vec![
            r.label.clone().into(),
            r.replications().into(),
            r.penalty_per_request.mean.into(),
            r.penalty_per_request.std_error.into(),
            r.pct_late.mean.into(),
            r.pct_late.std_error.into(),
            r.mean_lateness_min.mean.into(),
            r.mean_lateness_min.std_error.into(),
            r.total_travel_min.mean.into(),
            r.total_travel_min.std_error.into(),
        ]);
    }
    t
}
