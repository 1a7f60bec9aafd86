use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use dpdp_core::experiments::{ExperimentConfig, ALPHA_GRID, BETA_GRID, DENSITY_BIN_S};
use dpdp_core::{PolicySpec, ScenarioConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TuneSection {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl Default for TuneSection {
    fn default() -> Self {
        TuneSection { alphas: ALPHA_GRID.to_vec(), betas: BETA_GRID.to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportSection {
    pub bin_s: f64,
}

impl Default for ReportSection {
    fn default() -> Self {
        ReportSection { bin_s: DENSITY_BIN_S }
    }
}

/// Contents of a TOML config file; see `configs/base_system.toml`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub replications: usize,
    pub seed_base: u64,
    pub scenario: ScenarioConfig,
    pub policy: PolicySpec,
    pub tune: TuneSection,
    pub report: ReportSection,
}

impl Default for FileConfig {
    fn default() -> Self {
        FileConfig {
            replications: 500,
            seed_base: 0,
            scenario: ScenarioConfig::default(),
            policy: PolicySpec::default(),
            tune: TuneSection::default(),
            report: ReportSection::default(),
        }
    }
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(FileConfig::default()),
            Some(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                FileConfig::parse(&text).with_context(|| format!("parsing {}", p.display()))
            }
        }
    }

    pub fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig::new(self.scenario.clone(), self.policy.clone(), self.replications, self.seed_base)
    }
}
