//! JSON form of the simulation config. Omitted sizes fall back to the
//! library defaults; `T`, `R` and `N` are accepted as short field names.

use std::path::Path;

use chaindist::bench::simulation::{
    DEFAULT_CLUSTER_SIZE, DEFAULT_REPETITIONS, DEFAULT_STEPS,
};
use chaindist::bench::kmedoids::DEFAULT_RESTARTS;
use chaindist::bench::SimulationConfig;
use chaindist::MatrixMetricKind;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfigDocument {
    pub alphas: Vec<Vec<f64>>,
    #[serde(default, alias = "T", skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, alias = "R", skip_serializing_if = "Option::is_none")]
    pub repetitions: Option<usize>,
    #[serde(default, alias = "N", skip_serializing_if = "Option::is_none")]
    pub cluster_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<f64>,
}

impl SimulationConfigDocument {
    /// Library config; `seed` overrides the file's seed when given.
    pub fn resolve(&self, seed: Option<u64>, source_name: &str) -> Result<SimulationConfig> {
        let invalid = |message: String| CliError::Validation {
            source_name: source_name.into(),
            message,
        };
        let metrics = match &self.metrics {
            None => MatrixMetricKind::ALL.to_vec(),
            Some(tags) => tags
                .iter()
                .map(|t| t.parse::<MatrixMetricKind>().map_err(&invalid))
                .collect::<Result<Vec<_>>>()?,
        };
        let mut unique = metrics.clone();
        unique.sort();
        unique.dedup();
        if unique.len() != metrics.len() {
            return Err(invalid("metrics listed more than once".into()));
        }
        let seed = seed
            .or(self.seed)
            .ok_or_else(|| invalid("no seed given in the config or on the command line".into()))?;
        let config = SimulationConfig {
            alphas: self.alphas.clone(),
            steps: self.steps.unwrap_or(DEFAULT_STEPS),
            repetitions: self.repetitions.unwrap_or(DEFAULT_REPETITIONS),
            cluster_size: self.cluster_size.unwrap_or(DEFAULT_CLUSTER_SIZE),
            metrics,
            seed,
            state_count: self
                .state_count
                .unwrap_or_else(|| self.alphas.first().map_or(0, Vec::len)),
            restarts: self.restarts.unwrap_or(DEFAULT_RESTARTS),
            smoothing: self.smoothing,
        };
        config.validate().map_err(|e| invalid(e.to_string()))?;
        Ok(config)
    }
}

pub fn read_config(path: &Path) -> Result<SimulationConfigDocument> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{name}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        source_name: name,
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}
