use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use glassbench::metrics::ProtocolConfig;
use glassbench::sampler::Schedule;
use glassbench::topology::{Family, Shape};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyConfig {
    pub family: Family,
    /// `"rows,cols,shore"` for Chimera, `"m"` for Pegasus.
    pub shape: String,
    #[serde(default)]
    pub defect_qubits: usize,
    #[serde(default)]
    pub defect_couplers: usize,
}

impl TopologyConfig {
    pub fn parsed_shape(&self) -> anyhow::Result<Shape> {
        Ok(Shape::parse(self.family, &self.shape)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnealConfig {
    pub beta_min: f64,
    pub beta_max: f64,
    pub schedule: Schedule,
    pub chain_strength: f64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            beta_min: 0.1,
            beta_max: 10.0,
            schedule: Schedule::Geometric,
            chain_strength: 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IsometryConfig {
    pub family: Family,
    pub size: u32,
    pub instances: u32,
    /// Fixed sweep count for every relabeled run.
    pub effort: u32,
}

impl Default for IsometryConfig {
    fn default() -> Self {
        IsometryConfig {
            family: Family::Pegasus,
            size: 4,
            instances: 10,
            effort: 128,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub sizes: Vec<u32>,
    pub instances: u32,
    pub topologies: Vec<TopologyConfig>,
    pub protocol: ProtocolConfig,
    pub anneal: AnnealConfig,
    pub isometry: IsometryConfig,
    pub out: PathBuf,
    /// Worker threads; all available cores when unset.
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            sizes: (5..=10).collect(),
            instances: 100,
            topologies: vec![
                TopologyConfig {
                    family: Family::Chimera,
                    shape: "16,16,4".into(),
                    defect_qubits: 7,
                    defect_couplers: 0,
                },
                TopologyConfig {
                    family: Family::Pegasus,
                    shape: "16".into(),
                    defect_qubits: 130,
                    defect_couplers: 0,
                },
            ],
            protocol: ProtocolConfig::default(),
            anneal: AnnealConfig::default(),
            isometry: IsometryConfig::default(),
            out: PathBuf::from("out"),
            threads: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        Ok(config)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            bail!("sizes must be a non-empty list of positive integers");
        }
        if self.instances == 0 {
            bail!("instances must be positive");
        }
        if self.topologies.is_empty() {
            bail!("at least one topology is required");
        }
        let mut families: Vec<Family> = self.topologies.iter().map(|t| t.family).collect();
        families.sort_by_key(|f| f.name());
        families.dedup();
        if families.len() != self.topologies.len() {
            bail!("each family may appear once in topologies");
        }
        for t in &self.topologies {
            t.parsed_shape()?;
        }
        self.protocol.validate()?;
        if !(self.anneal.beta_min > 0.0 && self.anneal.beta_min < self.anneal.beta_max) {
            bail!("need 0 < beta_min < beta_max");
        }
        if self.anneal.chain_strength.is_nan() || self.anneal.chain_strength <= 0.0 {
            bail!("chain strength must be positive");
        }
        if self.isometry.size == 0 || self.isometry.instances == 0 || self.isometry.effort == 0 {
            bail!("isometry size, instances and effort must be positive");
        }
        if self.threads == Some(0) {
            bail!("threads must be positive");
        }
        Ok(())
    }

    pub fn topology(&self, family: Family) -> Option<&TopologyConfig> {
        self.topologies.iter().find(|t| t.family == family)
    }
}
