//! Experiment configuration: a single JSON document, unknown keys rejected.

use std::path::Path;

use jasa_core::model::{ClusterSizing, RateLadder, Scenario};
use jasa_core::{EdgeCost, TableCosts};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::mode::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TotalPower {
    Watts(f64),
    Keyword(PowerKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerKeyword {
    /// One unit of power per annotator.
    Auto,
}

impl Default for TotalPower {
    fn default() -> Self {
        TotalPower::Keyword(PowerKeyword::Auto)
    }
}

impl TotalPower {
    pub fn resolve(self, annotators: usize) -> f64 {
        match self {
            TotalPower::Watts(p) => p,
            TotalPower::Keyword(PowerKeyword::Auto) => annotators as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sizing {
    #[default]
    Stirling,
    ExactOdd,
}

impl From<Sizing> for ClusterSizing {
    fn from(s: Sizing) -> Self {
        match s {
            Sizing::Stirling => ClusterSizing::Stirling,
            Sizing::ExactOdd => ClusterSizing::ExactOdd,
        }
    }
}

/// One row of an explicit edge-cost table. `type` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub used: usize,
    #[serde(rename = "type")]
    pub cluster_type: usize,
    pub annotators: usize,
    pub subchannels: usize,
}

/// Fixed per-edge costs that replace the channel model in fading modes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeTable {
    pub types: usize,
    pub entries: Vec<EdgeEntry>,
}

impl EdgeTable {
    pub fn to_costs(&self) -> Result<TableCosts> {
        if self.types == 0 {
            return Err(HarnessError::Config(
                "edge_table.types must be at least 1".into(),
            ));
        }
        let mut t = TableCosts::new(self.types);
        for e in &self.entries {
            if e.cluster_type == 0 || e.cluster_type > self.types {
                return Err(HarnessError::Config(format!(
                    "edge_table entry type {} outside 1..={}",
                    e.cluster_type, self.types
                )));
            }
            t.insert(
                e.used,
                e.cluster_type - 1,
                EdgeCost::new(e.annotators, e.subchannels),
            );
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// `[rate, lep]` pairs, rates strictly decreasing.
    pub ladder: Vec<(f64, f64)>,
    pub theta: f64,
    pub object_bits: u32,
    pub objects: usize,
    pub subchannel_bandwidth: f64,
    pub duration: f64,
    pub noise: f64,
    pub annotators: usize,
    pub subchannels: usize,
    pub total_power: TotalPower,
    pub gamma0: f64,
    pub mode: Mode,
    /// Algorithms compared in a sweep; empty means `[mode]`.
    pub algorithms: Vec<Mode>,
    pub trials: u64,
    pub seed: u64,
    pub cluster_size_override: Option<Vec<usize>>,
    pub cluster_sizing: Sizing,
    pub dominance_pruning: bool,
    /// Record wall-time in sweep rows; off gives byte-reproducible CSVs.
    pub timing: bool,
    pub edge_table: Option<EdgeTable>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let ladder = RateLadder::<f64>::reference()
            .entries()
            .iter()
            .map(|e| (e.rate, e.lep))
            .collect();
        ExperimentConfig {
            ladder,
            theta: 0.1,
            object_bits: 10,
            objects: 10,
            subchannel_bandwidth: 3.0,
            duration: 1.0,
            noise: 1.0,
            annotators: 10,
            subchannels: 10,
            total_power: TotalPower::default(),
            gamma0: 1.0,
            mode: Mode::FadingBb,
            algorithms: Vec::new(),
            trials: 1,
            seed: 0,
            cluster_size_override: None,
            cluster_sizing: Sizing::default(),
            dominance_pruning: true,
            timing: true,
            edge_table: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn ladder(&self) -> Result<RateLadder<f64>> {
        Ok(RateLadder::from_pairs(&self.ladder)?)
    }

    pub fn scenario(&self) -> Scenario<f64> {
        Scenario {
            objects: self.objects,
            object_bits: self.object_bits,
            theta: self.theta,
            annotators: self.annotators,
            subchannels: self.subchannels,
            subchannel_bandwidth: self.subchannel_bandwidth,
            duration: self.duration,
        }
    }

    pub fn cluster_sizes(&self) -> Result<Vec<usize>> {
        match &self.cluster_size_override {
            Some(s) => Ok(s.clone()),
            None => Ok(self
                .ladder()?
                .cluster_sizes(self.theta, self.cluster_sizing.into())?),
        }
    }

    pub fn algorithms(&self) -> Vec<Mode> {
        if self.algorithms.is_empty() {
            vec![self.mode]
        } else {
            self.algorithms.clone()
        }
    }

    pub fn type_count(&self) -> usize {
        match &self.edge_table {
            Some(t) => t.types,
            None => self.ladder.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        let ladder = self.ladder()?;
        self.scenario().validate()?;
        if !(self.noise > 0.0) || !self.noise.is_finite() {
            return bad(format!("noise must be positive, got {}", self.noise));
        }
        if let TotalPower::Watts(p) = self.total_power {
            if !(p > 0.0) || !p.is_finite() {
                return bad(format!("total_power must be positive or \"auto\", got {p}"));
            }
        }
        if !(self.gamma0 > 0.0) || !self.gamma0.is_finite() {
            return bad(format!("gamma0 must be positive, got {}", self.gamma0));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if let Some(sizes) = &self.cluster_size_override {
            if sizes.len() != ladder.len() {
                return bad(format!(
                    "cluster_size_override has {} entries for {} rates",
                    sizes.len(),
                    ladder.len()
                ));
            }
            if sizes.contains(&0) {
                return bad("cluster sizes must be positive".into());
            }
        } else {
            self.cluster_sizes()?;
        }
        if let Some(t) = &self.edge_table {
            t.to_costs()?;
        }
        for m in self.algorithms().into_iter().chain([self.mode]) {
            self.check_mode(m)?;
        }
        Ok(())
    }

    pub fn check_mode(&self, mode: Mode) -> Result<()> {
        if let Mode::TypeOnly(Some(n)) = mode {
            if n > self.type_count() {
                return Err(HarnessError::Config(format!(
                    "{mode} needs at least {n} cluster types, have {}",
                    self.type_count()
                )));
            }
        }
        if self.edge_table.is_some() && (mode.is_tci() || mode == Mode::AutoSpecialCase) {
            return Err(HarnessError::Config(format!(
                "mode {mode} needs the channel model; edge_table only drives fading-bb, \
                 fading-es and type-only modes"
            )));
        }
        Ok(())
    }
}
