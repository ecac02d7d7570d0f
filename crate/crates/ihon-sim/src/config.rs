//! Experiment configuration: run parameters, sweeps, budget inputs, and
//! service profiles, loadable from a single JSON document.
//!
//! Every run parameter has a default matching the reference setup (10 Gb/s
//! output, 1200-byte GST packets, 40-1500-byte SM packets, 16 MiB buffer,
//! 40,000 packets per class, the ten standard seeds). Overrides are echoed
//! back in the output headers.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::ServiceClassProfile;
use crate::node::NodeParams;
use crate::time::{service_time, Picos};

/// The ten standard sub-simulation seeds.
pub const DEFAULT_SEEDS: [u64; 10] = [907, 234, 326, 104, 711, 523, 883, 113, 417, 656];

pub const DEFAULT_CAPACITY_BPS: u64 = 10_000_000_000;
pub const DEFAULT_GST_LENGTH_BYTES: u32 = 1200;
pub const DEFAULT_SM_MIN_BYTES: u32 = 40;
pub const DEFAULT_SM_MAX_BYTES: u32 = 1500;
pub const DEFAULT_LP_LENGTH_BYTES: u32 = 1500;
pub const DEFAULT_N_PACKETS: u64 = 40_000;
pub const DEFAULT_BUFFER_BYTES: u64 = 16 * 1024 * 1024;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config field {field}: {message}")]
    Invalid {
        field: &'static str,
        message: String,
    },
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

fn invalid(field: &'static str, message: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        field,
        message: message.to_string(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchedulerMode {
    /// Delay-line lookahead with gap-filled SM insertion (GST/SM classes).
    Fusion,
    /// Non-preemptive strict-priority Ethernet switch (HP/LP classes).
    StrictPriority,
}

/// One experiment's run parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub link_capacity_bps: u64,
    pub gst_length_bytes: u32,
    pub sm_length_min_bytes: u32,
    pub sm_length_max_bytes: u32,
    /// Deterministic LP packet length, used in strict-priority mode only.
    pub lp_length_bytes: u32,
    /// Offered GST load on the output wavelength (drives HP in
    /// strict-priority mode). Zero disables the source.
    pub gst_load: f64,
    /// Aggregate offered SM load on the output wavelength (drives LP in
    /// strict-priority mode). Zero disables the source.
    pub sm_load: f64,
    /// SM ingress interface count; bookkeeping tag only.
    pub n_interfaces: u32,
    /// Packets to generate per enabled class before draining.
    pub n_packets: u64,
    pub seeds: Vec<u64>,
    pub buffer_capacity_bytes: u64,
    pub scheduler_mode: SchedulerMode,
    pub scan_depth: usize,
    /// Delay-line time in microseconds. Defaults to the serialization time
    /// of the largest SM packet when absent.
    pub fdl_delay_us: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            link_capacity_bps: DEFAULT_CAPACITY_BPS,
            gst_length_bytes: DEFAULT_GST_LENGTH_BYTES,
            sm_length_min_bytes: DEFAULT_SM_MIN_BYTES,
            sm_length_max_bytes: DEFAULT_SM_MAX_BYTES,
            lp_length_bytes: DEFAULT_LP_LENGTH_BYTES,
            gst_load: 0.0,
            sm_load: 0.0,
            n_interfaces: 10,
            n_packets: DEFAULT_N_PACKETS,
            seeds: DEFAULT_SEEDS.to_vec(),
            buffer_capacity_bytes: DEFAULT_BUFFER_BYTES,
            scheduler_mode: SchedulerMode::Fusion,
            scan_depth: 1,
            fdl_delay_us: None,
        }
    }
}

impl RunConfig {
    /// Delay-line time: the configured override, or the serialization time
    /// of the largest SM packet.
    pub fn fdl_delay(&self) -> Picos {
        match self.fdl_delay_us {
            Some(us) => Picos::from_micros_f64(us),
            None => service_time(self.sm_length_max_bytes, self.link_capacity_bps),
        }
    }

    pub fn system_load(&self) -> f64 {
        self.gst_load + self.sm_load
    }

    pub(crate) fn node_params(&self) -> NodeParams {
        NodeParams {
            capacity_bps: self.link_capacity_bps,
            fdl_delay: self.fdl_delay(),
            buffer_capacity_bytes: self.buffer_capacity_bytes,
            scan_depth: self.scan_depth,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.link_capacity_bps == 0 {
            return Err(invalid("run.link_capacity_bps", "must be positive"));
        }
        for (field, load) in [
            ("run.gst_load", self.gst_load),
            ("run.sm_load", self.sm_load),
        ] {
            if !(0.0..1.0).contains(&load) {
                return Err(invalid(field, format!("must lie in [0, 1), got {load}")));
            }
        }
        if self.gst_length_bytes == 0 {
            return Err(invalid("run.gst_length_bytes", "must be positive"));
        }
        if self.lp_length_bytes == 0 {
            return Err(invalid("run.lp_length_bytes", "must be positive"));
        }
        if self.sm_length_min_bytes == 0 {
            return Err(invalid("run.sm_length_min_bytes", "must be positive"));
        }
        if self.sm_length_min_bytes > self.sm_length_max_bytes {
            return Err(invalid(
                "run.sm_length_min_bytes",
                format!(
                    "minimum {} exceeds maximum {}",
                    self.sm_length_min_bytes, self.sm_length_max_bytes
                ),
            ));
        }
        if self.seeds.is_empty() {
            return Err(invalid("run.seeds", "at least one seed is required"));
        }
        if self.buffer_capacity_bytes <= self.sm_length_max_bytes as u64 {
            return Err(invalid(
                "run.buffer_capacity_bytes",
                "must exceed the maximum SM packet length",
            ));
        }
        if self.scan_depth == 0 {
            return Err(invalid("run.scan_depth", "must be at least 1"));
        }
        let max_sm_service = service_time(self.sm_length_max_bytes, self.link_capacity_bps);
        if self.fdl_delay() < max_sm_service {
            return Err(invalid(
                "run.fdl_delay_us",
                format!(
                    "delay {} us is below the largest SM serialization time {} us",
                    self.fdl_delay().as_micros_f64(),
                    max_sm_service.as_micros_f64()
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    GstLoad,
    SmLoad,
}

impl SweepParameter {
    pub fn label(self) -> &'static str {
        match self {
            SweepParameter::GstLoad => "gst_load",
            SweepParameter::SmLoad => "sm_load",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepValues {
    /// Explicit list of values.
    List(Vec<f64>),
    /// Inclusive arithmetic range.
    Range { start: f64, stop: f64, step: f64 },
}

/// A load sweep: each point is an independent batch over all seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: SweepValues,
}

impl SweepSpec {
    pub fn expand(&self) -> Result<Vec<f64>, ConfigError> {
        let values = match &self.values {
            SweepValues::List(v) => v.clone(),
            SweepValues::Range { start, stop, step } => {
                if *step <= 0.0 {
                    return Err(invalid("sweep.values.step", "must be positive"));
                }
                let mut out = Vec::new();
                let mut k = 0u32;
                loop {
                    let v = start + f64::from(k) * step;
                    if v > stop + 1e-12 {
                        break;
                    }
                    out.push(v);
                    k += 1;
                }
                out
            }
        };
        if values.is_empty() {
            return Err(invalid("sweep.values", "no sweep points"));
        }
        Ok(values)
    }

    /// The base config with this sweep point applied.
    pub fn apply(&self, base: &RunConfig, value: f64) -> RunConfig {
        let mut cfg = base.clone();
        match self.parameter {
            SweepParameter::GstLoad => cfg.gst_load = value,
            SweepParameter::SmLoad => cfg.sm_load = value,
        }
        cfg
    }
}

/// Inputs to the link-budget table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetConfig {
    pub n_min: u32,
    pub n_max: u32,
    pub node_delay_us: f64,
    pub node_pdv_us: f64,
    pub propagation_us_per_km: f64,
    pub total_budget_us: f64,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        BudgetConfig {
            n_min: 2,
            n_max: 6,
            node_delay_us: 1.2,
            node_pdv_us: 0.0,
            propagation_us_per_km: 5.0,
            total_budget_us: 50.0,
        }
    }
}

impl BudgetConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_min > self.n_max {
            return Err(invalid("budget.n_min", "exceeds budget.n_max"));
        }
        if self.propagation_us_per_km <= 0.0 {
            return Err(invalid("budget.propagation_us_per_km", "must be positive"));
        }
        for (field, v) in [
            ("budget.node_delay_us", self.node_delay_us),
            ("budget.node_pdv_us", self.node_pdv_us),
            ("budget.total_budget_us", self.total_budget_us),
        ] {
            if v < 0.0 {
                return Err(invalid(field, "must be nonnegative"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Single,
    Sweep,
    Budget,
}

/// Top-level configuration document.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub mode: Option<Mode>,
    pub run: RunConfig,
    pub sweep: Option<SweepSpec>,
    pub budget: Option<BudgetConfig>,
    /// Service profiles to check run results against; defaults to the
    /// built-in profile set when absent.
    pub profiles: Option<Vec<ServiceClassProfile>>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text).map_err(|source| ConfigError::Parse {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.run.validate()?;
        if let Some(sweep) = &self.sweep {
            for value in sweep.expand()? {
                sweep.apply(&self.run, value).validate()?;
            }
        }
        if let Some(budget) = &self.budget {
            budget.validate()?;
        }
        Ok(())
    }
}
