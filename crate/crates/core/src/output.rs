//! Result files: CSV tables and a TOML summary per run, with matching loaders.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{ExperimentResult, HardeningPoint, HardeningSample};
use crate::link::SymbolRecord;
use crate::optimizer::FlipStep;

pub const SUMMARY_FILE: &str = "summary.toml";
pub const CONFIG_FILE: &str = "config.toml";

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()?;
    Ok(rows)
}

/// Columns: loop, pixel, goal_before, goal_after, accepted.
pub fn write_trace_csv(path: &Path, steps: &[FlipStep]) -> Result<()> {
    write_csv(path, steps)
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<FlipStep>> {
    read_csv(path)
}

/// Columns: symbol_index, bits, ideal_re, ideal_im, rx_re, rx_im, sigma_k.
pub fn write_constellation_csv(path: &Path, records: &[SymbolRecord]) -> Result<()> {
    write_csv(path, records)
}

pub fn read_constellation_csv(path: &Path) -> Result<Vec<SymbolRecord>> {
    read_csv(path)
}

pub fn write_hardening_points_csv(path: &Path, points: &[HardeningPoint]) -> Result<()> {
    write_csv(path, points)
}

pub fn read_hardening_points_csv(path: &Path) -> Result<Vec<HardeningPoint>> {
    read_csv(path)
}

pub fn write_hardening_samples_csv(path: &Path, samples: &[HardeningSample]) -> Result<()> {
    write_csv(path, samples)
}

pub fn read_hardening_samples_csv(path: &Path) -> Result<Vec<HardeningSample>> {
    read_csv(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSummary {
    pub label: String,
    pub int_db: f64,
    pub evm_initial: f64,
    pub evm_final: f64,
    pub loops_run: usize,
    pub flips_accepted: usize,
    pub converged: bool,
    pub config_initial: String,
    pub config_final: String,
}

impl From<&ExperimentResult> for StageSummary {
    fn from(r: &ExperimentResult) -> Self {
        Self {
            label: r.label.clone(),
            int_db: r.level.db(),
            evm_initial: r.evm_initial,
            evm_final: r.evm_final,
            loops_run: r.trace.loops_run,
            flips_accepted: r.trace.flips_accepted,
            converged: r.trace.converged,
            config_initial: r.config_initial.to_bit_string(),
            config_final: r.config_final.to_bit_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub int_db: f64,
    pub pre_evm: f64,
    pub post_evm: f64,
}

/// Scalar outcomes of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum Summary {
    SingleVsDual {
        seed: u64,
        noise_power: f64,
        evm_random: f64,
        evm_one_ris: f64,
        evm_two_ris: f64,
        stages: Vec<StageSummary>,
    },
    Escalation {
        seed: u64,
        noise_power: f64,
        evm_random: f64,
        evm_jammer_off: f64,
        levels: Vec<LevelSummary>,
        stages: Vec<StageSummary>,
    },
    Hardening {
        seed: u64,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        noise_power: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        slope: Option<f64>,
        points: Vec<HardeningPoint>,
    },
    Custom {
        seed: u64,
        noise_power: f64,
        evm_initial: f64,
        evm_final: f64,
        stages: Vec<StageSummary>,
    },
}

pub fn summary_to_string(summary: &Summary) -> Result<String> {
    toml::to_string(summary).map_err(|e| Error::Config(format!("cannot serialize summary: {e}")))
}

pub fn write_summary(path: &Path, summary: &Summary) -> Result<()> {
    fs::write(path, summary_to_string(summary)?)?;
    Ok(())
}

pub fn read_summary(path: &Path) -> Result<Summary> {
    let text = fs::read_to_string(path)?;
    toml::from_str(&text)
        .map_err(|e| Error::Config(format!("malformed summary {}: {e}", path.display())))
}

/// Trace and constellation files for one optimization stage.
pub fn write_stage(dir: &Path, result: &ExperimentResult) -> Result<()> {
    write_trace_csv(
        &dir.join(format!("trace_{}.csv", result.label)),
        &result.trace.steps,
    )?;
    write_constellation_csv(
        &dir.join(format!("constellation_{}_before.csv", result.label)),
        &result.constellation_before,
    )?;
    write_constellation_csv(
        &dir.join(format!("constellation_{}_after.csv", result.label)),
        &result.constellation_after,
    )
}
