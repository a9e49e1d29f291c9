//! Run configuration: a TOML file with one section per subsystem.
//!
//! | key | default |
//! |-----|---------|
//! | `experiment` | `"single_vs_dual"` (`escalation`, `hardening`, `custom`) |
//! | `seed` | `1` |
//! | `output_dir` | `$RISLINK_OUTPUT_DIR`, else `"results"` |
//! | `jobs` | `0` (all cores) |
//! | `cavity.n_pixels_per_surface` | `152` |
//! | `cavity.n_surfaces` | `2` |
//! | `cavity.kappa`, `cavity.eve_kappa` | `0.25` |
//! | `cavity.seed` | master `seed` |
//! | `link.signal_power` | `1.0` |
//! | `link.target_evm` | `0.9` unless `link.noise_power` is given |
//! | `link.pilot_count`, `link.data_count` | `16`, `256` |
//! | `interference.int_db` | `-inf` (Eve off; used by `custom`) |
//! | `interference.schedule_start_db/step_db/end_db` | `-10`, `5`, `0` |
//! | `optimizer.max_loops`, `frames_per_eval`, `crn` | `10`, `4`, `true` |
//! | `hardening.m_values` | `[8, 16, 32, 64, 128, 256]` |
//! | `hardening.realizations_per_m`, `evm_stats` | `200`, `true` |
//! | `custom.active_surfaces` | every surface |

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{CavityParameters, DEFAULT_KAPPA, DEFAULT_PIXELS_PER_SURFACE};
use crate::error::{Error, Result};
use crate::experiments::{
    ExperimentSettings, HardeningSettings, LinkBudget, NoiseSpec, OptimizerSettings,
    DEFAULT_M_VALUES, DEFAULT_REALIZATIONS_PER_M, DEFAULT_TARGET_EVM, MIN_REALIZATIONS_PER_M,
};
use crate::interference::{escalation_schedule, InterferenceLevel};
use crate::link::{DEFAULT_DATA_COUNT, DEFAULT_PILOT_COUNT};
use crate::optimizer::{DEFAULT_FRAMES_PER_EVAL, DEFAULT_MAX_LOOPS};

pub const OUTPUT_DIR_ENV: &str = "RISLINK_OUTPUT_DIR";
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    #[default]
    SingleVsDual,
    Escalation,
    Hardening,
    Custom,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::SingleVsDual => "single_vs_dual",
            ExperimentKind::Escalation => "escalation",
            ExperimentKind::Hardening => "hardening",
            ExperimentKind::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CavitySection {
    pub n_pixels_per_surface: usize,
    pub n_surfaces: usize,
    pub kappa: f64,
    pub eve_kappa: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for CavitySection {
    fn default() -> Self {
        Self {
            n_pixels_per_surface: DEFAULT_PIXELS_PER_SURFACE,
            n_surfaces: 2,
            kappa: DEFAULT_KAPPA,
            eve_kappa: DEFAULT_KAPPA,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkSection {
    pub signal_power: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_power: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_evm: Option<f64>,
    pub pilot_count: usize,
    pub data_count: usize,
}

impl Default for LinkSection {
    fn default() -> Self {
        Self {
            signal_power: 1.0,
            noise_power: None,
            target_evm: None,
            pilot_count: DEFAULT_PILOT_COUNT,
            data_count: DEFAULT_DATA_COUNT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InterferenceSection {
    pub int_db: f64,
    pub schedule_start_db: f64,
    pub schedule_step_db: f64,
    pub schedule_end_db: f64,
}

impl Default for InterferenceSection {
    fn default() -> Self {
        Self {
            int_db: f64::NEG_INFINITY,
            schedule_start_db: -10.0,
            schedule_step_db: 5.0,
            schedule_end_db: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerSection {
    pub max_loops: usize,
    pub frames_per_eval: usize,
    pub crn: bool,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        Self {
            max_loops: DEFAULT_MAX_LOOPS,
            frames_per_eval: DEFAULT_FRAMES_PER_EVAL,
            crn: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HardeningSection {
    pub m_values: Vec<usize>,
    pub realizations_per_m: usize,
    pub evm_stats: bool,
}

impl Default for HardeningSection {
    fn default() -> Self {
        Self {
            m_values: DEFAULT_M_VALUES.to_vec(),
            realizations_per_m: DEFAULT_REALIZATIONS_PER_M,
            evm_stats: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CustomSection {
    pub active_surfaces: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub experiment: ExperimentKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub jobs: usize,
    #[serde(default)]
    pub cavity: CavitySection,
    #[serde(default)]
    pub link: LinkSection,
    #[serde(default)]
    pub interference: InterferenceSection,
    #[serde(default)]
    pub optimizer: OptimizerSection,
    #[serde(default)]
    pub hardening: HardeningSection,
    #[serde(default)]
    pub custom: CustomSection,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

impl Default for RunConfig {
    fn default() -> Self {
        parse_config_str("", None, &[]).expect("defaults are valid")
    }
}

fn config_err(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("`{key}`: {msg}"))
}

/// Sets `dotted.key = value` in a TOML table. The value is parsed as a TOML
/// value when possible and kept as a string otherwise.
fn set_key(table: &mut toml::Table, key: &str, raw: &str) -> Result<()> {
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let mut parts: Vec<&str> = key.split('.').collect();
    let leaf = parts
        .pop()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| config_err(key, "empty key"))?;
    let mut cursor = table;
    for part in parts {
        let entry = cursor
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cursor = entry
            .as_table_mut()
            .ok_or_else(|| config_err(key, format!("`{part}` is not a section")))?;
    }
    cursor.insert(leaf.to_string(), value);
    Ok(())
}

/// Parses configuration text. `env_output_dir` supplies the output directory
/// when the text does not; `overrides` (`key`, `value`) pairs win over both.
pub fn parse_config_str(
    text: &str,
    env_output_dir: Option<&Path>,
    overrides: &[(String, String)],
) -> Result<RunConfig> {
    let mut table: toml::Table =
        toml::from_str(text).map_err(|e| Error::Config(format!("malformed configuration: {e}")))?;
    if let Some(dir) = env_output_dir {
        if !table.contains_key("output_dir") {
            table.insert(
                "output_dir".into(),
                toml::Value::String(dir.to_string_lossy().into_owned()),
            );
        }
    }
    for (k, v) in overrides {
        set_key(&mut table, k, v)?;
    }
    let mut cfg: RunConfig = table
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    cfg.resolve()?;
    Ok(cfg)
}

pub fn parse_config(
    path: Option<&Path>,
    env_output_dir: Option<&Path>,
    overrides: &[(String, String)],
) -> Result<RunConfig> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?,
        None => String::new(),
    };
    parse_config_str(&text, env_output_dir, overrides)
}

/// Serializes a configuration back to TOML.
pub fn emit_config(cfg: &RunConfig) -> Result<String> {
    toml::to_string(cfg).map_err(|e| Error::Config(format!("cannot serialize configuration: {e}")))
}

impl RunConfig {
    /// Fills derived defaults and range-checks every value.
    fn resolve(&mut self) -> Result<()> {
        if self.cavity.seed.is_none() {
            self.cavity.seed = Some(self.seed);
        }
        match (self.link.noise_power, self.link.target_evm) {
            (Some(_), Some(_)) => {
                return Err(config_err(
                    "link.noise_power",
                    "cannot be combined with link.target_evm",
                ))
            }
            (None, None) => self.link.target_evm = Some(DEFAULT_TARGET_EVM),
            _ => {}
        }
        if self.custom.active_surfaces.is_empty() {
            self.custom.active_surfaces = (0..self.cavity.n_surfaces).collect();
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.cavity;
        if c.n_pixels_per_surface == 0 {
            return Err(config_err(
                "cavity.n_pixels_per_surface",
                "must be positive",
            ));
        }
        if c.n_surfaces == 0 {
            return Err(config_err("cavity.n_surfaces", "must be positive"));
        }
        for (key, v) in [("cavity.kappa", c.kappa), ("cavity.eve_kappa", c.eve_kappa)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(config_err(key, format!("must be >= 0, got {v}")));
            }
        }
        let l = &self.link;
        if !(l.signal_power > 0.0 && l.signal_power.is_finite()) {
            return Err(config_err("link.signal_power", "must be positive"));
        }
        if let Some(n) = l.noise_power {
            if !(n >= 0.0 && n.is_finite()) {
                return Err(config_err("link.noise_power", "must be >= 0"));
            }
        }
        if let Some(t) = l.target_evm {
            if !(t > 0.0 && t.is_finite()) {
                return Err(config_err("link.target_evm", "must be positive"));
            }
        }
        if l.pilot_count == 0 {
            return Err(config_err("link.pilot_count", "must be positive"));
        }
        if l.data_count == 0 {
            return Err(config_err("link.data_count", "must be positive"));
        }
        InterferenceLevel::from_db(self.interference.int_db)
            .map_err(|e| config_err("interference.int_db", e))?;
        self.schedule()
            .map_err(|e| config_err("interference.schedule_start_db", e))?;
        if self.optimizer.max_loops == 0 {
            return Err(config_err("optimizer.max_loops", "must be at least 1"));
        }
        if self.optimizer.frames_per_eval == 0 {
            return Err(config_err(
                "optimizer.frames_per_eval",
                "must be at least 1",
            ));
        }
        let h = &self.hardening;
        if h.m_values.is_empty()
            || h.m_values[0] == 0
            || h.m_values.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(config_err(
                "hardening.m_values",
                "must be a non-empty, positive, strictly increasing list",
            ));
        }
        if h.realizations_per_m < MIN_REALIZATIONS_PER_M {
            return Err(config_err(
                "hardening.realizations_per_m",
                format!("must be at least {MIN_REALIZATIONS_PER_M}"),
            ));
        }
        if let Some(&s) = self
            .custom
            .active_surfaces
            .iter()
            .find(|&&s| s >= c.n_surfaces)
        {
            return Err(config_err(
                "custom.active_surfaces",
                format!("surface {s} does not exist"),
            ));
        }
        if self.experiment == ExperimentKind::SingleVsDual && c.n_surfaces < 2 {
            return Err(config_err(
                "cavity.n_surfaces",
                "single_vs_dual needs at least two surfaces",
            ));
        }
        // TOML integers are signed 64-bit.
        for (key, v) in [("seed", Some(self.seed)), ("cavity.seed", c.seed)] {
            if v.is_some_and(|v| v > i64::MAX as u64) {
                return Err(config_err(key, "must fit in a signed 64-bit integer"));
            }
        }
        Ok(())
    }

    pub fn schedule(&self) -> Result<Vec<InterferenceLevel>> {
        let i = &self.interference;
        escalation_schedule(i.schedule_start_db, i.schedule_step_db, i.schedule_end_db)
    }

    pub fn level(&self) -> InterferenceLevel {
        InterferenceLevel::from_db(self.interference.int_db).unwrap_or(InterferenceLevel::OFF)
    }

    pub fn cavity_parameters(&self) -> CavityParameters {
        CavityParameters {
            n_pixels_per_surface: self.cavity.n_pixels_per_surface,
            n_surfaces: self.cavity.n_surfaces,
            kappa: self.cavity.kappa,
            eve_kappa: self.cavity.eve_kappa,
            seed: self.cavity.seed.unwrap_or(self.seed),
        }
    }

    pub fn experiment_settings(&self) -> ExperimentSettings {
        let noise = match (self.link.noise_power, self.link.target_evm) {
            (Some(n), _) => NoiseSpec::Fixed(n),
            (None, t) => NoiseSpec::TargetEvm(t.unwrap_or(DEFAULT_TARGET_EVM)),
        };
        ExperimentSettings {
            cavity: self.cavity_parameters(),
            link: LinkBudget {
                signal_power: self.link.signal_power,
                noise,
                pilot_count: self.link.pilot_count,
                data_count: self.link.data_count,
            },
            optimizer: OptimizerSettings {
                max_loops: self.optimizer.max_loops,
                frames_per_eval: self.optimizer.frames_per_eval,
                crn: self.optimizer.crn,
            },
        }
    }

    pub fn hardening_settings(&self) -> HardeningSettings {
        HardeningSettings {
            m_values: self.hardening.m_values.clone(),
            realizations_per_m: self.hardening.realizations_per_m,
            evm_stats: self.hardening.evm_stats,
            jobs: self.jobs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kv(k: &str, v: &str) -> (String, String) {
        (k.to_string(), v.to_string())
    }

    #[test]
    fn empty_config_is_fully_defaulted() {
        let cfg = parse_config_str("experiment = \"hardening\"", None, &[]).unwrap();
        assert_eq!(cfg.experiment, ExperimentKind::Hardening);
        assert_eq!(cfg.seed, DEFAULT_SEED);
        assert_eq!(cfg.cavity.seed, Some(DEFAULT_SEED));
        assert_eq!(cfg.cavity.n_pixels_per_surface, 152);
        assert_eq!(cfg.link.target_evm, Some(0.9));
        assert_eq!(cfg.hardening.m_values, vec![8, 16, 32, 64, 128, 256]);
        assert_eq!(cfg.custom.active_surfaces, vec![0, 1]);
        assert!(cfg.level().is_off());
        assert_eq!(cfg.output_dir, PathBuf::from("results"));
    }

    #[test]
    fn bad_value_names_the_key() {
        let err = parse_config_str("[interference]\nint_db = \"abc\"\n", None, &[])
            .unwrap_err()
            .to_string();
        assert!(err.contains("int_db"), "{err}");
        let err = parse_config_str("", None, &[kv("interference.int_db", "abc")])
            .unwrap_err()
            .to_string();
        assert!(err.contains("int_db"), "{err}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = parse_config_str("[optimizer]\nmax_lops = 3\n", None, &[])
            .unwrap_err()
            .to_string();
        assert!(err.contains("max_lops"), "{err}");
        assert!(parse_config_str("colour = 1", None, &[]).is_err());
    }

    #[test]
    fn range_errors_name_the_key() {
        for (text, key) in [
            ("[optimizer]\nmax_loops = 0", "optimizer.max_loops"),
            ("[cavity]\nkappa = -1.0", "cavity.kappa"),
            (
                "[link]\nnoise_power = 0.1\ntarget_evm = 0.5",
                "link.noise_power",
            ),
            (
                "[hardening]\nrealizations_per_m = 10",
                "hardening.realizations_per_m",
            ),
            (
                "[interference]\nschedule_start_db = 5.0",
                "interference.schedule_start_db",
            ),
            ("[custom]\nactive_surfaces = [3]", "custom.active_surfaces"),
        ] {
            let err = parse_config_str(text, None, &[]).unwrap_err().to_string();
            assert!(err.contains(key), "{text}: {err}");
        }
        assert!(parse_config_str("not toml [", None, &[]).is_err());
    }

    #[test]
    fn precedence_flags_over_file_over_env() {
        let env = Path::new("/tmp/env-out");
        let cfg = parse_config_str("", Some(env), &[]).unwrap();
        assert_eq!(cfg.output_dir, env);
        let cfg = parse_config_str("output_dir = \"file-out\"", Some(env), &[]).unwrap();
        assert_eq!(cfg.output_dir, PathBuf::from("file-out"));
        let cfg = parse_config_str(
            "output_dir = \"file-out\"\nseed = 3",
            Some(env),
            &[
                kv("output_dir", "flag-out"),
                kv("seed", "9"),
                kv("optimizer.crn", "false"),
            ],
        )
        .unwrap();
        assert_eq!(cfg.output_dir, PathBuf::from("flag-out"));
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.cavity.seed, Some(9));
        assert!(!cfg.optimizer.crn);
    }

    #[test]
    fn jammer_level_accepts_inf() {
        let cfg = parse_config_str("[interference]\nint_db = -5.0", None, &[]).unwrap();
        assert_eq!(cfg.level().db(), -5.0);
        let cfg = parse_config_str("[interference]\nint_db = -inf", None, &[]).unwrap();
        assert!(cfg.level().is_off());
    }

    #[test]
    fn emit_then_parse_round_trips() {
        let texts = [
            "",
            "experiment = \"escalation\"\nseed = 77\n[link]\nnoise_power = 0.3\n",
            "[interference]\nint_db = -7.5\n[cavity]\nkappa = 0.0\nseed = 5\n[hardening]\nm_values = [4, 9]\nevm_stats = false\n",
        ];
        for text in texts {
            let cfg = parse_config_str(text, None, &[]).unwrap();
            let emitted = emit_config(&cfg).unwrap();
            assert_eq!(
                parse_config_str(&emitted, None, &[]).unwrap(),
                cfg,
                "{emitted}"
            );
        }
    }

    #[test]
    fn settings_mapping() {
        let cfg = parse_config_str("[link]\nnoise_power = 0.5", None, &[]).unwrap();
        let s = cfg.experiment_settings();
        assert_eq!(s.link.noise, NoiseSpec::Fixed(0.5));
        assert_eq!(s.cavity.seed, cfg.seed);
    }
}
