//! Runs a configured experiment, persists its results and prints the headline
//! EVM values.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use crate::config::{emit_config, ExperimentKind, RunConfig};
use crate::error::{Error, Result};
use crate::experiments::{
    run_calibration, run_custom, run_hardening_sweep, run_interference_escalation,
    run_single_vs_dual_ris, Calibration, EscalationResult, ExperimentResult, HardeningSweepResult,
    SingleVsDualResult,
};
use crate::output::{
    write_hardening_points_csv, write_hardening_samples_csv, write_stage, write_summary,
    LevelSummary, StageSummary, Summary, CONFIG_FILE, SUMMARY_FILE,
};

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    SingleVsDual(SingleVsDualResult),
    Escalation(EscalationResult),
    Hardening(HardeningSweepResult),
    Custom(Calibration, ExperimentResult),
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    let settings = cfg.experiment_settings();
    Ok(match cfg.experiment {
        ExperimentKind::SingleVsDual => {
            Outcome::SingleVsDual(run_single_vs_dual_ris(&settings, cfg.seed)?)
        }
        ExperimentKind::Escalation => Outcome::Escalation(run_interference_escalation(
            &settings,
            &cfg.schedule()?,
            cfg.seed,
            None,
        )?),
        ExperimentKind::Hardening => Outcome::Hardening(run_hardening_sweep(
            &settings,
            &cfg.hardening_settings(),
            cfg.seed,
        )?),
        ExperimentKind::Custom => {
            let (cal, result) = run_custom(
                &settings,
                &cfg.custom.active_surfaces,
                cfg.level(),
                cfg.seed,
            )?;
            Outcome::Custom(cal, result)
        }
    })
}

pub fn summarize(cfg: &RunConfig, outcome: &Outcome) -> Summary {
    let seed = cfg.seed;
    match outcome {
        Outcome::SingleVsDual(r) => Summary::SingleVsDual {
            seed,
            noise_power: r.calibration.noise_power,
            evm_random: r.evm_random(),
            evm_one_ris: r.one_ris.evm_final,
            evm_two_ris: r.two_ris.evm_final,
            stages: vec![(&r.one_ris).into(), (&r.two_ris).into()],
        },
        Outcome::Escalation(r) => Summary::Escalation {
            seed,
            noise_power: r.calibration.noise_power,
            evm_random: r.calibration.achieved_evm,
            evm_jammer_off: r.reference.evm_final,
            levels: r
                .levels
                .iter()
                .map(|l| LevelSummary {
                    int_db: l.level.db(),
                    pre_evm: l.pre_evm,
                    post_evm: l.post_evm,
                })
                .collect(),
            stages: std::iter::once(&r.reference)
                .chain(r.levels.iter().map(|l| &l.result))
                .map(StageSummary::from)
                .collect(),
        },
        Outcome::Hardening(r) => Summary::Hardening {
            seed,
            noise_power: r.noise_power,
            slope: r.slope,
            points: r.points.clone(),
        },
        Outcome::Custom(cal, r) => Summary::Custom {
            seed,
            noise_power: cal.noise_power,
            evm_initial: r.evm_initial,
            evm_final: r.evm_final,
            stages: vec![r.into()],
        },
    }
}

fn pct(v: f64) -> String {
    format!("{:.1} %", 100.0 * v)
}

/// Human-readable result lines, EVM in percent with one decimal.
pub fn report_lines(outcome: &Outcome) -> Vec<String> {
    match outcome {
        Outcome::SingleVsDual(r) => vec![
            format!("EVM random configuration: {}", pct(r.evm_random())),
            format!("EVM one RIS optimized: {}", pct(r.one_ris.evm_final)),
            format!("EVM two RIS optimized: {}", pct(r.two_ris.evm_final)),
        ],
        Outcome::Escalation(r) => std::iter::once(format!(
            "EVM jammer off, optimized: {}",
            pct(r.reference.evm_final)
        ))
        .chain(r.levels.iter().map(|l| {
            format!(
                "Int {}: EVM before {} -> after {}",
                l.level,
                pct(l.pre_evm),
                pct(l.post_evm)
            )
        }))
        .collect(),
        Outcome::Hardening(r) => r
            .points
            .iter()
            .map(|p| {
                let evm = p
                    .mean_evm
                    .map(|e| format!(", mean EVM {}", pct(e)))
                    .unwrap_or_default();
                format!(
                    "M = {}: mean |h| {:.4}, std {:.4}, std/mean {:.4}{evm}",
                    p.m, p.mean_abs_h, p.std_abs_h, p.relative_fluctuation
                )
            })
            .chain(std::iter::once(match r.slope {
                Some(s) => format!("log-log slope of std/mean vs M: {s:.3}"),
                None => "log-log slope of std/mean vs M: n/a".to_string(),
            }))
            .collect(),
        Outcome::Custom(_, r) => vec![
            format!("EVM initial: {}", pct(r.evm_initial)),
            format!("EVM optimized: {}", pct(r.evm_final)),
        ],
    }
}

pub fn run_directory(cfg: &RunConfig) -> PathBuf {
    cfg.output_dir
        .join(format!("{}-seed{}", cfg.experiment.name(), cfg.seed))
}

/// Writes config snapshot, summary and tables; returns the run directory.
pub fn persist(cfg: &RunConfig, outcome: &Outcome) -> Result<PathBuf> {
    let dir = run_directory(cfg);
    fs::create_dir_all(&dir).map_err(|e| {
        Error::Config(format!(
            "cannot create output directory {}: {e}",
            dir.display()
        ))
    })?;
    fs::write(dir.join(CONFIG_FILE), emit_config(cfg)?)?;
    write_summary(&dir.join(SUMMARY_FILE), &summarize(cfg, outcome))?;
    match outcome {
        Outcome::SingleVsDual(r) => {
            write_stage(&dir, &r.one_ris)?;
            write_stage(&dir, &r.two_ris)?;
        }
        Outcome::Escalation(r) => {
            write_stage(&dir, &r.reference)?;
            for l in &r.levels {
                write_stage(&dir, &l.result)?;
            }
        }
        Outcome::Hardening(r) => {
            write_hardening_points_csv(&dir.join("hardening_points.csv"), &r.points)?;
            write_hardening_samples_csv(&dir.join("hardening_samples.csv"), &r.samples)?;
        }
        Outcome::Custom(_, r) => write_stage(&dir, r)?,
    }
    Ok(dir)
}

/// Executes, persists and prints. Returns the run directory.
pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<PathBuf> {
    let outcome = execute(cfg)?;
    let dir = persist(cfg, &outcome)?;
    for line in report_lines(&outcome) {
        writeln!(out, "{line}")?;
    }
    writeln!(out, "results written to {}", dir.display())?;
    Ok(dir)
}

/// Prints the calibrated noise power for the configured link budget.
pub fn calibrate(cfg: &RunConfig, out: &mut dyn Write) -> Result<Calibration> {
    let cal = run_calibration(&cfg.experiment_settings(), cfg.seed)?;
    writeln!(out, "noise_power = {}", cal.noise_power)?;
    writeln!(out, "EVM random configuration: {}", pct(cal.achieved_evm))?;
    Ok(cal)
}
