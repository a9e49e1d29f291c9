//! End-to-end experiments: one versus two surfaces, jammer escalation and the
//! channel-hardening sweep.
//!
//! Seeds: the realization comes from `CavityParameters::seed`; the experiment
//! seed drives the random starting configuration and the noise. Ensemble jobs
//! derive their own seeds from `(seed, job index)`, so results do not depend on
//! how many worker threads run them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{
    effective_channel, sample_realization, CavityParameters, CavityRealization, RisConfiguration,
};
use crate::error::{Error, Result};
use crate::interference::InterferenceLevel;
use crate::link::{SymbolRecord, DEFAULT_DATA_COUNT, DEFAULT_PILOT_COUNT};
use crate::optimizer::{
    evaluate_goal, greedy_optimize, GoalKind, GreedyOptions, OptimizationTrace, Scenario,
    DEFAULT_FRAMES_PER_EVAL, DEFAULT_MAX_LOOPS,
};
use crate::rng::{derive_seed, rng_from_seed};

/// Random-configuration EVM the link budget is calibrated to by default.
pub const DEFAULT_TARGET_EVM: f64 = 0.9;
pub const DEFAULT_M_VALUES: [usize; 6] = [8, 16, 32, 64, 128, 256];
pub const DEFAULT_REALIZATIONS_PER_M: usize = 200;
pub const MIN_REALIZATIONS_PER_M: usize = 50;

const STREAM_INIT: u64 = 1;
const STREAM_NOISE: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSpec {
    Fixed(f64),
    /// Calibrate noise so the random starting configuration has this mean EVM.
    TargetEvm(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub signal_power: f64,
    pub noise: NoiseSpec,
    pub pilot_count: usize,
    pub data_count: usize,
}

impl Default for LinkBudget {
    fn default() -> Self {
        Self {
            signal_power: 1.0,
            noise: NoiseSpec::TargetEvm(DEFAULT_TARGET_EVM),
            pilot_count: DEFAULT_PILOT_COUNT,
            data_count: DEFAULT_DATA_COUNT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OptimizerSettings {
    pub max_loops: usize,
    pub frames_per_eval: usize,
    pub crn: bool,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            max_loops: DEFAULT_MAX_LOOPS,
            frames_per_eval: DEFAULT_FRAMES_PER_EVAL,
            crn: true,
        }
    }
}

/// Inputs shared by every experiment.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExperimentSettings {
    pub cavity: CavityParameters,
    pub link: LinkBudget,
    pub optimizer: OptimizerSettings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub label: String,
    pub level: InterferenceLevel,
    pub evm_initial: f64,
    pub evm_final: f64,
    pub trace: OptimizationTrace,
    pub constellation_before: Vec<SymbolRecord>,
    pub constellation_after: Vec<SymbolRecord>,
    pub config_initial: RisConfiguration,
    pub config_final: RisConfiguration,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub noise_power: f64,
    pub achieved_evm: f64,
}

/// Finds the noise power at which `cfg` measures `target` mean EVM under
/// `eval_seed`, by bisection on log noise power.
pub fn calibrate_noise(
    scenario: &Scenario,
    cfg: &RisConfiguration,
    eval_seed: u64,
    target: f64,
) -> Result<Calibration> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::invalid(
            "target_evm",
            format!("must be positive, got {target}"),
        ));
    }
    let h2 = effective_channel(&scenario.realization, cfg)?.norm_sqr() * scenario.signal_power;
    if h2 == 0.0 {
        return Err(Error::Unequalizable);
    }
    let measure = |noise: f64| -> Result<f64> {
        evaluate_goal(&scenario.clone().with_noise_power(noise)?, cfg, eval_seed)
    };
    // EVM ≈ sqrt(noise / |h|²) away from the interference-limited regime.
    let guess = target * target * h2;
    let (mut lo, mut hi) = (guess.ln() - 1.0, guess.ln() + 1.0);
    let mut expansions = 0;
    while measure(lo.exp())? > target {
        lo -= 2.0;
        expansions += 1;
        if expansions > 40 {
            return Err(Error::invalid(
                "target_evm",
                format!("{target} is below the noiseless floor of this link"),
            ));
        }
    }
    while measure(hi.exp())? < target {
        hi += 2.0;
        expansions += 1;
        if expansions > 40 {
            return Err(Error::invalid(
                "target_evm",
                format!("{target} is not reachable by adding noise"),
            ));
        }
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if measure(mid.exp())? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let noise_power = (0.5 * (lo + hi)).exp();
    Ok(Calibration {
        noise_power,
        achieved_evm: measure(noise_power)?,
    })
}

/// Frozen pieces of one experiment run.
struct Setup {
    realization: CavityRealization,
    init: RisConfiguration,
    opts: GreedyOptions,
    calibration: Calibration,
}

impl Setup {
    fn new(settings: &ExperimentSettings, seed: u64) -> Result<Self> {
        let realization = sample_realization(&settings.cavity)?;
        let init =
            realization.random_configuration(&mut rng_from_seed(derive_seed(seed, STREAM_INIT)));
        let opts = GreedyOptions {
            max_loops: settings.optimizer.max_loops,
            crn: settings.optimizer.crn,
            seed: derive_seed(seed, STREAM_NOISE),
        };
        let base = base_scenario(settings, realization.clone(), 0.0)?;
        let calibration = match settings.link.noise {
            NoiseSpec::Fixed(noise) => {
                let s = base.with_noise_power(noise)?;
                Calibration {
                    noise_power: noise,
                    achieved_evm: evaluate_goal(&s, &init, opts.eval_seed(0))?,
                }
            }
            NoiseSpec::TargetEvm(target) => {
                calibrate_noise(&base, &init, opts.eval_seed(0), target)?
            }
        };
        Ok(Self {
            realization,
            init,
            opts,
            calibration,
        })
    }

    fn scenario(
        &self,
        settings: &ExperimentSettings,
        level: InterferenceLevel,
    ) -> Result<Scenario> {
        Ok(base_scenario(
            settings,
            self.realization.clone(),
            self.calibration.noise_power,
        )?
        .with_level(level))
    }
}

fn base_scenario(
    settings: &ExperimentSettings,
    realization: CavityRealization,
    noise_power: f64,
) -> Result<Scenario> {
    let mut s = Scenario::new(
        realization,
        settings.link.signal_power,
        noise_power,
        InterferenceLevel::OFF,
    )?
    .with_frames_per_eval(settings.optimizer.frames_per_eval)?;
    s.pilot_count = settings.link.pilot_count;
    s.data_count = settings.link.data_count;
    s.validate()?;
    Ok(s)
}

/// One greedy EVM optimization with constellations captured before and after.
fn optimize_stage(
    label: &str,
    scenario: &Scenario,
    init: &RisConfiguration,
    opts: &GreedyOptions,
    seed: u64,
) -> Result<ExperimentResult> {
    let snapshot_seed = opts.eval_seed(0);
    let before = scenario.snapshot(init, snapshot_seed)?;
    let (config_final, trace) = greedy_optimize(scenario, GoalKind::MeanEvm, init, opts)?;
    let after = scenario.snapshot(&config_final, snapshot_seed)?;
    Ok(ExperimentResult {
        label: label.to_string(),
        level: scenario.level,
        evm_initial: trace.initial_goal,
        evm_final: trace.final_goal,
        trace,
        constellation_before: before.records,
        constellation_after: after.records,
        config_initial: init.clone(),
        config_final,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleVsDualResult {
    pub calibration: Calibration,
    pub one_ris: ExperimentResult,
    pub two_ris: ExperimentResult,
}

impl SingleVsDualResult {
    pub fn evm_random(&self) -> f64 {
        self.one_ris.evm_initial
    }
}

/// Optimizes surface 0 alone with the others frozen, then continues from that
/// configuration with every surface active. Eve is off.
pub fn run_single_vs_dual_ris(
    settings: &ExperimentSettings,
    seed: u64,
) -> Result<SingleVsDualResult> {
    if settings.cavity.n_surfaces < 2 {
        return Err(Error::invalid(
            "n_surfaces",
            "single versus dual RIS needs at least two surfaces",
        ));
    }
    let setup = Setup::new(settings, seed)?;
    let full = setup.scenario(settings, InterferenceLevel::OFF)?;
    let first = full.clone().with_active_surfaces(&[0])?;
    let one_ris = optimize_stage("one_ris", &first, &setup.init, &setup.opts, seed)?;
    let two_ris = optimize_stage("two_ris", &full, &one_ris.config_final, &setup.opts, seed)?;
    Ok(SingleVsDualResult {
        calibration: setup.calibration,
        one_ris,
        two_ris,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelOutcome {
    pub level: InterferenceLevel,
    /// EVM right after Eve steps up, with the carried-over configuration.
    pub pre_evm: f64,
    pub post_evm: f64,
    pub result: ExperimentResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EscalationResult {
    pub calibration: Calibration,
    /// All surfaces optimized with Eve off; the first level starts from its result.
    pub reference: ExperimentResult,
    pub levels: Vec<LevelOutcome>,
}

/// Optimizes with all surfaces and Eve off, then re-optimizes at each
/// interference level in turn, carrying the configuration forward. Noise is calibrated on the random starting
/// configuration with Eve off, as for the other experiments.
pub fn run_interference_escalation(
    settings: &ExperimentSettings,
    schedule: &[InterferenceLevel],
    seed: u64,
    init: Option<&RisConfiguration>,
) -> Result<EscalationResult> {
    if schedule.is_empty() {
        return Err(Error::Empty("schedule"));
    }
    let setup = Setup::new(settings, seed)?;
    let start = init.unwrap_or(&setup.init);
    let reference = optimize_stage(
        "jammer_off",
        &setup.scenario(settings, InterferenceLevel::OFF)?,
        start,
        &setup.opts,
        seed,
    )?;
    let mut cfg = reference.config_final.clone();
    let mut levels = Vec::with_capacity(schedule.len());
    for (k, &level) in schedule.iter().enumerate() {
        let scenario = setup.scenario(settings, level)?;
        let result = optimize_stage(&format!("level_{k}"), &scenario, &cfg, &setup.opts, seed)?;
        cfg = result.config_final.clone();
        levels.push(LevelOutcome {
            level,
            pre_evm: result.evm_initial,
            post_evm: result.evm_final,
            result,
        });
    }
    Ok(EscalationResult {
        calibration: setup.calibration,
        reference,
        levels,
    })
}

/// Single optimization over the chosen surfaces at one interference level.
pub fn run_custom(
    settings: &ExperimentSettings,
    active_surfaces: &[usize],
    level: InterferenceLevel,
    seed: u64,
) -> Result<(Calibration, ExperimentResult)> {
    let setup = Setup::new(settings, seed)?;
    let scenario = setup
        .scenario(settings, level)?
        .with_active_surfaces(active_surfaces)?;
    let result = optimize_stage("custom", &scenario, &setup.init, &setup.opts, seed)?;
    Ok((setup.calibration, result))
}

/// Calibration of the random starting configuration only.
pub fn run_calibration(settings: &ExperimentSettings, seed: u64) -> Result<Calibration> {
    Ok(Setup::new(settings, seed)?.calibration)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardeningSettings {
    pub m_values: Vec<usize>,
    pub realizations_per_m: usize,
    /// Also run the EVM-goal optimizer per realization.
    pub evm_stats: bool,
    /// Worker threads, 0 for the rayon default.
    pub jobs: usize,
}

impl Default for HardeningSettings {
    fn default() -> Self {
        Self {
            m_values: DEFAULT_M_VALUES.to_vec(),
            realizations_per_m: DEFAULT_REALIZATIONS_PER_M,
            evm_stats: true,
            jobs: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardeningSample {
    pub m: usize,
    pub realization: usize,
    pub abs_h: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub evm: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardeningPoint {
    pub m: usize,
    pub mean_abs_h: f64,
    pub std_abs_h: f64,
    pub relative_fluctuation: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mean_evm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardeningSweepResult {
    pub points: Vec<HardeningPoint>,
    pub samples: Vec<HardeningSample>,
    /// Least-squares slope of ln(relative fluctuation) against ln(M).
    pub slope: Option<f64>,
    pub noise_power: Option<f64>,
}

impl HardeningSweepResult {
    pub fn m_values(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.m).collect()
    }
}

/// Sample mean and (n − 1) standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}

/// Ordinary least-squares slope, `None` with fewer than two distinct x.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// For each M, optimizes `realizations_per_m` single-surface cavities of M
/// pixels with the noiseless power goal and reports the spread of the
/// optimized |h_AB|.
pub fn run_hardening_sweep(
    settings: &ExperimentSettings,
    sweep: &HardeningSettings,
    seed: u64,
) -> Result<HardeningSweepResult> {
    if sweep.m_values.is_empty() {
        return Err(Error::Empty("m_values"));
    }
    if sweep.m_values.windows(2).any(|w| w[1] <= w[0]) || sweep.m_values[0] == 0 {
        return Err(Error::invalid(
            "m_values",
            "must be positive and strictly increasing",
        ));
    }
    if sweep.realizations_per_m < MIN_REALIZATIONS_PER_M {
        return Err(Error::invalid(
            "realizations_per_m",
            format!("at least {MIN_REALIZATIONS_PER_M} realizations are required"),
        ));
    }
    // One noise power for the whole sweep so EVM differences reflect the channel.
    let noise_power = sweep.evm_stats.then(|| match settings.link.noise {
        NoiseSpec::Fixed(n) => n,
        NoiseSpec::TargetEvm(t) => {
            t * t * settings.link.signal_power * (1.0 + settings.cavity.kappa)
        }
    });

    let jobs: Vec<(usize, usize)> = sweep
        .m_values
        .iter()
        .flat_map(|&m| (0..sweep.realizations_per_m).map(move |r| (m, r)))
        .collect();
    let run_job = |job_index: usize, (m, r): (usize, usize)| -> Result<HardeningSample> {
        let job_seed = derive_seed(seed, job_index as u64);
        let params = CavityParameters {
            n_pixels_per_surface: m,
            n_surfaces: 1,
            seed: derive_seed(job_seed, 0),
            ..settings.cavity
        };
        let realization = sample_realization(&params)?;
        let init = realization
            .random_configuration(&mut rng_from_seed(derive_seed(job_seed, STREAM_INIT)));
        let opts = GreedyOptions {
            max_loops: settings.optimizer.max_loops,
            crn: settings.optimizer.crn,
            seed: derive_seed(job_seed, STREAM_NOISE),
        };
        let scenario = base_scenario(settings, realization, noise_power.unwrap_or(0.0))?;
        let (cfg, _) = greedy_optimize(&scenario, GoalKind::Power, &init, &opts)?;
        let abs_h = effective_channel(&scenario.realization, &cfg)?.norm();
        let evm = match noise_power {
            Some(_) => Some(
                greedy_optimize(&scenario, GoalKind::MeanEvm, &init, &opts)?
                    .1
                    .final_goal,
            ),
            None => None,
        };
        Ok(HardeningSample {
            m,
            realization: r,
            abs_h,
            evm,
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(sweep.jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let samples: Vec<HardeningSample> = pool.install(|| {
        jobs.par_iter()
            .enumerate()
            .map(|(i, &job)| run_job(i, job))
            .collect::<Result<Vec<_>>>()
    })?;

    let points: Vec<HardeningPoint> = sweep
        .m_values
        .iter()
        .map(|&m| {
            let group: Vec<&HardeningSample> = samples.iter().filter(|s| s.m == m).collect();
            let mags: Vec<f64> = group.iter().map(|s| s.abs_h).collect();
            let (mean, std) = mean_std(&mags);
            let evms: Vec<f64> = group.iter().filter_map(|s| s.evm).collect();
            HardeningPoint {
                m,
                mean_abs_h: mean,
                std_abs_h: std,
                relative_fluctuation: std / mean,
                mean_evm: (!evms.is_empty()).then(|| evms.iter().sum::<f64>() / evms.len() as f64),
            }
        })
        .collect();
    let xs: Vec<f64> = points.iter().map(|p| (p.m as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.relative_fluctuation.ln()).collect();
    Ok(HardeningSweepResult {
        slope: fit_slope(&xs, &ys),
        points,
        samples,
        noise_power,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_settings(pixels: usize, cavity_seed: u64) -> ExperimentSettings {
        ExperimentSettings {
            cavity: CavityParameters {
                n_pixels_per_surface: pixels,
                n_surfaces: 2,
                seed: cavity_seed,
                ..Default::default()
            },
            optimizer: OptimizerSettings {
                frames_per_eval: 2,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn calibration_hits_target() {
        let s = small_settings(24, 3);
        let cal = run_calibration(&s, 9).unwrap();
        assert!((cal.achieved_evm - 0.9).abs() < 1e-6, "{cal:?}");
        assert!(cal.noise_power > 0.0);
    }

    #[test]
    fn calibration_rejects_bad_target() {
        let s = ExperimentSettings {
            link: LinkBudget {
                noise: NoiseSpec::TargetEvm(-1.0),
                ..Default::default()
            },
            ..small_settings(8, 1)
        };
        assert!(run_calibration(&s, 0).is_err());
    }

    #[test]
    fn single_vs_dual_stages_chain() {
        let s = small_settings(32, 5);
        let r = run_single_vs_dual_ris(&s, 11).unwrap();
        assert_eq!(r.two_ris.evm_initial, r.one_ris.evm_final);
        assert!(r.one_ris.evm_final <= r.one_ris.evm_initial);
        assert!(r.two_ris.evm_final <= r.two_ris.evm_initial);
        // stage 1 leaves surface 1 alone
        assert_eq!(
            r.one_ris.config_final.surface(1),
            r.one_ris.config_initial.surface(1)
        );
        assert_eq!(r.two_ris.config_initial, r.one_ris.config_final);
        assert!(r.one_ris.trace.steps.iter().all(|st| st.pixel < 32));
        assert_eq!(r, run_single_vs_dual_ris(&s, 11).unwrap());
    }

    #[test]
    fn single_vs_dual_needs_two_surfaces() {
        let mut s = small_settings(8, 0);
        s.cavity.n_surfaces = 1;
        assert!(run_single_vs_dual_ris(&s, 0).is_err());
    }

    #[test]
    fn jammer_off_escalation_matches_second_stage() {
        let s = small_settings(24, 2);
        let svd = run_single_vs_dual_ris(&s, 4).unwrap();
        let esc = run_interference_escalation(
            &s,
            &[InterferenceLevel::OFF],
            4,
            Some(&svd.one_ris.config_final),
        )
        .unwrap();
        let r = &esc.reference;
        assert_eq!(r.evm_final, svd.two_ris.evm_final);
        assert_eq!(r.config_final, svd.two_ris.config_final);
        assert_eq!(r.trace, svd.two_ris.trace);
        assert!(r.trace.converged);
        let lvl = &esc.levels[0].result;
        assert_eq!(lvl.config_final, r.config_final);
        assert_eq!(lvl.trace.flips_accepted, 0);
    }

    #[test]
    fn escalation_carries_configuration() {
        let s = small_settings(24, 8);
        let schedule = crate::interference::escalation_schedule(-10.0, 5.0, 0.0).unwrap();
        let esc = run_interference_escalation(&s, &schedule, 1, None).unwrap();
        assert_eq!(esc.levels.len(), 3);
        for w in esc.levels.windows(2) {
            assert_eq!(w[1].result.config_initial, w[0].result.config_final);
        }
        assert_eq!(
            esc.levels[0].result.config_initial,
            esc.reference.config_final
        );
        assert!(esc.levels[0].pre_evm > esc.reference.evm_final);
        let truncated = run_interference_escalation(&s, &schedule[..1], 1, None).unwrap();
        assert_eq!(truncated.levels[0], esc.levels[0]);
        for l in &esc.levels {
            assert!(l.post_evm <= l.pre_evm);
        }
        assert!(run_interference_escalation(&s, &[], 1, None).is_err());
    }

    #[test]
    fn slope_fit() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| -0.5 * x + 3.0).collect();
        assert!((fit_slope(&xs, &ys).unwrap() + 0.5).abs() < 1e-12);
        assert_eq!(fit_slope(&[1.0], &[2.0]), None);
        assert_eq!(fit_slope(&[1.0, 1.0], &[2.0, 3.0]), None);
    }

    #[test]
    fn hardening_input_validation() {
        let s = ExperimentSettings::default();
        let bad = |m_values: Vec<usize>, r| HardeningSettings {
            m_values,
            realizations_per_m: r,
            evm_stats: false,
            jobs: 1,
        };
        assert!(run_hardening_sweep(&s, &bad(vec![], 50), 0).is_err());
        assert!(run_hardening_sweep(&s, &bad(vec![16, 8], 50), 0).is_err());
        assert!(run_hardening_sweep(&s, &bad(vec![8], 49), 0).is_err());
    }

    #[test]
    fn single_point_sweep_has_no_slope() {
        let s = ExperimentSettings::default();
        let sweep = HardeningSettings {
            m_values: vec![8],
            realizations_per_m: 50,
            evm_stats: false,
            jobs: 2,
        };
        let r = run_hardening_sweep(&s, &sweep, 3).unwrap();
        assert_eq!(r.slope, None);
        assert_eq!(r.points.len(), 1);
        assert_eq!(r.samples.len(), 50);
    }

    #[test]
    fn sweep_is_independent_of_worker_count() {
        let s = ExperimentSettings::default();
        let mut sweep = HardeningSettings {
            m_values: vec![8, 16],
            realizations_per_m: 50,
            evm_stats: true,
            jobs: 1,
        };
        let a = run_hardening_sweep(&s, &sweep, 5).unwrap();
        sweep.jobs = 4;
        let b = run_hardening_sweep(&s, &sweep, 5).unwrap();
        assert_eq!(a, b);
        assert!(a.points.iter().all(|p| p.mean_evm.is_some()));
    }
}
