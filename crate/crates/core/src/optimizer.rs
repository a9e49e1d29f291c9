//! Sequential greedy pixel-flip minimization.
//!
//! Pixels are visited one by one in ascending index order. Each is flipped, the
//! goal is re-measured, and the flip is kept only if the goal strictly
//! decreased. Passes repeat until one full pass keeps no flip or the loop budget
//! runs out.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{
    effective_channel, effective_jammer_channel, CavityRealization, PixelState, RisConfiguration,
};
use crate::error::{Error, Result};
use crate::interference::{jammer_power, InterferenceLevel};
use crate::link::{
    equalize, per_symbol_evm, receive_frame, EvmReport, Frame, SymbolRecord, DEFAULT_DATA_COUNT,
    DEFAULT_PILOT_COUNT,
};
use crate::rng::derive_seed;

pub const DEFAULT_FRAMES_PER_EVAL: usize = 4;
pub const DEFAULT_MAX_LOOPS: usize = 10;
pub const BRUTE_FORCE_CAP: usize = 20;

/// How the receiver obtains the channel used to equalize data symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equalization {
    /// Least-squares estimate from the frame's pilots.
    #[default]
    Pilot,
    /// Genie receiver dividing by the true channel.
    KnownChannel,
}

/// Everything the goal function needs besides the RIS configuration.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub realization: CavityRealization,
    pub signal_power: f64,
    pub noise_power: f64,
    pub level: InterferenceLevel,
    pub frames_per_eval: usize,
    pub pilot_count: usize,
    pub data_count: usize,
    pub equalization: Equalization,
    active_mask: Vec<bool>,
}

impl Scenario {
    /// Scenario with every pixel active and default framing.
    pub fn new(
        realization: CavityRealization,
        signal_power: f64,
        noise_power: f64,
        level: InterferenceLevel,
    ) -> Result<Self> {
        let n = realization.n_pixels();
        let s = Self {
            realization,
            signal_power,
            noise_power,
            level,
            frames_per_eval: DEFAULT_FRAMES_PER_EVAL,
            pilot_count: DEFAULT_PILOT_COUNT,
            data_count: DEFAULT_DATA_COUNT,
            equalization: Equalization::Pilot,
            active_mask: vec![true; n],
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_active_mask(mut self, mask: Vec<bool>) -> Result<Self> {
        self.active_mask = mask;
        self.validate()?;
        Ok(self)
    }

    /// Restricts optimization to the listed surfaces.
    pub fn with_active_surfaces(self, surfaces: &[usize]) -> Result<Self> {
        let p = *self.realization.params();
        if let Some(&bad) = surfaces.iter().find(|&&s| s >= p.n_surfaces) {
            return Err(Error::invalid(
                "active_surfaces",
                format!("surface {bad} does not exist ({} surfaces)", p.n_surfaces),
            ));
        }
        let mask = (0..p.total_pixels())
            .map(|i| surfaces.contains(&(i / p.n_pixels_per_surface)))
            .collect();
        self.with_active_mask(mask)
    }

    pub fn with_frames_per_eval(mut self, frames: usize) -> Result<Self> {
        self.frames_per_eval = frames;
        self.validate()?;
        Ok(self)
    }

    pub fn with_noise_power(mut self, noise_power: f64) -> Result<Self> {
        self.noise_power = noise_power;
        self.validate()?;
        Ok(self)
    }

    pub fn with_level(mut self, level: InterferenceLevel) -> Self {
        self.level = level;
        self
    }

    pub fn active_mask(&self) -> &[bool] {
        &self.active_mask
    }

    pub fn active_pixels(&self) -> Vec<usize> {
        self.active_mask
            .iter()
            .enumerate()
            .filter_map(|(i, &on)| on.then_some(i))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.active_mask.len() != self.realization.n_pixels() {
            return Err(Error::LengthMismatch {
                expected: self.realization.n_pixels(),
                got: self.active_mask.len(),
            });
        }
        if self.frames_per_eval == 0 {
            return Err(Error::invalid("frames_per_eval", "must be at least 1"));
        }
        if self.pilot_count == 0 || self.data_count == 0 {
            return Err(Error::invalid(
                "frame",
                "pilot_count and data_count must be positive",
            ));
        }
        if !(self.signal_power > 0.0 && self.signal_power.is_finite()) {
            return Err(Error::invalid("signal_power", "must be positive"));
        }
        if !(self.noise_power >= 0.0 && self.noise_power.is_finite()) {
            return Err(Error::invalid("noise_power", "must be finite and >= 0"));
        }
        Ok(())
    }

    /// Channels seen at Bob for `cfg`, Alice's scaled by the signal amplitude.
    fn link_channels(&self, cfg: &RisConfiguration) -> Result<(Complex64, Complex64, f64)> {
        let h = effective_channel(&self.realization, cfg)? * self.signal_power.sqrt();
        let h_e = effective_jammer_channel(&self.realization, cfg)?;
        let jam = jammer_power(self.level, self.signal_power)?;
        Ok((h, h_e, jam))
    }

    /// Runs every frame of one evaluation and hands each data symbol to `visit`
    /// as `(frame, bit pair, ideal, equalized)`. A frame whose channel estimate
    /// is zero is equalized to all zeros, which scores σ_k = 1.
    fn for_each_symbol(
        &self,
        cfg: &RisConfiguration,
        eval_seed: u64,
        mut visit: impl FnMut(usize, [bool; 2], Complex64, Complex64),
    ) -> Result<()> {
        let (h, h_e, jam) = self.link_channels(cfg)?;
        for f in 0..self.frames_per_eval {
            let frame = Frame::random(
                self.pilot_count,
                self.data_count,
                derive_seed(eval_seed, 2 * f as u64),
            )?;
            let y = receive_frame(
                &frame,
                h,
                h_e,
                jam,
                self.noise_power,
                derive_seed(eval_seed, 2 * f as u64 + 1),
            )?;
            let (pilots, data) = y.split_at(self.pilot_count);
            let h_hat = match self.equalization {
                Equalization::Pilot => match equalize(pilots, frame.pilots()) {
                    Ok(eq) => Some(eq.h_hat),
                    Err(Error::Unequalizable) => None,
                    Err(e) => return Err(e),
                },
                Equalization::KnownChannel => (h.norm_sqr() > 0.0).then_some(h),
            };
            let bits = frame.data_bits();
            for (k, (y, s)) in data.iter().zip(frame.data_symbols()).enumerate() {
                let z = h_hat.map_or(Complex64::new(0.0, 0.0), |hh| y / hh);
                visit(f, [bits[2 * k], bits[2 * k + 1]], *s, z);
            }
        }
        Ok(())
    }

    /// Equalized constellation and EVM report for one evaluation.
    pub fn snapshot(&self, cfg: &RisConfiguration, eval_seed: u64) -> Result<LinkSnapshot> {
        let mut eq = Vec::new();
        let mut ideal = Vec::new();
        let mut bits = Vec::new();
        self.for_each_symbol(cfg, eval_seed, |_, b, s, z| {
            eq.push(z);
            ideal.push(s);
            bits.push(b);
        })?;
        let report = EvmReport::measure(&eq, &ideal)?;
        let records = eq
            .iter()
            .zip(&ideal)
            .zip(&bits)
            .zip(&report.per_symbol)
            .enumerate()
            .map(|(k, (((z, s), b), sigma))| SymbolRecord {
                symbol_index: k,
                bits: format!("{}{}", u8::from(b[0]), u8::from(b[1])),
                ideal_re: s.re,
                ideal_im: s.im,
                rx_re: z.re,
                rx_im: z.im,
                sigma_k: *sigma,
            })
            .collect();
        Ok(LinkSnapshot { records, report })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkSnapshot {
    pub records: Vec<SymbolRecord>,
    pub report: EvmReport,
}

/// Mean EVM pooled over all data symbols of `frames_per_eval` simulated frames.
/// Deterministic in `eval_seed`.
pub fn evaluate_goal(scenario: &Scenario, cfg: &RisConfiguration, eval_seed: u64) -> Result<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut err = None;
    scenario.for_each_symbol(cfg, eval_seed, |_, _, s, z| match per_symbol_evm(z, s) {
        Ok(sigma) => {
            sum += sigma * sigma;
            count += 1;
        }
        Err(e) => err = Some(e),
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok((sum / count as f64).sqrt())
}

/// `−|h_AB(cfg)|²`; minimizing it maximizes the power focused on Bob.
pub fn power_goal(scenario: &Scenario, cfg: &RisConfiguration) -> Result<f64> {
    Ok(-effective_channel(&scenario.realization, cfg)?.norm_sqr())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoalKind {
    #[default]
    MeanEvm,
    Power,
}

impl GoalKind {
    pub fn evaluate(
        self,
        scenario: &Scenario,
        cfg: &RisConfiguration,
        eval_seed: u64,
    ) -> Result<f64> {
        match self {
            GoalKind::MeanEvm => evaluate_goal(scenario, cfg, eval_seed),
            GoalKind::Power => power_goal(scenario, cfg),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreedyOptions {
    pub max_loops: usize,
    /// Reuse one noise realization (`seed`) for every evaluation of the run.
    pub crn: bool,
    pub seed: u64,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        Self {
            max_loops: DEFAULT_MAX_LOOPS,
            crn: true,
            seed: 0,
        }
    }
}

impl GreedyOptions {
    /// Seed of the `k`-th goal evaluation of a run.
    pub fn eval_seed(&self, k: u64) -> u64 {
        if self.crn {
            self.seed
        } else {
            derive_seed(self.seed, k)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipStep {
    #[serde(rename = "loop")]
    pub loop_index: usize,
    pub pixel: usize,
    pub goal_before: f64,
    pub goal_after: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationTrace {
    pub steps: Vec<FlipStep>,
    pub initial_goal: f64,
    pub final_goal: f64,
    pub loops_run: usize,
    pub flips_accepted: usize,
    /// True when the last loop accepted nothing (as opposed to running out of loops).
    pub converged: bool,
}

pub fn greedy_optimize(
    scenario: &Scenario,
    goal: GoalKind,
    init: &RisConfiguration,
    opts: &GreedyOptions,
) -> Result<(RisConfiguration, OptimizationTrace)> {
    scenario.validate()?;
    if opts.max_loops == 0 {
        return Err(Error::invalid("max_loops", "must be at least 1"));
    }
    if init.len() != scenario.realization.n_pixels() {
        return Err(Error::LengthMismatch {
            expected: scenario.realization.n_pixels(),
            got: init.len(),
        });
    }
    let active = scenario.active_pixels();
    let mut cfg = init.clone();
    let mut evals = 0u64;
    let mut measure = |cfg: &RisConfiguration| {
        let g = goal.evaluate(scenario, cfg, opts.eval_seed(evals));
        evals += 1;
        g
    };

    let initial_goal = measure(&cfg)?;
    let mut current = initial_goal;
    let mut steps = Vec::new();
    let mut loops_run = 0;
    let mut flips_accepted = 0;
    let mut converged = false;

    for loop_index in 0..opts.max_loops {
        loops_run += 1;
        let mut any = false;
        for &pixel in &active {
            cfg.flip(pixel)?;
            let after = measure(&cfg)?;
            let accepted = after < current;
            steps.push(FlipStep {
                loop_index,
                pixel,
                goal_before: current,
                goal_after: after,
                accepted,
            });
            if accepted {
                current = after;
                flips_accepted += 1;
                any = true;
            } else {
                cfg.flip(pixel)?;
            }
        }
        if !any {
            converged = true;
            break;
        }
    }

    Ok((
        cfg,
        OptimizationTrace {
            steps,
            initial_goal,
            final_goal: current,
            loops_run,
            flips_accepted,
            converged,
        },
    ))
}

/// Exhaustive search over the active pixels of `base` with a deterministic goal.
///
/// Candidates are enumerated in increasing binary value (pixel `i` is bit `i`,
/// state π is 1), so among equal goals the lowest value wins.
pub fn brute_force_optimize(
    scenario: &Scenario,
    goal: GoalKind,
    base: &RisConfiguration,
    eval_seed: u64,
) -> Result<(RisConfiguration, f64)> {
    scenario.validate()?;
    let active = scenario.active_pixels();
    if active.len() > BRUTE_FORCE_CAP {
        return Err(Error::TooManyPixels {
            got: active.len(),
            cap: BRUTE_FORCE_CAP,
        });
    }
    if base.len() != scenario.realization.n_pixels() {
        return Err(Error::LengthMismatch {
            expected: scenario.realization.n_pixels(),
            got: base.len(),
        });
    }
    let mut states = base.states().to_vec();
    let mut best: Option<(u64, f64)> = None;
    for code in 0u64..(1u64 << active.len()) {
        for (bit, &pixel) in active.iter().enumerate() {
            states[pixel] = PixelState::from_bit(code >> bit & 1 == 1);
        }
        let cfg = RisConfiguration::from_states(base.pixels_per_surface(), states.clone())?;
        let g = goal.evaluate(scenario, &cfg, eval_seed)?;
        if best.is_none_or(|(_, b)| g < b) {
            best = Some((code, g));
        }
    }
    let (code, value) = best.expect("at least one candidate");
    for (bit, &pixel) in active.iter().enumerate() {
        states[pixel] = PixelState::from_bit(code >> bit & 1 == 1);
    }
    Ok((
        RisConfiguration::from_states(base.pixels_per_surface(), states)?,
        value,
    ))
}

/// First active pixel whose flip strictly lowers the goal, if any.
pub fn improving_flip(
    scenario: &Scenario,
    goal: GoalKind,
    cfg: &RisConfiguration,
    eval_seed: u64,
) -> Result<Option<usize>> {
    let here = goal.evaluate(scenario, cfg, eval_seed)?;
    for pixel in scenario.active_pixels() {
        if goal.evaluate(scenario, &cfg.flipped(pixel)?, eval_seed)? < here {
            return Ok(Some(pixel));
        }
    }
    Ok(None)
}
