//! Link-level simulation of binary reconfigurable intelligent surfaces (RIS)
//! shaping the field inside an overmoded metallic cavity.
//!
//! The crate is organised bottom-up:
//!
//! - [`channel`]: statistical cavity model mapping a binary RIS configuration to
//!   the Alice→Bob and Eve→Bob baseband channels.
//! - [`link`]: QPSK modem, pilot-aided equalization and error vector magnitude.
//! - [`interference`]: Eve's co-channel Gaussian jammer levels.
//! - [`optimizer`]: sequential greedy pixel-flip minimization and a brute-force oracle.
//! - [`experiments`]: single/dual RIS, interference escalation and hardening sweeps.
//! - [`config`] and [`output`]: run configuration and result persistence used by the CLI.

pub mod channel;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod interference;
pub mod link;
pub mod optimizer;
pub mod output;
pub mod rng;

pub use channel::{
    effective_channel, effective_jammer_channel, flip_pixel, sample_realization, CavityParameters,
    CavityRealization, PixelState, RisConfiguration,
};
pub use error::{Error, Result};
pub use interference::{escalation_schedule, jammer_power, InterferenceLevel};
pub use link::{
    demodulate_qpsk, equalize, mean_evm, modulate_qpsk, per_symbol_evm, receive_frame, sinr,
    EvmReport, Frame,
};
pub use optimizer::{
    brute_force_optimize, evaluate_goal, greedy_optimize, power_goal, GoalKind, GreedyOptions,
    OptimizationTrace, Scenario,
};

pub use num_complex::Complex64;
