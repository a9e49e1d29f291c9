//! Eve's co-channel jammer: white complex Gaussian noise whose transmitted
//! power is set relative to Alice's signal power.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interference-to-signal transmit power ratio in dB. `-inf` means Eve is off.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InterferenceLevel {
    int_db: f64,
}

impl InterferenceLevel {
    pub const OFF: Self = Self {
        int_db: f64::NEG_INFINITY,
    };

    pub fn from_db(int_db: f64) -> Result<Self> {
        if int_db.is_nan() || int_db == f64::INFINITY {
            return Err(Error::invalid(
                "int_db",
                format!("must be finite or -inf, got {int_db}"),
            ));
        }
        Ok(Self { int_db })
    }

    pub fn db(self) -> f64 {
        self.int_db
    }

    pub fn is_off(self) -> bool {
        self.int_db == f64::NEG_INFINITY
    }

    /// Linear power ratio, zero when off.
    pub fn linear(self) -> f64 {
        10f64.powf(self.int_db / 10.0)
    }
}

impl std::fmt::Display for InterferenceLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_off() {
            write!(f, "off")
        } else {
            write!(f, "{} dB", self.int_db)
        }
    }
}

/// Eve's transmit power for a given Alice signal power.
pub fn jammer_power(level: InterferenceLevel, signal_power: f64) -> Result<f64> {
    if !(signal_power > 0.0 && signal_power.is_finite()) {
        return Err(Error::invalid(
            "signal_power",
            format!("must be positive, got {signal_power}"),
        ));
    }
    if level.is_off() {
        return Ok(0.0);
    }
    Ok(signal_power * level.linear())
}

/// Arithmetic sequence of levels from `start_db` to `end_db` inclusive.
pub fn escalation_schedule(
    start_db: f64,
    step_db: f64,
    end_db: f64,
) -> Result<Vec<InterferenceLevel>> {
    if !(start_db.is_finite() && end_db.is_finite()) {
        return Err(Error::invalid("schedule", "endpoints must be finite"));
    }
    if !(step_db > 0.0 && step_db.is_finite()) {
        return Err(Error::invalid(
            "schedule_step_db",
            format!("must be positive, got {step_db}"),
        ));
    }
    if start_db > end_db {
        return Err(Error::invalid(
            "schedule",
            format!("start {start_db} dB is above end {end_db} dB"),
        ));
    }
    // Tolerate rounding so the end point is included when it lies on the grid.
    let steps = ((end_db - start_db) / step_db + 1e-9).floor() as usize;
    (0..=steps)
        .map(|k| InterferenceLevel::from_db(start_db + k as f64 * step_db))
        .collect()
}
