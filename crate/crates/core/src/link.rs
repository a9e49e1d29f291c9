//! QPSK baseband link at symbol level: Gray-mapped modem, flat-fading
//! reception with jammer and thermal noise, least-squares pilot equalization
//! and data-aided error vector magnitude.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, standard_complex_normal};

pub const DEFAULT_PILOT_COUNT: usize = 16;
pub const DEFAULT_DATA_COUNT: usize = 256;

const PILOT_SEED: u64 = 0x5049_4C4F_5453;

/// Ideal constellation indexed by `2·b0 + b1` for the bit pair `(b0, b1)`.
pub fn constellation() -> [Complex64; 4] {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    [
        Complex64::new(a, a),   // 00
        Complex64::new(-a, a),  // 01
        Complex64::new(a, -a),  // 10
        Complex64::new(-a, -a), // 11
    ]
}

fn class_of(b0: bool, b1: bool) -> usize {
    (usize::from(b0) << 1) | usize::from(b1)
}

/// Quadrant class (index into [`constellation`]) of the nearest ideal symbol.
/// Zero components fall on the bit-0 side.
pub fn decide_class(z: Complex64) -> usize {
    class_of(z.im < 0.0, z.re < 0.0)
}

pub fn modulate_qpsk(bits: &[bool]) -> Result<Vec<Complex64>> {
    if bits.len() % 2 != 0 {
        return Err(Error::OddBitCount(bits.len()));
    }
    let table = constellation();
    Ok(bits
        .chunks_exact(2)
        .map(|p| table[class_of(p[0], p[1])])
        .collect())
}

pub fn demodulate_qpsk(symbols: &[Complex64]) -> Vec<bool> {
    symbols
        .iter()
        .flat_map(|z| [z.im < 0.0, z.re < 0.0])
        .collect()
}

/// Known pilots followed by data symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pilots: Vec<Complex64>,
    data_bits: Vec<bool>,
    data_symbols: Vec<Complex64>,
}

impl Frame {
    /// Random data bits from `seed`; pilots are a fixed sequence shared by all
    /// frames with the same pilot count.
    pub fn random(pilot_count: usize, data_count: usize, seed: u64) -> Result<Self> {
        if pilot_count == 0 {
            return Err(Error::invalid(
                "pilot_count",
                "at least one pilot is required",
            ));
        }
        if data_count == 0 {
            return Err(Error::invalid(
                "data_count",
                "at least one data symbol is required",
            ));
        }
        let mut prng = rng_from_seed(PILOT_SEED);
        let pilot_bits: Vec<bool> = (0..2 * pilot_count).map(|_| prng.random()).collect();
        let mut rng = rng_from_seed(seed);
        let data_bits: Vec<bool> = (0..2 * data_count).map(|_| rng.random()).collect();
        Self::new(modulate_qpsk(&pilot_bits)?, data_bits)
    }

    pub fn new(pilots: Vec<Complex64>, data_bits: Vec<bool>) -> Result<Self> {
        if pilots.is_empty() {
            return Err(Error::Empty("pilots"));
        }
        if pilots.iter().any(|p| (p.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::invalid(
                "pilots",
                "pilot symbols must have unit modulus",
            ));
        }
        let data_symbols = modulate_qpsk(&data_bits)?;
        Ok(Self {
            pilots,
            data_bits,
            data_symbols,
        })
    }

    pub fn pilots(&self) -> &[Complex64] {
        &self.pilots
    }

    pub fn data_bits(&self) -> &[bool] {
        &self.data_bits
    }

    pub fn data_symbols(&self) -> &[Complex64] {
        &self.data_symbols
    }

    pub fn len(&self) -> usize {
        self.pilots.len() + self.data_symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Complex64> {
        self.pilots.iter().chain(&self.data_symbols)
    }
}

fn check_power(name: &'static str, p: f64) -> Result<()> {
    if !(p >= 0.0 && p.is_finite()) {
        return Err(Error::invalid(
            name,
            format!("must be finite and >= 0, got {p}"),
        ));
    }
    Ok(())
}

/// `y_k = h·s_k + h_e·w_k + n_k` over pilots then data, with
/// `w_k ~ CN(0, jam_power)` and `n_k ~ CN(0, noise_power)`.
///
/// The unit-variance draws behind `w_k` and `n_k` depend only on `seed`, so two
/// calls with the same seed and different powers see the same noise shape.
pub fn receive_frame(
    frame: &Frame,
    h: Complex64,
    h_e: Complex64,
    jam_power: f64,
    noise_power: f64,
    seed: u64,
) -> Result<Vec<Complex64>> {
    check_power("jam_power", jam_power)?;
    check_power("noise_power", noise_power)?;
    let (jam_amp, noise_amp) = (jam_power.sqrt(), noise_power.sqrt());
    let mut rng = rng_from_seed(seed);
    Ok(frame
        .symbols()
        .map(|s| {
            let w = standard_complex_normal(&mut rng);
            let n = standard_complex_normal(&mut rng);
            h * s + h_e * w * jam_amp + n * noise_amp
        })
        .collect())
}

/// Least-squares scalar channel estimate from received and known pilots.
pub fn equalize(received_pilots: &[Complex64], known_pilots: &[Complex64]) -> Result<Equalizer> {
    if known_pilots.is_empty() {
        return Err(Error::Empty("known_pilots"));
    }
    if received_pilots.len() != known_pilots.len() {
        return Err(Error::LengthMismatch {
            expected: known_pilots.len(),
            got: received_pilots.len(),
        });
    }
    let num: Complex64 = received_pilots
        .iter()
        .zip(known_pilots)
        .map(|(y, s)| y * s.conj())
        .sum();
    let den: f64 = known_pilots.iter().map(|s| s.norm_sqr()).sum();
    let h_hat = num / den;
    if h_hat.norm_sqr() == 0.0 || !h_hat.is_finite() {
        return Err(Error::Unequalizable);
    }
    Ok(Equalizer { h_hat })
}

/// One-tap zero-forcing equalizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equalizer {
    pub h_hat: Complex64,
}

impl Equalizer {
    pub fn apply(&self, received: &[Complex64]) -> Vec<Complex64> {
        received.iter().map(|y| y / self.h_hat).collect()
    }
}

/// `|received − ideal| / |ideal|`.
pub fn per_symbol_evm(received: Complex64, ideal: Complex64) -> Result<f64> {
    let norm = ideal.norm();
    if norm == 0.0 {
        return Err(Error::ZeroIdealSymbol);
    }
    Ok((received - ideal).norm() / norm)
}

/// Root mean square of per-symbol EVMs.
pub fn mean_evm(sigmas: &[f64]) -> Result<f64> {
    if sigmas.is_empty() {
        return Err(Error::Empty("sigmas"));
    }
    let ms = sigmas.iter().map(|s| s * s).sum::<f64>() / sigmas.len() as f64;
    Ok(ms.sqrt())
}

/// SINR in dB at Bob.
pub fn sinr(
    h: Complex64,
    h_e: Complex64,
    signal_power: f64,
    jam_power: f64,
    noise_power: f64,
) -> Result<f64> {
    check_power("signal_power", signal_power)?;
    check_power("jam_power", jam_power)?;
    check_power("noise_power", noise_power)?;
    let denom = h_e.norm_sqr() * jam_power + noise_power;
    if denom == 0.0 {
        return Err(Error::invalid(
            "noise_power",
            "interference plus noise power is zero",
        ));
    }
    Ok(10.0 * (h.norm_sqr() * signal_power / denom).log10())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvmReport {
    pub per_symbol: Vec<f64>,
    pub mean_evm: f64,
    /// Mean equalized symbol per ideal-symbol class, `None` when a class is absent.
    pub quadrant_barycenters: [Option<Complex64>; 4],
}

impl EvmReport {
    /// Data-aided report: each equalized symbol is compared to the symbol that
    /// was actually sent.
    pub fn measure(equalized: &[Complex64], ideal: &[Complex64]) -> Result<Self> {
        if equalized.len() != ideal.len() {
            return Err(Error::LengthMismatch {
                expected: ideal.len(),
                got: equalized.len(),
            });
        }
        let per_symbol = equalized
            .iter()
            .zip(ideal)
            .map(|(&y, &s)| per_symbol_evm(y, s))
            .collect::<Result<Vec<_>>>()?;
        let mean_evm = mean_evm(&per_symbol)?;
        let mut sums = [Complex64::new(0.0, 0.0); 4];
        let mut counts = [0usize; 4];
        for (y, s) in equalized.iter().zip(ideal) {
            let k = decide_class(*s);
            sums[k] += y;
            counts[k] += 1;
        }
        let quadrant_barycenters =
            std::array::from_fn(|k| (counts[k] > 0).then(|| sums[k] / counts[k] as f64));
        Ok(Self {
            per_symbol,
            mean_evm,
            quadrant_barycenters,
        })
    }
}

/// One row of a constellation export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolRecord {
    pub symbol_index: usize,
    pub bits: String,
    pub ideal_re: f64,
    pub ideal_im: f64,
    pub rx_re: f64,
    pub rx_im: f64,
    pub sigma_k: f64,
}
