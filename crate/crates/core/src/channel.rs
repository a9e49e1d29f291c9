//! Statistical model of the overmoded cavity.
//!
//! Each effective RIS pixel `n` contributes a single-bounce cascade term
//! `a_n · b_n · c_n` to the Alice→Bob channel, where `a_n` couples Alice to the
//! pixel, `b_n` couples the pixel to Bob and `c_n = ±1` is the binary reflection
//! phase. Eve reaches Bob through the same pixels (`e_n · b_n · c_n`). Paths that
//! never touch a surface are lumped into the uncontrolled terms `d_ab`/`d_eb`.
//! There is no deterministic line-of-sight term.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{complex_normal, rng_from_seed};

/// Effective pixels per surface: 76 physical pixels, two polarizations each.
pub const DEFAULT_PIXELS_PER_SURFACE: usize = 152;
pub const DEFAULT_KAPPA: f64 = 0.25;

/// Binary reflection phase of one effective pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum PixelState {
    #[default]
    Zero,
    Pi,
}

impl PixelState {
    pub fn toggled(self) -> Self {
        match self {
            PixelState::Zero => PixelState::Pi,
            PixelState::Pi => PixelState::Zero,
        }
    }

    /// Multiplicative reflection factor, +1 for phase 0 and −1 for phase π.
    pub fn sign(self) -> f64 {
        match self {
            PixelState::Zero => 1.0,
            PixelState::Pi => -1.0,
        }
    }

    pub fn as_bit(self) -> u8 {
        match self {
            PixelState::Zero => 0,
            PixelState::Pi => 1,
        }
    }

    pub fn from_bit(bit: bool) -> Self {
        if bit {
            PixelState::Pi
        } else {
            PixelState::Zero
        }
    }
}

/// Binary state of every effective pixel, surfaces stored back to back.
///
/// Global index `i` maps to surface `i / pixels_per_surface` and local index
/// `i % pixels_per_surface`; every surface has the same pixel count.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RisConfiguration {
    pixels_per_surface: usize,
    states: Vec<PixelState>,
}

impl RisConfiguration {
    pub fn all_zero(n_surfaces: usize, pixels_per_surface: usize) -> Result<Self> {
        Self::from_states(
            pixels_per_surface,
            vec![PixelState::Zero; n_surfaces * pixels_per_surface],
        )
    }

    pub fn random<R: Rng + ?Sized>(
        n_surfaces: usize,
        pixels_per_surface: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let states = (0..n_surfaces * pixels_per_surface)
            .map(|_| PixelState::from_bit(rng.random::<bool>()))
            .collect();
        Self::from_states(pixels_per_surface, states)
    }

    pub fn from_states(pixels_per_surface: usize, states: Vec<PixelState>) -> Result<Self> {
        if pixels_per_surface == 0 {
            return Err(Error::invalid(
                "pixels_per_surface",
                "a surface needs at least one pixel",
            ));
        }
        if states.is_empty() || states.len() % pixels_per_surface != 0 {
            return Err(Error::invalid(
                "states",
                format!(
                    "{} states do not fill whole surfaces of {pixels_per_surface} pixels",
                    states.len()
                ),
            ));
        }
        Ok(Self {
            pixels_per_surface,
            states,
        })
    }

    /// Parses a string of `0`/`1` characters, one per pixel.
    pub fn from_bit_string(pixels_per_surface: usize, bits: &str) -> Result<Self> {
        let states = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(PixelState::Zero),
                '1' => Ok(PixelState::Pi),
                other => Err(Error::invalid(
                    "states",
                    format!("unexpected character {other:?} in bit string"),
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_states(pixels_per_surface, states)
    }

    pub fn to_bit_string(&self) -> String {
        self.states
            .iter()
            .map(|s| if s.as_bit() == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn n_surfaces(&self) -> usize {
        self.states.len() / self.pixels_per_surface
    }

    pub fn pixels_per_surface(&self) -> usize {
        self.pixels_per_surface
    }

    pub fn states(&self) -> &[PixelState] {
        &self.states
    }

    pub fn surface(&self, surface: usize) -> Option<&[PixelState]> {
        let start = surface.checked_mul(self.pixels_per_surface)?;
        self.states.get(start..start + self.pixels_per_surface)
    }

    pub fn get(&self, index: usize) -> Option<PixelState> {
        self.states.get(index).copied()
    }

    pub fn locate(&self, index: usize) -> Result<(usize, usize)> {
        self.check_index(index)?;
        Ok((
            index / self.pixels_per_surface,
            index % self.pixels_per_surface,
        ))
    }

    pub fn global_index(&self, surface: usize, local: usize) -> Result<usize> {
        if surface >= self.n_surfaces() || local >= self.pixels_per_surface {
            return Err(Error::IndexOutOfRange {
                index: surface * self.pixels_per_surface + local,
                len: self.len(),
            });
        }
        Ok(surface * self.pixels_per_surface + local)
    }

    /// Toggles pixel `index` in place.
    pub fn flip(&mut self, index: usize) -> Result<()> {
        self.check_index(index)?;
        self.states[index] = self.states[index].toggled();
        Ok(())
    }

    pub fn flipped(&self, index: usize) -> Result<Self> {
        let mut out = self.clone();
        out.flip(index)?;
        Ok(out)
    }

    pub fn hamming_distance(&self, other: &Self) -> usize {
        self.states
            .iter()
            .zip(&other.states)
            .filter(|(a, b)| a != b)
            .count()
            + self.states.len().abs_diff(other.states.len())
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.states.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.states.len(),
            });
        }
        Ok(())
    }
}

/// Returns a copy of `cfg` with pixel `index` toggled.
pub fn flip_pixel(cfg: &RisConfiguration, index: usize) -> Result<RisConfiguration> {
    cfg.flipped(index)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CavityParameters {
    pub n_pixels_per_surface: usize,
    pub n_surfaces: usize,
    /// Power of Alice→Bob paths that miss every surface, relative to the unit
    /// mean power of the RIS paths.
    pub kappa: f64,
    /// Same for Eve→Bob.
    pub eve_kappa: f64,
    pub seed: u64,
}

impl Default for CavityParameters {
    fn default() -> Self {
        Self {
            n_pixels_per_surface: DEFAULT_PIXELS_PER_SURFACE,
            n_surfaces: 2,
            kappa: DEFAULT_KAPPA,
            eve_kappa: DEFAULT_KAPPA,
            seed: 0,
        }
    }
}

impl CavityParameters {
    pub fn total_pixels(&self) -> usize {
        self.n_pixels_per_surface * self.n_surfaces
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_pixels_per_surface == 0 {
            return Err(Error::invalid(
                "n_pixels_per_surface",
                "must be a positive integer",
            ));
        }
        if self.n_surfaces == 0 {
            return Err(Error::invalid("n_surfaces", "must be a positive integer"));
        }
        for (name, v) in [("kappa", self.kappa), ("eve_kappa", self.eve_kappa)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(
                    name,
                    format!("must be finite and >= 0, got {v}"),
                ));
            }
        }
        Ok(())
    }
}

/// One frozen draw of every coupling coefficient in the cavity.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityRealization {
    alice: Vec<Complex64>,
    bob: Vec<Complex64>,
    eve: Vec<Complex64>,
    d_ab: Complex64,
    d_eb: Complex64,
    params: CavityParameters,
}

impl CavityRealization {
    /// Builds a realization from explicit couplings, for hand-constructed cases.
    pub fn from_parts(
        params: CavityParameters,
        alice: Vec<Complex64>,
        bob: Vec<Complex64>,
        eve: Vec<Complex64>,
        d_ab: Complex64,
        d_eb: Complex64,
    ) -> Result<Self> {
        params.validate()?;
        let n = params.total_pixels();
        for v in [&alice, &bob, &eve] {
            if v.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: v.len(),
                });
            }
        }
        Ok(Self {
            alice,
            bob,
            eve,
            d_ab,
            d_eb,
            params,
        })
    }

    pub fn alice(&self) -> &[Complex64] {
        &self.alice
    }

    pub fn bob(&self) -> &[Complex64] {
        &self.bob
    }

    pub fn eve(&self) -> &[Complex64] {
        &self.eve
    }

    pub fn d_ab(&self) -> Complex64 {
        self.d_ab
    }

    pub fn d_eb(&self) -> Complex64 {
        self.d_eb
    }

    pub fn params(&self) -> &CavityParameters {
        &self.params
    }

    pub fn n_pixels(&self) -> usize {
        self.alice.len()
    }

    /// Per-pixel Alice→Bob cascade coefficient `a_n · b_n`.
    pub fn alice_cascade(&self, index: usize) -> Complex64 {
        self.alice[index] * self.bob[index]
    }

    /// Per-pixel Eve→Bob cascade coefficient `e_n · b_n`.
    pub fn eve_cascade(&self, index: usize) -> Complex64 {
        self.eve[index] * self.bob[index]
    }

    /// A configuration with the realization's surface layout.
    pub fn zero_configuration(&self) -> RisConfiguration {
        RisConfiguration::all_zero(self.params.n_surfaces, self.params.n_pixels_per_surface)
            .expect("validated parameters")
    }

    pub fn random_configuration<R: Rng + ?Sized>(&self, rng: &mut R) -> RisConfiguration {
        RisConfiguration::random(
            self.params.n_surfaces,
            self.params.n_pixels_per_surface,
            rng,
        )
        .expect("validated parameters")
    }

    fn check(&self, cfg: &RisConfiguration) -> Result<()> {
        if cfg.len() != self.n_pixels() {
            return Err(Error::LengthMismatch {
                expected: self.n_pixels(),
                got: cfg.len(),
            });
        }
        Ok(())
    }
}

/// Draws a realization. Couplings are i.i.d. CN(0, N^-1/2) so that
/// E|a_n b_n|² = E|e_n b_n|² = 1/N; the uncontrolled terms have variance
/// `kappa` and `eve_kappa`.
pub fn sample_realization(params: &CavityParameters) -> Result<CavityRealization> {
    params.validate()?;
    let n = params.total_pixels();
    let coupling_var = 1.0 / (n as f64).sqrt();
    let mut rng = rng_from_seed(params.seed);
    let mut draw = |len: usize, var: f64| -> Vec<Complex64> {
        (0..len).map(|_| complex_normal(&mut rng, var)).collect()
    };
    let alice = draw(n, coupling_var);
    let bob = draw(n, coupling_var);
    let eve = draw(n, coupling_var);
    let d = draw(2, 1.0);
    let scale = |z: Complex64, var: f64| {
        if var == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            z * var.sqrt()
        }
    };
    Ok(CavityRealization {
        alice,
        bob,
        eve,
        d_ab: scale(d[0], params.kappa),
        d_eb: scale(d[1], params.eve_kappa),
        params: *params,
    })
}

fn cascade_sum(
    direct: Complex64,
    incoming: &[Complex64],
    outgoing: &[Complex64],
    cfg: &RisConfiguration,
) -> Complex64 {
    incoming
        .iter()
        .zip(outgoing)
        .zip(cfg.states())
        .fold(direct, |acc, ((x, y), s)| acc + x * y * s.sign())
}

/// `h_AB(cfg) = d_ab + Σ a_n b_n c_n`.
pub fn effective_channel(real: &CavityRealization, cfg: &RisConfiguration) -> Result<Complex64> {
    real.check(cfg)?;
    Ok(cascade_sum(real.d_ab, &real.alice, &real.bob, cfg))
}

/// `h_EB(cfg) = d_eb + Σ e_n b_n c_n`.
pub fn effective_jammer_channel(
    real: &CavityRealization,
    cfg: &RisConfiguration,
) -> Result<Complex64> {
    real.check(cfg)?;
    Ok(cascade_sum(real.d_eb, &real.eve, &real.bob, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(n: usize, seed: u64) -> CavityParameters {
        CavityParameters {
            n_pixels_per_surface: n,
            n_surfaces: 1,
            seed,
            ..Default::default()
        }
    }

    fn toy() -> CavityRealization {
        let p = CavityParameters {
            kappa: 0.0,
            eve_kappa: 0.0,
            ..params(3, 0)
        };
        CavityRealization::from_parts(
            p,
            vec![c(0.5, -0.2), c(-1.1, 0.3), c(0.25, 0.75)],
            vec![c(0.9, 0.1), c(0.4, -0.6), c(-0.3, 0.2)],
            vec![c(-0.7, 0.0), c(0.1, 0.1), c(0.0, -1.3)],
            c(0.05, -0.02),
            c(-0.3, 0.4),
        )
        .unwrap()
    }

    #[test]
    fn toggling_twice_is_identity() {
        for s in [PixelState::Zero, PixelState::Pi] {
            assert_eq!(s.toggled().toggled(), s);
            assert_ne!(s.toggled(), s);
        }
    }

    #[test]
    fn index_mapping_is_bijective() {
        let cfg = RisConfiguration::all_zero(3, 5).unwrap();
        let mut seen = std::collections::HashSet::new();
        for i in 0..cfg.len() {
            let (s, l) = cfg.locate(i).unwrap();
            assert_eq!(cfg.global_index(s, l).unwrap(), i);
            assert!(seen.insert((s, l)));
        }
        assert_eq!(seen.len(), 15);
        assert!(cfg.locate(15).is_err());
    }

    #[test]
    fn rejects_zero_pixels() {
        assert!(sample_realization(&params(0, 1)).is_err());
        let p = CavityParameters {
            n_surfaces: 0,
            ..Default::default()
        };
        assert!(sample_realization(&p).is_err());
        let p = CavityParameters {
            kappa: -0.1,
            ..Default::default()
        };
        assert!(sample_realization(&p).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = params(152, 7);
        assert_eq!(
            sample_realization(&p).unwrap(),
            sample_realization(&p).unwrap()
        );
        assert_ne!(
            sample_realization(&p).unwrap(),
            sample_realization(&params(152, 8)).unwrap()
        );
    }

    #[test]
    fn zero_kappa_gives_zero_uncontrolled_term() {
        let p = CavityParameters {
            kappa: 0.0,
            ..params(152, 7)
        };
        let r = sample_realization(&p).unwrap();
        assert_eq!(r.d_ab(), c(0.0, 0.0));
        assert_ne!(r.d_eb(), c(0.0, 0.0));
    }

    #[test]
    fn cascade_power_normalization() {
        // Σ|a_n b_n|² has expectation 1 for every N.
        let trials = 10_000;
        let total: f64 = (0..trials)
            .map(|s| {
                let r = sample_realization(&params(152, s)).unwrap();
                (0..r.n_pixels())
                    .map(|i| r.alice_cascade(i).norm_sqr())
                    .sum::<f64>()
            })
            .sum();
        let mean = total / trials as f64;
        assert!((mean - 1.0).abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn all_zero_phase_sums_cascades() {
        let p = CavityParameters {
            kappa: 0.0,
            ..params(4, 0)
        };
        let mut a = vec![c(0.0, 0.0); 4];
        let mut b = vec![c(0.0, 0.0); 4];
        a[0] = c(1.0, 0.0);
        b[0] = c(1.0, 0.0);
        let r =
            CavityRealization::from_parts(p, a, b, vec![c(0.0, 0.0); 4], c(0.0, 0.0), c(0.0, 0.0))
                .unwrap();
        let cfg = r.zero_configuration();
        assert_eq!(effective_channel(&r, &cfg).unwrap(), c(1.0, 0.0));
        assert_eq!(effective_jammer_channel(&r, &cfg).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn flipping_every_pixel_negates_ris_term() {
        let r = sample_realization(&params(32, 11)).unwrap();
        let cfg = r.random_configuration(&mut rng_from_seed(1));
        let mut all = cfg.clone();
        for i in 0..all.len() {
            all.flip(i).unwrap();
        }
        let before = effective_channel(&r, &cfg).unwrap() - r.d_ab();
        let after = effective_channel(&r, &all).unwrap() - r.d_ab();
        assert!((before + after).norm() < 1e-14);
    }

    #[test]
    fn toy_matches_direct_summation() {
        let r = toy();
        for bits in ["000", "100", "011", "111", "010"] {
            let cfg = RisConfiguration::from_bit_string(3, bits).unwrap();
            let signs: Vec<f64> = bits
                .chars()
                .map(|ch| if ch == '1' { -1.0 } else { 1.0 })
                .collect();
            let mut h = r.d_ab();
            let mut he = r.d_eb();
            for i in 0..3 {
                h += r.alice()[i] * r.bob()[i] * signs[i];
                he += r.eve()[i] * r.bob()[i] * signs[i];
            }
            assert!((effective_channel(&r, &cfg).unwrap() - h).norm() < 1e-15);
            assert!((effective_jammer_channel(&r, &cfg).unwrap() - he).norm() < 1e-15);
        }
    }

    #[test]
    fn jammer_channel_vanishes_without_eve_couplings() {
        let p = CavityParameters {
            eve_kappa: 0.0,
            ..params(3, 0)
        };
        let r = CavityRealization::from_parts(
            p,
            vec![c(1.0, 0.0); 3],
            vec![c(1.0, 0.0); 3],
            vec![c(0.0, 0.0); 3],
            c(0.0, 0.0),
            c(0.0, 0.0),
        )
        .unwrap();
        let cfg = RisConfiguration::from_bit_string(3, "101").unwrap();
        assert_eq!(effective_jammer_channel(&r, &cfg).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn length_mismatch_rejected() {
        let r = toy();
        let cfg = RisConfiguration::all_zero(1, 4).unwrap();
        assert!(matches!(
            effective_channel(&r, &cfg),
            Err(Error::LengthMismatch {
                expected: 3,
                got: 4
            })
        ));
        assert!(effective_jammer_channel(&r, &cfg).is_err());
    }

    #[test]
    fn flip_out_of_range_rejected() {
        let cfg = RisConfiguration::all_zero(2, 4).unwrap();
        assert!(matches!(
            flip_pixel(&cfg, 8),
            Err(Error::IndexOutOfRange { index: 8, len: 8 })
        ));
    }

    #[test]
    fn single_flips_are_distinct_neighbours() {
        let cfg = RisConfiguration::from_bit_string(8, "10110010").unwrap();
        let neighbours: std::collections::HashSet<_> =
            (0..8).map(|i| flip_pixel(&cfg, i).unwrap()).collect();
        assert_eq!(neighbours.len(), 8);
        for n in &neighbours {
            assert_eq!(n.hamming_distance(&cfg), 1);
        }
        let zero = RisConfiguration::all_zero(1, 8).unwrap();
        assert_eq!(flip_pixel(&zero, 0).unwrap().hamming_distance(&zero), 1);
    }

    proptest! {
        #[test]
        fn flip_is_an_involution(bits in proptest::collection::vec(any::<bool>(), 1..64), idx in any::<prop::sample::Index>()) {
            let n = bits.len();
            let cfg = RisConfiguration::from_states(n, bits.into_iter().map(PixelState::from_bit).collect()).unwrap();
            let i = idx.index(n);
            let once = flip_pixel(&cfg, i).unwrap();
            prop_assert_eq!(once.hamming_distance(&cfg), 1);
            prop_assert_eq!(flip_pixel(&once, i).unwrap(), cfg);
        }

        #[test]
        fn single_flip_changes_channel_by_twice_the_cascade(seed in 0u64..1000, idx in any::<prop::sample::Index>()) {
            let r = sample_realization(&params(48, seed)).unwrap();
            let cfg = r.random_configuration(&mut rng_from_seed(seed ^ 0xABCD));
            let i = idx.index(48);
            let sign = cfg.get(i).unwrap().sign();
            let delta = effective_channel(&r, &flip_pixel(&cfg, i).unwrap()).unwrap()
                - effective_channel(&r, &cfg).unwrap();
            let expected = -2.0 * r.alice_cascade(i) * sign;
            prop_assert!((delta - expected).norm() < 1e-12);
            let delta_e = effective_jammer_channel(&r, &flip_pixel(&cfg, i).unwrap()).unwrap()
                - effective_jammer_channel(&r, &cfg).unwrap();
            prop_assert!((delta_e + 2.0 * r.eve_cascade(i) * sign).norm() < 1e-12);
        }
    }
}
