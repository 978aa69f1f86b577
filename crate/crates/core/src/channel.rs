//! AWGN and constant-offset channels.
//!
//! Chip energy is 1 on each channel, so a symbol of `C` chips carries
//! `E_b = C/N` per information bit. Noise is specified by its standard
//! deviation at the matched-filter output, `σ² = N₀/2 = E_b / (2·Eb/N0)`.
//! The waveform path scales its per-sample noise so the normalized matched
//! filter in [`crate::rx`] sees the same `σ²`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::chipmap::ChipTable;
use crate::tx::{halfsine_pulse, pulse_energy, ChipVector, Waveform};
use crate::{Error, Result};

/// Energy per bit over noise spectral density, in dB.
///
/// `+∞` is accepted as the noise-free sentinel.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EbN0Point {
    db: f64,
}

impl EbN0Point {
    pub fn new(db: f64) -> Result<Self> {
        if db.is_nan() {
            return Err(Error::Argument(format!("invalid Eb/N0 {db} dB")));
        }
        Ok(Self { db })
    }

    /// Builds a point from a linear ratio.
    pub fn from_linear(ratio: f64) -> Result<Self> {
        if !(ratio >= 0.0) {
            return Err(Error::Argument(format!("invalid linear Eb/N0 {ratio}")));
        }
        Self::new(10.0 * ratio.log10())
    }

    pub fn db(self) -> f64 {
        self.db
    }

    pub fn linear(self) -> f64 {
        10f64.powf(self.db / 10.0)
    }

    pub fn is_noise_free(self) -> bool {
        self.db == f64::INFINITY
    }
}

/// Per-chip noise standard deviation at the matched-filter output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub sigma_chip: f64,
}

impl NoiseSpec {
    pub fn noiseless() -> Self {
        Self { sigma_chip: 0.0 }
    }

    pub fn variance(self) -> f64 {
        self.sigma_chip * self.sigma_chip
    }
}

/// Calibrates the chip noise level for `e`, with unit chip energy.
pub fn sigma_from_ebn0(e: EbN0Point, table: &ChipTable) -> NoiseSpec {
    if e.is_noise_free() {
        return NoiseSpec::noiseless();
    }
    let energy_per_bit = table.chips_per_symbol() as f64 / table.bits_per_symbol() as f64;
    NoiseSpec {
        sigma_chip: (energy_per_bit / (2.0 * e.linear())).sqrt(),
    }
}

fn noisy<R: Rng + ?Sized>(clean: impl Iterator<Item = f64>, sigma: f64, rng: &mut R) -> Vec<f64> {
    clean
        .map(|x| {
            let n: f64 = rng.sample(StandardNormal);
            x + sigma * n
        })
        .collect()
}

/// Adds independent Gaussian noise to every I and Q chip.
///
/// All I draws are taken before the Q draws.
pub fn add_awgn<R: Rng + ?Sized>(
    chips: &ChipVector,
    spec: NoiseSpec,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let i = noisy(chips.i.iter().map(|&c| f64::from(c)), spec.sigma_chip, rng);
    let q = noisy(chips.q.iter().map(|&c| f64::from(c)), spec.sigma_chip, rng);
    (i, q)
}

/// Per-sample noise standard deviation on the waveform grid that yields
/// `spec.sigma_chip` after the energy-normalized matched filter.
pub fn waveform_sigma(spec: NoiseSpec, oversample: usize) -> Result<f64> {
    let energy = pulse_energy(&halfsine_pulse(oversample)?);
    Ok(spec.sigma_chip * energy.sqrt())
}

/// Adds white Gaussian noise on the waveform sampling grid.
pub fn add_awgn_waveform<R: Rng + ?Sized>(
    w: &Waveform,
    spec: NoiseSpec,
    rng: &mut R,
) -> Result<Waveform> {
    let sigma = waveform_sigma(spec, w.oversample)?;
    Ok(Waveform {
        samples: noisy(w.samples.iter().copied(), sigma, rng),
        oversample: w.oversample,
    })
}

/// Adds `offset` to every sample.
pub fn add_constant(samples: &[f64], offset: f64) -> Vec<f64> {
    samples.iter().map(|x| x + offset).collect()
}

pub fn add_constant_waveform(w: &Waveform, offset: f64) -> Waveform {
    Waveform {
        samples: add_constant(&w.samples, offset),
        oversample: w.oversample,
    }
}

/// Chip vector as real I/Q vectors, shifted by `offset`.
pub fn chips_with_constant(chips: &ChipVector, offset: f64) -> (Vec<f64>, Vec<f64>) {
    let shift = |v: &[i8]| v.iter().map(|&c| f64::from(c) + offset).collect();
    (shift(&chips.i), shift(&chips.q))
}
