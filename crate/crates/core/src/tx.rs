//! Transmitter: spreading and half-sine pulse shaping.
//!
//! Time is normalized to chips. Each channel carries one chip every
//! `T = 2·T_c`, and every chip occupies its own half-sine support of `R`
//! samples. The O-QPSK half-period offset between I and Q is absorbed by the
//! synchronized receiver, so both channels are generated on the same grid.

use rand::RngCore;

use crate::chipmap::{Dictionary, SymbolAlpha};
use crate::{Error, Result};

/// Default samples per per-channel chip period.
pub const DEFAULT_OVERSAMPLE: usize = 16;

/// Per-channel chip polarities of one symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChipVector {
    pub i: Vec<i8>,
    pub q: Vec<i8>,
}

impl ChipVector {
    pub fn len(&self) -> usize {
        self.i.len()
    }

    pub fn is_empty(&self) -> bool {
        self.i.is_empty()
    }
}

/// Selects the dictionary columns of `alpha`.
pub fn spread(alpha: SymbolAlpha, dict: &Dictionary) -> ChipVector {
    let m = alpha.index();
    ChipVector {
        i: dict.psi_i()[m].clone(),
        q: dict.psi_q()[m].clone(),
    }
}

/// Sampled half-sine chip pulse, `sin(π (j + ½) / R)` for `j = 0..R`.
pub fn halfsine_pulse(oversample: usize) -> Result<Vec<f64>> {
    check_oversample(oversample)?;
    let r = oversample as f64;
    Ok((0..oversample)
        .map(|j| (std::f64::consts::PI * (j as f64 + 0.5) / r).sin())
        .collect())
}

/// Sum of squared pulse samples.
pub fn pulse_energy(pulse: &[f64]) -> f64 {
    pulse.iter().map(|g| g * g).sum()
}

fn check_oversample(oversample: usize) -> Result<()> {
    if oversample < 2 {
        return Err(Error::Argument(format!(
            "oversample {oversample} is below the minimum of 2"
        )));
    }
    Ok(())
}

/// One channel's sampled baseband signal for one symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f64>,
    pub oversample: usize,
}

impl Waveform {
    /// Number of chip periods covered.
    pub fn chips(&self) -> usize {
        self.samples.len() / self.oversample
    }
}

/// Places one half-sine pulse per chip on disjoint consecutive supports.
pub fn shape_halfsine(chips: &[i8], oversample: usize) -> Result<Waveform> {
    let pulse = halfsine_pulse(oversample)?;
    Ok(shape_with_pulse(chips, &pulse))
}

pub(crate) fn shape_with_pulse(chips: &[i8], pulse: &[f64]) -> Waveform {
    let samples = chips
        .iter()
        .flat_map(|&c| {
            let a = f64::from(c);
            pulse.iter().map(move |g| a * g)
        })
        .collect();
    Waveform {
        samples,
        oversample: pulse.len(),
    }
}

/// Draws `bit_count` independent equiprobable bits (values 0/1).
pub fn make_packet<R: RngCore + ?Sized>(
    bit_count: usize,
    bits_per_symbol: usize,
    rng: &mut R,
) -> Result<Vec<u8>> {
    if bits_per_symbol == 0 || !bit_count.is_multiple_of(bits_per_symbol) {
        return Err(Error::Argument(format!(
            "packet of {bit_count} bits is not a whole number of {bits_per_symbol}-bit symbols"
        )));
    }
    let mut bits = Vec::with_capacity(bit_count);
    while bits.len() < bit_count {
        let word = rng.next_u64();
        let take = (bit_count - bits.len()).min(64);
        bits.extend((0..take).map(|k| ((word >> k) & 1) as u8));
    }
    Ok(bits)
}
