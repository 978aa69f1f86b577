//! Receivers: chip-rate and block-aggregated matched filtering followed by a
//! least-squares classifier over the signal candidates.
//!
//! A measurement matrix maps the `C_h` per-channel chip correlations to `L`
//! samples. The Nyquist matrix is the identity. The block-aggregate matrix
//! sums `1/κ` consecutive chips per sample, which is what a matched filter
//! repeated over `1/κ` chip pulses produces when it is dumped once per block.
//! Its rows have disjoint supports, so white chip noise stays white after
//! aggregation, with variance scaled by `1/κ`.

use rand::Rng;

use crate::channel::{add_awgn, add_awgn_waveform, NoiseSpec};
use crate::chipmap::{decode_symbol, encode_bits, Dictionary};
use crate::tx::{halfsine_pulse, pulse_energy, shape_with_pulse, spread, ChipVector, Waveform};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementKind {
    Nyquist,
    BlockAggregate,
}

/// Binary `L × C_h` sampling operator with disjoint row supports.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    kind: MeasurementKind,
    kappa: f64,
    block: usize,
    chips: usize,
}

/// Builds `Θ₁` or `Θ₁/κ` for `chips` chips per channel.
///
/// `1/kappa` and `chips·kappa` must both be integers.
pub fn make_measurement(
    kind: MeasurementKind,
    kappa: f64,
    chips: usize,
) -> Result<MeasurementMatrix> {
    if chips == 0 {
        return Err(Error::Argument("chip count must be positive".into()));
    }
    match kind {
        MeasurementKind::Nyquist => {
            if kappa != 1.0 {
                return Err(Error::Argument(format!(
                    "Nyquist sampling requires kappa = 1, got {kappa}"
                )));
            }
            Ok(MeasurementMatrix {
                kind,
                kappa: 1.0,
                block: 1,
                chips,
            })
        }
        MeasurementKind::BlockAggregate => {
            let block = block_size(kappa)?;
            if !chips.is_multiple_of(block) {
                return Err(Error::Argument(format!(
                    "{chips} chips cannot be split into blocks of {block}"
                )));
            }
            Ok(MeasurementMatrix {
                kind,
                kappa,
                block,
                chips,
            })
        }
    }
}

/// Integer `1/kappa`, or an error when it is not one.
pub fn block_size(kappa: f64) -> Result<usize> {
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::Argument(format!("kappa {kappa} is outside (0, 1]")));
    }
    let inv = 1.0 / kappa;
    let block = inv.round();
    if (inv - block).abs() > 1e-9 * block {
        return Err(Error::Argument(format!(
            "1/kappa = {inv} is not an integer"
        )));
    }
    Ok(block as usize)
}

impl MeasurementMatrix {
    pub fn nyquist(chips: usize) -> Self {
        make_measurement(MeasurementKind::Nyquist, 1.0, chips).expect("chips > 0")
    }

    pub fn kind(&self) -> MeasurementKind {
        self.kind
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Chips aggregated per sample, `1/κ`.
    pub fn block(&self) -> usize {
        self.block
    }

    /// Samples per channel per symbol, `L = C_h·κ`.
    pub fn samples(&self) -> usize {
        self.chips / self.block
    }

    /// Chips per channel per symbol, `C_h`.
    pub fn chips(&self) -> usize {
        self.chips
    }

    /// Dense 0/1 rows; row `j` covers columns `j/κ .. (j+1)/κ`.
    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.samples())
            .map(|j| {
                (0..self.chips)
                    .map(|c| u8::from(c / self.block == j))
                    .collect()
            })
            .collect()
    }

    /// Applies the matrix to a length-`C_h` vector.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.chips {
            return Err(Error::Argument(format!(
                "input has {} entries, measurement expects {}",
                x.len(),
                self.chips
            )));
        }
        Ok(x.chunks_exact(self.block).map(|b| b.iter().sum()).collect())
    }
}

/// Received samples `y = y_I + j·y_Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSampleVector {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexSampleVector {
    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            re: self.re.iter().map(|x| a * x).collect(),
            im: self.im.iter().map(|x| a * x).collect(),
        }
    }

    /// Squared Euclidean distance, the monotone equivalent of `(y-s)ᴴ(y-s)`.
    pub fn distance_sq(&self, other: &Self) -> f64 {
        let d = |a: &[f64], b: &[f64]| -> f64 {
            a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
        };
        d(&self.re, &other.re) + d(&self.im, &other.im)
    }
}

/// Samples noisy chip-rate correlations through `theta`.
pub fn sample_chips(
    noisy_i: &[f64],
    noisy_q: &[f64],
    theta: &MeasurementMatrix,
) -> Result<ComplexSampleVector> {
    Ok(ComplexSampleVector {
        re: theta.apply(noisy_i)?,
        im: theta.apply(noisy_q)?,
    })
}

/// Correlates each chip support with the pulse template and normalizes by
/// the pulse energy, giving one chip-scale value per chip.
pub fn matched_filter(w: &Waveform, pulse: &[f64]) -> Result<Vec<f64>> {
    if w.oversample != pulse.len() || !w.samples.len().is_multiple_of(pulse.len()) {
        return Err(Error::Argument(format!(
            "waveform at oversample {} does not match a {}-sample pulse",
            w.oversample,
            pulse.len()
        )));
    }
    let energy = pulse_energy(pulse);
    Ok(w.samples
        .chunks_exact(pulse.len())
        .map(|chip| chip.iter().zip(pulse).map(|(x, g)| x * g).sum::<f64>() / energy)
        .collect())
}

/// Integrate-and-dump of both channels against the pulse repeated over each
/// row's `1/κ` chips.
pub fn sample_waveform(
    w_i: &Waveform,
    w_q: &Waveform,
    theta: &MeasurementMatrix,
    pulse: &[f64],
) -> Result<ComplexSampleVector> {
    if w_i.chips() != theta.chips() || w_q.chips() != theta.chips() {
        return Err(Error::Argument(format!(
            "waveforms span {}/{} chips, measurement expects {}",
            w_i.chips(),
            w_q.chips(),
            theta.chips()
        )));
    }
    sample_chips(
        &matched_filter(w_i, pulse)?,
        &matched_filter(w_q, pulse)?,
        theta,
    )
}

/// Noise-free measured vectors `s_m = Θ·ψ_I[m] + j·Θ·ψ_Q[m]`, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    re: Vec<f64>,
    im: Vec<f64>,
    len: usize,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        if self.len == 0 {
            0
        } else {
            self.re.len() / self.len
        }
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    /// Samples per channel in each candidate.
    pub fn samples(&self) -> usize {
        self.len
    }

    pub fn get(&self, m: usize) -> ComplexSampleVector {
        let r = m * self.len..(m + 1) * self.len;
        ComplexSampleVector {
            re: self.re[r.clone()].to_vec(),
            im: self.im[r].to_vec(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ComplexSampleVector> + '_ {
        (0..self.len()).map(|m| self.get(m))
    }

    fn from_columns<'a>(
        cols_i: impl Iterator<Item = &'a [f64]>,
        cols_q: impl Iterator<Item = &'a [f64]>,
        theta: &MeasurementMatrix,
    ) -> Result<Self> {
        let mut re = Vec::new();
        let mut im = Vec::new();
        for (ci, cq) in cols_i.zip(cols_q) {
            re.extend(theta.apply(ci)?);
            im.extend(theta.apply(cq)?);
        }
        Ok(Self {
            re,
            im,
            len: theta.samples(),
        })
    }

    /// Squared distance from `y` to candidate `m`.
    pub fn distance_sq(&self, y: &ComplexSampleVector, m: usize) -> f64 {
        let r = m * self.len..(m + 1) * self.len;
        let d = |a: &[f64], b: &[f64]| -> f64 {
            a.iter().zip(b).map(|(x, s)| (x - s) * (x - s)).sum()
        };
        d(&y.re, &self.re[r.clone()]) + d(&y.im, &self.im[r])
    }
}

fn columns_f64(cols: &[Vec<i8>]) -> Vec<Vec<f64>> {
    cols.iter()
        .map(|c| c.iter().map(|&x| f64::from(x)).collect())
        .collect()
}

/// Precomputes the candidates for one `(dictionary, Θ)` pair.
pub fn build_candidates(dict: &Dictionary, theta: &MeasurementMatrix) -> Result<CandidateSet> {
    if dict.chips_per_channel() != theta.chips() {
        return Err(Error::Argument(format!(
            "dictionary has {} chips per channel, measurement expects {}",
            dict.chips_per_channel(),
            theta.chips()
        )));
    }
    let ci = columns_f64(dict.psi_i());
    let cq = columns_f64(dict.psi_q());
    CandidateSet::from_columns(
        ci.iter().map(Vec::as_slice),
        cq.iter().map(Vec::as_slice),
        theta,
    )
}

/// Least-squares decision: index of the nearest candidate, lowest index on ties.
pub fn classify(y: &ComplexSampleVector, cands: &CandidateSet) -> Result<usize> {
    if cands.is_empty() {
        return Err(Error::Argument("empty candidate set".into()));
    }
    if y.re.len() != cands.samples() || y.im.len() != cands.samples() {
        return Err(Error::Argument(format!(
            "sample vector has {}/{} entries, candidates have {}",
            y.re.len(),
            y.im.len(),
            cands.samples()
        )));
    }
    Ok(nearest(y, cands))
}

fn nearest(y: &ComplexSampleVector, cands: &CandidateSet) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for m in 0..cands.len() {
        let d = cands.distance_sq(y, m);
        if d < best_d {
            best_d = d;
            best = m;
        }
    }
    best
}

/// Receiver that first multiplies the received chips by its own PRN sequence
/// `p`, as a random demodulator would, and classifies against candidates
/// built from the equally mixed dictionary.
pub fn classify_with_prn(
    noisy_i: &[f64],
    noisy_q: &[f64],
    prn: &[i8],
    theta: &MeasurementMatrix,
    dict: &Dictionary,
) -> Result<usize> {
    if prn.len() != theta.chips() {
        return Err(Error::Argument(format!(
            "PRN has {} chips, measurement expects {}",
            prn.len(),
            theta.chips()
        )));
    }
    if prn.iter().any(|&p| p != 1 && p != -1) {
        return Err(Error::Argument("PRN entries must be +1 or -1".into()));
    }
    if noisy_i.len() != prn.len() || noisy_q.len() != prn.len() {
        return Err(Error::Argument("received chips do not match PRN length".into()));
    }
    let mix = |x: &[f64]| -> Vec<f64> { x.iter().zip(prn).map(|(v, &p)| v * f64::from(p)).collect() };
    let y = sample_chips(&mix(noisy_i), &mix(noisy_q), theta)?;

    let mix_cols = |cols: &[Vec<i8>]| -> Vec<Vec<f64>> {
        cols.iter()
            .map(|c| c.iter().zip(prn).map(|(&x, &p)| f64::from(x * p)).collect())
            .collect()
    };
    let ci = mix_cols(dict.psi_i());
    let cq = mix_cols(dict.psi_q());
    let cands = CandidateSet::from_columns(
        ci.iter().map(Vec::as_slice),
        cq.iter().map(Vec::as_slice),
        theta,
    )?;
    classify(&y, &cands)
}

/// Which signal model the link simulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathModel {
    /// Discrete chip-rate equivalent: noise is added to matched-filter outputs.
    Chip,
    /// Sampled half-sine waveforms, noise on the waveform grid, explicit matched filter.
    Waveform,
}

/// A transmitter/receiver pair sharing one dictionary and measurement matrix.
#[derive(Debug, Clone)]
pub struct Link {
    dict: Dictionary,
    theta: MeasurementMatrix,
    cands: CandidateSet,
    path: PathModel,
    pulse: Vec<f64>,
}

impl Link {
    pub fn new(
        dict: Dictionary,
        theta: MeasurementMatrix,
        path: PathModel,
        oversample: usize,
    ) -> Result<Self> {
        let cands = build_candidates(&dict, &theta)?;
        Ok(Self {
            dict,
            theta,
            cands,
            path,
            pulse: halfsine_pulse(oversample)?,
        })
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dict
    }

    pub fn measurement(&self) -> &MeasurementMatrix {
        &self.theta
    }

    pub fn candidates(&self) -> &CandidateSet {
        &self.cands
    }

    pub fn path(&self) -> PathModel {
        self.path
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.dict.symbols().trailing_zeros() as usize
    }

    /// Sends one symbol through the AWGN channel and returns the receiver's
    /// measured samples.
    pub fn receive<R: Rng + ?Sized>(
        &self,
        chips: &ChipVector,
        noise: NoiseSpec,
        rng: &mut R,
    ) -> Result<ComplexSampleVector> {
        match self.path {
            PathModel::Chip => {
                let (i, q) = add_awgn(chips, noise, rng);
                sample_chips(&i, &q, &self.theta)
            }
            PathModel::Waveform => {
                let wi = add_awgn_waveform(&shape_with_pulse(&chips.i, &self.pulse), noise, rng)?;
                let wq = add_awgn_waveform(&shape_with_pulse(&chips.q, &self.pulse), noise, rng)?;
                sample_waveform(&wi, &wq, &self.theta, &self.pulse)
            }
        }
    }

    pub fn decide(&self, y: &ComplexSampleVector) -> usize {
        nearest(y, &self.cands)
    }
}

/// Spreads, transmits, receives and decodes a whole packet of bits.
pub fn demodulate_packet<R: Rng + ?Sized>(
    bits: &[u8],
    link: &Link,
    noise: NoiseSpec,
    rng: &mut R,
) -> Result<Vec<u8>> {
    let n = link.bits_per_symbol();
    if n == 0 || !bits.len().is_multiple_of(n) {
        return Err(Error::Argument(format!(
            "packet of {} bits is not a whole number of {n}-bit symbols",
            bits.len()
        )));
    }
    let mut decoded = Vec::with_capacity(bits.len());
    for block in bits.chunks_exact(n) {
        let alpha = encode_bits(block, n)?;
        let chips = spread(alpha, &link.dict);
        let y = link.receive(&chips, noise, rng)?;
        decode_symbol(link.decide(&y), n, &mut decoded);
    }
    Ok(decoded)
}
