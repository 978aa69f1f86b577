//! Reference bit-error-rate curves for 16-ary orthogonal signalling.
//!
//! `ber_coherent_mfsk` integrates the probability that the correct correlator
//! loses to at least one of the 15 others, converted to bit errors with the
//! `8/15` factor. `ber_noncoherent_mfsk` is the closed-form alternating sum
//! quoted by IEEE 802.15.4 for its O-QPSK PHY.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::channel::EbN0Point;
use crate::{Error, Result};

/// Absolute tolerance of the coherent-curve quadrature.
pub const QUADRATURE_TOL: f64 = 1e-12;

/// Half-width, in standard deviations, of the coherent integration window.
const WINDOW_SIGMAS: f64 = 12.0;

const MAX_DEPTH: usize = 60;

/// Gaussian tail probability `Q(x) = P(X > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// `ln(1 - Q(x))`, accurate in both tails.
fn ln_phi(x: f64) -> f64 {
    if x > 0.0 {
        (-q_function(x)).ln_1p()
    } else {
        q_function(-x).ln()
    }
}

/// `1 - (1 - Q(x))^15`, computed as `-expm1(15·ln(1 - Q(x)))`.
pub fn symbol_error_given(x: f64) -> f64 {
    -(15.0 * ln_phi(x)).exp_m1()
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    const XGK: [f64; 8] = [
        0.991_455_371_120_812_6,
        0.949_107_912_342_758_5,
        0.864_864_423_359_769_1,
        0.741_531_185_599_394_4,
        0.586_087_235_467_691_1,
        0.405_845_151_377_397_2,
        0.207_784_955_007_898_5,
        0.0,
    ];
    const WGK: [f64; 8] = [
        0.022_935_322_010_529_22,
        0.063_092_092_629_978_55,
        0.104_790_010_322_250_2,
        0.140_653_259_715_525_9,
        0.169_004_726_639_267_9,
        0.190_350_578_064_785_4,
        0.204_432_940_075_298_9,
        0.209_482_141_084_727_8,
    ];
    const WG: [f64; 4] = [
        0.129_484_966_168_869_7,
        0.279_705_391_489_276_7,
        0.381_830_050_505_118_9,
        0.417_959_183_673_469_4,
    ];
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for k in 0..7 {
        let dx = h * XGK[k];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[k] * s;
        if k % 2 == 1 {
            gauss += WG[k / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) quadrature to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        tol: f64,
        whole: (f64, f64),
        depth: usize,
    ) -> Result<f64> {
        let (value, err) = whole;
        if err <= tol {
            return Ok(value);
        }
        let m = 0.5 * (a + b);
        if depth == MAX_DEPTH || m <= a || m >= b {
            return Err(Error::Numeric(format!(
                "quadrature did not converge on [{a}, {b}]: error estimate {err:e} > {tol:e}"
            )));
        }
        let left = gauss_kronrod(f, a, m);
        let right = gauss_kronrod(f, m, b);
        Ok(recurse(f, a, m, 0.5 * tol, left, depth + 1)?
            + recurse(f, m, b, 0.5 * tol, right, depth + 1)?)
    }
    let whole = gauss_kronrod(&f, a, b);
    recurse(&f, a, b, tol, whole, 0)
}

/// Mean of the correct correlator output in noise-standard-deviation units,
/// `√(8·Eb/N0)` for 4 bits per symbol.
fn correlator_mean(e: EbN0Point) -> f64 {
    (8.0 * e.linear()).sqrt()
}

/// Bit error probability of coherent 16-ary orthogonal signalling.
pub fn ber_coherent_mfsk(e: EbN0Point) -> Result<f64> {
    if e.is_noise_free() {
        return Ok(0.0);
    }
    let mu = correlator_mean(e);
    let norm = 1.0 / (2.0 * PI).sqrt();
    let integrand = |x: f64| {
        let z = x - mu;
        symbol_error_given(x) * norm * (-0.5 * z * z).exp()
    };
    let lo = mu - WINDOW_SIGMAS;
    let hi = mu + WINDOW_SIGMAS;
    // Split at the centre so the peak never falls between nodes of a single panel.
    let value = integrate(integrand, lo, mu, 0.5 * QUADRATURE_TOL)?
        + integrate(integrand, mu, hi, 0.5 * QUADRATURE_TOL)?;
    Ok((8.0 / 15.0 * value).clamp(0.0, 0.5))
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Bit error probability of non-coherent 16-ary orthogonal signalling.
pub fn ber_noncoherent_mfsk(e: EbN0Point) -> f64 {
    if e.is_noise_free() {
        return 0.0;
    }
    let rho = e.linear();
    let sum: f64 = (2..=16u64)
        .map(|m| {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sign * binomial(16, m) as f64 * (4.0 * rho * (1.0 / m as f64 - 1.0)).exp()
        })
        .sum();
    8.0 / 15.0 / 16.0 * sum
}

/// One theory curve sampled on a dB grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoryCurve {
    pub points: Vec<(f64, f64)>,
}

impl TheoryCurve {
    pub fn coherent(grid_db: &[f64]) -> Result<Self> {
        let points = grid_db
            .iter()
            .map(|&db| Ok((db, ber_coherent_mfsk(EbN0Point::new(db)?)?)))
            .collect::<Result<_>>()?;
        Ok(Self { points })
    }

    pub fn noncoherent(grid_db: &[f64]) -> Result<Self> {
        let points = grid_db
            .iter()
            .map(|&db| Ok((db, ber_noncoherent_mfsk(EbN0Point::new(db)?))))
            .collect::<Result<_>>()?;
        Ok(Self { points })
    }

    /// Eb/N0 (dB) where the curve crosses `target`, interpolating log10(BER)
    /// linearly in dB between the bracketing points.
    pub fn crossing_db(&self, target: f64) -> Option<f64> {
        crossing_db(&self.points, target)
    }
}

/// First downward crossing of `target` by a `(dB, BER)` curve, interpolated
/// in log10(BER). Points with zero BER are skipped.
pub fn crossing_db(points: &[(f64, f64)], target: f64) -> Option<f64> {
    let lt = target.log10();
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, p)| *p > 0.0)
        .map(|&(x, p)| (x, p.log10()))
        .collect();
    pts.windows(2).find_map(|w| {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        (y0 >= lt && y1 <= lt && y0 != y1).then(|| x0 + (lt - y0) * (x1 - x0) / (y1 - y0))
    })
}
