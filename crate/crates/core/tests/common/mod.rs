#![allow(dead_code)]

use cs_dsss::channel::NoiseSpec;
use cs_dsss::chipmap::{build_dictionaries, ChipTable, Dictionary};
use cs_dsss::harness::{substream, Method};
use cs_dsss::rx::{demodulate_packet, make_measurement, Link, MeasurementKind, PathModel};
use cs_dsss::tx::make_packet;

pub fn dict() -> Dictionary {
    build_dictionaries(&ChipTable::ieee802154()).unwrap()
}

pub fn link(kappa: f64, path: PathModel, oversample: usize) -> Link {
    let kind = if kappa == 1.0 {
        MeasurementKind::Nyquist
    } else {
        MeasurementKind::BlockAggregate
    };
    Link::new(
        dict(),
        make_measurement(kind, kappa, 16).unwrap(),
        path,
        oversample,
    )
    .unwrap()
}

/// BER over `packets` packets and its standard error, estimated from the
/// spread of per-packet error counts so clustered bit errors within a
/// symbol are accounted for.
pub fn ber_with_se(link: &Link, noise: NoiseSpec, packets: u64, seed: u64) -> (f64, f64) {
    let bits_per_packet = 1016usize;
    let counts: Vec<f64> = (0..packets)
        .map(|i| {
            let mut rng = substream(seed, Method::Classic, 0, i);
            let bits = make_packet(bits_per_packet, 4, &mut rng).unwrap();
            let out = demodulate_packet(&bits, link, noise, &mut rng).unwrap();
            bits.iter().zip(&out).filter(|(a, b)| a != b).count() as f64
        })
        .collect();
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / n;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let per_bit = bits_per_packet as f64;
    (mean / per_bit, (var / n).sqrt() / per_bit)
}

/// Wilson score interval for `k` successes in `n` trials at normal quantile `z`.
pub fn wilson(k: u64, n: u64, z: f64) -> (f64, f64) {
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (centre - half, centre + half)
}

/// Standard error of a BER estimate treating bits as independent trials.
pub fn binomial_se(ber: f64, bits: u64) -> f64 {
    (ber * (1.0 - ber) / bits as f64).sqrt()
}
