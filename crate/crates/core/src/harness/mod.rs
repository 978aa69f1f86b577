//! Seeded Monte Carlo BER sweeps.
//!
//! Each grid point sends whole packets until the accumulated bit errors reach
//! `min_errors` or `max_bits` bits have been sent. Packet `i` of grid point
//! `g` draws all of its randomness from a ChaCha stream keyed by
//! `(seed, method, g, i)`, so a record depends only on the configuration and
//! never on how packets were scheduled across workers. Packets are simulated
//! in parallel batches of deterministic size and folded in packet order; any
//! packets past the stopping packet are discarded.

mod config;
mod report;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use config::{parse_ebn0_grid, parse_path_model, Method, SimConfig};
pub use report::{emit_csv, parse_csv, write_header, write_record, CSV_HEADER, THEORY_HEADER};

use crate::channel::{add_awgn, sigma_from_ebn0, EbN0Point, NoiseSpec};
use crate::chipmap::{build_dictionaries, decode_symbol, encode_bits, load_chip_table, ChipTable};
use crate::rx::{demodulate_packet, make_measurement, sample_chips, Link, MeasurementKind};
use crate::theory::{ber_coherent_mfsk, ber_noncoherent_mfsk, TheoryCurve};
use crate::tx::{make_packet, spread};
use crate::{Error, Result};

const FIRST_BATCH: usize = 4;
const MAX_BATCH: usize = 512;

/// One sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub method: Method,
    pub kappa: f64,
    pub ebn0_db: f64,
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub packets: u64,
    /// Stopped by `max_bits` (or a noise-free point) before reaching `min_errors`.
    pub capped: bool,
    pub seed: u64,
    pub elapsed_s: f64,
    pub pb_coherent: Option<f64>,
    pub pb_noncoherent: Option<f64>,
}

/// Seed of the random stream for packet `packet` of grid point `point`.
pub fn substream_seed(master: u64, method: Method, point: u64, packet: u64) -> [u8; 32] {
    let mut seed = [0u8; 32];
    for (k, word) in [master, method.id(), point, packet].into_iter().enumerate() {
        seed[8 * k..8 * k + 8].copy_from_slice(&word.to_le_bytes());
    }
    seed
}

pub fn substream(master: u64, method: Method, point: u64, packet: u64) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(substream_seed(master, method, point, packet))
}

/// Loaded chip table plus per-method links for one configuration.
#[derive(Debug)]
pub struct Experiment {
    cfg: SimConfig,
    table: ChipTable,
    links: Vec<(Method, Link)>,
    pool: rayon::ThreadPool,
}

impl Experiment {
    pub fn new(cfg: SimConfig) -> Result<Self> {
        cfg.validate()?;
        let table = match &cfg.chipmap {
            Some(path) => load_chip_table(std::fs::File::open(path)?)?,
            None => ChipTable::ieee802154(),
        };
        Self::with_table(cfg, table)
    }

    pub fn with_table(cfg: SimConfig, table: ChipTable) -> Result<Self> {
        cfg.validate()?;
        if !cfg.packet_bits.is_multiple_of(table.bits_per_symbol()) {
            return Err(Error::Validation(format!(
                "packet_bits {} is not a multiple of {} bits per symbol",
                cfg.packet_bits,
                table.bits_per_symbol()
            )));
        }
        let dict = build_dictionaries(&table)?;
        let mut links = Vec::new();
        for &method in &cfg.methods {
            let theta = match method {
                Method::Classic => {
                    make_measurement(MeasurementKind::Nyquist, 1.0, dict.chips_per_channel())?
                }
                Method::Cs => make_measurement(
                    MeasurementKind::BlockAggregate,
                    cfg.kappa,
                    dict.chips_per_channel(),
                )?,
            };
            links.push((
                method,
                Link::new(dict.clone(), theta, cfg.path_model, cfg.oversample)?,
            ));
        }
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cfg.workers {
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| Error::Argument(format!("thread pool: {e}")))?;
        Ok(Self {
            cfg,
            table,
            links,
            pool,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn table(&self) -> &ChipTable {
        &self.table
    }

    pub fn link(&self, method: Method) -> Option<&Link> {
        self.links.iter().find(|(m, _)| *m == method).map(|(_, l)| l)
    }

    fn packet_errors(
        &self,
        link: &Link,
        method: Method,
        point: u64,
        packet: u64,
        noise: NoiseSpec,
    ) -> Result<u64> {
        let mut rng = substream(self.cfg.seed, method, point, packet);
        let bits = make_packet(self.cfg.packet_bits, self.table.bits_per_symbol(), &mut rng)?;
        let decoded = demodulate_packet(&bits, link, noise, &mut rng)?;
        Ok(bits.iter().zip(&decoded).filter(|(a, b)| a != b).count() as u64)
    }

    /// Simulates grid point `point` (index into the grid) at `ebn0_db`.
    pub fn run_point(&self, method: Method, point: usize, ebn0_db: f64) -> Result<BerRecord> {
        let link = self
            .link(method)
            .ok_or_else(|| Error::Argument(format!("method {method} is not configured")))?;
        let start = Instant::now();
        let e = EbN0Point::new(ebn0_db)?;
        let noise = sigma_from_ebn0(e, &self.table);
        let point = point as u64;
        let packet_bits = self.cfg.packet_bits as u64;

        let (mut bits_sent, mut bit_errors, mut packets) = (0u64, 0u64, 0u64);
        let mut batch = FIRST_BATCH;
        'outer: loop {
            let first = packets;
            // A noise-free point cannot accumulate errors; one packet checks it.
            let size = if e.is_noise_free() { 1 } else { batch };
            let results: Vec<Result<u64>> = self.pool.install(|| {
                (first..first + size as u64)
                    .into_par_iter()
                    .map(|i| self.packet_errors(link, method, point, i, noise))
                    .collect()
            });
            for r in results {
                bit_errors += r?;
                bits_sent += packet_bits;
                packets += 1;
                if bit_errors >= self.cfg.min_errors
                    || bits_sent >= self.cfg.max_bits
                    || e.is_noise_free()
                {
                    break 'outer;
                }
            }
            batch = (batch * 2).min(MAX_BATCH);
        }

        let (pb_coherent, pb_noncoherent) = if self.cfg.theory {
            (Some(ber_coherent_mfsk(e)?), Some(ber_noncoherent_mfsk(e)))
        } else {
            (None, None)
        };
        Ok(BerRecord {
            method,
            kappa: self.cfg.kappa_for(method),
            ebn0_db,
            bits_sent,
            bit_errors,
            ber: bit_errors as f64 / bits_sent as f64,
            packets,
            capped: bit_errors < self.cfg.min_errors,
            seed: self.cfg.seed,
            elapsed_s: if self.cfg.timing {
                start.elapsed().as_secs_f64()
            } else {
                0.0
            },
            pb_coherent,
            pb_noncoherent,
        })
    }

    /// Runs every configured method over the grid, calling `on_record` as
    /// each point completes.
    pub fn run_sweep_with<F>(&self, mut on_record: F) -> Result<Sweep>
    where
        F: FnMut(&BerRecord) -> Result<()>,
    {
        let mut records = Vec::new();
        for &(method, _) in &self.links {
            for (g, &db) in self.cfg.ebn0_grid_db.iter().enumerate() {
                let r = self.run_point(method, g, db)?;
                on_record(&r)?;
                records.push(r);
            }
        }
        let grid = &self.cfg.ebn0_grid_db;
        Ok(Sweep {
            records,
            coherent: TheoryCurve::coherent(grid)?,
            noncoherent: TheoryCurve::noncoherent(grid)?,
        })
    }

    pub fn run_sweep(&self) -> Result<Sweep> {
        self.run_sweep_with(|_| Ok(()))
    }
}

/// Sweep output: records in (method, grid) order plus theory overlays.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub records: Vec<BerRecord>,
    pub coherent: TheoryCurve,
    pub noncoherent: TheoryCurve,
}

impl Sweep {
    /// `(Eb/N0, BER)` points of one method in grid order.
    pub fn curve(&self, method: Method) -> Vec<(f64, f64)> {
        self.records
            .iter()
            .filter(|r| r.method == method)
            .map(|r| (r.ebn0_db, r.ber))
            .collect()
    }
}

/// Runs a full sweep for `cfg`.
pub fn run_sweep(cfg: SimConfig) -> Result<Sweep> {
    Experiment::new(cfg)?.run_sweep()
}

/// Bit errors of two chip-path receivers fed the same symbols and the same
/// noise realizations, for `symbols` random symbols.
pub fn shared_noise_errors(
    table: &ChipTable,
    first: &Link,
    second: &Link,
    noise: NoiseSpec,
    symbols: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(u64, u64)> {
    let n = table.bits_per_symbol();
    let dict = build_dictionaries(table)?;
    let (mut e1, mut e2) = (0u64, 0u64);
    let mut decoded = Vec::with_capacity(2 * n);
    for _ in 0..symbols {
        let bits = make_packet(n, n, rng)?;
        let chips = spread(encode_bits(&bits, n)?, &dict);
        let (i, q) = add_awgn(&chips, noise, rng);
        for (link, errs) in [(first, &mut e1), (second, &mut e2)] {
            let y = sample_chips(&i, &q, link.measurement())?;
            decoded.clear();
            decode_symbol(link.decide(&y), n, &mut decoded);
            *errs += bits.iter().zip(&decoded).filter(|(a, b)| a != b).count() as u64;
        }
    }
    Ok((e1, e2))
}
