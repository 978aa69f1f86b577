//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

mod common;

use std::time::Instant;

use cs_dsss::channel::{add_awgn, chips_with_constant, sigma_from_ebn0, EbN0Point, NoiseSpec};
use cs_dsss::chipmap::{ChipTable, SymbolAlpha};
use cs_dsss::harness::{emit_csv, run_sweep, Method, SimConfig, Sweep};
use cs_dsss::rx::{
    classify, classify_with_prn, demodulate_packet, sample_chips, sample_waveform,
    MeasurementMatrix, PathModel,
};
use cs_dsss::theory::{ber_coherent_mfsk, ber_noncoherent_mfsk, crossing_db, TheoryCurve};
use cs_dsss::tx::{halfsine_pulse, make_packet, shape_halfsine, spread};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use common::{ber_with_se, dict, link};

type Outcome = Result<String, String>;

fn check(pass: bool, detail: String) -> Outcome {
    if pass {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// 1. Noise-free decoding for both methods and κ ∈ {1, 1/2, 1/4, 1/8}.
fn zero_noise() -> Outcome {
    let bits_total = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let bits = make_packet(bits_total, 4, &mut rng).unwrap();
    let mut details = Vec::new();
    let mut pass = true;
    let cases = [
        (Method::Classic, 1.0),
        (Method::Cs, 1.0),
        (Method::Cs, 0.5),
        (Method::Cs, 0.25),
        (Method::Cs, 0.125),
    ];
    for (method, kappa) in cases {
        let l = link(kappa, PathModel::Chip, 16);
        let out = demodulate_packet(&bits, &l, NoiseSpec::noiseless(), &mut rng).unwrap();
        let errors = bits.iter().zip(&out).filter(|(a, b)| a != b).count();
        pass &= errors == 0;
        details.push(format!("{method} κ={kappa}: {errors} errors"));
    }
    check(pass, details.join(", "))
}

/// 2. Theory curves: 0.5 at zero SNR and monotone on −10..12 dB.
fn theory_anchors() -> Outcome {
    let zero = EbN0Point::from_linear(0.0).unwrap();
    let nc = ber_noncoherent_mfsk(zero);
    let co = ber_coherent_mfsk(zero).map_err(|e| e.to_string())?;
    let grid: Vec<f64> = (0..=44).map(|k| -10.0 + 0.5 * k as f64).collect();
    let mono = |c: TheoryCurve| c.points.windows(2).all(|w| w[1].1 <= w[0].1);
    let co_mono = mono(TheoryCurve::coherent(&grid).map_err(|e| e.to_string())?);
    let nc_mono = mono(TheoryCurve::noncoherent(&grid).unwrap());
    check(
        (nc - 0.5).abs() < 1e-12 && (co - 0.5).abs() < 1e-9 && co_mono && nc_mono,
        format!(
            "noncoherent(0)={nc:.15}, coherent(0)={co:.12}, monotone: {co_mono}/{nc_mono}"
        ),
    )
}

fn reference_sweeps() -> (Sweep, Sweep) {
    let base = SimConfig {
        min_errors: 200,
        seed: 2012,
        timing: false,
        ..SimConfig::default()
    };
    let classic = run_sweep(SimConfig {
        methods: vec![Method::Classic],
        ebn0_grid_db: (-2..=8).map(f64::from).collect(),
        ..base.clone()
    })
    .unwrap();
    let cs = run_sweep(SimConfig {
        methods: vec![Method::Cs],
        kappa: 0.5,
        ebn0_grid_db: (-2..=12).map(f64::from).collect(),
        ..base
    })
    .unwrap();
    (classic, cs)
}

/// 3. Classic curve crosses 1e-2 and 1e-3 within 1 dB of the coherent MFSK curve.
fn classic_tracking(classic: &Sweep) -> Outcome {
    let sim = classic.curve(Method::Classic);
    let fine: Vec<f64> = (0..=100).map(|k| -2.0 + 0.1 * k as f64).collect();
    let theory = TheoryCurve::coherent(&fine).map_err(|e| e.to_string())?;
    let mut pass = true;
    let mut details = Vec::new();
    for target in [1e-2, 1e-3] {
        let s = crossing_db(&sim, target);
        let t = theory.crossing_db(target);
        match (s, t) {
            (Some(s), Some(t)) => {
                pass &= (s - t).abs() <= 1.0;
                details.push(format!("{target:e}: sim {s:.2} dB vs theory {t:.2} dB"));
            }
            _ => {
                pass = false;
                details.push(format!("{target:e}: no crossing (sim {s:?}, theory {t:?})"));
            }
        }
    }
    check(pass, details.join(", "))
}

/// 4. Horizontal gap at 1e-2 between classic and cs(κ=0.5) is within [3, 6] dB.
fn noise_folding_gap(classic: &Sweep, cs: &Sweep) -> Outcome {
    let a = crossing_db(&classic.curve(Method::Classic), 1e-2);
    let b = crossing_db(&cs.curve(Method::Cs), 1e-2);
    match (a, b) {
        (Some(a), Some(b)) => {
            let gap = b - a;
            check(
                (3.0..=6.0).contains(&gap),
                format!("classic {a:.2} dB, cs {b:.2} dB, gap {gap:.2} dB"),
            )
        }
        _ => Err(format!("missing crossing: classic {a:?}, cs {b:?}")),
    }
}

/// 5. Θ₁/₂ keeps white noise white with variance σ²/κ.
fn whiteness() -> Outcome {
    let theta = cs_dsss::rx::make_measurement(
        cs_dsss::rx::MeasurementKind::BlockAggregate,
        0.5,
        16,
    )
    .unwrap();
    let sigma = 1.3;
    let draws = 1_000_000;
    let l = theta.samples();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut cov = vec![0.0; l * l];
    let mut x = vec![0.0; 16];
    for _ in 0..draws {
        x.iter_mut()
            .for_each(|v| *v = sigma * rng.sample::<f64, _>(StandardNormal));
        let y = theta.apply(&x).unwrap();
        for a in 0..l {
            for b in 0..l {
                cov[a * l + b] += y[a] * y[b];
            }
        }
    }
    cov.iter_mut().for_each(|c| *c /= draws as f64);
    let expected = sigma * sigma / 0.5;
    let diag_err = (0..l)
        .map(|a| (cov[a * l + a] / expected - 1.0).abs())
        .fold(0.0, f64::max);
    let min_diag = (0..l).map(|a| cov[a * l + a]).fold(f64::INFINITY, f64::min);
    let off = (0..l)
        .flat_map(|a| (0..l).filter(move |&b| b != a).map(move |b| (a, b)))
        .map(|(a, b)| cov[a * l + b].abs())
        .fold(0.0, f64::max);
    check(
        diag_err < 0.01 && off < 0.01 * min_diag,
        format!(
            "max diagonal deviation {:.3}%, max |off-diagonal|/diagonal {:.3}%",
            100.0 * diag_err,
            100.0 * off / min_diag
        ),
    )
}

/// 6. A receiver-side PRN never changes the Nyquist least-squares decision.
fn prn_redundancy() -> Outcome {
    let d = dict();
    let table = ChipTable::ieee802154();
    let theta = MeasurementMatrix::nyquist(16);
    let cands = cs_dsss::rx::build_candidates(&d, &theta).unwrap();
    let noise = sigma_from_ebn0(EbN0Point::new(2.0).unwrap(), &table);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let prns: Vec<Vec<i8>> = (0..20)
        .map(|_| (0..16).map(|_| if rng.random() { 1 } else { -1 }).collect())
        .collect();
    let (mut agree, mut total, mut symbol_errors) = (0u64, 0u64, 0u64);
    for _ in 0..10_000 {
        let m = rng.random_range(0..16);
        let chips = spread(SymbolAlpha::new(m, 16).unwrap(), &d);
        let (i, q) = add_awgn(&chips, noise, &mut rng);
        let plain = classify(&sample_chips(&i, &q, &theta).unwrap(), &cands).unwrap();
        symbol_errors += u64::from(plain != m);
        for p in &prns {
            let mixed = classify_with_prn(&i, &q, p, &theta, &d).unwrap();
            agree += u64::from(mixed == plain);
            total += 1;
        }
    }
    check(
        agree == total,
        format!("{agree}/{total} identical decisions ({symbol_errors} symbol errors in the shared draws)"),
    )
}

/// Not a criterion: under Θ₁/₂ a receiver PRN yields a different effective
/// code set, so decisions are not expected to match one for one.
fn prn_agreement_half_rate() -> String {
    let d = dict();
    let theta = cs_dsss::rx::make_measurement(
        cs_dsss::rx::MeasurementKind::BlockAggregate,
        0.5,
        16,
    )
    .unwrap();
    let cands = cs_dsss::rx::build_candidates(&d, &theta).unwrap();
    let noise = sigma_from_ebn0(EbN0Point::new(2.0).unwrap(), &ChipTable::ieee802154());
    let mut rng = ChaCha8Rng::seed_from_u64(60);
    let (mut agree, mut plain_err, mut prn_err) = (0, 0, 0);
    let trials = 10_000;
    for _ in 0..trials {
        let p: Vec<i8> = (0..16).map(|_| if rng.random() { 1 } else { -1 }).collect();
        let m = rng.random_range(0..16);
        let chips = spread(SymbolAlpha::new(m, 16).unwrap(), &d);
        let (i, q) = add_awgn(&chips, noise, &mut rng);
        let plain = classify(&sample_chips(&i, &q, &theta).unwrap(), &cands).unwrap();
        let mixed = classify_with_prn(&i, &q, &p, &theta, &d).unwrap();
        agree += usize::from(plain == mixed);
        plain_err += usize::from(plain != m);
        prn_err += usize::from(mixed != m);
    }
    format!(
        "κ=0.5 at 2 dB: {agree}/{trials} identical decisions, symbol errors {plain_err} without PRN, {prn_err} with"
    )
}

/// 7. Waveform and chip paths agree: exactly without noise, statistically with it.
fn cross_model() -> Outcome {
    let d = dict();
    let r = 64;
    let pulse = halfsine_pulse(r).unwrap();
    let theta = MeasurementMatrix::nyquist(16);
    let mut ratios = Vec::new();
    for m in 0..16 {
        let chips = spread(SymbolAlpha::new(m, 16).unwrap(), &d);
        let wi = shape_halfsine(&chips.i, r).unwrap();
        let wq = shape_halfsine(&chips.q, r).unwrap();
        let y = sample_waveform(&wi, &wq, &theta, &pulse).unwrap();
        for (v, &c) in y.re.iter().zip(&chips.i).chain(y.im.iter().zip(&chips.q)) {
            ratios.push(v / f64::from(c));
        }
    }
    let scale = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let dev = ratios
        .iter()
        .map(|x| (x / scale - 1.0).abs())
        .fold(0.0, f64::max);

    let noise = sigma_from_ebn0(EbN0Point::new(6.0).unwrap(), &ChipTable::ieee802154());
    let packets = 1000;
    let (p_chip, se_chip) = ber_with_se(&link(1.0, PathModel::Chip, 16), noise, packets, 71);
    let (p_wave, se_wave) = ber_with_se(&link(1.0, PathModel::Waveform, 16), noise, packets, 72);
    let combined = (se_chip * se_chip + se_wave * se_wave).sqrt();
    let z = (p_chip - p_wave).abs() / combined;
    check(
        dev < 1e-9 && z < 3.0,
        format!(
            "noise-free scale {scale:.12}, max deviation {dev:.2e}; \
             6 dB BER chip {p_chip:.3e} vs waveform {p_wave:.3e} ({z:.2} SE)"
        ),
    )
}

/// Brute-force least-squares decision: dense Θ rows, every candidate, lowest index on ties.
fn oracle_decision(received_i: &[f64], received_q: &[f64], block: usize) -> usize {
    let d = dict();
    let rows: Vec<Vec<f64>> = (0..16 / block)
        .map(|j| {
            (0..16)
                .map(|c| if c >= j * block && c < (j + 1) * block { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    let measure = |x: &[f64]| -> Vec<f64> {
        rows.iter()
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    };
    let yi = measure(received_i);
    let yq = measure(received_q);
    let mut best = (f64::INFINITY, 0);
    for m in 0..16 {
        let si = measure(&d.psi_i()[m].iter().map(|&c| f64::from(c)).collect::<Vec<_>>());
        let sq = measure(&d.psi_q()[m].iter().map(|&c| f64::from(c)).collect::<Vec<_>>());
        let dist: f64 = yi.iter().zip(&si).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
            + yq.iter().zip(&sq).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        if dist < best.0 {
            best = (dist, m);
        }
    }
    best.1
}

/// 8. Decisions under a constant offset match the exhaustive distance oracle.
fn constant_offset() -> Outcome {
    let d = dict();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut agree, mut total) = (0, 0);
    for kappa in [1.0, 0.5] {
        let l = link(kappa, PathModel::Chip, 16);
        let block = l.measurement().block();
        for _ in 0..1000 {
            let m = rng.random_range(0..16);
            let chips = spread(SymbolAlpha::new(m, 16).unwrap(), &d);
            for offset in [0.1, 0.5, 1.0, 2.0] {
                let (i, q) = chips_with_constant(&chips, offset);
                let y = sample_chips(&i, &q, l.measurement()).unwrap();
                let got = classify(&y, l.candidates()).unwrap();
                agree += usize::from(got == oracle_decision(&i, &q, block));
                total += 1;
            }
        }
    }
    check(agree == total, format!("{agree}/{total} decisions match the oracle (κ = 1, 0.5)"))
}

/// 9. Identical seeds give byte-identical CSV for 1 and 8 workers.
fn determinism() -> Outcome {
    let sweep_csv = |workers| {
        let cfg = SimConfig {
            methods: vec![Method::Classic, Method::Cs],
            ebn0_grid_db: (0..=8).map(f64::from).collect(),
            min_errors: 200,
            seed: 99,
            workers: Some(workers),
            timing: false,
            theory: true,
            ..SimConfig::default()
        };
        let sweep = run_sweep(cfg).unwrap();
        let mut out = Vec::new();
        emit_csv(&mut out, &sweep.records, true).unwrap();
        out
    };
    let a = sweep_csv(1);
    let b = sweep_csv(8);
    check(
        a == b,
        format!("{} bytes each, identical: {}", a.len(), a == b),
    )
}

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, name: &str, start: Instant, outcome: Outcome| {
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {n}. {name} ({secs:.1} s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {n}. {name} ({secs:.1} s): {detail}");
            }
        }
    };

    let t = Instant::now();
    report(1, "zero-noise correctness", t, zero_noise());
    let t = Instant::now();
    report(2, "theory anchors", t, theory_anchors());

    let t = Instant::now();
    let (classic, cs) = reference_sweeps();
    println!("      (BER sweeps took {:.1} s)", t.elapsed().as_secs_f64());
    let t = Instant::now();
    report(3, "classic receiver tracks coherent MFSK", t, classic_tracking(&classic));
    let t = Instant::now();
    report(4, "noise-folding gap at 1e-2", t, noise_folding_gap(&classic, &cs));

    let t = Instant::now();
    report(5, "whiteness under block aggregation", t, whiteness());
    let t = Instant::now();
    report(6, "receiver PRN redundancy (Nyquist)", t, prn_redundancy());
    println!("INFO  6. {}", prn_agreement_half_rate());
    let t = Instant::now();
    report(7, "waveform/chip cross-model equivalence", t, cross_model());
    let t = Instant::now();
    report(8, "constant-offset validation", t, constant_offset());
    let t = Instant::now();
    report(9, "determinism across worker counts", t, determinism());

    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
