//! CSV output of sweep records.
//!
//! Column order is fixed. Floats are written in Rust's shortest round-trip
//! form, so parsing a file reproduces the records exactly.

use std::io::{Read, Write};

use super::{BerRecord, Method};
use crate::{Error, Result};

pub const CSV_HEADER: [&str; 10] = [
    "method",
    "kappa",
    "ebn0_db",
    "bits_sent",
    "bit_errors",
    "ber",
    "packets",
    "capped",
    "seed",
    "elapsed_s",
];

pub const THEORY_HEADER: [&str; 2] = ["pb_coherent", "pb_noncoherent"];

pub fn write_header<W: Write>(w: &mut csv::Writer<W>, theory: bool) -> Result<()> {
    let mut header: Vec<&str> = CSV_HEADER.to_vec();
    if theory {
        header.extend(THEORY_HEADER);
    }
    w.write_record(&header)?;
    Ok(())
}

pub fn write_record<W: Write>(w: &mut csv::Writer<W>, r: &BerRecord, theory: bool) -> Result<()> {
    let mut row = vec![
        r.method.to_string(),
        r.kappa.to_string(),
        r.ebn0_db.to_string(),
        r.bits_sent.to_string(),
        r.bit_errors.to_string(),
        r.ber.to_string(),
        r.packets.to_string(),
        r.capped.to_string(),
        r.seed.to_string(),
        r.elapsed_s.to_string(),
    ];
    if theory {
        let (Some(c), Some(n)) = (r.pb_coherent, r.pb_noncoherent) else {
            return Err(Error::Argument(
                "theory columns requested but record has no theory values".into(),
            ));
        };
        row.push(c.to_string());
        row.push(n.to_string());
    }
    w.write_record(&row)?;
    Ok(())
}

/// Writes `records` as CSV, with theory columns when `theory` is set.
pub fn emit_csv<W: Write>(out: W, records: &[BerRecord], theory: bool) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Argument("no records to write".into()));
    }
    let mut w = csv::Writer::from_writer(out);
    write_header(&mut w, theory)?;
    for r in records {
        write_record(&mut w, r, theory)?;
    }
    w.flush()?;
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, k: usize) -> Result<T> {
    let raw = rec
        .get(k)
        .ok_or_else(|| Error::Format(format!("missing column {}", k + 1)))?;
    raw.parse()
        .map_err(|_| Error::Format(format!("bad value {raw:?} in column {}", k + 1)))
}

/// Reads records written by [`emit_csv`].
pub fn parse_csv<R: Read>(input: R) -> Result<Vec<BerRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    let base: Vec<&str> = header.iter().take(CSV_HEADER.len()).collect();
    let theory = match header.len() {
        10 => false,
        12 => true,
        n => return Err(Error::Format(format!("unexpected column count {n}"))),
    };
    if base != CSV_HEADER || (theory && header.iter().skip(10).ne(THEORY_HEADER)) {
        return Err(Error::Format(format!("unexpected header {header:?}")));
    }
    rd.records()
        .map(|rec| {
            let rec = rec?;
            let method: Method = rec
                .get(0)
                .ok_or_else(|| Error::Format("missing method".into()))?
                .parse()?;
            Ok(BerRecord {
                method,
                kappa: field(&rec, 1)?,
                ebn0_db: field(&rec, 2)?,
                bits_sent: field(&rec, 3)?,
                bit_errors: field(&rec, 4)?,
                ber: field(&rec, 5)?,
                packets: field(&rec, 6)?,
                capped: field(&rec, 7)?,
                seed: field(&rec, 8)?,
                elapsed_s: field(&rec, 9)?,
                pb_coherent: if theory { Some(field(&rec, 10)?) } else { None },
                pb_noncoherent: if theory { Some(field(&rec, 11)?) } else { None },
            })
        })
        .collect()
}
