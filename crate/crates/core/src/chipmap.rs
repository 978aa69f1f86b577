//! Symbol-to-chip mapping and the per-channel spreading dictionaries.
//!
//! A chip table holds one `±1` sequence of `C` chips for each of the `M = 2^N`
//! data symbols. O-QPSK sends even-indexed chips on the in-phase channel and
//! odd-indexed chips on the quadrature channel, so the table deinterleaves
//! into two `C/2 × M` dictionaries whose column `m` is the chip pattern of
//! symbol `m` on that channel.
//!
//! Chip-table text format: optional `#` comment lines, then exactly `M` lines
//! of exactly `C` characters from `{0,1}`. Line order is symbol order and chip
//! bit `b` maps to polarity `2b - 1`.

use std::io::Read;

use crate::{Error, Result};

/// Chip table shipped with the crate (IEEE 802.15.4, 2450 MHz band).
pub const IEEE802154_CHIPS: &str = include_str!("../data/ieee802154_2450mhz_chips.txt");

/// Symbols in the 802.15.4 alphabet.
pub const IEEE802154_SYMBOLS: usize = 16;
/// Chips per 802.15.4 symbol, both channels together.
pub const IEEE802154_CHIPS_PER_SYMBOL: usize = 32;

/// Validated `M × C` table of chip polarities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChipTable {
    rows: Vec<Vec<i8>>,
    bits_per_symbol: usize,
}

impl ChipTable {
    /// The 802.15.4 table compiled into the crate.
    pub fn ieee802154() -> Self {
        Self::parse(IEEE802154_CHIPS).expect("shipped chip table is valid")
    }

    /// Parses an 802.15.4-shaped table (16 rows of 32 chips).
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_shape(text, IEEE802154_SYMBOLS, IEEE802154_CHIPS_PER_SYMBOL)
    }

    /// Parses a table with `symbols` rows of `chips` characters each.
    ///
    /// `symbols` must be a power of two of at least 2.
    pub fn parse_with_shape(text: &str, symbols: usize, chips: usize) -> Result<Self> {
        if symbols < 2 || !symbols.is_power_of_two() {
            return Err(Error::Argument(format!(
                "symbol count {symbols} is not a power of two >= 2"
            )));
        }
        if chips == 0 {
            return Err(Error::Argument("chip count must be positive".into()));
        }

        let mut rows = Vec::with_capacity(symbols);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.starts_with('#') {
                continue;
            }
            if rows.len() == symbols {
                return Err(Error::Format(format!(
                    "line {}: more than {symbols} chip rows",
                    lineno + 1
                )));
            }
            if line.chars().count() != chips {
                return Err(Error::Format(format!(
                    "line {}: expected {chips} chips, found {}",
                    lineno + 1,
                    line.chars().count()
                )));
            }
            let row = line
                .chars()
                .map(|ch| match ch {
                    '0' => Ok(-1),
                    '1' => Ok(1),
                    other => Err(Error::Format(format!(
                        "line {}: invalid chip character {other:?}",
                        lineno + 1
                    ))),
                })
                .collect::<Result<Vec<i8>>>()?;
            rows.push(row);
        }
        if rows.len() != symbols {
            return Err(Error::Format(format!(
                "expected {symbols} chip rows, found {}",
                rows.len()
            )));
        }

        for a in 0..rows.len() {
            for b in a + 1..rows.len() {
                if rows[a] == rows[b] {
                    return Err(Error::Validation(format!(
                        "rows {a} and {b} are identical"
                    )));
                }
            }
        }

        Ok(Self {
            rows,
            bits_per_symbol: symbols.trailing_zeros() as usize,
        })
    }

    /// Number of symbols `M`.
    pub fn symbols(&self) -> usize {
        self.rows.len()
    }

    /// Chips per symbol `C`.
    pub fn chips_per_symbol(&self) -> usize {
        self.rows[0].len()
    }

    /// Information bits per symbol `N`, with `M = 2^N`.
    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    /// Chip polarities of symbol `m`.
    pub fn row(&self, m: usize) -> &[i8] {
        &self.rows[m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i8]> {
        self.rows.iter().map(Vec::as_slice)
    }

    /// Inner product of two rows.
    pub fn correlation(&self, a: usize, b: usize) -> i32 {
        self.rows[a]
            .iter()
            .zip(&self.rows[b])
            .map(|(&x, &y)| i32::from(x) * i32::from(y))
            .sum()
    }

    /// True if every pair of distinct rows has zero inner product.
    pub fn is_orthogonal(&self) -> bool {
        let m = self.symbols();
        (0..m).all(|a| (a + 1..m).all(|b| self.correlation(a, b) == 0))
    }
}

/// Reads and validates an 802.15.4-shaped chip table.
pub fn load_chip_table<R: Read>(mut source: R) -> Result<ChipTable> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => Error::Format("chip table is not UTF-8".into()),
            _ => Error::Io(e),
        })?;
    ChipTable::parse(&text)
}

/// In-phase and quadrature dictionaries, stored column-major: `psi_i()[m]` is
/// the in-phase chip pattern of symbol `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dictionary {
    psi_i: Vec<Vec<i8>>,
    psi_q: Vec<Vec<i8>>,
}

impl Dictionary {
    pub fn psi_i(&self) -> &[Vec<i8>] {
        &self.psi_i
    }

    pub fn psi_q(&self) -> &[Vec<i8>] {
        &self.psi_q
    }

    /// Chips per channel per symbol, `C/2`.
    pub fn chips_per_channel(&self) -> usize {
        self.psi_i[0].len()
    }

    pub fn symbols(&self) -> usize {
        self.psi_i.len()
    }

    /// Reinterleaves column `m` into the full chip sequence.
    pub fn interleave(&self, m: usize) -> Vec<i8> {
        self.psi_i[m]
            .iter()
            .zip(&self.psi_q[m])
            .flat_map(|(&i, &q)| [i, q])
            .collect()
    }
}

/// Splits each table row into its even (in-phase) and odd (quadrature) chips.
pub fn build_dictionaries(table: &ChipTable) -> Result<Dictionary> {
    let c = table.chips_per_symbol();
    if !c.is_multiple_of(2) {
        return Err(Error::Validation(format!(
            "odd chip count {c} cannot be split into I/Q channels"
        )));
    }
    let (psi_i, psi_q) = table
        .rows()
        .map(|row| {
            let even = row.iter().step_by(2).copied().collect();
            let odd = row.iter().skip(1).step_by(2).copied().collect();
            (even, odd)
        })
        .unzip();
    Ok(Dictionary { psi_i, psi_q })
}

/// Index of a transmitted symbol; conceptually a one-hot vector of length `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolAlpha(usize);

impl SymbolAlpha {
    /// Wraps `index`, checking it against the alphabet size.
    pub fn new(index: usize, symbols: usize) -> Result<Self> {
        if index >= symbols {
            return Err(Error::Argument(format!(
                "symbol index {index} out of range for {symbols} symbols"
            )));
        }
        Ok(Self(index))
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn one_hot(self, symbols: usize) -> Vec<u8> {
        let mut v = vec![0; symbols];
        v[self.0] = 1;
        v
    }
}

/// Maps a block of `N` bits (values 0/1) to a symbol, first bit least significant.
pub fn encode_bits(bits: &[u8], bits_per_symbol: usize) -> Result<SymbolAlpha> {
    if bits.len() != bits_per_symbol {
        return Err(Error::Argument(format!(
            "bit block has {} bits, expected {bits_per_symbol}",
            bits.len()
        )));
    }
    let mut index = 0usize;
    for (k, &b) in bits.iter().enumerate() {
        match b {
            0 => {}
            1 => index |= 1 << k,
            other => return Err(Error::Argument(format!("bit value {other} is not 0 or 1"))),
        }
    }
    Ok(SymbolAlpha(index))
}

/// Inverse of [`encode_bits`], appending the bits to `out`.
pub fn decode_symbol(symbol: usize, bits_per_symbol: usize, out: &mut Vec<u8>) {
    out.extend((0..bits_per_symbol).map(|k| ((symbol >> k) & 1) as u8));
}
