use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Deserializer};

use crate::rx::{block_size, PathModel};
use crate::tx::DEFAULT_OVERSAMPLE;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Chip-rate matched filter (`κ = 1`).
    Classic,
    /// Block-aggregated compressive matched filter.
    Cs,
}

impl Method {
    /// Identifier mixed into the RNG substream seed.
    pub fn id(self) -> u64 {
        match self {
            Method::Classic => 0,
            Method::Cs => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Classic => "classic",
            Method::Cs => "cs",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "classic" => Ok(Method::Classic),
            "cs" => Ok(Method::Cs),
            other => Err(Error::Format(format!("unknown method {other:?}"))),
        }
    }
}

impl<'de> Deserialize<'de> for PathModelField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_path_model(&s)
            .map(PathModelField)
            .map_err(serde::de::Error::custom)
    }
}

struct PathModelField(PathModel);

pub fn parse_path_model(s: &str) -> Result<PathModel> {
    match s.trim() {
        "chip" => Ok(PathModel::Chip),
        "waveform" => Ok(PathModel::Waveform),
        other => Err(Error::Format(format!("unknown path model {other:?}"))),
    }
}

/// Parses an Eb/N0 grid: a comma-separated list (`0,2,4.5,inf`) or an
/// inclusive range `start:stop:step`.
pub fn parse_ebn0_grid(s: &str) -> Result<Vec<f64>> {
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| Error::Format(format!("bad Eb/N0 value {t:?}")))
    };
    if s.contains(':') {
        let parts: Vec<f64> = s.split(':').map(parse).collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(Error::Format(format!(
                "Eb/N0 range {s:?} must be start:stop:step"
            )));
        };
        if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
            return Err(Error::Format(format!("invalid Eb/N0 range {s:?}")));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        Ok((0..=n).map(|k| start + k as f64 * step).collect())
    } else {
        s.split(',').map(parse).collect()
    }
}

/// Monte Carlo sweep settings.
///
/// The config file is TOML with one key per field; omitted keys take the
/// defaults below.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub methods: Vec<Method>,
    /// Undersampling ratio of the `cs` method; `classic` always runs at 1.
    pub kappa: f64,
    pub ebn0_grid_db: Vec<f64>,
    pub min_errors: u64,
    pub max_bits: u64,
    pub packet_bits: usize,
    pub seed: u64,
    pub oversample: usize,
    pub path_model: PathModel,
    /// Worker threads; `None` uses all cores.
    pub workers: Option<usize>,
    /// Record wall-clock time per point; disable for byte-reproducible output.
    pub timing: bool,
    pub theory: bool,
    pub chipmap: Option<PathBuf>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            methods: vec![Method::Classic, Method::Cs],
            kappa: 0.5,
            ebn0_grid_db: (-2..=12).map(f64::from).collect(),
            min_errors: 200,
            max_bits: 100_000_000,
            packet_bits: 1016,
            seed: 1,
            oversample: DEFAULT_OVERSAMPLE,
            path_model: PathModel::Chip,
            workers: None,
            timing: true,
            theory: false,
            chipmap: None,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(Method),
    Many(Vec<Method>),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GridField {
    List(Vec<f64>),
    Text(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    method: Option<OneOrMany>,
    kappa: Option<f64>,
    ebn0_grid_db: Option<GridField>,
    min_errors: Option<u64>,
    max_bits: Option<u64>,
    packet_bits: Option<usize>,
    seed: Option<u64>,
    oversample: Option<usize>,
    path_model: Option<PathModelField>,
    workers: Option<usize>,
    timing: Option<bool>,
    theory: Option<bool>,
    chipmap: Option<PathBuf>,
}

impl SimConfig {
    /// Parses TOML text over the defaults and validates the result.
    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| Error::Format(format!("config: {e}")))?;
        let mut cfg = Self::default();
        if let Some(m) = file.method {
            cfg.methods = match m {
                OneOrMany::One(m) => vec![m],
                OneOrMany::Many(v) => v,
            };
        }
        if let Some(g) = file.ebn0_grid_db {
            cfg.ebn0_grid_db = match g {
                GridField::List(v) => v,
                GridField::Text(s) => parse_ebn0_grid(&s)?,
            };
        }
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = file.$f { cfg.$f = v; })* };
        }
        set!(kappa, min_errors, max_bits, packet_bits, seed, oversample, timing, theory);
        if let Some(p) = file.path_model {
            cfg.path_model = p.0;
        }
        cfg.workers = file.workers.or(cfg.workers);
        cfg.chipmap = file.chipmap.or(cfg.chipmap);
        cfg.validate()?;
        Ok(cfg)
    }

    /// `κ` used for `method`.
    pub fn kappa_for(&self, method: Method) -> f64 {
        match method {
            Method::Classic => 1.0,
            Method::Cs => self.kappa,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Validation(msg));
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        if self.min_errors < 1 {
            return bad("min_errors must be at least 1".into());
        }
        if self.max_bits < 1 {
            return bad("max_bits must be at least 1".into());
        }
        if self.packet_bits == 0 || !self.packet_bits.is_multiple_of(4) {
            return bad(format!(
                "packet_bits {} is not a positive multiple of 4",
                self.packet_bits
            ));
        }
        if self.oversample < 2 {
            return bad(format!("oversample {} is below 2", self.oversample));
        }
        if self.ebn0_grid_db.is_empty() {
            return bad("empty Eb/N0 grid".into());
        }
        if let Some(x) = self
            .ebn0_grid_db
            .iter()
            .find(|x| x.is_nan() || **x == f64::NEG_INFINITY)
        {
            return bad(format!("invalid Eb/N0 grid value {x}"));
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        if self.methods.contains(&Method::Cs) {
            block_size(self.kappa).map_err(|e| Error::Validation(e.to_string()))?;
        }
        Ok(())
    }
}
