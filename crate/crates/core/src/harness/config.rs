//! Flat `key = value` experiment configuration.
//!
//! Lists are comma separated. SNR grids accept either a list or an inclusive
//! `start:step:stop` range. Lines starting with `#` are comments.
//!
//! ```text
//! receivers = joint-ml, null-ml
//! ms = qam4
//! mi = qam4, qam16, qam64
//! n = 24
//! trials = 10000
//! snr_db = -10:1:30
//! channel = iid
//! seed = 1
//! ```

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::channel::{CorrelationSpec, ProfileName, DEFAULT_PILOTS, TONE_SPACING_HZ};
use crate::constellation::ConstellationKind;
use crate::detect::ReceiverKind;
use crate::error::{Error, Result};
use crate::fec::DEFAULT_BLOCK_BITS;

/// Channel model for a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelModel {
    /// Independent Rayleigh fading on every tone.
    Iid,
    /// Block-fading tapped delay line.
    Multipath(ProfileName),
}

impl ChannelModel {
    pub fn name(self) -> &'static str {
        match self {
            ChannelModel::Iid => "iid",
            ChannelModel::Multipath(p) => p.name(),
        }
    }
}

impl Serialize for ChannelModel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl FromStr for ChannelModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("iid") {
            Ok(ChannelModel::Iid)
        } else {
            Ok(ChannelModel::Multipath(s.parse()?))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub receivers: Vec<ReceiverKind>,
    pub ms: Vec<ConstellationKind>,
    /// True interferer constellations.
    pub mi: Vec<ConstellationKind>,
    /// Classification window sizes in tones.
    pub n: Vec<usize>,
    pub trials: usize,
    pub snr_db: Vec<f64>,
    pub sir_db: f64,
    pub channel: ChannelModel,
    pub rho_t: f64,
    pub rho_r: f64,
    pub seed: u64,
    pub fec: bool,
    pub block_bits: usize,
    /// Pilots per resource block for the covariance receiver.
    pub pilots: usize,
    pub tone_spacing_hz: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            receivers: vec![ReceiverKind::JointMl, ReceiverKind::NullMl],
            ms: vec![ConstellationKind::Qam4],
            mi: vec![ConstellationKind::Qam4, ConstellationKind::Qam16, ConstellationKind::Qam64],
            n: vec![12],
            trials: 10_000,
            snr_db: vec![0.0],
            sir_db: 0.0,
            channel: ChannelModel::Iid,
            rho_t: 0.0,
            rho_r: 0.0,
            seed: 0,
            fec: false,
            block_bits: DEFAULT_BLOCK_BITS,
            pilots: DEFAULT_PILOTS,
            tone_spacing_hz: TONE_SPACING_HZ,
        }
    }
}

fn field_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

fn parse_one<T: FromStr>(field: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse::<T>()
        .map_err(|e| field_err(field, format!("cannot parse `{}`: {e}", value.trim())))
}

fn parse_list<T: FromStr>(field: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_one(field, s))
        .collect()
}

fn parse_grid(field: &str, value: &str) -> Result<Vec<f64>> {
    if !value.contains(':') {
        return parse_list(field, value);
    }
    let parts: Vec<f64> = value
        .split(':')
        .map(|s| parse_one(field, s))
        .collect::<Result<_>>()?;
    let [start, step, stop] = parts[..] else {
        return Err(field_err(field, "range must be start:step:stop"));
    };
    if step <= 0.0 || stop < start {
        return Err(field_err(field, "range needs step > 0 and stop >= start"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    // integer-indexed so the grid does not accumulate rounding
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

fn parse_bool(field: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "on" | "yes" => Ok(true),
        "0" | "false" | "off" | "no" => Ok(false),
        other => Err(field_err(field, format!("expected on/off, got `{other}`"))),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                field_err(&format!("line {}", lineno + 1), "expected `key = value`")
            })?;
            let key = key.trim();
            match key {
                "receivers" => cfg.receivers = parse_list(key, value)?,
                "ms" => cfg.ms = parse_list(key, value)?,
                "mi" => cfg.mi = parse_list(key, value)?,
                "n" => cfg.n = parse_list(key, value)?,
                "trials" => cfg.trials = parse_one(key, value)?,
                "snr_db" => cfg.snr_db = parse_grid(key, value)?,
                "sir_db" => cfg.sir_db = parse_one(key, value)?,
                "channel" => cfg.channel = parse_one(key, value)?,
                "rho_t" => cfg.rho_t = parse_one(key, value)?,
                "rho_r" => cfg.rho_r = parse_one(key, value)?,
                "rho" => {
                    let rho: f64 = parse_one(key, value)?;
                    cfg.rho_t = rho;
                    cfg.rho_r = rho;
                }
                "seed" => cfg.seed = parse_one(key, value)?,
                "fec" => cfg.fec = parse_bool(key, value)?,
                "block_bits" => cfg.block_bits = parse_one(key, value)?,
                "pilots" => cfg.pilots = parse_one(key, value)?,
                "tone_spacing_hz" => cfg.tone_spacing_hz = parse_one(key, value)?,
                other => return Err(field_err(other, "unknown field")),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(field_err("trials", "must be at least 1"));
        }
        if self.snr_db.is_empty() || self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(field_err("snr_db", "must be a non-empty list of finite values"));
        }
        if self.n.is_empty() || self.n.contains(&0) {
            return Err(field_err("n", "window sizes must be at least 1"));
        }
        if self.receivers.is_empty() {
            return Err(field_err("receivers", "at least one receiver required"));
        }
        if self.ms.is_empty() || self.ms.contains(&ConstellationKind::Absent) {
            return Err(field_err("ms", "desired constellation must be qam4, qam16 or qam64"));
        }
        if self.mi.is_empty() {
            return Err(field_err("mi", "at least one interferer constellation required"));
        }
        if !self.sir_db.is_finite() {
            return Err(field_err("sir_db", "must be finite"));
        }
        CorrelationSpec::new(self.rho_t, self.rho_r)
            .map_err(|e| field_err("rho_t/rho_r", e.to_string()))?;
        if self.pilots < 2 {
            return Err(field_err("pilots", "covariance estimate needs at least 2 pilots"));
        }
        if self.block_bits == 0 {
            return Err(field_err("block_bits", "must be positive"));
        }
        if !(self.tone_spacing_hz > 0.0) {
            return Err(field_err("tone_spacing_hz", "must be positive"));
        }
        Ok(())
    }

    pub fn correlation(&self) -> CorrelationSpec {
        CorrelationSpec::new(self.rho_t, self.rho_r).expect("validated")
    }

    /// Amplitude applied to the interferer channel for the configured SIR.
    pub fn sir_scale(&self) -> f64 {
        10f64.powf(-self.sir_db / 20.0)
    }

    /// Canonical `key = value` text; identical configs give identical text.
    pub fn canonical(&self) -> String {
        let join = |v: Vec<String>| v.join(",");
        let mut s = String::new();
        let _ = writeln!(s, "receivers = {}", join(self.receivers.iter().map(|r| r.to_string()).collect()));
        let _ = writeln!(s, "ms = {}", join(self.ms.iter().map(|k| k.to_string()).collect()));
        let _ = writeln!(s, "mi = {}", join(self.mi.iter().map(|k| k.to_string()).collect()));
        let _ = writeln!(s, "n = {}", join(self.n.iter().map(|k| k.to_string()).collect()));
        let _ = writeln!(s, "trials = {}", self.trials);
        let _ = writeln!(s, "snr_db = {}", join(self.snr_db.iter().map(|k| format!("{k}")).collect()));
        let _ = writeln!(s, "sir_db = {}", self.sir_db);
        let _ = writeln!(s, "channel = {}", self.channel.name());
        let _ = writeln!(s, "rho_t = {}", self.rho_t);
        let _ = writeln!(s, "rho_r = {}", self.rho_r);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "fec = {}", if self.fec { "on" } else { "off" });
        let _ = writeln!(s, "block_bits = {}", self.block_bits);
        let _ = writeln!(s, "pilots = {}", self.pilots);
        let _ = writeln!(s, "tone_spacing_hz = {}", self.tone_spacing_hz);
        s
    }

    /// First 16 hex digits of the SHA-256 of the canonical text.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.canonical().as_bytes());
        hash.iter().take(8).fold(String::new(), |mut acc, b| {
            let _ = write!(acc, "{b:02x}");
            acc
        })
    }
}
