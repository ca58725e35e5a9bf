//! Monte-Carlo sweep engine and output formats.
//!
//! Every trial draws from its own random stream keyed by (seed, sweep,
//! combination, trial index), and per-point results are integer counters
//! summed across trials, so the output does not depend on how many worker
//! threads run the trials.

pub mod config;
pub mod frame;
pub mod stats;
pub mod sweep;

use std::fmt::Write as _;

use serde::Serialize;

use crate::constellation::ConstellationKind;
use crate::detect::ReceiverKind;

pub use config::{ChannelModel, ExperimentConfig};
pub use stats::{ci_halfwidth, falling_crossing, rising_crossing};
pub use sweep::{run_ber_sweep, run_bler_sweep, run_classification_sweep};

/// Version of the CSV/JSON record layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    PCorrectClassification,
    Ber,
    Bler,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::PCorrectClassification => "p_correct_classification",
            Metric::Ber => "ber",
            Metric::Bler => "bler",
        }
    }

    /// Column heading in CSV output.
    pub fn column(self) -> &'static str {
        match self {
            Metric::PCorrectClassification => "p_correct",
            Metric::Ber => "ber",
            Metric::Bler => "bler",
        }
    }
}

/// One point of one curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRecord {
    pub snr_db: f64,
    pub receiver: ReceiverKind,
    pub ms: ConstellationKind,
    pub mi_true: ConstellationKind,
    pub n: usize,
    pub metric: Metric,
    pub value: f64,
    pub ci_halfwidth: f64,
    /// Trials behind the estimate (bits for BER, blocks otherwise).
    pub n_trials: u64,
    pub config_digest: String,
}

/// Selects the points of one curve, ordered by SNR.
pub fn curve(
    records: &[CurveRecord],
    receiver: ReceiverKind,
    ms: ConstellationKind,
    mi_true: ConstellationKind,
    n: usize,
) -> Vec<&CurveRecord> {
    let mut pts: Vec<&CurveRecord> = records
        .iter()
        .filter(|r| r.receiver == receiver && r.ms == ms && r.mi_true == mi_true && r.n == n)
        .collect();
    pts.sort_by(|a, b| a.snr_db.total_cmp(&b.snr_db));
    pts
}

/// `(snr_db, value)` pairs of [`curve`].
pub fn curve_points(
    records: &[CurveRecord],
    receiver: ReceiverKind,
    ms: ConstellationKind,
    mi_true: ConstellationKind,
    n: usize,
) -> Vec<(f64, f64)> {
    curve(records, receiver, ms, mi_true, n)
        .into_iter()
        .map(|r| (r.snr_db, r.value))
        .collect()
}

/// CSV with header `snr_db,receiver,ms,mi_true,n,<metric>,ci,trials`.
pub fn to_csv(records: &[CurveRecord]) -> String {
    let column = records.first().map(|r| r.metric.column()).unwrap_or("value");
    let mut out = format!("snr_db,receiver,ms,mi_true,n,{column},ci,trials\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.6},{:.6},{}",
            r.snr_db, r.receiver, r.ms, r.mi_true, r.n, r.value, r.ci_halfwidth, r.n_trials
        );
    }
    out
}

/// Modelling assumptions written next to every output.
pub fn assumptions(config: &ExperimentConfig) -> Vec<String> {
    vec![
        format!(
            "tone spacing {} Hz, 12 tones x 14 symbols per resource block (140 data, 28 pilot elements)",
            config.tone_spacing_hz
        ),
        "ITU pedestrian A/B tap tables normalized to unit power; block fading (taps fixed per trial)".into(),
        "per-tone per-antenna SNR = 1/noise_var with unit-energy symbols and unit-variance channel entries".into(),
        "Gray-labeled unit-energy square QAM; label bit 1 maps to positive LLR".into(),
        "perfect knowledge of both channels, noise level and SIR at the receiver".into(),
        "FEC: rate-1/2 K=7 (133,171) tail-biting convolutional code with soft Viterbi decoding, \
         substituted for the LTE turbo code; BLER values show trends only"
            .into(),
    ]
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    schema_version: u32,
    config_digest: String,
    config: &'a ExperimentConfig,
    assumptions: Vec<String>,
    records: &'a [CurveRecord],
}

pub fn to_json(records: &[CurveRecord], config: &ExperimentConfig) -> String {
    let doc = JsonDocument {
        schema_version: SCHEMA_VERSION,
        config_digest: config.digest(),
        config,
        assumptions: assumptions(config),
        records,
    };
    serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
}

/// Sidecar metadata for CSV output.
pub fn metadata_json(config: &ExperimentConfig) -> String {
    to_json(&[], config)
}
