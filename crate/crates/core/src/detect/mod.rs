//! Receivers for the desired user of a two-user MU-MIMO tone.
//!
//! - [`joint`]: joint interferer-constellation classification and max-log-MAP
//!   detection over shared per-tone distance buffers.
//! - [`nulling`]: classification after projecting out the desired user.
//! - [`linear`]: covariance-based and IRC linear combiners.
//! - [`count`]: distance-buffer accounting for one resource block.

pub mod count;
pub mod joint;
pub mod linear;
pub mod nulling;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constellation::ConstellationKind;
use crate::error::{Error, Result};

pub use count::{count_distances, CountConfig, DistanceCount};
pub use joint::{
    distance, distance_tables, distance_tables_exhaustive, joint_ml_classify, max_log_llr,
    DistanceEntry, DistanceTable, JointDetector, Search, WindowOutput,
};
pub use linear::{
    combine, cov_weights, interference_covariance, irc_llr, irc_weights, LinearWeights,
};
pub use nulling::{nulling_classify, nulling_filter, projection_matrix};

/// Interferer classification outcome over a window of tones.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationResult {
    pub chosen: ConstellationKind,
    /// Accumulated metric per hypothesis, in hypothesis order.
    pub metrics: Vec<(ConstellationKind, f64)>,
    pub n_tones_used: usize,
}

impl ClassificationResult {
    pub(crate) fn from_metrics(
        metrics: Vec<(ConstellationKind, f64)>,
        n_tones_used: usize,
    ) -> ClassificationResult {
        // ties go to the smaller alphabet: sort by size, keep the first strict minimum
        let mut order: Vec<usize> = (0..metrics.len()).collect();
        order.sort_by_key(|&i| metrics[i].0.size());
        let mut best = order[0];
        for &i in &order[1..] {
            if metrics[i].1 < metrics[best].1 {
                best = i;
            }
        }
        ClassificationResult {
            chosen: metrics[best].0,
            metrics,
            n_tones_used,
        }
    }

    pub fn metric(&self, kind: ConstellationKind) -> Option<f64> {
        self.metrics.iter().find(|(k, _)| *k == kind).map(|(_, m)| *m)
    }
}

/// Per-tone, per-bit soft decisions for the desired user. Positive values
/// favour label bit 1.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LlrFrame {
    bits_per_tone: usize,
    values: Vec<f64>,
}

impl LlrFrame {
    pub fn new(bits_per_tone: usize) -> LlrFrame {
        LlrFrame {
            bits_per_tone,
            values: Vec::new(),
        }
    }

    pub fn with_capacity(bits_per_tone: usize, tones: usize) -> LlrFrame {
        LlrFrame {
            bits_per_tone,
            values: Vec::with_capacity(bits_per_tone * tones),
        }
    }

    pub fn push_tone(&mut self, llrs: &[f64]) {
        debug_assert_eq!(llrs.len(), self.bits_per_tone);
        self.values.extend_from_slice(llrs);
    }

    pub fn bits_per_tone(&self) -> usize {
        self.bits_per_tone
    }

    pub fn n_tones(&self) -> usize {
        if self.bits_per_tone == 0 {
            0
        } else {
            self.values.len() / self.bits_per_tone
        }
    }

    pub fn tone(&self, i: usize) -> &[f64] {
        &self.values[i * self.bits_per_tone..(i + 1) * self.bits_per_tone]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Hard decisions (1 where the LLR is positive).
    pub fn hard_bits(&self) -> Vec<u8> {
        self.values.iter().map(|&l| u8::from(l > 0.0)).collect()
    }
}

/// Receiver identifiers used in configs and output files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReceiverKind {
    /// Covariance-based linear combiner.
    Cov,
    /// Linear interference rejection combining.
    Irc,
    /// Nulling-projection classification followed by joint ML detection.
    NullMl,
    /// Joint ML classification and detection.
    JointMl,
    /// ML detection with the true interferer constellation.
    GenieMl,
}

impl ReceiverKind {
    pub const ALL: [ReceiverKind; 5] = [
        ReceiverKind::Cov,
        ReceiverKind::Irc,
        ReceiverKind::NullMl,
        ReceiverKind::JointMl,
        ReceiverKind::GenieMl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReceiverKind::Cov => "cov",
            ReceiverKind::Irc => "irc",
            ReceiverKind::NullMl => "null-ml",
            ReceiverKind::JointMl => "joint-ml",
            ReceiverKind::GenieMl => "genie-ml",
        }
    }

    /// Whether the receiver produces an interferer classification.
    pub fn classifies(self) -> bool {
        matches!(self, ReceiverKind::NullMl | ReceiverKind::JointMl)
    }
}

impl fmt::Display for ReceiverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReceiverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        ReceiverKind::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or(Error::UnknownName {
                what: "receiver",
                name: s,
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_prefer_the_smaller_alphabet() {
        let metrics = vec![
            (ConstellationKind::Qam64, 1.0),
            (ConstellationKind::Qam4, 1.0),
            (ConstellationKind::Absent, 2.0),
            (ConstellationKind::Qam16, 1.0),
        ];
        let r = ClassificationResult::from_metrics(metrics, 3);
        assert_eq!(r.chosen, ConstellationKind::Qam4);
        assert_eq!(r.metric(ConstellationKind::Absent), Some(2.0));
    }

    #[test]
    fn receiver_names_round_trip() {
        for r in ReceiverKind::ALL {
            assert_eq!(r.name().parse::<ReceiverKind>().unwrap(), r);
        }
        assert!("mmse".parse::<ReceiverKind>().is_err());
    }

    #[test]
    fn llr_frame_layout() {
        let mut f = LlrFrame::new(2);
        f.push_tone(&[1.0, -2.0]);
        f.push_tone(&[-0.5, 0.25]);
        assert_eq!(f.n_tones(), 2);
        assert_eq!(f.tone(1), &[-0.5, 0.25]);
        assert_eq!(f.hard_bits(), vec![1, 0, 0, 1]);
    }
}
