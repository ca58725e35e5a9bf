//! Distance-buffer accounting for one resource block over a subframe.
//!
//! Convention: one buffer entry is the minimum distance (and its argmin
//! interferer symbol) for one desired symbol under one hypothesis on one
//! tone. The genie detector fills one buffer per data tone. The joint
//! detector fills all hypothesis buffers on the classification tones, reuses
//! the chosen buffer there for LLRs, and fills only the chosen buffer on the
//! remaining data tones. The counts come from running both datapaths on a
//! synthetic block, not from a closed-form expression.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::joint::{JointDetector, Search};
use crate::channel::{gen_iid_block, random_symbol, transmit, TONES_PER_PRB, SYMBOLS_PER_SUBFRAME};
use crate::constellation::{hypothesis_set, Constellation, ConstellationKind};
use crate::error::Result;

/// Overhead quoted for the shared-buffer architecture, for side-by-side output.
pub const REFERENCE_OVERHEAD_PCT: f64 = 22.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountConfig {
    pub ms: ConstellationKind,
    pub tones_per_prb: usize,
    pub symbols_per_subframe: usize,
    pub pilot_tones: usize,
    /// Classification window (tones of one OFDM symbol).
    pub n_classify: usize,
    pub seed: u64,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig {
            ms: ConstellationKind::Qam64,
            tones_per_prb: TONES_PER_PRB,
            symbols_per_subframe: SYMBOLS_PER_SUBFRAME,
            pilot_tones: 28,
            n_classify: 12,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceCount {
    pub ms: ConstellationKind,
    pub ms_size: usize,
    pub total_tones: usize,
    pub data_tones: usize,
    pub n_classify: usize,
    pub genie_entries: usize,
    pub joint_entries: usize,
    pub overhead_pct: f64,
    pub reference_overhead_pct: f64,
}

pub fn count_distances(config: &CountConfig) -> Result<DistanceCount> {
    let ms = Constellation::new(config.ms);
    let hyps = hypothesis_set();
    let total_tones = config.tones_per_prb * config.symbols_per_subframe;
    let data_tones = total_tones.saturating_sub(config.pilot_tones);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let true_mi = &hyps[3];
    let obs: Vec<_> = gen_iid_block(data_tones, &mut rng)
        .iter()
        .map(|ch| {
            let x1 = random_symbol(&ms, &mut rng);
            let x2 = random_symbol(true_mi, &mut rng);
            transmit(ch, x1, x2, 1.0, 0.1, &mut rng)
        })
        .collect();

    let det = JointDetector::new(&ms, &hyps, 1.0, Search::Sliced);
    let genie = det.detect_known(&obs, true_mi.kind())?;
    let joint = det.detect_window(&obs, config.n_classify)?;
    let overhead_pct = 100.0 * (joint.entries_computed as f64 - genie.entries_computed as f64)
        / genie.entries_computed as f64;
    Ok(DistanceCount {
        ms: config.ms,
        ms_size: ms.len(),
        total_tones,
        data_tones,
        n_classify: config.n_classify,
        genie_entries: genie.entries_computed,
        joint_entries: joint.entries_computed,
        overhead_pct,
        reference_overhead_pct: REFERENCE_OVERHEAD_PCT,
    })
}
