//! Joint ML interferer classification and max-log-MAP detection.
//!
//! For each tone and each interferer hypothesis the detector keeps one buffer
//! of `|M_S|` entries: for every desired symbol `x1`, the smallest distance
//! over the hypothesis' interferer alphabet and the interferer symbol that
//! achieved it. Classification accumulates the per-buffer minima over a window
//! of tones; the LLRs are then read from the winning buffer without
//! recomputing any distance.

use num_complex::Complex64;

use super::{ClassificationResult, LlrFrame};
use crate::channel::ToneObservation;
use crate::constellation::{Constellation, ConstellationKind};
use crate::error::{Error, Result};

/// `||y - h1 x1 - sir_scale h2 x2||^2 / noise_var`.
#[inline]
pub fn distance(obs: &ToneObservation, x1: Complex64, x2: Complex64, sir_scale: f64) -> f64 {
    let r = obs.y - obs.chan.h1.scale(x1) - obs.chan.h2.scale(x2 * sir_scale);
    r.norm_sqr() / obs.noise_var
}

/// How the interferer symbol is searched for each desired symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Search {
    /// Evaluate every interferer symbol.
    Exhaustive,
    /// Project the residual onto the interferer channel and slice; the result
    /// is the same minimizer as the exhaustive search because the residual
    /// norm is a shifted, scaled `|x2 - z|^2`.
    #[default]
    Sliced,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceEntry {
    pub x1_index: usize,
    /// Minimizing interferer symbol (0 for the absent hypothesis).
    pub x2_index: usize,
    pub dist: f64,
}

/// Distance buffers of one tone, one per evaluated hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTable {
    ms_size: usize,
    kinds: Vec<ConstellationKind>,
    /// Hypothesis-major: buffer `h` occupies `entries[h * ms_size..(h + 1) * ms_size]`.
    entries: Vec<DistanceEntry>,
}

impl DistanceTable {
    pub fn build(
        obs: &ToneObservation,
        ms: &Constellation,
        hypotheses: &[&Constellation],
        sir_scale: f64,
        search: Search,
    ) -> DistanceTable {
        let mut entries = Vec::with_capacity(hypotheses.len() * ms.len());
        for mi in hypotheses {
            fill_buffer(obs, ms, mi, sir_scale, search, &mut entries);
        }
        DistanceTable {
            ms_size: ms.len(),
            kinds: hypotheses.iter().map(|c| c.kind()).collect(),
            entries,
        }
    }

    pub fn kinds(&self) -> &[ConstellationKind] {
        &self.kinds
    }

    pub fn ms_size(&self) -> usize {
        self.ms_size
    }

    /// Total number of buffer entries computed for this tone.
    pub fn n_entries(&self) -> usize {
        self.entries.len()
    }

    pub fn buffer(&self, kind: ConstellationKind) -> Option<&[DistanceEntry]> {
        let h = self.kinds.iter().position(|&k| k == kind)?;
        Some(&self.entries[h * self.ms_size..(h + 1) * self.ms_size])
    }

    /// Smallest entry of the hypothesis' buffer.
    pub fn min_entry(&self, kind: ConstellationKind) -> Option<&DistanceEntry> {
        self.buffer(kind)?
            .iter()
            .min_by(|a, b| a.dist.total_cmp(&b.dist))
    }
}

fn fill_buffer(
    obs: &ToneObservation,
    ms: &Constellation,
    mi: &Constellation,
    sir_scale: f64,
    search: Search,
    out: &mut Vec<DistanceEntry>,
) {
    let g = obs.chan.h2.scale_re(sir_scale);
    let g_energy = g.norm_sqr();
    for (x1_index, &x1) in ms.points().iter().enumerate() {
        let (x2_index, dist) = match search {
            Search::Sliced if mi.len() == 1 || g_energy == 0.0 => {
                (0, distance(obs, x1, mi.point(0), sir_scale))
            }
            Search::Sliced => {
                let r = obs.y - obs.chan.h1.scale(x1);
                let z = g.dot(&r) / g_energy;
                let k = mi.slice(z);
                (k, distance(obs, x1, mi.point(k), sir_scale))
            }
            Search::Exhaustive => {
                let mut best = (0, f64::INFINITY);
                for (k, &x2) in mi.points().iter().enumerate() {
                    let d = distance(obs, x1, x2, sir_scale);
                    if d < best.1 {
                        best = (k, d);
                    }
                }
                best
            }
        };
        out.push(DistanceEntry {
            x1_index,
            x2_index,
            dist,
        });
    }
}

/// Buffers for every hypothesis using the sliced interferer search.
pub fn distance_tables(
    obs: &ToneObservation,
    ms: &Constellation,
    hypotheses: &[Constellation],
    sir_scale: f64,
) -> DistanceTable {
    let refs: Vec<&Constellation> = hypotheses.iter().collect();
    DistanceTable::build(obs, ms, &refs, sir_scale, Search::Sliced)
}

/// Buffers for every hypothesis by enumerating all symbol pairs.
pub fn distance_tables_exhaustive(
    obs: &ToneObservation,
    ms: &Constellation,
    hypotheses: &[Constellation],
    sir_scale: f64,
) -> DistanceTable {
    let refs: Vec<&Constellation> = hypotheses.iter().collect();
    DistanceTable::build(obs, ms, &refs, sir_scale, Search::Exhaustive)
}

/// Chooses the hypothesis minimizing `N ln|M_I| + sum_i min d` over the tones.
pub fn joint_ml_classify(tables: &[DistanceTable]) -> Result<ClassificationResult> {
    let first = tables.first().ok_or(Error::EmptyWindow)?;
    let n = tables.len();
    let mut metrics = Vec::with_capacity(first.kinds.len());
    for &kind in &first.kinds {
        let mut acc = 0.0;
        for t in tables {
            let e = t.min_entry(kind).ok_or(Error::Length {
                what: "hypothesis set of a distance table",
                expected: first.kinds.len(),
                actual: t.kinds.len(),
            })?;
            acc += e.dist;
        }
        metrics.push((kind, n as f64 * (kind.size() as f64).ln() + acc));
    }
    Ok(ClassificationResult::from_metrics(metrics, n))
}

/// Max-log LLRs of the desired symbol bits read from the `chosen` buffer.
pub fn max_log_llr(
    table: &DistanceTable,
    chosen: ConstellationKind,
    ms: &Constellation,
) -> Result<Vec<f64>> {
    let buffer = table.buffer(chosen).ok_or(Error::UnknownName {
        what: "hypothesis in distance table",
        name: chosen.to_string(),
    })?;
    let m = ms.bits_per_symbol();
    let mut llrs = vec![0.0; m];
    llr_from_buffer(buffer, ms, &mut llrs);
    Ok(llrs)
}

fn llr_from_buffer(buffer: &[DistanceEntry], ms: &Constellation, out: &mut [f64]) {
    let m = ms.bits_per_symbol();
    // [bit][sign]: min over x1 with label bit 0 (sign -1) and bit 1 (sign +1)
    let mut mins = [[f64::INFINITY; 2]; 6];
    for e in buffer {
        for (j, slot) in mins.iter_mut().enumerate().take(m) {
            let b = ms.label_bit(e.x1_index, j) as usize;
            if e.dist < slot[b] {
                slot[b] = e.dist;
            }
        }
    }
    for j in 0..m {
        out[j] = mins[j][0] - mins[j][1];
    }
}

/// Detector result for one classification window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowOutput {
    /// `None` when the interferer constellation was given.
    pub classification: Option<ClassificationResult>,
    pub hypothesis: ConstellationKind,
    pub llrs: LlrFrame,
    /// Buffer entries computed over the window.
    pub entries_computed: usize,
}

/// Two-mode ML datapath: classification over the first tones of a window,
/// then single-hypothesis detection for the rest.
#[derive(Debug, Clone)]
pub struct JointDetector<'a> {
    ms: &'a Constellation,
    hypotheses: &'a [Constellation],
    sir_scale: f64,
    search: Search,
}

impl<'a> JointDetector<'a> {
    pub fn new(
        ms: &'a Constellation,
        hypotheses: &'a [Constellation],
        sir_scale: f64,
        search: Search,
    ) -> Self {
        JointDetector {
            ms,
            hypotheses,
            sir_scale,
            search,
        }
    }

    fn hypothesis(&self, kind: ConstellationKind) -> Result<&'a Constellation> {
        self.hypotheses
            .iter()
            .find(|c| c.kind() == kind)
            .ok_or(Error::UnknownName {
                what: "hypothesis",
                name: kind.to_string(),
            })
    }

    /// Classifies on `obs[..n_classify]` with all hypotheses, reuses those
    /// buffers for their LLRs, and evaluates only the chosen hypothesis on
    /// the remaining tones.
    pub fn detect_window(&self, obs: &[ToneObservation], n_classify: usize) -> Result<WindowOutput> {
        if n_classify == 0 || obs.len() < n_classify {
            return Err(Error::EmptyWindow);
        }
        let all: Vec<&Constellation> = self.hypotheses.iter().collect();
        let tables: Vec<DistanceTable> = obs[..n_classify]
            .iter()
            .map(|o| DistanceTable::build(o, self.ms, &all, self.sir_scale, self.search))
            .collect();
        let classification = joint_ml_classify(&tables)?;
        let chosen = classification.chosen;
        let mut llrs = LlrFrame::with_capacity(self.ms.bits_per_symbol(), obs.len());
        let mut scratch = vec![0.0; self.ms.bits_per_symbol()];
        let mut entries_computed = 0;
        for t in &tables {
            entries_computed += t.n_entries();
            llr_from_buffer(t.buffer(chosen).expect("chosen from table"), self.ms, &mut scratch);
            llrs.push_tone(&scratch);
        }
        let mi = self.hypothesis(chosen)?;
        entries_computed += self.detect_into(&obs[n_classify..], mi, &mut llrs);
        Ok(WindowOutput {
            classification: Some(classification),
            hypothesis: chosen,
            llrs,
            entries_computed,
        })
    }

    /// ML detection with a fixed interferer hypothesis on every tone.
    pub fn detect_known(&self, obs: &[ToneObservation], kind: ConstellationKind) -> Result<WindowOutput> {
        let mi = self.hypothesis(kind)?;
        let mut llrs = LlrFrame::with_capacity(self.ms.bits_per_symbol(), obs.len());
        let entries_computed = self.detect_into(obs, mi, &mut llrs);
        Ok(WindowOutput {
            classification: None,
            hypothesis: kind,
            llrs,
            entries_computed,
        })
    }

    fn detect_into(&self, obs: &[ToneObservation], mi: &Constellation, llrs: &mut LlrFrame) -> usize {
        let mut scratch = vec![0.0; self.ms.bits_per_symbol()];
        let mut buffer = Vec::with_capacity(self.ms.len());
        for o in obs {
            buffer.clear();
            fill_buffer(o, self.ms, mi, self.sir_scale, self.search, &mut buffer);
            llr_from_buffer(&buffer, self.ms, &mut scratch);
            llrs.push_tone(&scratch);
        }
        obs.len() * self.ms.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{gen_iid_block, random_symbol, transmit, ToneChannel};
    use crate::constellation::hypothesis_set;
    use crate::linalg::Vec2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn identity_obs(y: [f64; 2], noise_var: f64) -> ToneObservation {
        ToneObservation {
            y: Vec2::new(c(y[0], 0.0), c(y[1], 0.0)),
            chan: ToneChannel {
                h1: Vec2::new(c(1.0, 0.0), c(0.0, 0.0)),
                h2: Vec2::new(c(0.0, 0.0), c(1.0, 0.0)),
                tone_index: 0,
            },
            noise_var,
        }
    }

    #[test]
    fn distance_arithmetic() {
        let one = c(1.0, 0.0);
        assert_eq!(distance(&identity_obs([2.0, 0.0], 1.0), one, one, 1.0), 2.0);
        assert_eq!(distance(&identity_obs([2.0, 0.0], 0.5), one, one, 1.0), 4.0);
        assert_eq!(distance(&identity_obs([1.0, 1.0], 0.5), one, one, 1.0), 0.0);
    }

    #[test]
    fn absent_buffer_is_the_interference_free_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let hyps = hypothesis_set();
        let ms = Constellation::new(ConstellationKind::Qam16);
        let chan = gen_iid_block(1, &mut rng)[0];
        let obs = transmit(&chan, ms.point(3), hyps[2].point(5), 1.0, 0.2, &mut rng);
        let table = distance_tables(&obs, &ms, &hyps, 1.0);
        let absent = table.buffer(ConstellationKind::Absent).unwrap();
        for e in absent {
            assert_eq!(e.dist, distance(&obs, ms.point(e.x1_index), c(0.0, 0.0), 1.0));
            assert_eq!(e.x2_index, 0);
        }
    }

    #[test]
    fn sliced_matches_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let hyps = hypothesis_set();
        for ms_kind in [ConstellationKind::Qam4, ConstellationKind::Qam16, ConstellationKind::Qam64] {
            let ms = Constellation::new(ms_kind);
            for _ in 0..50 {
                let chan = gen_iid_block(1, &mut rng)[0];
                let mi = &hyps[rng.random_range(0..4)];
                let obs = transmit(
                    &chan,
                    random_symbol(&ms, &mut rng),
                    random_symbol(mi, &mut rng),
                    1.0,
                    0.05,
                    &mut rng,
                );
                let a = distance_tables(&obs, &ms, &hyps, 1.0);
                let b = distance_tables_exhaustive(&obs, &ms, &hyps, 1.0);
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn zero_distances_pick_the_smallest_alphabet() {
        let obs = identity_obs([0.0, 0.0], 1.0);
        let ms = Constellation::new(ConstellationKind::Qam4);
        let hyps = hypothesis_set();
        let mut table = distance_tables(&obs, &ms, &hyps, 1.0);
        for e in &mut table.entries {
            e.dist = 0.0;
        }
        let r = joint_ml_classify(&[table.clone(), table]).unwrap();
        assert_eq!(r.chosen, ConstellationKind::Absent);
        assert_eq!(r.metric(ConstellationKind::Qam4), Some(2.0 * 4f64.ln()));
    }

    #[test]
    fn empty_window_is_an_error() {
        assert!(matches!(joint_ml_classify(&[]), Err(Error::EmptyWindow)));
    }

    #[test]
    fn noiseless_bits_have_matching_llr_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let hyps = hypothesis_set();
        let ms = Constellation::new(ConstellationKind::Qam16);
        for _ in 0..20 {
            let chan = gen_iid_block(1, &mut rng)[0];
            let p = rng.random_range(0..ms.len());
            let obs = transmit(&chan, ms.point(p), hyps[1].point(2), 1.0, 1e-30, &mut rng);
            let table = distance_tables(&obs, &ms, &hyps, 1.0);
            let llr = max_log_llr(&table, ConstellationKind::Qam4, &ms).unwrap();
            for (j, l) in llr.iter().enumerate() {
                assert_eq!(*l > 0.0, ms.label_bit(p, j) == 1);
            }
        }
    }

    #[test]
    fn missing_hypothesis_is_rejected() {
        let obs = identity_obs([1.0, 0.0], 1.0);
        let ms = Constellation::new(ConstellationKind::Qam4);
        let hyps = hypothesis_set();
        let table = DistanceTable::build(&obs, &ms, &[&hyps[0]], 1.0, Search::Sliced);
        assert!(max_log_llr(&table, ConstellationKind::Qam16, &ms).is_err());
    }

    #[test]
    fn window_counts_and_reuse() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let hyps = hypothesis_set();
        let ms = Constellation::new(ConstellationKind::Qam4);
        let chans = gen_iid_block(20, &mut rng);
        let obs: Vec<_> = chans
            .iter()
            .map(|ch| transmit(ch, ms.point(1), hyps[2].point(7), 1.0, 0.1, &mut rng))
            .collect();
        let det = JointDetector::new(&ms, &hyps, 1.0, Search::Sliced);
        let out = det.detect_window(&obs, 12).unwrap();
        assert_eq!(out.entries_computed, 12 * 4 * 4 + 8 * 4);
        assert_eq!(out.llrs.n_tones(), 20);
        let known = det.detect_known(&obs, out.hypothesis).unwrap();
        assert_eq!(known.entries_computed, 20 * 4);
        assert_eq!(known.llrs, out.llrs);
        assert!(det.detect_window(&obs, 0).is_err());
    }
}
