//! Seeded, parallel Monte-Carlo sweeps.
//!
//! A trial draws its channel, symbols and unit-variance noise once and reuses
//! them at every SNR point and for every receiver, so curves are compared on
//! common random numbers. Trials run on the current rayon pool and reduce
//! integer counters, which makes results independent of the thread count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ChannelModel, ExperimentConfig};
use super::frame::PrbLayout;
use super::stats::ci_halfwidth;
use super::{CurveRecord, Metric};
use crate::channel::{
    apply_correlation, cn01_vec, gen_iid_block, gen_multipath, receive, CorrelationSpec,
    MultipathProfile, ToneChannel, ToneObservation, TONES_PER_PRB,
};
use crate::constellation::{hypothesis_set, Constellation, ConstellationKind};
use crate::detect::{
    combine, cov_weights, distance_tables, interference_covariance, irc_llr, irc_weights,
    joint_ml_classify, nulling_classify, JointDetector, ReceiverKind, Search,
};
use crate::error::{Error, Result};
use crate::fec::{CodeConfig, ConvolutionalCode};
use crate::linalg::Vec2;

const TAG_CLASSIFY: u64 = 1;
const TAG_BER: u64 = 2;
const TAG_BLER: u64 = 3;

/// Independent random stream for one trial of one sweep combination.
pub fn trial_rng(seed: u64, tag: u64, combo: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&tag.to_le_bytes());
    key[16..24].copy_from_slice(&combo.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial);
    rng
}

fn combo_key(ms: ConstellationKind, mi: ConstellationKind, n: usize) -> u64 {
    ms.index() as u64 | (mi.index() as u64) << 8 | (n as u64) << 16
}

fn config_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        message: message.into(),
    }
}

fn noise_vars(cfg: &ExperimentConfig) -> Vec<f64> {
    cfg.snr_db.iter().map(|s| 10f64.powf(-s / 10.0)).collect()
}

/// Channels for `n_elements` resource elements, correlated as configured.
/// Channels repeat every `period` elements: elements on the same subcarrier
/// in different OFDM symbols see the same block-fading channel.
fn draw_channels(
    cfg: &ExperimentConfig,
    corr: &CorrelationSpec,
    n_elements: usize,
    period: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<ToneChannel> {
    let n_tones = period.min(n_elements).max(1);
    let base = match cfg.channel {
        ChannelModel::Iid => gen_iid_block(n_tones, rng),
        ChannelModel::Multipath(name) => {
            gen_multipath(&MultipathProfile::by_name(name), n_tones, cfg.tone_spacing_hz, rng)
        }
    };
    let raw: Vec<ToneChannel> = (0..n_elements).map(|i| base[i % n_tones]).collect();
    if corr.is_identity() {
        raw
    } else {
        raw.iter().map(|c| apply_correlation(c, corr)).collect()
    }
}

fn add_counts(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// Probability of correct interferer classification versus SNR for every
/// classifying receiver and every `(ms, mi, n)` combination.
pub fn run_classification_sweep(cfg: &ExperimentConfig) -> Result<Vec<CurveRecord>> {
    cfg.validate()?;
    if let Some(r) = cfg.receivers.iter().find(|r| !r.classifies()) {
        return Err(config_err(
            "receivers",
            format!("{r} does not classify the interferer; use null-ml or joint-ml"),
        ));
    }
    let hyps = hypothesis_set();
    let corr = cfg.correlation();
    let sir_scale = cfg.sir_scale();
    let sigma2 = noise_vars(cfg);
    let digest = cfg.digest();
    let n_rx = cfg.receivers.len();
    let mut records = Vec::new();

    for &ms_kind in &cfg.ms {
        let ms = Constellation::new(ms_kind);
        for &mi_kind in &cfg.mi {
            let mi = Constellation::new(mi_kind);
            for &n in &cfg.n {
                let key = combo_key(ms_kind, mi_kind, n);
                let zeros = vec![0u64; sigma2.len() * n_rx];
                let counts = (0..cfg.trials as u64)
                    .into_par_iter()
                    .map(|trial| {
                        let mut rng = trial_rng(cfg.seed, TAG_CLASSIFY, key, trial);
                        let chans = draw_channels(cfg, &corr, n, TONES_PER_PRB, &mut rng);
                        let x1: Vec<Complex64> =
                            (0..n).map(|_| ms.point(rng.random_range(0..ms.len()))).collect();
                        let x2: Vec<Complex64> =
                            (0..n).map(|_| mi.point(rng.random_range(0..mi.len()))).collect();
                        let noise: Vec<Vec2> = (0..n).map(|_| cn01_vec(&mut rng)).collect();
                        let mut correct = vec![0u64; sigma2.len() * n_rx];
                        for (si, &var) in sigma2.iter().enumerate() {
                            let obs: Vec<ToneObservation> = (0..n)
                                .map(|i| receive(&chans[i], x1[i], x2[i], sir_scale, &noise[i], var))
                                .collect();
                            for (ri, rx) in cfg.receivers.iter().enumerate() {
                                let chosen = match rx {
                                    ReceiverKind::NullMl => nulling_classify(&obs, &hyps, sir_scale)?.chosen,
                                    _ => {
                                        let tables: Vec<_> = obs
                                            .iter()
                                            .map(|o| distance_tables(o, &ms, &hyps, sir_scale))
                                            .collect();
                                        joint_ml_classify(&tables)?.chosen
                                    }
                                };
                                correct[si * n_rx + ri] += u64::from(chosen == mi_kind);
                            }
                        }
                        Ok(correct)
                    })
                    .try_reduce(|| zeros.clone(), |a, b| Ok(add_counts(a, b)))?;

                for (si, &snr_db) in cfg.snr_db.iter().enumerate() {
                    for (ri, &receiver) in cfg.receivers.iter().enumerate() {
                        let p = counts[si * n_rx + ri] as f64 / cfg.trials as f64;
                        records.push(CurveRecord {
                            snr_db,
                            receiver,
                            ms: ms_kind,
                            mi_true: mi_kind,
                            n,
                            metric: Metric::PCorrectClassification,
                            value: p,
                            ci_halfwidth: ci_halfwidth(p, cfg.trials as u64),
                            n_trials: cfg.trials as u64,
                            config_digest: digest.clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(records)
}

/// Everything a link trial needs that does not change between trials.
struct LinkSetup<'a> {
    cfg: &'a ExperimentConfig,
    layout: PrbLayout,
    hyps: [Constellation; 4],
    pilot_alphabet: Constellation,
    corr: CorrelationSpec,
    sir_scale: f64,
    sigma2: Vec<f64>,
    code: Option<ConvolutionalCode>,
}

impl<'a> LinkSetup<'a> {
    fn new(cfg: &'a ExperimentConfig, coded: bool) -> Result<Self> {
        cfg.validate()?;
        let layout = PrbLayout::subframe();
        if cfg.pilots > layout.pilots.len() {
            return Err(config_err(
                "pilots",
                format!("at most {} pilot elements per resource block", layout.pilots.len()),
            ));
        }
        if let Some(&n) = cfg.n.iter().find(|&&n| n > layout.data.len()) {
            return Err(config_err(
                "n",
                format!("window of {n} exceeds the {} data elements of a resource block", layout.data.len()),
            ));
        }
        Ok(LinkSetup {
            cfg,
            layout,
            hyps: hypothesis_set(),
            pilot_alphabet: Constellation::new(ConstellationKind::Qam4),
            corr: cfg.correlation(),
            sir_scale: cfg.sir_scale(),
            sigma2: noise_vars(cfg),
            code: coded.then(|| ConvolutionalCode::new(CodeConfig { block_bits: cfg.block_bits })),
        })
    }

    /// LLRs of one resource block for one receiver, in data-element order.
    #[allow(clippy::too_many_arguments)]
    fn detect_prb(
        &self,
        rx: ReceiverKind,
        ms: &Constellation,
        mi_true: ConstellationKind,
        n: usize,
        obs: &[ToneObservation],
        pilots: &[(Complex64, ToneObservation)],
        out: &mut Vec<f64>,
    ) -> Result<()> {
        let jd = JointDetector::new(ms, &self.hyps, self.sir_scale, Search::Sliced);
        match rx {
            ReceiverKind::Cov => {
                let r_uu = interference_covariance(pilots)?;
                for o in obs {
                    let w = cov_weights(&r_uu, &o.chan.h1)?;
                    out.extend(irc_llr(combine(&w, &o.y), &w, ms));
                }
            }
            ReceiverKind::Irc => {
                for o in obs {
                    let w = irc_weights(&o.chan, self.sir_scale, o.noise_var);
                    out.extend(irc_llr(combine(&w, &o.y), &w, ms));
                }
            }
            ReceiverKind::NullMl => {
                let chosen = nulling_classify(&obs[..n], &self.hyps, self.sir_scale)?.chosen;
                out.extend(jd.detect_known(obs, chosen)?.llrs.into_values());
            }
            ReceiverKind::JointMl => out.extend(jd.detect_window(obs, n)?.llrs.into_values()),
            ReceiverKind::GenieMl => out.extend(jd.detect_known(obs, mi_true)?.llrs.into_values()),
        }
        Ok(())
    }

    /// Error counts indexed `[snr][receiver]`: bit errors when uncoded,
    /// block errors when coded.
    fn trial(
        &self,
        ms: &Constellation,
        mi: &Constellation,
        n: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<u64>> {
        let cfg = self.cfg;
        let m = ms.bits_per_symbol();
        let data_per_prb = self.layout.data.len();
        let n_pilots = cfg.pilots;

        let info: Vec<u8> = match &self.code {
            Some(code) => (0..code.block_bits()).map(|_| rng.random_range(0..2u8)).collect(),
            None => Vec::new(),
        };
        let payload_bits = match &self.code {
            Some(code) => code.coded_bits(),
            None => data_per_prb * m,
        };
        let n_prb = payload_bits.div_ceil(data_per_prb * m);
        let mut tx_bits = match &self.code {
            Some(code) => code.encode(&info)?,
            None => Vec::with_capacity(n_prb * data_per_prb * m),
        };
        while tx_bits.len() < n_prb * data_per_prb * m {
            tx_bits.push(rng.random_range(0..2u8));
        }
        let x1 = ms.modulate(&tx_bits)?;

        let chans = draw_channels(cfg, &self.corr, n_prb * TONES_PER_PRB, n_prb * TONES_PER_PRB, rng);
        let x2: Vec<Complex64> = (0..n_prb * data_per_prb)
            .map(|_| mi.point(rng.random_range(0..mi.len())))
            .collect();
        let noise: Vec<Vec2> = (0..n_prb * data_per_prb).map(|_| cn01_vec(rng)).collect();
        let pilot_x1: Vec<Complex64> = (0..n_prb * n_pilots)
            .map(|_| self.pilot_alphabet.point(rng.random_range(0..self.pilot_alphabet.len())))
            .collect();
        let pilot_x2: Vec<Complex64> = (0..n_prb * n_pilots)
            .map(|_| mi.point(rng.random_range(0..mi.len())))
            .collect();
        let pilot_noise: Vec<Vec2> = (0..n_prb * n_pilots).map(|_| cn01_vec(rng)).collect();

        let n_rx = cfg.receivers.len();
        let mut errors = vec![0u64; self.sigma2.len() * n_rx];
        let mut obs = Vec::with_capacity(data_per_prb);
        let mut pilots = Vec::with_capacity(n_pilots);
        let mut llrs: Vec<Vec<f64>> = vec![Vec::with_capacity(tx_bits.len()); n_rx];
        for (si, &var) in self.sigma2.iter().enumerate() {
            llrs.iter_mut().for_each(Vec::clear);
            for prb in 0..n_prb {
                let tone = |t: usize| &chans[prb * TONES_PER_PRB + t];
                obs.clear();
                for (i, re) in self.layout.data.iter().enumerate() {
                    let j = prb * data_per_prb + i;
                    obs.push(receive(tone(re.tone), x1[j], x2[j], self.sir_scale, &noise[j], var));
                }
                pilots.clear();
                for (p, re) in self.layout.pilots[..n_pilots].iter().enumerate() {
                    let j = prb * n_pilots + p;
                    let o = receive(tone(re.tone), pilot_x1[j], pilot_x2[j], self.sir_scale, &pilot_noise[j], var);
                    pilots.push((pilot_x1[j], o));
                }
                for (ri, &rx) in cfg.receivers.iter().enumerate() {
                    self.detect_prb(rx, ms, mi.kind(), n, &obs, &pilots, &mut llrs[ri])?;
                }
            }
            for (ri, l) in llrs.iter().enumerate() {
                errors[si * n_rx + ri] = match &self.code {
                    Some(code) => {
                        let decoded = code.decode(&l[..code.coded_bits()])?;
                        u64::from(decoded != info)
                    }
                    None => l
                        .iter()
                        .zip(&tx_bits)
                        .filter(|&(&v, &b)| u8::from(v > 0.0) != b)
                        .count() as u64,
                };
            }
        }
        Ok(errors)
    }

    fn run(&self, tag: u64, metric: Metric) -> Result<Vec<CurveRecord>> {
        let cfg = self.cfg;
        let digest = cfg.digest();
        let n_rx = cfg.receivers.len();
        let mut records = Vec::new();
        for &ms_kind in &cfg.ms {
            let ms = Constellation::new(ms_kind);
            let units_per_trial = match &self.code {
                Some(_) => 1,
                None => (self.layout.data.len() * ms.bits_per_symbol()) as u64,
            };
            for &mi_kind in &cfg.mi {
                let mi = Constellation::new(mi_kind);
                // every window size sees the same draws
                let key = combo_key(ms_kind, mi_kind, 0);
                for &n in &cfg.n {
                    let zeros = vec![0u64; self.sigma2.len() * n_rx];
                    let errors = (0..cfg.trials as u64)
                        .into_par_iter()
                        .map(|trial| {
                            let mut rng = trial_rng(cfg.seed, tag, key, trial);
                            self.trial(&ms, &mi, n, &mut rng)
                        })
                        .try_reduce(|| zeros.clone(), |a, b| Ok(add_counts(a, b)))?;
                    let total = units_per_trial * cfg.trials as u64;
                    for (si, &snr_db) in cfg.snr_db.iter().enumerate() {
                        for (ri, &receiver) in cfg.receivers.iter().enumerate() {
                            let p = errors[si * n_rx + ri] as f64 / total as f64;
                            records.push(CurveRecord {
                                snr_db,
                                receiver,
                                ms: ms_kind,
                                mi_true: mi_kind,
                                n,
                                metric,
                                value: p,
                                ci_halfwidth: ci_halfwidth(p, total),
                                n_trials: total,
                                config_digest: digest.clone(),
                            });
                        }
                    }
                }
            }
        }
        Ok(records)
    }
}

/// Uncoded bit error rate over one resource block per trial.
pub fn run_ber_sweep(cfg: &ExperimentConfig) -> Result<Vec<CurveRecord>> {
    LinkSetup::new(cfg, false)?.run(TAG_BER, Metric::Ber)
}

/// Coded block error rate; one code block per trial, mapped onto as many
/// resource blocks as it needs, each classified independently.
pub fn run_bler_sweep(cfg: &ExperimentConfig) -> Result<Vec<CurveRecord>> {
    if !cfg.fec {
        return Err(config_err("fec", "block error rate sweeps need fec = on"));
    }
    LinkSetup::new(cfg, true)?.run(TAG_BLER, Metric::Bler)
}
