//! Per-tone two-user channel generation and the received-signal model.
//!
//! Every generator takes an explicit random stream, so a channel block is a
//! pure function of its parameters and seed.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::linalg::{Mat2, Vec2};

/// Default OFDM subcarrier spacing in Hz.
pub const TONE_SPACING_HZ: f64 = 15_000.0;
/// Tones per physical resource block.
pub const TONES_PER_PRB: usize = 12;
/// OFDM symbols per subframe.
pub const SYMBOLS_PER_SUBFRAME: usize = 14;
/// Default number of pilots per resource block used by the covariance receiver.
pub const DEFAULT_PILOTS: usize = 12;

/// Effective (precoded) channels of both users on one tone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToneChannel {
    /// Desired user.
    pub h1: Vec2,
    /// Co-scheduled user.
    pub h2: Vec2,
    pub tone_index: usize,
}

impl ToneChannel {
    pub fn matrix(&self) -> Mat2 {
        Mat2::from_columns(self.h1, self.h2)
    }

    pub fn from_matrix(m: &Mat2, tone_index: usize) -> ToneChannel {
        ToneChannel {
            h1: m.column(0),
            h2: m.column(1),
            tone_index,
        }
    }
}

/// Received vector on one tone together with the channel and the white
/// noise level (`R = noise_var * I`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToneObservation {
    pub y: Vec2,
    pub chan: ToneChannel,
    pub noise_var: f64,
}

/// One circularly-symmetric complex Gaussian sample with unit variance.
#[inline]
pub fn cn01<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// A 2-vector of independent CN(0, 1) entries.
#[inline]
pub fn cn01_vec<R: Rng + ?Sized>(rng: &mut R) -> Vec2 {
    Vec2::new(cn01(rng), cn01(rng))
}

/// Independent Rayleigh channels on every tone.
pub fn gen_iid_block<R: Rng + ?Sized>(n_tones: usize, rng: &mut R) -> Vec<ToneChannel> {
    (0..n_tones)
        .map(|i| ToneChannel {
            h1: cn01_vec(rng),
            h2: cn01_vec(rng),
            tone_index: i,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileName {
    Flat,
    PedA,
    PedB,
}

impl ProfileName {
    pub fn name(self) -> &'static str {
        match self {
            ProfileName::Flat => "flat",
            ProfileName::PedA => "peda",
            ProfileName::PedB => "pedb",
        }
    }
}

impl fmt::Display for ProfileName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProfileName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "flat" => Ok(ProfileName::Flat),
            "peda" => Ok(ProfileName::PedA),
            "pedb" => Ok(ProfileName::PedB),
            other => Err(Error::UnknownName {
                what: "channel profile",
                name: other.to_string(),
            }),
        }
    }
}

/// Tapped-delay-line power delay profile.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipathProfile {
    pub name: ProfileName,
    /// Tap delays in seconds, ascending.
    pub delays: Vec<f64>,
    /// Linear tap powers summing to one.
    pub powers: Vec<f64>,
}

impl MultipathProfile {
    /// Builds a profile from delays in nanoseconds and relative powers in dB,
    /// normalizing to unit total power.
    pub fn from_db(name: ProfileName, delays_ns: &[f64], powers_db: &[f64]) -> Result<Self> {
        if delays_ns.len() != powers_db.len() || delays_ns.is_empty() {
            return Err(Error::Profile(
                "delays and powers must be non-empty and of equal length".into(),
            ));
        }
        if delays_ns[0] < 0.0 || delays_ns.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Profile("delays must be non-negative and ascending".into()));
        }
        let linear: Vec<f64> = powers_db.iter().map(|db| 10f64.powf(db / 10.0)).collect();
        let total: f64 = linear.iter().sum();
        Ok(MultipathProfile {
            name,
            delays: delays_ns.iter().map(|d| d * 1e-9).collect(),
            powers: linear.iter().map(|p| p / total).collect(),
        })
    }

    pub fn flat() -> Self {
        MultipathProfile {
            name: ProfileName::Flat,
            delays: vec![0.0],
            powers: vec![1.0],
        }
    }

    /// ITU pedestrian A.
    pub fn ped_a() -> Self {
        Self::from_db(
            ProfileName::PedA,
            &[0.0, 110.0, 190.0, 410.0],
            &[0.0, -9.7, -19.2, -22.8],
        )
        .expect("static profile")
    }

    /// ITU pedestrian B.
    pub fn ped_b() -> Self {
        Self::from_db(
            ProfileName::PedB,
            &[0.0, 200.0, 800.0, 1200.0, 2300.0, 3700.0],
            &[0.0, -0.9, -4.9, -8.0, -7.8, -23.9],
        )
        .expect("static profile")
    }

    pub fn by_name(name: ProfileName) -> Self {
        match name {
            ProfileName::Flat => Self::flat(),
            ProfileName::PedA => Self::ped_a(),
            ProfileName::PedB => Self::ped_b(),
        }
    }

    /// Frequency correlation `E[H(f) H(f + df)*]` of the profile.
    pub fn frequency_correlation(&self, df: f64) -> Complex64 {
        self.delays
            .iter()
            .zip(&self.powers)
            .map(|(&tau, &p)| Complex64::from_polar(p, 2.0 * PI * df * tau))
            .sum()
    }
}

/// Tap gains for the four (receive antenna, user) pairs of one block.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipathTaps {
    delays: Vec<f64>,
    /// `gains[user][antenna][tap]`.
    gains: [[Vec<Complex64>; 2]; 2],
}

impl MultipathTaps {
    pub fn draw<R: Rng + ?Sized>(profile: &MultipathProfile, rng: &mut R) -> MultipathTaps {
        let mut draw_one = || -> Vec<Complex64> {
            profile
                .powers
                .iter()
                .map(|p| cn01(rng) * p.sqrt())
                .collect()
        };
        let gains = [[draw_one(), draw_one()], [draw_one(), draw_one()]];
        MultipathTaps {
            delays: profile.delays.clone(),
            gains,
        }
    }

    pub fn gains(&self, user: usize, antenna: usize) -> &[Complex64] {
        &self.gains[user][antenna]
    }

    fn response(&self, user: usize, antenna: usize, freq: f64) -> Complex64 {
        self.gains[user][antenna]
            .iter()
            .zip(&self.delays)
            .map(|(&a, &tau)| a * Complex64::from_polar(1.0, -2.0 * PI * freq * tau))
            .sum()
    }

    /// Channel on tone `k` at frequency `k * tone_spacing`.
    pub fn tone(&self, k: usize, tone_spacing: f64) -> ToneChannel {
        let f = k as f64 * tone_spacing;
        ToneChannel {
            h1: Vec2::new(self.response(0, 0, f), self.response(0, 1, f)),
            h2: Vec2::new(self.response(1, 0, f), self.response(1, 1, f)),
            tone_index: k,
        }
    }

    pub fn tones(&self, n_tones: usize, tone_spacing: f64) -> Vec<ToneChannel> {
        (0..n_tones).map(|k| self.tone(k, tone_spacing)).collect()
    }
}

/// Block-fading multipath channel over `n_tones` consecutive tones.
pub fn gen_multipath<R: Rng + ?Sized>(
    profile: &MultipathProfile,
    n_tones: usize,
    tone_spacing: f64,
    rng: &mut R,
) -> Vec<ToneChannel> {
    MultipathTaps::draw(profile, rng).tones(n_tones, tone_spacing)
}

/// Transmit/receive antenna correlation coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CorrelationSpec {
    rho_t: f64,
    rho_r: f64,
}

impl CorrelationSpec {
    pub fn new(rho_t: f64, rho_r: f64) -> Result<Self> {
        for rho in [rho_t, rho_r] {
            if !(0.0..1.0).contains(&rho) {
                return Err(Error::Correlation(rho));
            }
        }
        Ok(CorrelationSpec { rho_t, rho_r })
    }

    /// Accepts a coefficient of exactly 1 (rank-deficient square root).
    pub fn new_allow_unit(rho_t: f64, rho_r: f64) -> Result<Self> {
        for rho in [rho_t, rho_r] {
            if !(0.0..=1.0).contains(&rho) {
                return Err(Error::Correlation(rho));
            }
        }
        Ok(CorrelationSpec { rho_t, rho_r })
    }

    pub fn rho_t(&self) -> f64 {
        self.rho_t
    }

    pub fn rho_r(&self) -> f64 {
        self.rho_r
    }

    pub fn is_identity(&self) -> bool {
        self.rho_t == 0.0 && self.rho_r == 0.0
    }
}

/// Symmetric square root of `[[1, rho], [rho, 1]]`.
pub fn correlation_sqrt(rho: f64) -> Mat2 {
    let p = (1.0 + rho).sqrt();
    let m = (1.0 - rho).sqrt();
    let a = 0.5 * (p + m);
    let b = 0.5 * (p - m);
    Mat2::from_real([[a, b], [b, a]])
}

/// `R_t^{1/2} H R_r^{1/2}` with `H = [h1 h2]`.
pub fn apply_correlation(chan: &ToneChannel, spec: &CorrelationSpec) -> ToneChannel {
    if spec.is_identity() {
        return *chan;
    }
    let m = correlation_sqrt(spec.rho_t) * chan.matrix() * correlation_sqrt(spec.rho_r);
    ToneChannel::from_matrix(&m, chan.tone_index)
}

/// Noise-free superposition plus a caller-supplied unit-variance noise
/// vector scaled to `noise_var`.
#[inline]
pub fn receive(
    chan: &ToneChannel,
    x1: Complex64,
    x2: Complex64,
    sir_scale: f64,
    unit_noise: &Vec2,
    noise_var: f64,
) -> ToneObservation {
    let y = chan.h1.scale(x1) + chan.h2.scale(x2 * sir_scale) + unit_noise.scale_re(noise_var.sqrt());
    ToneObservation {
        y,
        chan: *chan,
        noise_var,
    }
}

/// `y = h1 x1 + sir_scale h2 x2 + n` with `n ~ CN(0, noise_var I)`.
pub fn transmit<R: Rng + ?Sized>(
    chan: &ToneChannel,
    x1: Complex64,
    x2: Complex64,
    sir_scale: f64,
    noise_var: f64,
    rng: &mut R,
) -> ToneObservation {
    let n = cn01_vec(rng);
    receive(chan, x1, x2, sir_scale, &n, noise_var)
}

/// Uniform random point of `c`.
#[inline]
pub fn random_symbol<R: Rng + ?Sized>(c: &Constellation, rng: &mut R) -> Complex64 {
    c.point(rng.random_range(0..c.len()))
}

/// Known pilot symbols sent by the desired user over the block channel while
/// the interferer transmits data. Pilot `p` occupies tone `p % block.len()`.
pub fn gen_pilots<R: Rng + ?Sized>(
    n_pilots: usize,
    pilot_alphabet: &Constellation,
    interferer: &Constellation,
    block: &[ToneChannel],
    sir_scale: f64,
    noise_var: f64,
    rng: &mut R,
) -> Vec<(Complex64, ToneObservation)> {
    (0..n_pilots)
        .map(|p| {
            let chan = &block[p % block.len()];
            let x1 = random_symbol(pilot_alphabet, rng);
            let x2 = random_symbol(interferer, rng);
            (x1, transmit(chan, x1, x2, sir_scale, noise_var, rng))
        })
        .collect()
}
