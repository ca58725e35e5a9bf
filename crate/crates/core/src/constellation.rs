//! Gray-labeled square QAM alphabets and the interferer hypothesis set.
//!
//! Points are stored in label order: the point at index `p` carries the label
//! whose binary expansion (MSB first) is `p`. The first half of the label bits
//! select the in-phase level and the second half the quadrature level, each
//! through a binary-reflected Gray code, so neighbours on the grid differ in a
//! single bit.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the alphabets an interferer may use, including absence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConstellationKind {
    #[serde(rename = "off")]
    Absent,
    #[serde(rename = "qam4")]
    Qam4,
    #[serde(rename = "qam16")]
    Qam16,
    #[serde(rename = "qam64")]
    Qam64,
}

impl ConstellationKind {
    /// Hypotheses in tie-break order (smallest alphabet first).
    pub const ALL: [ConstellationKind; 4] = [
        ConstellationKind::Absent,
        ConstellationKind::Qam4,
        ConstellationKind::Qam16,
        ConstellationKind::Qam64,
    ];

    pub fn bits_per_symbol(self) -> usize {
        match self {
            ConstellationKind::Absent => 0,
            ConstellationKind::Qam4 => 2,
            ConstellationKind::Qam16 => 4,
            ConstellationKind::Qam64 => 6,
        }
    }

    /// Alphabet size; the absent interferer counts as a one-point alphabet.
    pub fn size(self) -> usize {
        1 << self.bits_per_symbol()
    }

    /// Position in [`ConstellationKind::ALL`].
    pub fn index(self) -> usize {
        match self {
            ConstellationKind::Absent => 0,
            ConstellationKind::Qam4 => 1,
            ConstellationKind::Qam16 => 2,
            ConstellationKind::Qam64 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ConstellationKind::Absent => "off",
            ConstellationKind::Qam4 => "qam4",
            ConstellationKind::Qam16 => "qam16",
            ConstellationKind::Qam64 => "qam64",
        }
    }
}

impl fmt::Display for ConstellationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstellationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "off" => Ok(ConstellationKind::Absent),
            "qam4" => Ok(ConstellationKind::Qam4),
            "qam16" => Ok(ConstellationKind::Qam16),
            "qam64" => Ok(ConstellationKind::Qam64),
            other => Err(Error::UnknownName {
                what: "constellation",
                name: other.to_string(),
            }),
        }
    }
}

/// Sign attached to a label bit: bit value 1 maps to `Plus`, 0 to `Minus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BitSign {
    Plus,
    Minus,
}

impl BitSign {
    pub fn of_bit(bit: u8) -> BitSign {
        if bit != 0 {
            BitSign::Plus
        } else {
            BitSign::Minus
        }
    }
}

/// The label-bit partition of an alphabet for one bit position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitPartition {
    pub bit_index: usize,
    pub sign: BitSign,
    /// Indices of the points whose label bit matches `sign`.
    pub subset: Vec<usize>,
}

/// A unit-average-energy Gray-labeled QAM alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    kind: ConstellationKind,
    points: Vec<Complex64>,
    /// Number of amplitude levels per axis.
    levels: usize,
    /// Scale mapping integer PAM amplitudes to unit average energy.
    scale: f64,
}

fn gray(k: usize) -> usize {
    k ^ (k >> 1)
}

fn inverse_gray(mut g: usize) -> usize {
    let mut k = g;
    while g > 1 {
        g >>= 1;
        k ^= g;
    }
    k
}

impl Constellation {
    pub fn new(kind: ConstellationKind) -> Constellation {
        let bits = kind.bits_per_symbol();
        if bits == 0 {
            return Constellation {
                kind,
                points: vec![Complex64::new(0.0, 0.0)],
                levels: 1,
                scale: 0.0,
            };
        }
        let half = bits / 2;
        let levels = 1usize << half;
        // mean |x|^2 of a square M-QAM on odd integers is 2(M-1)/3
        let scale = 1.0 / (2.0 * (kind.size() as f64 - 1.0) / 3.0).sqrt();
        let amplitude = |g: usize| (2 * inverse_gray(g)) as f64 - (levels - 1) as f64;
        let mask = levels - 1;
        let points = (0..kind.size())
            .map(|label| {
                let i = amplitude(label >> half);
                let q = amplitude(label & mask);
                Complex64::new(i * scale, q * scale)
            })
            .collect();
        Constellation {
            kind,
            points,
            levels,
            scale,
        }
    }

    pub fn kind(&self) -> ConstellationKind {
        self.kind
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, index: usize) -> Complex64 {
        self.points[index]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.kind.bits_per_symbol()
    }

    /// Label bit `j` (0 = MSB) of the point at `index`.
    #[inline]
    pub fn label_bit(&self, index: usize, j: usize) -> u8 {
        ((index >> (self.bits_per_symbol() - 1 - j)) & 1) as u8
    }

    pub fn label(&self, index: usize) -> Vec<u8> {
        (0..self.bits_per_symbol())
            .map(|j| self.label_bit(index, j))
            .collect()
    }

    pub fn bit_partition(&self, j: usize, sign: BitSign) -> Result<BitPartition> {
        if self.kind == ConstellationKind::Absent || j >= self.bits_per_symbol() {
            return Err(Error::BitIndex {
                index: j,
                bits_per_symbol: self.bits_per_symbol(),
            });
        }
        let subset = (0..self.len())
            .filter(|&p| BitSign::of_bit(self.label_bit(p, j)) == sign)
            .collect();
        Ok(BitPartition {
            bit_index: j,
            sign,
            subset,
        })
    }

    /// Maps consecutive groups of `bits_per_symbol` bits (MSB first) to points.
    pub fn modulate(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        let m = self.bits_per_symbol();
        if m == 0 {
            return if bits.is_empty() {
                Ok(Vec::new())
            } else {
                Err(Error::Length {
                    what: "bits for an absent constellation",
                    expected: 0,
                    actual: bits.len(),
                })
            };
        }
        if bits.len() % m != 0 {
            return Err(Error::Length {
                what: "bit vector (multiple of bits per symbol)",
                expected: bits.len() / m * m + m,
                actual: bits.len(),
            });
        }
        Ok(bits
            .chunks_exact(m)
            .map(|chunk| {
                let label = chunk.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
                self.points[label]
            })
            .collect())
    }

    /// Hard decision: label bits of the nearest point to each symbol.
    pub fn demap(&self, symbols: &[Complex64]) -> Vec<u8> {
        let mut bits = Vec::with_capacity(symbols.len() * self.bits_per_symbol());
        for &s in symbols {
            let p = self.slice(s);
            bits.extend((0..self.bits_per_symbol()).map(|j| self.label_bit(p, j)));
        }
        bits
    }

    /// Index of the point nearest to `z` in Euclidean distance.
    #[inline]
    pub fn slice(&self, z: Complex64) -> usize {
        if self.levels == 1 {
            return 0;
        }
        let half = self.bits_per_symbol() / 2;
        let i = self.slice_axis(z.re);
        let q = self.slice_axis(z.im);
        (gray(i) << half) | gray(q)
    }

    #[inline]
    fn slice_axis(&self, v: f64) -> usize {
        let top = (self.levels - 1) as f64;
        let k = ((v / self.scale + top) * 0.5).round();
        k.clamp(0.0, top) as usize
    }
}

/// The four interferer hypotheses in tie-break order.
pub fn hypothesis_set() -> [Constellation; 4] {
    ConstellationKind::ALL.map(Constellation::new)
}
