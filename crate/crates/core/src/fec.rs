//! Rate-1/2, constraint-length 7 convolutional code (generators 133, 171
//! octal) with tail-biting termination and a soft-decision circular Viterbi
//! decoder.
//!
//! The encoder register holds the current input in bit 6 and the previous six
//! inputs below it, most recent first. Tail-biting starts the register in the
//! state it will end in, so no tail bits are sent.

use crate::error::{Error, Result};

pub const CONSTRAINT_LENGTH: usize = 7;
pub const GENERATORS: [u8; 2] = [0o133, 0o171];
pub const DEFAULT_BLOCK_BITS: usize = 6144;

const MEMORY: usize = CONSTRAINT_LENGTH - 1;
const STATES: usize = 1 << MEMORY;
/// Trellis steps decoded on each side of the block before committing.
const WRAP_DEPTH: usize = 96;
const LLR_CLAMP: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeConfig {
    pub block_bits: usize,
}

impl Default for CodeConfig {
    fn default() -> Self {
        CodeConfig {
            block_bits: DEFAULT_BLOCK_BITS,
        }
    }
}

#[inline]
fn parity(v: u8) -> u8 {
    (v.count_ones() & 1) as u8
}

/// Output pair for every 7-bit register value.
fn output_table() -> [[u8; 2]; 1 << CONSTRAINT_LENGTH] {
    let mut table = [[0u8; 2]; 1 << CONSTRAINT_LENGTH];
    for (reg, out) in table.iter_mut().enumerate() {
        *out = [parity(reg as u8 & GENERATORS[0]), parity(reg as u8 & GENERATORS[1])];
    }
    table
}

#[derive(Debug, Clone)]
pub struct ConvolutionalCode {
    config: CodeConfig,
    outputs: [[u8; 2]; 1 << CONSTRAINT_LENGTH],
}

impl ConvolutionalCode {
    pub fn new(config: CodeConfig) -> Self {
        ConvolutionalCode {
            config,
            outputs: output_table(),
        }
    }

    pub fn block_bits(&self) -> usize {
        self.config.block_bits
    }

    pub fn coded_bits(&self) -> usize {
        2 * self.config.block_bits
    }

    pub fn encode(&self, bits: &[u8]) -> Result<Vec<u8>> {
        let n = self.config.block_bits;
        if bits.len() != n {
            return Err(Error::Length {
                what: "information block",
                expected: n,
                actual: bits.len(),
            });
        }
        let mut state = 0usize;
        for k in 0..MEMORY.min(n) {
            state |= ((bits[n - 1 - k] & 1) as usize) << (MEMORY - 1 - k);
        }
        let mut out = Vec::with_capacity(2 * n);
        for &b in bits {
            let reg = (((b & 1) as usize) << MEMORY) | state;
            out.extend_from_slice(&self.outputs[reg]);
            state = reg >> 1;
        }
        Ok(out)
    }

    /// Soft-decision decoding; positive LLRs favour coded bit 1.
    pub fn decode(&self, llrs: &[f64]) -> Result<Vec<u8>> {
        let n = self.config.block_bits;
        if llrs.len() != 2 * n {
            return Err(Error::Length {
                what: "coded LLR block",
                expected: 2 * n,
                actual: llrs.len(),
            });
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let clamp = |l: f64| {
            if l.is_nan() {
                0.0
            } else {
                l.clamp(-LLR_CLAMP, LLR_CLAMP)
            }
        };
        // circular decoding: [last WRAP_DEPTH steps][block][first WRAP_DEPTH steps]
        let steps = n + 2 * WRAP_DEPTH;
        let index = |t: usize| (t + n * (WRAP_DEPTH / n + 1) - WRAP_DEPTH) % n;

        let mut metric = [0.0f64; STATES];
        let mut next = [0.0f64; STATES];
        let mut decisions = vec![0u64; steps];
        for (t, decision) in decisions.iter_mut().enumerate() {
            let i = index(t);
            let l0 = clamp(llrs[2 * i]);
            let l1 = clamp(llrs[2 * i + 1]);
            let mut bits = 0u64;
            let mut best = f64::NEG_INFINITY;
            for (s_next, slot) in next.iter_mut().enumerate() {
                let input = s_next >> (MEMORY - 1);
                let base = (s_next & (STATES / 2 - 1)) << 1;
                let mut pick = (0u64, f64::NEG_INFINITY);
                for low in 0..2 {
                    let s = base | low;
                    let reg = (input << MEMORY) | s;
                    let [c0, c1] = self.outputs[reg];
                    let branch = if c0 == 1 { l0 } else { -l0 } + if c1 == 1 { l1 } else { -l1 };
                    let m = metric[s] + branch;
                    if m > pick.1 {
                        pick = (low as u64, m);
                    }
                }
                *slot = pick.1;
                bits |= pick.0 << s_next;
                best = best.max(pick.1);
            }
            *decision = bits;
            for (m, &v) in metric.iter_mut().zip(next.iter()) {
                *m = v - best;
            }
        }

        let mut state = (0..STATES)
            .max_by(|&a, &b| metric[a].total_cmp(&metric[b]))
            .unwrap_or(0);
        let mut decoded = vec![0u8; n];
        for t in (0..steps).rev() {
            let input = (state >> (MEMORY - 1)) as u8;
            if (WRAP_DEPTH..WRAP_DEPTH + n).contains(&t) {
                decoded[t - WRAP_DEPTH] = input;
            }
            let low = ((decisions[t] >> state) & 1) as usize;
            state = ((state & (STATES / 2 - 1)) << 1) | low;
        }
        Ok(decoded)
    }
}
