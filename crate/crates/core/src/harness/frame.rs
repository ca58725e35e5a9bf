//! Resource-element layout of one resource block over a subframe.
//!
//! Symbols 0 and 1 carry data on all twelve tones so that a 12- or 24-tone
//! classification window spans one or two OFDM symbols. Pilots occupy
//! symbols 2 and 9 entirely plus tones 0 and 6 of symbols 5 and 12, leaving
//! 140 data elements.

use crate::channel::{SYMBOLS_PER_SUBFRAME, TONES_PER_PRB};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResourceElement {
    pub symbol: usize,
    pub tone: usize,
}

fn is_pilot(symbol: usize, tone: usize) -> bool {
    matches!(symbol, 2 | 9) || (matches!(symbol, 5 | 12) && matches!(tone, 0 | 6))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrbLayout {
    /// Data elements, symbol-major.
    pub data: Vec<ResourceElement>,
    pub pilots: Vec<ResourceElement>,
}

impl PrbLayout {
    pub fn subframe() -> PrbLayout {
        let mut data = Vec::new();
        let mut pilots = Vec::new();
        for symbol in 0..SYMBOLS_PER_SUBFRAME {
            for tone in 0..TONES_PER_PRB {
                let re = ResourceElement { symbol, tone };
                if is_pilot(symbol, tone) {
                    pilots.push(re);
                } else {
                    data.push(re);
                }
            }
        }
        PrbLayout { data, pilots }
    }
}
