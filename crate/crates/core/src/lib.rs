//! Link-level simulation of two-user MU-MIMO OFDM reception where the
//! co-scheduled user's constellation is unknown to the receiver.
//!
//! The crate covers the alphabets ([`constellation`]), channel and signal
//! generation ([`channel`]), the four receivers plus a genie reference
//! ([`detect`]), a substitute convolutional code ([`fec`]) and the Monte-Carlo
//! sweep engine behind the `mumimo` CLI ([`harness`]).

pub mod channel;
pub mod constellation;
pub mod detect;
pub mod error;
pub mod fec;
pub mod harness;
pub mod linalg;

pub use error::{Error, Result};
