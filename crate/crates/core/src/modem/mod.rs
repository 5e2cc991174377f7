//! Chaos-shift-keying modems (coherent CSK, non-coherent DCSK) and a BPSK
//! baseline, with AWGN and two-ray Rayleigh channels and a Monte-Carlo BER
//! harness.
//!
//! Chips carry unit mean energy, so one bit spans `spreading` units of chip
//! energy. Noise is scaled to match: per-chip variance `spreading / (2·Eb/N0)`.

mod ber;
mod channel;
mod chips;
mod frame;

use thiserror::Error;

pub use ber::{ber_sweep, q_function, wilson_interval, BerCurve, BerPoint, BerSweep, WILSON_Z};
pub use channel::{channel_apply, ChannelKind, ChannelSpec, BLOCK_FADING};
pub use chips::{
    chip_oscillator, chip_source, mackey_glass_chips, BufferedChips, ChipKind, ChipStream, LogisticChips, SignChips,
    CHIP_HISTORY_RANGE, CHIP_OSCILLATOR_KAPPA_F, CHIP_OSCILLATOR_MU,
};
pub use frame::{demodulate, frame_energy, modulate, replica, Scheme, SymbolFrame};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModemError {
    #[error("DCSK needs an even spreading factor, got {0}")]
    OddSpreading(usize),
    #[error("spreading factor must be >= 1")]
    ZeroSpreading,
    #[error("coherent CSK needs reference chips")]
    MissingReference,
    #[error("{what}: got {got} chips, expected {expected}")]
    LengthMismatch { what: &'static str, got: usize, expected: usize },
    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("bits per point must be >= {min}, got {got}")]
    TooFewBits { got: u64, min: u64 },
    #[error("empty Eb/N0 grid")]
    EmptyGrid,
}
