//! Synchronization metrics and chaotic-masking transmission.

mod masking;
mod report;

use thiserror::Error;

pub use masking::{
    bit_error_rate, mask_recover, mask_transmit, FrameLayout, MaskedTransmission, MaskingConfig, RecoveredMessage,
    PREAMBLE, PREAMBLE_MAX_LAG, RECOVERY_MIN_CORRELATION,
};
pub use report::{
    lagged_pearson, sync_report, sync_report_nodes, SyncClass, SyncReport, ISOCHRONAL_MAX_STEPS, SYNC_THRESHOLD,
};

use crate::dynamics::DynamicsError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SyncError {
    #[error("window of {samples} samples is too short (need {needed})")]
    WindowTooShort { samples: usize, needed: usize },
    #[error("signals differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("receiver not synchronized (correlation {correlation:.4} < 0.9)")]
    NotSynchronized { correlation: f64 },
    #[error("invalid masking configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}
