//! Mackey-Glass delay-feedback oscillators and their fixed-step integrator.

mod drive;
mod history;
mod integrate;
mod nonlinearity;
mod params;
mod trajectory;

use thiserror::Error;

pub use drive::DriveSignal;
pub use history::HistoryBuffer;
pub use integrate::{
    integrate, seeded_history, InitialHistory, Simulation, DEFAULT_STEP, DEFAULT_TRANSIENT, HISTORY_RANGE,
    MAX_STEP_FRACTION,
};
pub use nonlinearity::{nonlinearity, MackeyGlassFn};
pub use params::OscillatorParams;
pub use trajectory::Trajectory;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("step {step} s exceeds rc/50 = {limit} s")]
    StepTooLarge { step: f64, limit: f64 },
    #[error("delay {delay} s cannot be resolved (history covers {capacity} s, minimum one step)")]
    DelayUnresolvable { delay: f64, capacity: f64 },
    #[error("invalid oscillator parameters: {0}")]
    InvalidParams(String),
    #[error("{what}: got {got} entries for {expected} nodes")]
    NodeCountMismatch { what: &'static str, got: usize, expected: usize },
    #[error("invalid run: {0}")]
    InvalidRun(String),
}
