//! Simulation toolkit for chaos-based communication.
//!
//! * [`dynamics`]: Mackey-Glass delay oscillators and a fixed-step RK4 DDE
//!   integrator.
//! * [`network`]: directional, bidirectional, external and matrix coupling.
//! * [`sync`]: synchronization metrics and chaotic masking.
//! * [`modem`]: BPSK, coherent CSK and DCSK over AWGN and two-ray Rayleigh
//!   channels with a Monte-Carlo BER harness.
//! * [`complexity`]: entropies, LMC and neural complexity, delay embedding and
//!   the largest Lyapunov exponent.
//! * [`config`] and [`experiment`]: the experiment runner behind the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod complexity;
pub mod config;
pub mod dynamics;
pub mod experiment;
pub mod fmt;
pub mod modem;
pub mod network;
pub mod rng;
pub mod stats;
pub mod svg;
pub mod sync;
