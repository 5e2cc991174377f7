//! Chaotic masking over a single transmission line.
//!
//! The transmitter is one oscillator whose coupling input is its own output
//! line, delayed by `tau_c`. The message is added to that line after the
//! oscillator, so the transmitter hears exactly what it sends. A receiver
//! with matched parameters driven by the same line through a directional
//! edge of equal gain and delay therefore obeys the same equation as the
//! transmitter, and its state converges to the carrier regardless of the
//! message. The residual `tx − x_b` then equals the message waveform.

use std::sync::Arc;

use super::{sync_report, SyncError};
use crate::dynamics::{
    seeded_history, DriveSignal, InitialHistory, OscillatorParams, Simulation, Trajectory, DEFAULT_STEP,
    DEFAULT_TRANSIENT,
};
use crate::network::{directional, CouplingSpec};
use crate::stats::{pearson, rms};

/// Known pattern sent ahead of the message for lag estimation.
pub const PREAMBLE: [bool; 10] = [true, false, true, true, false, true, false, false, true, false];
/// Minimum post-transient line-to-receiver correlation for a usable receiver.
pub const RECOVERY_MIN_CORRELATION: f64 = 0.9;
/// Lag search span used on the preamble (s).
pub const PREAMBLE_MAX_LAG: f64 = 2e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskingConfig {
    /// Message-to-carrier RMS ratio.
    pub epsilon: f64,
    /// Seconds per message bit.
    pub bit_duration: f64,
    /// Gain of the line into each oscillator.
    pub kappa_c: f64,
    /// Line delay (s).
    pub tau_c: f64,
    pub step: f64,
    pub transient: f64,
}

impl Default for MaskingConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.05,
            bit_duration: 0.2,
            kappa_c: 1.0,
            tau_c: 0.018,
            step: DEFAULT_STEP,
            transient: DEFAULT_TRANSIENT,
        }
    }
}

impl MaskingConfig {
    pub fn violations(&self, carrier: &OscillatorParams) -> Vec<String> {
        let mut out = Vec::new();
        if !(0.0..=0.2).contains(&self.epsilon) {
            out.push("epsilon must be in [0, 0.2]".to_string());
        }
        if !(self.bit_duration >= 10.0 * carrier.tau_f * (1.0 - 1e-12)) {
            out.push(format!("bit_duration must be >= 10*tau_f = {} s", 10.0 * carrier.tau_f));
        }
        if !(self.tau_c > 0.0) {
            out.push("tau_c must be > 0".to_string());
        }
        if !(self.step > 0.0) {
            out.push("step must be > 0".to_string());
        }
        let spb = self.bit_duration / self.step;
        if (spb - spb.round()).abs() > 1e-6 {
            out.push("bit_duration must be a whole number of steps".to_string());
        }
        out
    }

    pub fn validate(&self, carrier: &OscillatorParams) -> Result<(), SyncError> {
        match self.violations(carrier).into_iter().next() {
            None => Ok(()),
            Some(m) => Err(SyncError::InvalidConfig(m)),
        }
    }

    /// NRZ levels `(low, high)` for a carrier of RMS `carrier_rms`.
    pub fn levels(&self, carrier_rms: f64) -> (f64, f64) {
        let a = self.epsilon * carrier_rms;
        (-a, a)
    }

    fn samples_per_bit(&self) -> usize {
        (self.bit_duration / self.step).round() as usize
    }

    fn transient_samples(&self) -> usize {
        (self.transient / self.step).round() as usize
    }

    /// Frame layout for `message_bits` bits after the preamble.
    pub fn layout(&self, message_bits: usize) -> FrameLayout {
        let spb = self.samples_per_bit();
        let preamble_start = self.transient_samples();
        let message_start = preamble_start + PREAMBLE.len() * spb;
        FrameLayout {
            samples_per_bit: spb,
            preamble_start,
            message_start,
            message_bits,
            total_samples: message_start + message_bits * spb,
        }
    }

    /// Layout implied by a received line of `len` samples.
    pub fn layout_for_len(&self, len: usize) -> Result<FrameLayout, SyncError> {
        let empty = self.layout(0);
        if len < empty.total_samples {
            return Err(SyncError::InvalidConfig(format!(
                "line of {len} samples is shorter than transient plus preamble"
            )));
        }
        Ok(self.layout((len - empty.total_samples) / empty.samples_per_bit))
    }
}

/// Sample indices of the transmitted frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameLayout {
    pub samples_per_bit: usize,
    pub preamble_start: usize,
    pub message_start: usize,
    pub message_bits: usize,
    pub total_samples: usize,
}

impl FrameLayout {
    fn bit_range(&self, start: usize, k: usize) -> std::ops::Range<usize> {
        let s = start + k * self.samples_per_bit;
        s..s + self.samples_per_bit
    }
}

#[derive(Debug, Clone)]
pub struct MaskedTransmission {
    /// Line signal `x_a + m` sampled every `step`.
    pub tx: Vec<f64>,
    /// Carrier state `x_a` as a one-node trajectory.
    pub truth: Trajectory,
    /// Message waveform `m`.
    pub message: Vec<f64>,
    /// NRZ amplitude `epsilon · reference_rms`.
    pub amplitude: f64,
    /// Post-transient RMS of the unmodulated carrier.
    pub reference_rms: f64,
    pub layout: FrameLayout,
    pub step: f64,
}

fn carrier_sim(carrier: &OscillatorParams, cfg: &MaskingConfig, layout: &FrameLayout, seed: u64) -> Simulation {
    let duration = (layout.total_samples - 1) as f64 * cfg.step;
    Simulation::new(vec![*carrier], CouplingSpec::uncoupled(1).expect("one node"))
        .loopback(0, cfg.kappa_c, cfg.tau_c)
        .duration(duration)
        .step(cfg.step)
        .transient(cfg.transient)
        .history(InitialHistory::Constant(vec![seeded_history(seed, 0)]))
}

/// Adds the NRZ message (preamble first) to a self-driven carrier line.
///
/// The amplitude is `epsilon` times the post-transient RMS of the same
/// carrier run without a message.
pub fn mask_transmit(
    carrier: &OscillatorParams,
    message_bits: &[bool],
    cfg: &MaskingConfig,
    seed: u64,
) -> Result<MaskedTransmission, SyncError> {
    cfg.validate(carrier)?;
    let layout = cfg.layout(message_bits.len());

    let reference = carrier_sim(carrier, cfg, &layout, seed).run()?;
    let reference_rms = rms(reference.post_transient(0));
    let (low, high) = cfg.levels(reference_rms);
    let levels: Arc<[f64]> = PREAMBLE.iter().chain(message_bits).map(|&b| if b { high } else { low }).collect();
    let message_signal =
        DriveSignal::Nrz { start: layout.preamble_start as f64 * cfg.step, bit_duration: cfg.bit_duration, levels };

    let truth = if cfg.epsilon == 0.0 {
        reference
    } else {
        carrier_sim(carrier, cfg, &layout, seed).line_offset(0, message_signal.clone()).run()?
    };
    let message: Vec<f64> = (0..truth.len()).map(|k| message_signal.value_at(k as f64 * cfg.step)).collect();
    let tx = truth.node(0).iter().zip(&message).map(|(x, m)| x + m).collect();
    Ok(MaskedTransmission { tx, truth, message, amplitude: high, reference_rms, layout, step: cfg.step })
}

#[derive(Debug, Clone)]
pub struct RecoveredMessage {
    pub bits: Vec<bool>,
    /// Set when no message could be separated from the carrier.
    pub undecidable: bool,
    /// `tx(t) − x_b(t + lag)`.
    pub residual: Vec<f64>,
    /// Receiver state.
    pub receiver: Vec<f64>,
    /// Post-transient correlation between line and receiver.
    pub correlation: f64,
    /// Receiver lag estimated on the preamble (s).
    pub lag: f64,
}

/// Drives a receiver oscillator with the line and decodes the residual.
pub fn mask_recover(
    tx: &[f64],
    receiver: &OscillatorParams,
    kappa_c: f64,
    tau_c: f64,
    cfg: &MaskingConfig,
    seed: u64,
) -> Result<RecoveredMessage, SyncError> {
    cfg.validate(receiver)?;
    let layout = cfg.layout_for_len(tx.len())?;
    let duration = (tx.len() - 1) as f64 * cfg.step;
    let line: Arc<[f64]> = tx.into();
    let sim = Simulation::new(
        vec![*receiver, *receiver],
        directional(0, 1, kappa_c, tau_c).map_err(|e| SyncError::InvalidConfig(e.to_string()))?,
    )
    .replay(0, line)
    .duration(duration)
    .step(cfg.step)
    .transient(cfg.transient)
    .history(InitialHistory::Constant(vec![tx[0], seeded_history(seed, 1)]));
    let traj = sim.run()?;
    let xb = traj.node(1);

    let start = layout.preamble_start;
    let correlation = pearson(&tx[start..], &xb[start..]);
    if !(correlation >= RECOVERY_MIN_CORRELATION) {
        return Err(SyncError::NotSynchronized { correlation });
    }

    let pre = start..layout.message_start;
    let lag_report = sync_report(&tx[pre.clone()], &xb[pre], cfg.step, PREAMBLE_MAX_LAG)?;
    let lag_samples = (lag_report.lag / cfg.step).round() as i64;
    let residual: Vec<f64> = (0..tx.len())
        .map(|n| {
            let j = (n as i64 + lag_samples).clamp(0, tx.len() as i64 - 1) as usize;
            tx[n] - xb[j]
        })
        .collect();

    let decide = |start: usize, k: usize| -> (bool, f64) {
        let r = &residual[layout.bit_range(start, k)];
        let m = r.iter().sum::<f64>() / r.len() as f64;
        (m > 0.0, m)
    };
    let preamble_ok = PREAMBLE.iter().enumerate().all(|(k, &b)| decide(layout.preamble_start, k).0 == b);
    let bits: Vec<bool> = (0..layout.message_bits).map(|k| decide(layout.message_start, k).0).collect();

    Ok(RecoveredMessage {
        bits,
        undecidable: cfg.epsilon == 0.0 || !preamble_ok,
        residual,
        receiver: xb.to_vec(),
        correlation,
        lag: lag_report.lag,
    })
}

/// Fraction of positions where `a` and `b` differ (over the shorter length).
pub fn bit_error_rate(a: &[bool], b: &[bool]) -> f64 {
    let n = a.len().min(b.len());
    if n == 0 {
        return 0.0;
    }
    a.iter().zip(b).filter(|(x, y)| x != y).count() as f64 / n as f64
}
