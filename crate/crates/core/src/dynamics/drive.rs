use std::f64::consts::TAU;
use std::sync::Arc;

/// Deterministic time signal added to a node's input (or, for message
/// injection, to its output line).
#[derive(Debug, Clone, PartialEq, Default)]
pub enum DriveSignal {
    #[default]
    Zero,
    Constant(f64),
    Sine {
        amplitude: f64,
        frequency_hz: f64,
        offset: f64,
    },
    /// Uniformly sampled record starting at `t = 0`, linearly interpolated
    /// and held constant past either end.
    Sampled {
        step: f64,
        samples: Arc<[f64]>,
    },
    /// Non-return-to-zero levels, one per `bit_duration`, starting at
    /// `start`; zero outside the covered span.
    Nrz {
        start: f64,
        bit_duration: f64,
        levels: Arc<[f64]>,
    },
    /// `gain · inner(t)`.
    Scaled {
        gain: f64,
        inner: Box<DriveSignal>,
    },
    Sum(Box<DriveSignal>, Box<DriveSignal>),
}

impl DriveSignal {
    pub fn sampled(step: f64, samples: impl Into<Arc<[f64]>>) -> Self {
        Self::Sampled { step, samples: samples.into() }
    }

    pub fn scaled(self, gain: f64) -> Self {
        Self::Scaled { gain, inner: Box::new(self) }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Zero => true,
            Self::Constant(c) => *c == 0.0,
            Self::Sine { amplitude, offset, .. } => *amplitude == 0.0 && *offset == 0.0,
            Self::Sampled { samples, .. } => samples.iter().all(|&v| v == 0.0),
            Self::Nrz { levels, .. } => levels.iter().all(|&v| v == 0.0),
            Self::Scaled { gain, inner } => *gain == 0.0 || inner.is_zero(),
            Self::Sum(a, b) => a.is_zero() && b.is_zero(),
        }
    }

    #[inline]
    pub fn value_at(&self, t: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant(c) => *c,
            Self::Sine { amplitude, frequency_hz, offset } => offset + amplitude * (TAU * frequency_hz * t).sin(),
            Self::Sampled { step, samples } => {
                if samples.is_empty() {
                    return 0.0;
                }
                let p = t / step;
                if p <= 0.0 {
                    return samples[0];
                }
                let i = p.floor() as usize;
                if i + 1 >= samples.len() {
                    return samples[samples.len() - 1];
                }
                let u = p - i as f64;
                samples[i] + u * (samples[i + 1] - samples[i])
            }
            Self::Nrz { start, bit_duration, levels } => {
                if t < *start {
                    return 0.0;
                }
                let k = ((t - start) / bit_duration).floor() as usize;
                levels.get(k).copied().unwrap_or(0.0)
            }
            Self::Scaled { gain, inner } => gain * inner.value_at(t),
            Self::Sum(a, b) => a.value_at(t) + b.value_at(t),
        }
    }
}
