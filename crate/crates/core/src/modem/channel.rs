use rand::Rng;
use rand_distr::StandardNormal;

use super::{ModemError, Scheme, SymbolFrame};
use crate::rng;

/// Fading gains stay constant over each symbol.
pub const BLOCK_FADING: bool = true;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Awgn,
    TwoRayRayleigh,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    /// `f64::INFINITY` switches the noise off.
    pub ebn0_db: f64,
    /// Second-ray mean power relative to the first; `-inf` removes it.
    pub ray2_power_db: f64,
    pub ray2_delay_chips: usize,
}

impl ChannelSpec {
    pub fn awgn(ebn0_db: f64) -> Self {
        Self { kind: ChannelKind::Awgn, ebn0_db, ray2_power_db: f64::NEG_INFINITY, ray2_delay_chips: 1 }
    }

    pub fn two_ray(ebn0_db: f64, ray2_power_db: f64, ray2_delay_chips: usize) -> Self {
        Self { kind: ChannelKind::TwoRayRayleigh, ebn0_db, ray2_power_db, ray2_delay_chips }
    }

    /// Equal-power rays two chips apart.
    pub fn severe(ebn0_db: f64) -> Self {
        Self::two_ray(ebn0_db, 0.0, 2)
    }

    /// Second ray 20 dB down.
    pub fn negligible(ebn0_db: f64) -> Self {
        Self::two_ray(ebn0_db, -20.0, 2)
    }

    pub fn with_ebn0(self, ebn0_db: f64) -> Self {
        Self { ebn0_db, ..self }
    }

    /// Short name used in CSV output.
    pub fn label(&self) -> String {
        match self.kind {
            ChannelKind::Awgn => "awgn".to_string(),
            ChannelKind::TwoRayRayleigh => format!("two_ray_{}dB_d{}", self.ray2_power_db, self.ray2_delay_chips),
        }
    }

    pub fn validate(&self, scheme: Scheme, spreading: usize) -> Result<(), ModemError> {
        if self.ebn0_db.is_nan() || self.ebn0_db == f64::NEG_INFINITY {
            return Err(ModemError::InvalidChannel(format!("ebn0_db = {}", self.ebn0_db)));
        }
        if self.kind == ChannelKind::TwoRayRayleigh {
            if self.ray2_delay_chips == 0 {
                return Err(ModemError::InvalidChannel("ray2_delay_chips must be >= 1".into()));
            }
            if self.ray2_power_db.is_nan() || self.ray2_power_db == f64::INFINITY {
                return Err(ModemError::InvalidChannel(format!("ray2_power_db = {}", self.ray2_power_db)));
            }
            if scheme == Scheme::Dcsk && self.ray2_delay_chips >= spreading / 2 {
                return Err(ModemError::InvalidChannel(format!(
                    "ray2_delay_chips {} must be < spreading/2 = {}",
                    self.ray2_delay_chips,
                    spreading / 2
                )));
            }
        }
        Ok(())
    }

    /// Per-chip noise standard deviation for frames of `spreading` chips.
    pub fn noise_sigma(&self, spreading: usize) -> f64 {
        if self.ebn0_db == f64::INFINITY {
            return 0.0;
        }
        let ebn0 = 10f64.powf(self.ebn0_db / 10.0);
        (spreading as f64 / (2.0 * ebn0)).sqrt()
    }

    /// Mean powers `(p1, p2)` of the two rays, summing to one.
    pub fn ray_powers(&self) -> (f64, f64) {
        let ratio = 10f64.powf(self.ray2_power_db / 10.0);
        (1.0 / (1.0 + ratio), ratio / (1.0 + ratio))
    }
}

/// Rayleigh amplitude with `E[h²] = power`.
fn rayleigh(rng: &mut impl Rng, power: f64) -> f64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    (0.5 * power * (a * a + b * b)).sqrt()
}

/// Passes the concatenated frames through the channel.
///
/// Fading gains and noise come from separate streams derived from `seed`,
/// so two schemes with equal spreading see the same noise samples.
pub fn channel_apply(frames: &[SymbolFrame], spec: &ChannelSpec, seed: u64) -> Vec<f64> {
    let mut fade = rng::stream(seed, 1);
    let mut noise = rng::stream(seed, 2);
    let s: Vec<f64> = frames.iter().flat_map(|f| f.chips.iter().copied()).collect();
    let mut y = Vec::with_capacity(s.len());
    let (p1, p2) = spec.ray_powers();
    let d = spec.ray2_delay_chips;
    let mut start = 0;
    for f in frames {
        let n = f.spreading();
        let sigma = spec.noise_sigma(n);
        let (h1, h2) = match spec.kind {
            ChannelKind::Awgn => (1.0, 0.0),
            ChannelKind::TwoRayRayleigh => (rayleigh(&mut fade, p1), rayleigh(&mut fade, p2)),
        };
        for k in start..start + n {
            let mut v = h1 * s[k];
            if h2 != 0.0 && k >= d {
                v += h2 * s[k - d];
            }
            if sigma > 0.0 {
                let g: f64 = noise.sample(StandardNormal);
                v += sigma * g;
            }
            y.push(v);
        }
        start += n;
    }
    y
}
