use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{InitialHistory, OscillatorParams, Simulation};
use crate::network::CouplingSpec;
use crate::rng;
use crate::stats::{mean, variance};

/// Feedback gain of the chip-generating oscillator.
pub const CHIP_OSCILLATOR_KAPPA_F: f64 = 0.6;
/// Gamma shape of the chip oscillator's nonlinearity. With the reference
/// shape of 1 the oscillation stays phase-coherent and chips from nearby
/// initial conditions remain correlated; a shape of 4 gives broadband chaos.
pub const CHIP_OSCILLATOR_MU: f64 = 4.0;
/// Constant initial histories are drawn from this range. The steeper
/// nonlinearity makes the origin attracting, and histories below about 0.2
/// decay onto it.
pub const CHIP_HISTORY_RANGE: (f64, f64) = (0.3, 0.9);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChipKind {
    /// Delay oscillator sampled every `tau_f / 2` after the transient.
    MackeyGlass,
    /// Fully chaotic logistic map `x ← 4x(1 − x)`.
    Logistic,
}

impl ChipKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::MackeyGlass => "mackey_glass",
            Self::Logistic => "logistic",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "mackey_glass" => Some(Self::MackeyGlass),
            "logistic" => Some(Self::Logistic),
            _ => None,
        }
    }
}

/// Parameters of the oscillator behind [`ChipKind::MackeyGlass`].
pub fn chip_oscillator() -> OscillatorParams {
    OscillatorParams { kappa_f: CHIP_OSCILLATOR_KAPPA_F, mu: CHIP_OSCILLATOR_MU, ..Default::default() }
}

/// `count` standardized chips (zero sample mean, unit sample variance).
pub fn chip_source(kind: ChipKind, count: usize, seed: u64) -> Vec<f64> {
    let raw = match kind {
        ChipKind::Logistic => {
            let mut s = LogisticChips::new(seed);
            (0..count).map(|_| s.next_raw()).collect()
        }
        ChipKind::MackeyGlass => {
            let (lo, hi) = CHIP_HISTORY_RANGE;
            mackey_glass_raw(rng::stream(seed, 0x3c).random_range(lo..hi), count)
        }
    };
    standardize(raw)
}

/// Mackey-Glass chips from an explicit constant initial history.
pub fn mackey_glass_chips(history: f64, count: usize) -> Vec<f64> {
    standardize(mackey_glass_raw(history, count))
}

fn mackey_glass_raw(history: f64, count: usize) -> Vec<f64> {
    if count == 0 {
        return Vec::new();
    }
    let p = chip_oscillator();
    let step = crate::dynamics::DEFAULT_STEP;
    let every = ((p.tau_f / 2.0) / step).round() as usize;
    let transient = crate::dynamics::DEFAULT_TRANSIENT;
    let duration = transient + (count as f64) * every as f64 * step;
    let traj = Simulation::new(vec![p], CouplingSpec::uncoupled(1).expect("one node"))
        .duration(duration)
        .step(step)
        .transient(transient)
        .record_every(every)
        .history(InitialHistory::Constant(vec![history]))
        .run()
        .expect("chip oscillator configuration is valid");
    let post = traj.post_transient(0);
    post[post.len() - count..].to_vec()
}

fn standardize(mut x: Vec<f64>) -> Vec<f64> {
    let m = mean(&x);
    let sd = variance(&x).sqrt();
    let scale = if sd > 0.0 { 1.0 / sd } else { 1.0 };
    for v in &mut x {
        *v = (*v - m) * scale;
    }
    x
}

/// Endless supply of chip segments for the modulator.
pub trait ChipStream {
    fn segment(&mut self, len: usize) -> Vec<f64>;
}

/// Logistic-map chips centred and scaled by the invariant density's mean
/// (1/2) and variance (1/8).
#[derive(Debug, Clone)]
pub struct LogisticChips {
    x: f64,
    rng: ChaCha8Rng,
}

impl LogisticChips {
    pub fn new(seed: u64) -> Self {
        let mut rng = rng::stream(seed, 0x10_6157);
        let mut x = rng.random_range(0.05..0.95);
        for _ in 0..64 {
            x = 4.0 * x * (1.0 - x);
        }
        Self { x, rng }
    }

    fn next_raw(&mut self) -> f64 {
        let mut x = 4.0 * self.x * (1.0 - self.x);
        // Finite precision can land on the fixed point 0 (via 0.5 -> 1 -> 0);
        // restart from a fresh point when that happens.
        if !(x > 1e-12 && x < 1.0 - 1e-12) {
            x = self.rng.random_range(0.05..0.95);
        }
        self.x = x;
        x
    }
}

impl ChipStream for LogisticChips {
    fn segment(&mut self, len: usize) -> Vec<f64> {
        let scale = 8f64.sqrt();
        (0..len).map(|_| (self.next_raw() - 0.5) * scale).collect()
    }
}

/// Pre-computed chip sequence, consumed in order and wrapped at the end.
#[derive(Debug, Clone)]
pub struct BufferedChips {
    chips: Vec<f64>,
    pos: usize,
}

impl BufferedChips {
    pub fn new(chips: Vec<f64>) -> Self {
        assert!(!chips.is_empty(), "empty chip buffer");
        Self { chips, pos: 0 }
    }
}

impl ChipStream for BufferedChips {
    fn segment(&mut self, len: usize) -> Vec<f64> {
        (0..len)
            .map(|_| {
                let v = self.chips[self.pos];
                self.pos = (self.pos + 1) % self.chips.len();
                v
            })
            .collect()
    }
}

/// Random ±1 chips; the spreading code of the BPSK baseline.
#[derive(Debug, Clone)]
pub struct SignChips {
    rng: ChaCha8Rng,
}

impl SignChips {
    pub fn new(seed: u64) -> Self {
        Self { rng: rng::stream(seed, 0x5167) }
    }
}

impl ChipStream for SignChips {
    fn segment(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| if self.rng.random::<bool>() { 1.0 } else { -1.0 }).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::pearson;

    #[test]
    fn logistic_standardized() {
        let c = chip_source(ChipKind::Logistic, 100_000, 3);
        assert!(mean(&c).abs() < 1e-3);
        let v = variance(&c);
        assert!((0.99..=1.01).contains(&v), "{v}");
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(chip_source(ChipKind::Logistic, 1000, 9), chip_source(ChipKind::Logistic, 1000, 9));
        assert_ne!(chip_source(ChipKind::Logistic, 1000, 9), chip_source(ChipKind::Logistic, 1000, 10));
    }

    #[test]
    fn logistic_seeds_decorrelate() {
        let a = chip_source(ChipKind::Logistic, 10_000, 1);
        let b = chip_source(ChipKind::Logistic, 10_000, 2);
        assert!(pearson(&a, &b).abs() < 0.05);
    }

    #[test]
    fn stream_scaling_matches_invariant_density() {
        let mut s = LogisticChips::new(1);
        let c = s.segment(200_000);
        assert!(mean(&c).abs() < 0.01);
        assert!((variance(&c) - 1.0).abs() < 0.02);
    }

    #[test]
    fn mackey_glass_nearby_histories_decorrelate() {
        let a = mackey_glass_chips(0.5, 10_000);
        let b = mackey_glass_chips(0.500_001, 10_000);
        let r = pearson(&a, &b);
        assert!(r.abs() < 0.05, "{r}");
        assert!(mean(&a).abs() < 1e-3);
        assert!((variance(&a) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn buffered_wraps() {
        let mut b = BufferedChips::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(b.segment(2), vec![1.0, 2.0]);
        assert_eq!(b.segment(2), vec![3.0, 1.0]);
    }
}
