use rayon::prelude::*;

use super::{delay_embed, ComplexityError};

/// Shortest signal accepted by [`lyapunov_max`].
pub const MIN_LYAPUNOV_SAMPLES: usize = 5000;
/// Cap on reference points when no stride is given.
const MAX_AUTO_REFERENCES: usize = 4000;
/// Neighbour separations below this fraction of the signal's standard
/// deviation are rounding noise, not dynamics.
pub const SEPARATION_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovConfig {
    pub dim: usize,
    /// Embedding lag in samples.
    pub lag: usize,
    /// Neighbours closer in time than this many samples are ignored.
    pub theiler: usize,
    /// Inclusive sample range of the divergence curve used for the fit.
    pub fit: (usize, usize),
    /// Use every `stride`-th point as a reference; 0 picks one automatically.
    pub reference_stride: usize,
}

impl LyapunovConfig {
    /// Fit over samples `1..=(tau_f/step)/2`, embedding lag a quarter delay.
    pub fn for_delay(tau_f: f64, step: f64) -> Self {
        let delay = (tau_f / step).round().max(1.0) as usize;
        Self { dim: 4, lag: (delay / 4).max(1), theiler: delay, fit: (1, (delay / 2).max(2)), reference_stride: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovEstimate {
    /// Largest exponent in 1/s.
    pub per_second: f64,
    /// Mean log separation after `k` samples, `k = 0..=fit.1`.
    pub divergence: Vec<f64>,
    pub references: usize,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Least-squares slope of `y` against `x`.
pub(crate) fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Largest Lyapunov exponent from the mean log divergence of nearest
/// neighbours (Rosenstein). Ties between equidistant neighbours go to the
/// lowest index.
pub fn lyapunov_max(signal: &[f64], step: f64, cfg: &LyapunovConfig) -> Result<LyapunovEstimate, ComplexityError> {
    if signal.len() < MIN_LYAPUNOV_SAMPLES {
        return Err(ComplexityError::TooShort { len: signal.len(), needed: MIN_LYAPUNOV_SAMPLES });
    }
    let (k0, k1) = cfg.fit;
    if k1 <= k0 {
        return Err(ComplexityError::InvalidInput(format!("fit range {k0}..{k1} is empty")));
    }
    if !(step > 0.0) {
        return Err(ComplexityError::InvalidInput("step must be > 0".into()));
    }
    let emb = delay_embed(signal, cfg.dim, cfg.lag)?;
    let horizon = k1;
    if emb.len() <= horizon + 1 {
        return Err(ComplexityError::TooShort { len: signal.len(), needed: signal.len() + horizon + 2 - emb.len() });
    }
    let usable = emb.len() - horizon;
    let stride =
        if cfg.reference_stride == 0 { usable.div_ceil(MAX_AUTO_REFERENCES).max(1) } else { cfg.reference_stride };
    let refs: Vec<usize> = (0..usable).step_by(stride).collect();
    let mean = signal.iter().sum::<f64>() / signal.len() as f64;
    let var = signal.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / signal.len() as f64;
    let floor2 = SEPARATION_FLOOR * SEPARATION_FLOOR * var * cfg.dim as f64;
    let pairs: Vec<(usize, usize)> = refs
        .par_iter()
        .filter_map(|&i| {
            let p = emb.point(i);
            let mut best: Option<(usize, f64)> = None;
            for j in 0..usable {
                if i.abs_diff(j) <= cfg.theiler {
                    continue;
                }
                let d = dist2(p, emb.point(j));
                if d > floor2 && best.is_none_or(|(_, b)| d < b) {
                    best = Some((j, d));
                }
            }
            best.map(|(j, _)| (i, j))
        })
        .collect();
    if pairs.is_empty() {
        return Err(ComplexityError::NoNeighbors);
    }
    let divergence: Vec<f64> = (0..=horizon)
        .map(|k| {
            let (sum, n) = pairs.iter().fold((0.0, 0usize), |(s, n), &(i, j)| {
                let d = dist2(emb.point(i + k), emb.point(j + k));
                if d > 0.0 {
                    (s + 0.5 * d.ln(), n + 1)
                } else {
                    (s, n)
                }
            });
            if n == 0 {
                f64::NEG_INFINITY
            } else {
                sum / n as f64
            }
        })
        .collect();
    let xs: Vec<f64> = (k0..=k1).map(|k| k as f64 * step).collect();
    let ys = &divergence[k0..=k1];
    if ys.iter().any(|v| !v.is_finite()) {
        return Err(ComplexityError::NoNeighbors);
    }
    Ok(LyapunovEstimate { per_second: slope(&xs, ys), divergence, references: pairs.len() })
}
