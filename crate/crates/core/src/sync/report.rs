use rayon::prelude::*;

use super::SyncError;
use crate::dynamics::Trajectory;
use crate::stats::pearson;

/// Peak correlation needed to call two signals synchronized.
pub const SYNC_THRESHOLD: f64 = 0.95;
/// Largest |lag|, in integration steps, still counted as isochronal.
pub const ISOCHRONAL_MAX_STEPS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyncClass {
    Isochronal,
    Achronal,
    Unsynchronized,
}

impl SyncClass {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Isochronal => "isochronal",
            Self::Achronal => "achronal",
            Self::Unsynchronized => "unsynchronized",
        }
    }
}

impl std::fmt::Display for SyncClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncReport {
    /// Pearson correlation at the peak lag.
    pub pearson: f64,
    /// Seconds by which `b` trails `a` at the peak (negative: `b` leads).
    pub lag: f64,
    pub classification: SyncClass,
    /// Analysed span (s).
    pub window: (f64, f64),
}

/// Pearson correlation of `a[t]` against `b[t + lag]` over the overlap.
pub fn lagged_pearson(a: &[f64], b: &[f64], lag: i64) -> f64 {
    let n = a.len().min(b.len());
    let k = lag.unsigned_abs() as usize;
    if k >= n {
        return 0.0;
    }
    if lag >= 0 {
        pearson(&a[..n - k], &b[k..n])
    } else {
        pearson(&a[k..n], &b[..n - k])
    }
}

/// Cross-correlation scan over `±max_lag` seconds.
///
/// The peak is the lag of maximal normalized cross-correlation; ties go to
/// the smaller |lag|.
pub fn sync_report(a: &[f64], b: &[f64], step: f64, max_lag: f64) -> Result<SyncReport, SyncError> {
    if a.len() != b.len() {
        return Err(SyncError::LengthMismatch(a.len(), b.len()));
    }
    let max_k = (max_lag / step).round().max(0.0) as usize;
    if a.len() < 2 || (a.len() as f64) < 2.0 * max_lag / step {
        return Err(SyncError::WindowTooShort { samples: a.len(), needed: 2 * max_k });
    }
    let k = max_k as i64;
    let scores: Vec<(i64, f64)> = (-k..=k).into_par_iter().map(|lag| (lag, lagged_pearson(a, b, lag))).collect();
    let mut best = (0i64, f64::NEG_INFINITY);
    for &(lag, c) in &scores {
        if c > best.1 || (c == best.1 && lag.abs() < best.0.abs()) {
            best = (lag, c);
        }
    }
    let lag = best.0 as f64 * step;
    let classification = classify(best.1, lag, step);
    Ok(SyncReport { pearson: best.1, lag, classification, window: (0.0, a.len() as f64 * step) })
}

fn classify(peak: f64, lag: f64, step: f64) -> SyncClass {
    if peak < SYNC_THRESHOLD {
        SyncClass::Unsynchronized
    } else if lag.abs() <= ISOCHRONAL_MAX_STEPS * step * (1.0 + 1e-9) {
        SyncClass::Isochronal
    } else {
        SyncClass::Achronal
    }
}

/// [`sync_report`] between two nodes of a trajectory, post-transient only.
pub fn sync_report_nodes(traj: &Trajectory, i: usize, j: usize, max_lag: f64) -> Result<SyncReport, SyncError> {
    let mut r = sync_report(traj.post_transient(i), traj.post_transient(j), traj.step(), max_lag)?;
    let start = traj.time(traj.transient_end());
    r.window = (start, start + r.window.1);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wave(n: usize, step: f64) -> Vec<f64> {
        (0..n)
            .map(|i| {
                let t = i as f64 * step;
                (2.0 * std::f64::consts::PI * 7.3 * t).sin()
                    + 0.5 * (2.0 * std::f64::consts::PI * 19.1 * t).cos()
                    + 0.3 * (t * 53.0).sin().powi(3)
            })
            .collect()
    }

    #[test]
    fn identical_is_isochronal() {
        let a = wave(4000, 1e-3);
        let r = sync_report(&a, &a, 1e-3, 0.05).unwrap();
        assert!((r.pearson - 1.0).abs() < 1e-12);
        assert_eq!(r.lag, 0.0);
        assert_eq!(r.classification, SyncClass::Isochronal);
    }

    #[test]
    fn circular_delay_is_achronal() {
        let step = 1e-4;
        let a = wave(20000, step);
        let shift = 180; // 0.018 s
        let b: Vec<f64> = (0..a.len()).map(|i| a[(i + a.len() - shift) % a.len()]).collect();
        let r = sync_report(&a, &b, step, 0.03).unwrap();
        assert!((r.lag - 0.018).abs() <= step + 1e-12, "lag {}", r.lag);
        assert_eq!(r.classification, SyncClass::Achronal);
    }

    #[test]
    fn short_window_rejected() {
        let a = wave(100, 1e-3);
        assert!(matches!(sync_report(&a, &a, 1e-3, 0.06), Err(SyncError::WindowTooShort { .. })));
        assert!(matches!(sync_report(&a, &a[..50], 1e-3, 0.01), Err(SyncError::LengthMismatch(..))));
    }

    #[test]
    fn unrelated_is_unsynchronized() {
        let a = wave(5000, 1e-3);
        let b: Vec<f64> = (0..5000).map(|i| ((i * 7919) % 104729) as f64 / 104729.0).collect();
        let r = sync_report(&a, &b, 1e-3, 0.02).unwrap();
        assert_eq!(r.classification, SyncClass::Unsynchronized);
    }
}
