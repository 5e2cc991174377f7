use rand::seq::index;

use super::ComplexityError;
use crate::rng;

/// Diagonal load added to the covariance, as a fraction of `trace / n`.
pub const COVARIANCE_JITTER: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuralOptions {
    /// Largest channel count evaluated by full subset enumeration.
    pub max_exact_n: usize,
    /// Random subsets per size when enumeration is skipped.
    pub subset_samples: usize,
    pub seed: u64,
}

impl Default for NeuralOptions {
    fn default() -> Self {
        Self { max_exact_n: 12, subset_samples: 200, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuralComplexity {
    pub bits: f64,
    /// All subsets were enumerated.
    pub exact: bool,
    /// Value added to the covariance diagonal.
    pub jitter: f64,
}

/// Sample covariance of equal-length channels, row-major `n × n`.
pub fn covariance(channels: &[Vec<f64>]) -> Vec<f64> {
    let n = channels.len();
    let len = channels[0].len();
    let means: Vec<f64> = channels.iter().map(|c| c.iter().sum::<f64>() / len as f64).collect();
    let mut cov = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let s: f64 = channels[i].iter().zip(&channels[j]).map(|(a, b)| (a - means[i]) * (b - means[j])).sum();
            let v = s / (len as f64 - 1.0);
            cov[i * n + j] = v;
            cov[j * n + i] = v;
        }
    }
    cov
}

/// Natural log-determinant of the principal submatrix on `idx` via Cholesky.
fn log_det(cov: &[f64], n: usize, idx: &[usize]) -> Option<f64> {
    let m = idx.len();
    let mut l = vec![0.0; m * m];
    let mut acc = 0.0;
    for i in 0..m {
        for j in 0..=i {
            let mut s = cov[idx[i] * n + idx[j]];
            for k in 0..j {
                s -= l[i * m + k] * l[j * m + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i * m + i] = s.sqrt();
                acc += s.ln();
            } else {
                l[i * m + j] = s / l[j * m + j];
            }
        }
    }
    Some(acc)
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 {
            i -= 1;
            if idx[i] != i + n - k {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return;
            }
        }
        if k == 0 {
            return;
        }
    }
}

/// Neural complexity `Σ_{k=1}^{n−1} [⟨H(X_k)⟩ − (k/n)·H(X)]` in bits under a
/// Gaussian model, where `⟨H(X_k)⟩` averages the entropy of size-`k` subsets.
pub fn neural_complexity(channels: &[Vec<f64>], opts: &NeuralOptions) -> Result<NeuralComplexity, ComplexityError> {
    let n = channels.len();
    if n < 2 {
        return Err(ComplexityError::InvalidInput(format!("{n} channels; need at least 2")));
    }
    let len = channels[0].len();
    if channels.iter().any(|c| c.len() != len) {
        return Err(ComplexityError::InvalidInput("channels differ in length".into()));
    }
    if len < 10 * n {
        return Err(ComplexityError::InvalidInput(format!("{len} samples for {n} channels; need {}", 10 * n)));
    }
    if channels.iter().flatten().any(|v| !v.is_finite()) {
        return Err(ComplexityError::SingularCovariance);
    }
    let mut cov = covariance(channels);
    let trace: f64 = (0..n).map(|i| cov[i * n + i]).sum();
    let jitter = COVARIANCE_JITTER * trace / n as f64;
    for i in 0..n {
        cov[i * n + i] += jitter;
    }
    let all: Vec<usize> = (0..n).collect();
    let full = log_det(&cov, n, &all).ok_or(ComplexityError::SingularCovariance)?;
    let exact = n <= opts.max_exact_n;
    let mut rng = rng::stream(opts.seed, 0x4e43);
    let mut total = 0.0;
    for k in 1..n {
        let mut sum = 0.0;
        let mut count = 0usize;
        let mut failed = false;
        let mut add = |s: &[usize]| match log_det(&cov, n, s) {
            Some(v) => {
                sum += v;
                count += 1;
            }
            None => failed = true,
        };
        if exact {
            for_each_subset(n, k, &mut add);
        } else {
            for _ in 0..opts.subset_samples.max(1) {
                let mut s = index::sample(&mut rng, n, k).into_vec();
                s.sort_unstable();
                add(&s);
            }
        }
        if failed {
            return Err(ComplexityError::SingularCovariance);
        }
        total += sum / count as f64 - k as f64 / n as f64 * full;
    }
    // Gaussian entropy is ½·log det plus a size term that cancels in the sum.
    Ok(NeuralComplexity { bits: 0.5 * total / std::f64::consts::LN_2, exact, jitter })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumerated() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, &mut |s| seen.push(s.to_vec()));
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        let mut c = 0;
        for_each_subset(5, 5, &mut |_| c += 1);
        assert_eq!(c, 1);
    }

    #[test]
    fn log_det_diagonal() {
        let cov = vec![2.0, 0.0, 0.0, 3.0];
        assert!((log_det(&cov, 2, &[0, 1]).unwrap() - 6f64.ln()).abs() < 1e-15);
        assert!((log_det(&cov, 2, &[1]).unwrap() - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_shapes() {
        let o = NeuralOptions::default();
        assert!(neural_complexity(&[vec![1.0; 100]], &o).is_err());
        assert!(neural_complexity(&[vec![1.0; 10], vec![1.0; 10]], &o).is_err());
        let mut bad = vec![vec![0.5; 50], (0..50).map(|i| i as f64).collect()];
        bad[0][3] = f64::NAN;
        assert_eq!(neural_complexity(&bad, &o), Err(ComplexityError::SingularCovariance));
    }
}
