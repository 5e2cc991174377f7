use std::collections::HashMap;

use super::SymbolizedSeries;

fn shannon_bits(counts: impl Iterator<Item = usize>, total: usize) -> f64 {
    let n = total as f64;
    let h: f64 = counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

/// Plug-in entropies of overlapping blocks, `H(L)` for `L = 1..=l_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockEntropies {
    /// `bits[L - 1] = H(L)`.
    pub bits: Vec<f64>,
    /// `insufficient[L - 1]` is set when the series is shorter than `10·k^L`.
    pub insufficient: Vec<bool>,
}

impl BlockEntropies {
    pub fn h(&self, l: usize) -> f64 {
        if l == 0 {
            0.0
        } else {
            self.bits[l - 1]
        }
    }

    pub fn l_max(&self) -> usize {
        self.bits.len()
    }
}

pub fn block_entropy(s: &SymbolizedSeries, l_max: usize) -> BlockEntropies {
    let n = s.len();
    let mut bits = Vec::with_capacity(l_max);
    let mut insufficient = Vec::with_capacity(l_max);
    for l in 1..=l_max {
        let needed = (s.k as f64).powi(l as i32) * 10.0;
        insufficient.push((n as f64) < needed);
        if n < l {
            bits.push(0.0);
            continue;
        }
        let mut counts: HashMap<&[usize], usize> = HashMap::new();
        for w in s.symbols.windows(l) {
            *counts.entry(w).or_default() += 1;
        }
        bits.push(shannon_bits(counts.into_values(), n - l + 1));
    }
    BlockEntropies { bits, insufficient }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcessEntropy {
    /// `ĥ = H(L_max) − H(L_max − 1)`, floored at 0.
    pub rate_bits: f64,
    /// `E = H(L_max) − L_max·ĥ`, floored at 0.
    pub excess_bits: f64,
}

pub fn excess_from_blocks(h: &BlockEntropies) -> ExcessEntropy {
    let l = h.l_max();
    if l == 0 {
        return ExcessEntropy { rate_bits: 0.0, excess_bits: 0.0 };
    }
    let rate = (h.h(l) - h.h(l - 1)).max(0.0);
    let excess = (h.h(l) - l as f64 * rate).max(0.0);
    ExcessEntropy { rate_bits: rate, excess_bits: excess }
}

pub fn excess_entropy(s: &SymbolizedSeries, l_max: usize) -> ExcessEntropy {
    excess_from_blocks(&block_entropy(s, l_max))
}

/// Single-symbol Shannon entropy in bits.
pub fn shannon_entropy(s: &SymbolizedSeries) -> f64 {
    let mut counts = vec![0usize; s.k];
    for &v in &s.symbols {
        counts[v] += 1;
    }
    shannon_bits(counts.into_iter(), s.len())
}

/// Normalized entropy times disequilibrium `Σ (p_i − 1/k)²`.
pub fn lmc_from_probabilities(p: &[f64]) -> f64 {
    let k = p.len() as f64;
    let h: f64 = p.iter().filter(|&&q| q > 0.0).map(|&q| -q * q.log2()).sum();
    let h_norm = (h / k.log2()).max(0.0);
    let d: f64 = p.iter().map(|q| (q - 1.0 / k).powi(2)).sum();
    h_norm * d
}

pub fn lmc_complexity(s: &SymbolizedSeries) -> f64 {
    lmc_from_probabilities(&s.frequencies())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn series(symbols: Vec<usize>, k: usize) -> SymbolizedSeries {
        SymbolizedSeries::from_symbols(symbols, k).unwrap()
    }

    #[test]
    fn fair_coin_blocks() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let s = series((0..200_000).map(|_| rng.random_range(0..2)).collect(), 2);
        let h = block_entropy(&s, 3);
        for l in 1..=3 {
            assert!((h.h(l) - l as f64).abs() < 0.02, "H({l}) = {}", h.h(l));
        }
        assert!(h.insufficient.iter().all(|&f| !f));
        assert!(excess_entropy(&s, 3).excess_bits < 0.05);
    }

    #[test]
    fn period_two() {
        let s = series((0..10_000).map(|i| i % 2).collect(), 2);
        let h = block_entropy(&s, 8);
        for l in 1..=8 {
            assert!((h.h(l) - 1.0).abs() < 1e-6);
        }
        let e = excess_entropy(&s, 8);
        assert!(e.rate_bits < 1e-6);
        assert!((e.excess_bits - 1.0).abs() < 1e-5);
    }

    #[test]
    fn constant_has_no_entropy() {
        let s = series(vec![1; 500], 4);
        let h = block_entropy(&s, 4);
        assert!(h.bits.iter().all(|&v| v == 0.0));
        assert_eq!(excess_entropy(&s, 4).excess_bits, 0.0);
        assert_eq!(lmc_complexity(&s), 0.0);
    }

    #[test]
    fn short_series_flagged() {
        let s = series((0..100).map(|i| i % 4).collect(), 4);
        let h = block_entropy(&s, 3);
        assert_eq!(h.insufficient, vec![false, true, true]);
    }

    #[test]
    fn lmc_values() {
        assert_eq!(lmc_from_probabilities(&[0.25; 4]), 0.0);
        assert_eq!(lmc_from_probabilities(&[1.0, 0.0, 0.0]), 0.0);
        // H(0.9, 0.1) and 2·0.4² by hand
        let h = -(0.9f64 * 0.9f64.log2() + 0.1 * 0.1f64.log2());
        assert!((h - 0.4690).abs() < 5e-5);
        let c = lmc_from_probabilities(&[0.9, 0.1]);
        assert!((c - h * 0.32).abs() < 1e-15);
        assert!((c - 0.15008).abs() < 5e-5);
    }
}
