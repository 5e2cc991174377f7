use chaoscomm::complexity::{
    block_entropy, delay_embed, excess_entropy, lmc_complexity, lyapunov_max, neural_complexity, shannon_entropy,
    symbolize, Binning, LyapunovConfig, NeuralOptions, SymbolizedSeries,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gaussian_channels(n: usize, samples: usize, mix: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let common: Vec<f64> = (0..samples).map(|_| rng.sample(StandardNormal)).collect();
    (0..n).map(|_| common.iter().map(|c| mix * c + rng.sample::<f64, _>(StandardNormal)).collect()).collect()
}

/// Gaussian neural complexity of an equicorrelated covariance
/// `(1 − r)·I + r·11ᵀ`, written from its eigenvalues.
fn equicorrelated_oracle(n: usize, r: f64) -> f64 {
    let h = |k: usize| {
        let det = (1.0 - r).powi(k as i32 - 1) * (1.0 + (k as f64 - 1.0) * r);
        0.5 * (k as f64 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln() + det.ln()) / 2f64.ln()
    };
    (1..n).map(|k| h(k) - k as f64 / n as f64 * h(n)).sum()
}

#[test]
fn neural_complexity_of_equicorrelated_channels() {
    // mix m gives correlation m² / (1 + m²)
    let ch = gaussian_channels(5, 200_000, 1.0, 3);
    let got = neural_complexity(&ch, &NeuralOptions::default()).unwrap();
    let want = equicorrelated_oracle(5, 0.5);
    assert!(got.exact);
    assert!((got.bits - want).abs() < 0.02, "{} vs {want}", got.bits);
}

#[test]
fn neural_sampling_tracks_enumeration() {
    let ch = gaussian_channels(8, 5000, 0.7, 4);
    let exact = neural_complexity(&ch, &NeuralOptions::default()).unwrap();
    let sampled = neural_complexity(&ch, &NeuralOptions { max_exact_n: 4, subset_samples: 400, seed: 1 }).unwrap();
    assert!(exact.exact && !sampled.exact);
    assert!((exact.bits - sampled.bits).abs() < 0.05 * exact.bits, "{} vs {}", exact.bits, sampled.bits);
}

#[test]
fn neural_complexity_permutation_invariant() {
    let mut ch = gaussian_channels(4, 3000, 0.5, 5);
    let a = neural_complexity(&ch, &NeuralOptions::default()).unwrap().bits;
    ch.swap(0, 3);
    ch.swap(1, 2);
    let b = neural_complexity(&ch, &NeuralOptions::default()).unwrap().bits;
    assert!((a - b).abs() < 1e-9);
}

#[test]
fn lyapunov_is_affine_invariant() {
    let mut x = 0.2;
    let s: Vec<f64> = (0..8000)
        .map(|_| {
            x = 4.0 * x * (1.0 - x);
            x
        })
        .collect();
    let cfg = LyapunovConfig { dim: 2, lag: 1, theiler: 10, fit: (0, 4), reference_stride: 0 };
    let a = lyapunov_max(&s, 1.0, &cfg).unwrap().per_second;
    let t: Vec<f64> = s.iter().map(|v| 3.0 * v - 7.0).collect();
    let b = lyapunov_max(&t, 1.0, &cfg).unwrap().per_second;
    assert!((a - b).abs() < 1e-9, "{a} vs {b}");
}

#[test]
fn lyapunov_scales_with_sample_time() {
    let mut x = 0.2;
    let s: Vec<f64> = (0..8000)
        .map(|_| {
            x = 4.0 * x * (1.0 - x);
            x
        })
        .collect();
    let cfg = LyapunovConfig { dim: 1, lag: 1, theiler: 10, fit: (0, 4), reference_stride: 0 };
    let a = lyapunov_max(&s, 1.0, &cfg).unwrap().per_second;
    let b = lyapunov_max(&s, 0.5, &cfg).unwrap().per_second;
    assert!((b - 2.0 * a).abs() < 1e-9);
}

#[test]
fn iid_noise_has_full_rate_and_little_excess() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let noise: Vec<f64> = (0..200_000).map(|_| rng.random()).collect();
    let s = symbolize(&noise, 4, Binning::Quantile).unwrap();
    let e = excess_entropy(&s, 4);
    assert!((e.rate_bits - 2.0).abs() < 0.01);
    assert!(e.excess_bits < 0.05);
    assert!(lmc_complexity(&s) < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn block_entropy_is_monotone_and_concave(symbols in prop::collection::vec(0usize..3, 500..2000)) {
        let s = SymbolizedSeries::from_symbols(symbols, 3).unwrap();
        let b = block_entropy(&s, 5);
        let h: Vec<f64> = std::iter::once(0.0).chain(b.bits.iter().copied()).collect();
        for l in 1..h.len() {
            prop_assert!(h[l] + 1e-9 >= h[l - 1]);
        }
        // concavity holds up to the overlap bias of a finite sample
        for l in 1..h.len() - 1 {
            prop_assert!(h[l + 1] - h[l] <= h[l] - h[l - 1] + 0.05, "{:?}", h);
        }
    }

    #[test]
    fn entropy_ignores_symbol_names(symbols in prop::collection::vec(0usize..4, 50..500), shift in 1usize..4) {
        let a = SymbolizedSeries::from_symbols(symbols.clone(), 4).unwrap();
        let b = SymbolizedSeries::from_symbols(symbols.iter().map(|s| (s + shift) % 4).collect(), 4).unwrap();
        prop_assert!((shannon_entropy(&a) - shannon_entropy(&b)).abs() < 1e-12);
        prop_assert!((lmc_complexity(&a) - lmc_complexity(&b)).abs() < 1e-12);
        prop_assert!((excess_entropy(&a, 4).excess_bits - excess_entropy(&b, 4).excess_bits).abs() < 1e-12);
    }

    #[test]
    fn quantile_bins_are_balanced(values in prop::collection::vec(-1e3f64..1e3, 400..2000), k in 2usize..8) {
        let s = symbolize(&values, k, Binning::Quantile).unwrap();
        prop_assume!(!s.degenerate);
        let f = s.frequencies();
        let n = values.len() as f64;
        for p in f {
            // ties between distinct samples are measure-zero here
            prop_assert!((p - 1.0 / k as f64).abs() <= 1.0 / n + 1e-12);
        }
    }

    #[test]
    fn embedding_projects_back(signal in prop::collection::vec(-10.0f64..10.0, 50..300), dim in 1usize..6, lag in 1usize..6) {
        prop_assume!(signal.len() > (dim - 1) * lag);
        let e = delay_embed(&signal, dim, lag).unwrap();
        prop_assert_eq!(e.len(), signal.len() - (dim - 1) * lag);
        for i in 0..e.len() {
            for d in 0..dim {
                prop_assert_eq!(e.point(i)[d], signal[i + d * lag]);
            }
        }
    }
}
