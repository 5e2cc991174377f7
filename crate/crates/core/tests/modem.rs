use chaoscomm::modem::{
    channel_apply, demodulate, frame_energy, modulate, q_function, replica, BerSweep, ChannelSpec, ChipKind,
    ChipStream, LogisticChips, Scheme, SignChips,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bits(n: usize, seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random()).collect()
}

fn erfc_series(x: f64) -> f64 {
    // continued fraction for large x, Taylor series below 2
    if x < 2.0 {
        let mut sum = 0.0;
        let mut term = x;
        let mut n = 0.0;
        while term.abs() > 1e-18 {
            sum += term / (2.0 * n + 1.0);
            n += 1.0;
            term *= -x * x / n;
        }
        1.0 - 2.0 / std::f64::consts::PI.sqrt() * sum
    } else {
        let mut f = 0.0;
        for k in (1..400).rev() {
            f = k as f64 / 2.0 / (x + f);
        }
        (-x * x).exp() / std::f64::consts::PI.sqrt() / (x + f)
    }
}

#[test]
fn q_function_matches_series() {
    for k in 0..=40 {
        let x = k as f64 * 0.15;
        let want = 0.5 * erfc_series(x / 2f64.sqrt());
        assert!(((q_function(x) - want) / want).abs() < 1e-9, "x {x}");
    }
}

#[test]
fn bpsk_awgn_tracks_theory() {
    let curve = BerSweep {
        scheme: Scheme::Bpsk,
        channel: ChannelSpec::awgn(0.0),
        ebn0_grid: vec![1.0, 3.0, 5.0],
        spreading: 8,
        bits_per_point: 50_000,
        seed: 5,
        chips: ChipKind::Logistic,
    }
    .run()
    .unwrap();
    for p in &curve.points {
        let theory = q_function((2.0 * 10f64.powf(p.ebn0_db / 10.0)).sqrt());
        assert!((p.ber - theory).abs() < 3.0 * p.standard_error(), "{p:?} vs {theory}");
    }
}

#[test]
fn dcsk_trails_bpsk_in_awgn() {
    let run = |scheme, spreading| {
        BerSweep {
            scheme,
            channel: ChannelSpec::awgn(0.0),
            ebn0_grid: vec![8.0],
            spreading,
            bits_per_point: 20_000,
            seed: 6,
            chips: ChipKind::Logistic,
        }
        .run()
        .unwrap()
        .points[0]
    };
    let dcsk = run(Scheme::Dcsk, 128);
    let bpsk = run(Scheme::Bpsk, 1);
    assert!(dcsk.ci_lo > bpsk.ci_hi, "{dcsk:?} {bpsk:?}");
}

#[test]
fn ber_falls_with_snr() {
    for scheme in [Scheme::Csk, Scheme::Dcsk] {
        let curve = BerSweep {
            scheme,
            channel: ChannelSpec::awgn(0.0),
            ebn0_grid: vec![0.0, 5.0, 10.0, 15.0],
            spreading: 32,
            bits_per_point: 20_000,
            seed: 2,
            chips: ChipKind::Logistic,
        }
        .run()
        .unwrap();
        for w in curve.points.windows(2) {
            assert!(w[1].ber <= w[0].ber, "{scheme}: {:?}", curve.points);
        }
    }
}

#[test]
fn csk_with_sign_chips_is_spread_bpsk() {
    let b = bits(4000, 1);
    let spec = ChannelSpec::awgn(2.0);
    let decode = |scheme| {
        let frames = modulate(&b, scheme, 16, &mut SignChips::new(3)).unwrap();
        let y = channel_apply(&frames, &spec, 9);
        demodulate(&y, scheme, 16, Some(&replica(&frames))).unwrap()
    };
    assert_eq!(decode(Scheme::Csk), decode(Scheme::Bpsk));
}

#[test]
fn mackey_glass_chips_work_end_to_end() {
    let curve = BerSweep {
        scheme: Scheme::Dcsk,
        channel: ChannelSpec::awgn(0.0),
        ebn0_grid: vec![12.0],
        spreading: 64,
        bits_per_point: 10_000,
        seed: 1,
        chips: ChipKind::MackeyGlass,
    }
    .run()
    .unwrap();
    assert!(curve.points[0].ber < 0.1, "{:?}", curve.points);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn frames_carry_spreading_units_of_energy(seed in 0u64..500, half in 1usize..64, scheme_ix in 0usize..3) {
        let scheme = [Scheme::Bpsk, Scheme::Csk, Scheme::Dcsk][scheme_ix];
        let frames = modulate(&bits(20, seed), scheme, 2 * half, &mut LogisticChips::new(seed)).unwrap();
        for f in &frames {
            prop_assert!((frame_energy(f) - 1.0).abs() < 1e-12);
            prop_assert_eq!(f.chips.len(), 2 * half);
        }
    }

    #[test]
    fn dcsk_decisions_ignore_channel_sign(seed in 0u64..500, ebn0 in 0.0f64..12.0) {
        let b = bits(200, seed);
        let frames = modulate(&b, Scheme::Dcsk, 32, &mut LogisticChips::new(seed)).unwrap();
        let y = channel_apply(&frames, &ChannelSpec::awgn(ebn0), seed);
        let flipped: Vec<f64> = y.iter().map(|v| -v).collect();
        prop_assert_eq!(
            demodulate(&y, Scheme::Dcsk, 32, None).unwrap(),
            demodulate(&flipped, Scheme::Dcsk, 32, None).unwrap()
        );
    }

    #[test]
    fn noiseless_links_are_error_free(seed in 0u64..500, scheme_ix in 0usize..3) {
        let scheme = [Scheme::Bpsk, Scheme::Csk, Scheme::Dcsk][scheme_ix];
        let b = bits(100, seed);
        let frames = modulate(&b, scheme, 16, &mut LogisticChips::new(seed)).unwrap();
        let y = channel_apply(&frames, &ChannelSpec::awgn(300.0), seed);
        prop_assert_eq!(demodulate(&y, scheme, 16, Some(&replica(&frames))).unwrap(), b);
    }

    #[test]
    fn sweeps_are_reproducible(seed in 0u64..50) {
        let sweep = BerSweep {
            scheme: Scheme::Dcsk,
            channel: ChannelSpec::severe(0.0),
            ebn0_grid: vec![6.0],
            spreading: 16,
            bits_per_point: 10_000,
            seed,
            chips: ChipKind::Logistic,
        };
        prop_assert_eq!(sweep.run().unwrap(), sweep.run().unwrap());
    }
}

#[test]
fn chip_stream_segments_concatenate() {
    let mut a = LogisticChips::new(4);
    let mut b = LogisticChips::new(4);
    let mut joined = a.segment(10);
    joined.extend(a.segment(6));
    assert_eq!(joined, b.segment(16));
}
