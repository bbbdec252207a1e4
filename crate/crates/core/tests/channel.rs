use ftn_core::channel::{ChannelSpectrum, CMatrix, FlatMimoChannel, Tap, TappedDelayChannel};
use ftn_core::numerics::RandomSource;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn flat_gain_variance() {
    let mut src = RandomSource::new(1, 0);
    let n = 100_000;
    let mut s = 0.0;
    for _ in 0..n {
        let h = FlatMimoChannel::sample(1, 1, &mut src).unwrap();
        s += h.matrix()[(0, 0)].norm_sqr();
    }
    let m = s / n as f64;
    assert!((0.98..=1.02).contains(&m), "{m}");

    let mut s = 0.0;
    let mut cnt = 0;
    for _ in 0..25_000 {
        let h = FlatMimoChannel::sample(2, 2, &mut src).unwrap();
        for z in h.matrix().iter() {
            s += z.norm_sqr();
            cnt += 1;
        }
    }
    let m = s / cnt as f64;
    assert!((m - 0.5).abs() < 0.01, "{m}");
}

#[test]
fn sampling_is_deterministic() {
    let a = FlatMimoChannel::sample(2, 3, &mut RandomSource::new(9, 4)).unwrap();
    let b = FlatMimoChannel::sample(2, 3, &mut RandomSource::new(9, 4)).unwrap();
    assert_eq!(a, b);
    let a = TappedDelayChannel::sample(2, 2, 20, 0.02, &mut RandomSource::new(9, 4)).unwrap();
    let b = TappedDelayChannel::sample(2, 2, 20, 0.02, &mut RandomSource::new(9, 4)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn tapped_delay_statistics() {
    let mut src = RandomSource::new(2, 0);
    let one = TappedDelayChannel::sample(2, 2, 1, 0.02, &mut src).unwrap();
    assert_eq!(one.taps().len(), 1);

    let draws = 10_000;
    let mut s = 0.0;
    for _ in 0..draws {
        let ch = TappedDelayChannel::sample(2, 2, 20, 0.02, &mut src).unwrap();
        let d: Vec<f64> = ch.taps().iter().map(|t| t.delay).collect();
        assert!(d.windows(2).all(|w| w[0] < w[1]));
        assert!(d.iter().all(|&x| (0.0..0.02).contains(&x)));
        // Per-entry total gain summed over taps.
        s += ch.taps().iter().map(|t| t.gains[(0, 0)].norm_sqr()).sum::<f64>();
    }
    let m = s / draws as f64;
    assert!((m - 0.5).abs() < 0.015, "{m}");
}

#[test]
fn eigenmodes_sorted_and_nonnegative() {
    let mut src = RandomSource::new(3, 0);
    for i in 0..1000 {
        let (k, l) = (1 + i % 4, 1 + (i / 4) % 4);
        let t = FlatMimoChannel::sample(k, l, &mut src).unwrap().eigenmodes().unwrap();
        assert_eq!(t.len(), k);
        assert!(t.windows(2).all(|w| w[0] >= w[1]));
        assert!(t.iter().all(|&x| x >= 0.0));
    }
}

#[test]
fn single_tap_reduces_to_flat() {
    let mut src = RandomSource::new(4, 0);
    let flat = FlatMimoChannel::sample(2, 2, &mut src).unwrap();
    let spec = ChannelSpectrum::new(TappedDelayChannel::from_flat(&flat), 0.7, 0.01).unwrap();
    let tau = flat.eigenmodes().unwrap();
    for i in 0..=64 {
        let f = -0.5 + i as f64 / 64.0;
        assert_eq!(spec.response(f), *flat.matrix());
        let t = spec.eigenmodes(f).unwrap();
        for (a, b) in t.iter().zip(&tau) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn two_tap_phasor() {
    let (delta, period) = (0.5, 0.01);
    let dt = delta * period;
    let g = CMatrix::from_element(1, 1, Complex64::new(0.8, -0.3));
    let taps = vec![
        Tap { delay: 0.0, gains: g.clone() },
        Tap { delay: dt / 2.0, gains: g.clone() },
    ];
    let spec = ChannelSpectrum::new(TappedDelayChannel::new(taps).unwrap(), delta, period).unwrap();
    for f in [0.5, 0.25, -0.1, 0.0] {
        // 1 + exp(-j π f) by hand.
        let (re, im) = (1.0 + (PI * f).cos(), -(PI * f).sin());
        let expect = g[(0, 0)].norm() * (re * re + im * im).sqrt();
        assert!((spec.response(f)[(0, 0)].norm() - expect).abs() < 1e-14);
    }
    assert!(spec.response(1.0)[(0, 0)].norm() < 1e-15);
}

#[test]
fn spectrum_continuity_bound() {
    let mut src = RandomSource::new(6, 0);
    for _ in 0..5 {
        let ch = TappedDelayChannel::sample(2, 3, 20, 0.02, &mut src).unwrap();
        let bound: f64 = ch
            .taps()
            .iter()
            .map(|t| t.gains.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .sum::<f64>()
            .powi(2);
        let spec = ChannelSpectrum::new(ch, 0.6, 0.01).unwrap();
        for i in 0..2048 {
            let f = -0.5 + (i as f64 + 0.5) / 2048.0;
            let t = spec.eigenmodes(f).unwrap();
            assert_eq!(t.len(), 2);
            for x in t {
                assert!(x.is_finite() && x >= 0.0 && x <= bound * (1.0 + 1e-12));
            }
        }
    }
}

proptest! {
    #[test]
    fn gram_trace_identity(seed in 0u64..1000, k in 1usize..4, l in 1usize..4, f in -0.5f64..0.5) {
        let ch = TappedDelayChannel::sample(k, l, 5, 0.02, &mut RandomSource::new(seed, 0)).unwrap();
        let spec = ChannelSpectrum::new(ch, 0.8, 0.01).unwrap();
        let h = spec.response(f);
        let z = spec.gram(f);
        let tr: f64 = (0..k).map(|i| z[(i, i)].re).sum();
        let fro: f64 = h.iter().map(|x| x.norm_sqr()).sum();
        prop_assert!((tr - fro).abs() < 1e-12 * fro.max(1.0));
    }
}
