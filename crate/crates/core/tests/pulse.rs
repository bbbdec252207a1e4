use ftn_core::numerics::{integrate, RandomSource, Quadrature};
use ftn_core::pulse::{FoldedSpectrum, RrcPulse};
use proptest::prelude::*;
use std::f64::consts::PI;

fn rrc(beta: f64, t: f64) -> RrcPulse {
    RrcPulse::new(beta, t).unwrap()
}

/// Plain composite Simpson rule, kept separate from the library quadrature.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn unit_energy() {
    for beta in [0.25, 0.5, 1.0] {
        let p = rrc(beta, 1.0);
        // Offset grid keeps the nodes off the removable singularities.
        let e = simpson(|t| p.time(t + 1e-7).powi(2), -2000.0, 2000.0, 4_000_000);
        assert!((e - 1.0).abs() < 1e-8, "beta {beta}: {e}");
    }
}

#[test]
fn energy_outside_forty_symbols_is_the_tail() {
    // p(t) ~ -cos(pi (1 + beta) t) / (4 pi beta t^2) for large t.
    let q = Quadrature::new(800, 16).unwrap();
    for beta in [0.25, 0.5, 1.0] {
        let p = rrc(beta, 1.0);
        let e = integrate(|t| p.time(t).powi(2), -40.0, 40.0, &q).unwrap();
        let tail = 1.0 / (16.0 * PI * PI * beta * beta * 3.0 * 40f64.powi(3));
        assert!((1.0 - e - tail).abs() < 0.05 * tail, "beta {beta}: {}", 1.0 - e);
    }
}

#[test]
fn time_domain_limits() {
    for beta in [0.2, 0.35, 0.5, 0.9] {
        let p = rrc(beta, 1.0);
        let t0 = 1.0 / (4.0 * beta);
        let two_sided = 0.5 * (p.time(t0 - 1e-6) + p.time(t0 + 1e-6));
        assert!((p.time(t0) - two_sided).abs() < 1e-8);
        assert!((p.time(-t0) - two_sided).abs() < 1e-8);
        let z = 0.5 * (p.time(-1e-6) + p.time(1e-6));
        assert!((p.time(0.0) - z).abs() < 1e-8);
    }
}

#[test]
fn autocorrelation_properties() {
    let p = rrc(0.5, 1.0);
    assert_eq!(p.autocorr(0.0), 1.0);
    for n in 1..50 {
        assert!(p.autocorr(n as f64).abs() < 1e-12);
        assert!(p.autocorr(-(n as f64)).abs() < 1e-12);
    }
    let p = rrc(0.35, 1.0);
    let t0 = 1.0 / 0.7;
    let x = 1.0 / 0.7;
    let limit = 0.25 * PI * (PI * x).sin() / (PI * x);
    let two_sided = 0.5 * (p.autocorr(t0 - 1e-6) + p.autocorr(t0 + 1e-6));
    assert!((two_sided - limit).abs() < 1e-8);
    assert!((p.autocorr(t0) - limit).abs() < 1e-15);
}

#[test]
fn autocorrelation_is_pulse_convolution() {
    let p = rrc(0.5, 1.0);
    for tau in [0.3, 1.0, 1.7, 2.5] {
        let c = simpson(|t| p.time(t + 1e-7) * p.time(t + 1e-7 - tau), -60.0, 60.0, 600_000);
        assert!((c - p.autocorr(tau)).abs() < 1e-5, "tau {tau}: {c} vs {}", p.autocorr(tau));
    }
}

#[test]
fn spectrum_examples() {
    for beta in [0.1, 0.5, 1.0] {
        let p = rrc(beta, 2.0);
        assert_eq!(p.spectrum(0.0), 2.0);
        assert_eq!(p.spectrum((1.0 + beta) / 4.0), 0.0);
        assert!((p.spectrum(0.25) - 1.0).abs() < 1e-14);
        let total = simpson(|f| p.spectrum(f), -1.0, 1.0, 200_000);
        assert!((total - 1.0).abs() < 1e-9);
    }
}

#[test]
fn folded_examples() {
    let fs = FoldedSpectrum::new(rrc(0.0, 0.01), 1.0).unwrap();
    for f in [-0.5, -0.3, 0.0, 0.2, 0.49] {
        assert!((fs.eval(f).unwrap() - 1.0).abs() < 1e-12);
    }
    for delta in [0.1, 0.3, 0.5, 2.0 / 3.0, 0.8, 1.0] {
        for beta in [0.0, 0.25, 0.5, 0.9] {
            let fs = FoldedSpectrum::new(rrc(beta, 0.01), delta).unwrap();
            assert!((fs.eval(0.0).unwrap() - 1.0 / delta).abs() < 1e-9);
        }
    }
    for beta in [0.25, 0.5, 1.0] {
        let fs = FoldedSpectrum::new(rrc(beta, 0.01), 1.0 / (1.0 + beta)).unwrap();
        assert!(fs.eval(0.5).unwrap().abs() < 1e-12);
        assert!(fs.eval(-0.5).unwrap().abs() < 1e-12);
    }
}

#[test]
fn support_examples() {
    let (iv, m) = FoldedSpectrum::new(rrc(0.5, 0.01), 0.5).unwrap().support();
    assert_eq!(iv, vec![(-0.375, 0.375)]);
    assert!((m - 0.75).abs() < 1e-15);
    let (iv, m) = FoldedSpectrum::new(rrc(0.5, 0.01), 0.8).unwrap().support();
    assert_eq!(iv, vec![(-0.5, 0.5)]);
    assert_eq!(m, 1.0);
    assert_eq!(FoldedSpectrum::new(rrc(0.0, 0.01), 1.0).unwrap().support_measure(), 1.0);
}

#[test]
fn folded_integrates_to_one() {
    for delta in [0.1, 0.3, 0.5, 2.0 / 3.0, 0.8, 1.0] {
        for beta in [0.0, 0.25, 0.5, 1.0] {
            let fs = FoldedSpectrum::new(rrc(beta, 0.01), delta).unwrap();
            let v = simpson(|f| fs.eval(f).unwrap(), -0.5, 0.5, 2_000_000);
            assert!((v - 1.0).abs() < 1e-9 || beta == 0.0 && (v - 1.0).abs() < 1e-5, "{delta} {beta}: {v}");
            assert!((fs.integral(-0.5, 0.5) - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn folded_vanishes_off_support() {
    for delta in [0.1, 0.3, 0.5] {
        let fs = FoldedSpectrum::new(rrc(0.5, 0.01), delta).unwrap();
        let (iv, _) = fs.support();
        let (lo, hi) = iv[0];
        for i in 0..=200 {
            let f = -0.5 + i as f64 / 200.0;
            if f < lo || f > hi {
                assert!(fs.eval(f).unwrap().abs() < 1e-12);
            }
        }
    }
}

#[test]
fn poisson_sampling_consistency() {
    let mut src = RandomSource::new(11, 0);
    for delta in [0.3, 0.5, 0.8, 1.0] {
        for beta in [0.25, 0.5, 1.0] {
            let p = rrc(beta, 0.01);
            let fs = FoldedSpectrum::new(p, delta).unwrap();
            let dt = delta * 0.01;
            let g: Vec<f64> = (0..=2000).map(|k| p.autocorr(k as f64 * dt)).collect();
            for _ in 0..64 {
                let f = src.uniform(-0.5, 0.5);
                let mut s = g[0];
                for (k, gk) in g.iter().enumerate().skip(1) {
                    s += 2.0 * gk * (2.0 * PI * f * k as f64).cos();
                }
                let direct = fs.eval(f).unwrap();
                assert!((s - direct).abs() < 1e-4, "{delta} {beta} f={f}: {s} vs {direct}");
            }
        }
    }
}

proptest! {
    #[test]
    fn folded_even_and_nonnegative(delta in 0.05f64..=1.0, beta in 0.0f64..=1.0, f in -0.5f64..=0.5) {
        let fs = FoldedSpectrum::new(rrc(beta, 0.01), delta).unwrap();
        let a = fs.eval(f).unwrap();
        let b = fs.eval(-f).unwrap();
        prop_assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
        prop_assert!(a >= 0.0);
    }

    #[test]
    fn spectrum_bounded(beta in 0.0f64..=1.0, f in -200.0f64..200.0) {
        let p = rrc(beta, 0.01);
        let g = p.spectrum(f);
        prop_assert!((0.0..=0.01).contains(&g));
        if f.abs() > p.band_edge() {
            prop_assert_eq!(g, 0.0);
        }
    }
}
