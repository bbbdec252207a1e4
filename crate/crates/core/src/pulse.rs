//! Root-raised-cosine pulses and their folded spectra.

use crate::error::{invalid, FtnError, Result};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Relative distance (in units of T) below which a removable singularity is
/// replaced by its limit.
const SINGULAR_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RrcPulse {
    beta: f64,
    period: f64,
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

impl RrcPulse {
    pub fn new(beta: f64, period: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(invalid("beta", beta, "0 <= beta <= 1"));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(invalid("T", period, "finite and > 0"));
        }
        Ok(Self { beta, period })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Symbol period T in seconds.
    pub fn period(&self) -> f64 {
        self.period
    }

    /// One-sided bandwidth (1 + beta) / (2T).
    pub fn band_edge(&self) -> f64 {
        (1.0 + self.beta) / (2.0 * self.period)
    }

    /// Unit-energy RRC pulse p(t).
    pub fn time(&self, t: f64) -> f64 {
        let tt = self.period;
        let b = self.beta;
        let x = t / tt;
        let norm = 1.0 / tt.sqrt();
        if x.abs() < SINGULAR_EPS {
            return norm * (1.0 - b + 4.0 * b / PI);
        }
        if b > 0.0 && (x.abs() - 0.25 / b).abs() < SINGULAR_EPS {
            let a = PI / (4.0 * b);
            return norm
                * b
                * FRAC_1_SQRT_2
                * ((1.0 + 2.0 / PI) * a.sin() + (1.0 - 2.0 / PI) * a.cos());
        }
        let num = (PI * x * (1.0 - b)).sin() + 4.0 * b * x * (PI * x * (1.0 + b)).cos();
        let den = PI * x * (1.0 - (4.0 * b * x).powi(2));
        norm * num / den
    }

    /// Raised-cosine autocorrelation g(t) = (p * p~)(t), with g(0) = 1.
    pub fn autocorr(&self, t: f64) -> f64 {
        let x = t / self.period;
        let b = self.beta;
        if b > 0.0 && (x.abs() - 0.5 / b).abs() < SINGULAR_EPS {
            return 0.25 * PI * sinc(0.5 / b);
        }
        sinc(x) * (PI * b * x).cos() / (1.0 - (2.0 * b * x).powi(2))
    }

    /// Raised-cosine spectrum G(f), in seconds.
    pub fn spectrum(&self, f: f64) -> f64 {
        let tt = self.period;
        let b = self.beta;
        let af = f.abs();
        let f1 = (1.0 - b) / (2.0 * tt);
        let f2 = (1.0 + b) / (2.0 * tt);
        if b == 0.0 && af == f1 {
            // Midpoint value at the jump of the ideal low-pass spectrum.
            0.5 * tt
        } else if af <= f1 {
            tt
        } else if af <= f2 {
            0.5 * tt * (1.0 + (PI * tt / b * (af - f1)).cos())
        } else {
            0.0
        }
    }

    /// Closed-form antiderivative of G from 0 to f (odd in f).
    fn spectrum_primitive(&self, f: f64) -> f64 {
        let tt = self.period;
        let b = self.beta;
        let af = f.abs();
        let f1 = (1.0 - b) / (2.0 * tt);
        let f2 = (1.0 + b) / (2.0 * tt);
        let v = if af <= f1 {
            tt * af
        } else if af <= f2 {
            let u = af - f1;
            tt * f1 + 0.5 * tt * (u + b / (PI * tt) * (PI * tt / b * u).sin())
        } else {
            0.5
        };
        v.copysign(f)
    }

    /// Exact value of the integral of G over [a, b].
    pub fn spectrum_integral(&self, a: f64, b: f64) -> f64 {
        self.spectrum_primitive(b) - self.spectrum_primitive(a)
    }
}

/// Periodized spectrum G_d on the principal period [-1/2, 1/2].
#[derive(Debug, Clone, PartialEq)]
pub struct FoldedSpectrum {
    pulse: RrcPulse,
    delta: f64,
    half_width: f64,
    images: i64,
}

impl FoldedSpectrum {
    pub fn new(pulse: RrcPulse, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(invalid("delta", delta, "0 < delta <= 1"));
        }
        let half_width = 0.5 * delta * (1.0 + pulse.beta);
        let images = (half_width.ceil() as i64) + 1;
        Ok(Self {
            pulse,
            delta,
            half_width,
            images,
        })
    }

    pub fn pulse(&self) -> &RrcPulse {
        &self.pulse
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// True when the folded copies overlap and the support fills the period.
    pub fn is_full_band(&self) -> bool {
        self.half_width >= 0.5
    }

    /// Support intervals and their total measure |S|.
    pub fn support(&self) -> (Vec<(f64, f64)>, f64) {
        if self.is_full_band() {
            (vec![(-0.5, 0.5)], 1.0)
        } else {
            let h = self.half_width;
            (vec![(-h, h)], 2.0 * h)
        }
    }

    pub fn support_measure(&self) -> f64 {
        self.support().1
    }

    /// G_d(f_n); rejects frequencies outside [-1/2, 1/2].
    pub fn eval(&self, f_n: f64) -> Result<f64> {
        if !(f_n.abs() <= 0.5) {
            return Err(FtnError::OutOfPeriod(f_n));
        }
        Ok(self.eval_unchecked(f_n))
    }

    pub(crate) fn eval_unchecked(&self, f_n: f64) -> f64 {
        let dt = self.delta * self.pulse.period;
        let mut s = 0.0;
        for m in -self.images..=self.images {
            s += self.pulse.spectrum((f_n - m as f64) / dt);
        }
        s / dt
    }

    /// Points in [-1/2, 1/2] where G_d or its derivative has a kink, sorted,
    /// including both period ends.
    pub fn breakpoints(&self) -> Vec<f64> {
        let b = self.pulse.beta;
        let inner = 0.5 * self.delta * (1.0 - b);
        let outer = self.half_width;
        let mut pts = vec![-0.5, 0.5];
        for m in -self.images..=self.images {
            let c = m as f64;
            for p in [c - outer, c - inner, c + inner, c + outer] {
                if p > -0.5 && p < 0.5 {
                    pts.push(p);
                }
            }
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        pts
    }

    /// Exact integral of G_d over [a, b] within the principal period.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let dt = self.delta * self.pulse.period;
        let mut s = 0.0;
        for m in -self.images..=self.images {
            let c = m as f64;
            s += self.pulse.spectrum_integral((a - c) / dt, (b - c) / dt);
        }
        s
    }
}
