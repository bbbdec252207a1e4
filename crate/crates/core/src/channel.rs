//! Random MIMO channels: flat Rayleigh matrices and tapped-delay lines.

use crate::error::{invalid, FtnError, Result};
use crate::numerics::{gaussian_pair, hermitian_eig, RandomSource};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt::Write as _;

pub type CMatrix = DMatrix<Complex64>;

/// Eigenvalues at or above this (negative) floor are clamped to zero.
const CLAMP_TOL: f64 = 1e-12;

fn cn_matrix(rows: usize, cols: usize, variance: f64, src: &mut RandomSource) -> CMatrix {
    let s = (0.5 * variance).sqrt();
    let mut m = CMatrix::zeros(rows, cols);
    // Column-major fill keeps the draw order tied to the storage order.
    for c in 0..cols {
        for r in 0..rows {
            let (x, y) = gaussian_pair(src);
            m[(r, c)] = Complex64::new(s * x, s * y);
        }
    }
    m
}

fn clamp_modes(values: Vec<f64>) -> Result<Vec<f64>> {
    values
        .into_iter()
        .map(|v| {
            if v >= 0.0 {
                Ok(v)
            } else if v >= -CLAMP_TOL {
                Ok(0.0)
            } else {
                Err(invalid("eigenvalue", v, ">= -1e-12 for a Gram matrix"))
            }
        })
        .collect()
}

/// Flat-fading L×K channel H.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatMimoChannel {
    h: CMatrix,
}

impl FlatMimoChannel {
    pub fn new(h: CMatrix) -> Result<Self> {
        if h.nrows() == 0 || h.ncols() == 0 {
            return Err(invalid("H", format!("{}x{}", h.nrows(), h.ncols()), "non-empty"));
        }
        if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("H", "non-finite entry", "finite entries"));
        }
        Ok(Self { h })
    }

    /// Identity channel of size n×n.
    pub fn identity(n: usize) -> Self {
        Self {
            h: CMatrix::identity(n, n),
        }
    }

    /// I.i.d. CN(0, 1/K) entries.
    pub fn sample(k: usize, l: usize, src: &mut RandomSource) -> Result<Self> {
        if k == 0 || l == 0 {
            return Err(invalid("K, L", format!("{k}, {l}"), ">= 1"));
        }
        Ok(Self {
            h: cn_matrix(l, k, 1.0 / k as f64, src),
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.h
    }

    pub fn tx(&self) -> usize {
        self.h.ncols()
    }

    pub fn rx(&self) -> usize {
        self.h.nrows()
    }

    /// W = H^H H.
    pub fn gram(&self) -> CMatrix {
        self.h.adjoint() * &self.h
    }

    /// Eigenvalues of W, descending, clamped at zero.
    pub fn eigenmodes(&self) -> Result<Vec<f64>> {
        clamp_modes(hermitian_eig(&self.gram())?.values)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tap {
    pub delay: f64,
    pub gains: CMatrix,
}

/// Tapped-delay line h(t) = sum_j h^j Δ(t - d_j).
#[derive(Debug, Clone, PartialEq)]
pub struct TappedDelayChannel {
    taps: Vec<Tap>,
}

impl TappedDelayChannel {
    pub fn new(taps: Vec<Tap>) -> Result<Self> {
        let first = taps
            .first()
            .ok_or_else(|| invalid("J", 0, ">= 1"))?;
        let (l, k) = first.gains.shape();
        if l == 0 || k == 0 {
            return Err(invalid("tap gains", format!("{l}x{k}"), "non-empty"));
        }
        for (j, tap) in taps.iter().enumerate() {
            if tap.gains.shape() != (l, k) {
                return Err(FtnError::DimensionMismatch(format!(
                    "tap {j} is {:?}, expected {:?}",
                    tap.gains.shape(),
                    (l, k)
                )));
            }
            if !(tap.delay >= 0.0) || !tap.delay.is_finite() {
                return Err(invalid("delay", tap.delay, "finite and >= 0"));
            }
            if j > 0 && !(tap.delay > taps[j - 1].delay) {
                return Err(invalid("delay", tap.delay, "strictly increasing"));
            }
        }
        Ok(Self { taps })
    }

    pub fn from_flat(ch: &FlatMimoChannel) -> Self {
        Self {
            taps: vec![Tap {
                delay: 0.0,
                gains: ch.h.clone(),
            }],
        }
    }

    /// J taps with i.i.d. CN(0, 1/(KJ)) gains and sorted uniform delays in [0, D).
    pub fn sample(
        k: usize,
        l: usize,
        j: usize,
        max_delay: f64,
        src: &mut RandomSource,
    ) -> Result<Self> {
        if k == 0 || l == 0 {
            return Err(invalid("K, L", format!("{k}, {l}"), ">= 1"));
        }
        if j == 0 {
            return Err(invalid("J", j, ">= 1"));
        }
        if !(max_delay > 0.0) || !max_delay.is_finite() {
            return Err(invalid("D", max_delay, "finite and > 0"));
        }
        let mut delays: Vec<f64> = (0..j).map(|_| src.uniform(0.0, max_delay)).collect();
        delays.sort_by(f64::total_cmp);
        let var = 1.0 / (k * j) as f64;
        let taps = delays
            .into_iter()
            .map(|delay| Tap {
                delay,
                gains: cn_matrix(l, k, var, src),
            })
            .collect();
        Self::new(taps)
    }

    pub fn taps(&self) -> &[Tap] {
        &self.taps
    }

    pub fn tx(&self) -> usize {
        self.taps[0].gains.ncols()
    }

    pub fn rx(&self) -> usize {
        self.taps[0].gains.nrows()
    }

    /// Writes the taps as `tap,delay,row,col,re,im` CSV lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tap,delay,row,col,re,im\n");
        for (j, tap) in self.taps.iter().enumerate() {
            for r in 0..tap.gains.nrows() {
                for c in 0..tap.gains.ncols() {
                    let z = tap.gains[(r, c)];
                    let _ = writeln!(out, "{j},{:e},{r},{c},{:e},{:e}", tap.delay, z.re, z.im);
                }
            }
        }
        out
    }

    /// Parses the format written by [`TappedDelayChannel::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == "tap,delay,row,col,re,im" => {}
            _ => {
                return Err(FtnError::ChannelFormat {
                    line: 1,
                    reason: "missing header tap,delay,row,col,re,im".into(),
                })
            }
        }
        let mut entries: Vec<(usize, f64, usize, usize, Complex64)> = Vec::new();
        for (i, line) in lines {
            let bad = |reason: &str| FtnError::ChannelFormat {
                line: i + 1,
                reason: reason.to_string(),
            };
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 6 {
                return Err(bad("expected 6 fields"));
            }
            let idx = |s: &str| s.parse::<usize>().map_err(|_| bad("bad index"));
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
            entries.push((
                idx(f[0])?,
                num(f[1])?,
                idx(f[2])?,
                idx(f[3])?,
                Complex64::new(num(f[4])?, num(f[5])?),
            ));
        }
        if entries.is_empty() {
            return Err(FtnError::ChannelFormat {
                line: 1,
                reason: "no taps".into(),
            });
        }
        let j = entries.iter().map(|e| e.0).max().unwrap_or(0) + 1;
        let l = entries.iter().map(|e| e.2).max().unwrap_or(0) + 1;
        let k = entries.iter().map(|e| e.3).max().unwrap_or(0) + 1;
        let mut delays = vec![None; j];
        let mut gains = vec![CMatrix::zeros(l, k); j];
        let mut seen = vec![false; j * l * k];
        for (n, &(t, d, r, c, z)) in entries.iter().enumerate() {
            match delays[t] {
                None => delays[t] = Some(d),
                Some(prev) if prev != d => {
                    return Err(FtnError::ChannelFormat {
                        line: n + 2,
                        reason: format!("inconsistent delay for tap {t}"),
                    })
                }
                _ => {}
            }
            let slot = (t * l + r) * k + c;
            if seen[slot] {
                return Err(FtnError::ChannelFormat {
                    line: n + 2,
                    reason: format!("duplicate entry tap {t} ({r}, {c})"),
                });
            }
            seen[slot] = true;
            gains[t][(r, c)] = z;
        }
        if seen.iter().any(|s| !s) {
            return Err(FtnError::ChannelFormat {
                line: 0,
                reason: format!("incomplete {j} x {l} x {k} tap table"),
            });
        }
        let taps = delays
            .into_iter()
            .zip(gains)
            .map(|(d, g)| Tap {
                delay: d.unwrap_or(0.0),
                gains: g,
            })
            .collect();
        Self::new(taps)
    }
}

/// Per-frequency response of a tapped-delay channel under symbol spacing δT.
#[derive(Debug, Clone)]
pub struct ChannelSpectrum {
    channel: TappedDelayChannel,
    spacing: f64,
}

impl ChannelSpectrum {
    pub fn new(channel: TappedDelayChannel, delta: f64, period: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(invalid("delta", delta, "0 < delta <= 1"));
        }
        if !(period > 0.0) {
            return Err(invalid("T", period, "> 0"));
        }
        Ok(Self {
            channel,
            spacing: delta * period,
        })
    }

    pub fn channel(&self) -> &TappedDelayChannel {
        &self.channel
    }

    /// Symbol spacing δT in seconds.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Number of active eigenchannels, min(K, L).
    pub fn modes(&self) -> usize {
        self.channel.tx().min(self.channel.rx())
    }

    /// H~(-f_n) = sum_j h^j exp(-j 2π f_n d_j / (δT)).
    pub fn response(&self, f_n: f64) -> CMatrix {
        let (l, k) = (self.channel.rx(), self.channel.tx());
        let mut h = CMatrix::zeros(l, k);
        for tap in &self.channel.taps {
            let ph = Complex64::from_polar(1.0, -2.0 * PI * f_n * tap.delay / self.spacing);
            h += &tap.gains * ph;
        }
        h
    }

    /// Z~ = H~^H H~ (K×K).
    pub fn gram(&self, f_n: f64) -> CMatrix {
        let h = self.response(f_n);
        h.adjoint() * h
    }

    /// The min(K, L) largest eigenvalues of Z~(f_n), descending.
    pub fn eigenmodes(&self, f_n: f64) -> Result<Vec<f64>> {
        let mut v = clamp_modes(hermitian_eig(&self.gram(f_n))?.values)?;
        v.truncate(self.modes());
        Ok(v)
    }
}
