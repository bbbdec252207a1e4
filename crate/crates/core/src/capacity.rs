//! Asymptotic MIMO FTN capacity and the four power-allocation schemes.

use crate::channel::ChannelSpectrum;
use crate::error::{invalid, FtnError, Result};
use crate::numerics::{bisect, integrate_checked, Quadrature};
use crate::pulse::{FoldedSpectrum, RrcPulse};
use std::fmt;
use std::str::FromStr;

/// Relative floor of G_d below which reported φ values are clamped.
pub const EPS_G: f64 = 1e-9;
const RATE_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SnrMode {
    TransmitFixed,
    ReceiveFixed,
}

impl fmt::Display for SnrMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SnrMode::TransmitFixed => "tx",
            SnrMode::ReceiveFixed => "rx",
        })
    }
}

impl FromStr for SnrMode {
    type Err = FtnError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tx" | "transmit" | "transmit-fixed" => Ok(SnrMode::TransmitFixed),
            "rx" | "receive" | "receive-fixed" => Ok(SnrMode::ReceiveFixed),
            _ => Err(invalid("snr-mode", s, "one of tx, rx")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrConvention {
    pub mode: SnrMode,
    /// Linear SNR.
    pub value: f64,
    /// Noise PSD σ0².
    pub noise: f64,
}

impl SnrConvention {
    pub fn new(mode: SnrMode, value: f64, noise: f64) -> Result<Self> {
        if !(value > 0.0) || !value.is_finite() {
            return Err(invalid("snr", value, "finite and > 0"));
        }
        if !(noise > 0.0) || !noise.is_finite() {
            return Err(invalid("sigma0^2", noise, "finite and > 0"));
        }
        Ok(Self { mode, value, noise })
    }

    pub fn from_db(mode: SnrMode, db: f64, noise: f64) -> Result<Self> {
        Self::new(mode, 10f64.powf(db / 10.0), noise)
    }

    /// Transmit power P at acceleration δ.
    pub fn power(&self, delta: f64) -> f64 {
        match self.mode {
            SnrMode::TransmitFixed => self.value * self.noise,
            SnrMode::ReceiveFixed => self.value * self.noise / delta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    OsOf,
    SsOf,
    OsSf,
    SsSf,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::OsOf, Scheme::SsOf, Scheme::OsSf, Scheme::SsSf];

    fn spatially_optimal(self) -> bool {
        matches!(self, Scheme::OsOf | Scheme::OsSf)
    }

    fn inverts_spectrum(self) -> bool {
        matches!(self, Scheme::OsOf | Scheme::SsOf)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::OsOf => "OsOf",
            Scheme::SsOf => "SsOf",
            Scheme::OsSf => "OsSf",
            Scheme::SsSf => "SsSf",
        })
    }
}

impl FromStr for Scheme {
    type Err = FtnError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "osof" => Ok(Scheme::OsOf),
            "ssof" => Ok(Scheme::SsOf),
            "ossf" => Ok(Scheme::OsSf),
            "sssf" => Ok(Scheme::SsSf),
            _ => Err(invalid("scheme", s, "one of OsOf, SsOf, OsSf, SsSf")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    AboveThreshold,
    BelowThreshold,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityResult {
    pub bits_per_symbol: f64,
    pub bits_per_s_per_hz: f64,
    pub regime: Regime,
    /// Set when the channel has no usable eigenmode.
    pub degenerate: bool,
}

impl CapacityResult {
    fn new(bits_per_symbol: f64, delta: f64, beta: f64, full_band: bool, degenerate: bool) -> Self {
        Self {
            bits_per_symbol,
            bits_per_s_per_hz: bits_per_symbol / (delta * (1.0 + beta)),
            regime: if full_band {
                Regime::AboveThreshold
            } else {
                Regime::BelowThreshold
            },
            degenerate,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaterFill {
    pub sigma2: Vec<f64>,
    /// Water level ν; zero when degenerate.
    pub level: f64,
    pub degenerate: bool,
}

/// Spatial water-filling σ_k² = (ν - 1/(c τ_k))⁺ with Σ σ_k² = P.
pub fn waterfill_spatial(tau: &[f64], power: f64, gain: f64) -> Result<WaterFill> {
    if !(power > 0.0) || !power.is_finite() {
        return Err(invalid("P", power, "finite and > 0"));
    }
    if !(gain > 0.0) || !gain.is_finite() {
        return Err(invalid("gain scale", gain, "finite and > 0"));
    }
    if let Some(&t) = tau.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        return Err(invalid("tau", t, "finite and >= 0"));
    }
    let mut thresholds: Vec<(f64, usize)> = tau
        .iter()
        .enumerate()
        .filter(|(_, &t)| t > 0.0)
        .map(|(k, &t)| (1.0 / (gain * t), k))
        .collect();
    if thresholds.is_empty() {
        return Ok(WaterFill {
            sigma2: vec![0.0; tau.len()],
            level: 0.0,
            degenerate: true,
        });
    }
    thresholds.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut sum = 0.0;
    let mut level = 0.0;
    for (m, &(th, _)) in thresholds.iter().enumerate() {
        sum += th;
        level = (power + sum) / (m + 1) as f64;
        match thresholds.get(m + 1) {
            Some(&(next, _)) if level > next => continue,
            _ => break,
        }
    }
    let mut sigma2 = vec![0.0; tau.len()];
    for &(th, k) in &thresholds {
        sigma2[k] = (level - th).max(0.0);
    }
    Ok(WaterFill {
        sigma2,
        level,
        degenerate: false,
    })
}

fn check_delta(delta: f64) -> Result<()> {
    if delta == 0.0 {
        return Err(invalid("delta", delta, "delta > 0 (capacity is zero at delta = 0)"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid("delta", delta, "0 < delta <= 1"));
    }
    Ok(())
}

fn check_noise(noise: f64) -> Result<()> {
    if !(noise > 0.0) || !noise.is_finite() {
        return Err(invalid("sigma0^2", noise, "finite and > 0"));
    }
    Ok(())
}

/// Closed-form capacity of a flat channel with eigenmodes `tau`.
pub fn capacity_theorem1(
    power: f64,
    delta: f64,
    beta: f64,
    period: f64,
    noise: f64,
    tau: &[f64],
) -> Result<CapacityResult> {
    check_delta(delta)?;
    check_noise(noise)?;
    let fs = FoldedSpectrum::new(RrcPulse::new(beta, period)?, delta)?;
    let s = fs.support_measure();
    let c = delta * period / (s * noise);
    let wf = waterfill_spatial(tau, power, c)?;
    let bits: f64 = s * wf
        .sigma2
        .iter()
        .zip(tau)
        .map(|(&p, &t)| (c * p * t).ln_1p())
        .sum::<f64>()
        / std::f64::consts::LN_2;
    Ok(CapacityResult::new(bits, delta, beta, fs.is_full_band(), wf.degenerate))
}

/// A reported φ_k(f_n) value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiSample {
    pub value: f64,
    /// True when G_d fell below the clamping floor and the reported value
    /// uses the floor instead.
    pub clamped: bool,
}

/// Power allocation of one scheme over eigenchannels and frequency.
#[derive(Debug, Clone)]
pub struct AllocationSolution {
    pub scheme: Scheme,
    /// Per-eigenchannel powers, summing to P.
    pub sigma2: Vec<f64>,
    /// Spatial water level, absent for uniform spatial schemes.
    pub level: Option<f64>,
    pub degenerate: bool,
    fs: FoldedSpectrum,
    power: f64,
}

impl AllocationSolution {
    pub fn spectrum(&self) -> &FoldedSpectrum {
        &self.fs
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    fn spacing(&self) -> f64 {
        self.fs.delta() * self.fs.pulse().period()
    }

    fn in_support(&self, f_n: f64) -> bool {
        let (iv, _) = self.fs.support();
        iv.iter().any(|&(a, b)| f_n >= a && f_n <= b)
    }

    /// G_d(f_n)·φ_k(f_n), evaluated without dividing by G_d.
    pub fn product(&self, k: usize, f_n: f64) -> f64 {
        if !self.in_support(f_n) {
            return 0.0;
        }
        let dt = self.spacing();
        let s2 = self.sigma2[k];
        if self.scheme.inverts_spectrum() {
            dt * s2 / self.fs.support_measure()
        } else {
            self.fs.eval_unchecked(f_n) * dt * s2
        }
    }

    /// φ_k(f_n) for reporting; inversion schemes clamp G_d at EPS_G·max G_d.
    pub fn phi(&self, k: usize, f_n: f64) -> Result<PhiSample> {
        let g = self.fs.eval(f_n)?;
        if !self.in_support(f_n) {
            return Ok(PhiSample {
                value: 0.0,
                clamped: false,
            });
        }
        if !self.scheme.inverts_spectrum() {
            return Ok(PhiSample {
                value: self.spacing() * self.sigma2[k],
                clamped: false,
            });
        }
        let floor = EPS_G * self.fs.eval_unchecked(0.0);
        let clamped = g < floor;
        Ok(PhiSample {
            value: self.product(k, f_n) / g.max(floor),
            clamped,
        })
    }

    /// Intervals of the support split at the kinks of G_d.
    fn pieces(&self) -> Vec<(f64, f64)> {
        let (iv, _) = self.fs.support();
        let bp = self.fs.breakpoints();
        let mut out = Vec::new();
        for (a, b) in iv {
            let mut pts: Vec<f64> = bp.iter().copied().filter(|&x| x > a && x < b).collect();
            pts.insert(0, a);
            pts.push(b);
            out.extend(pts.windows(2).map(|w| (w[0], w[1])));
        }
        out
    }
}

/// Builds the allocation of `scheme` for eigenmodes `tau` at total power P.
pub fn scheme_spectrum(
    scheme: Scheme,
    power: f64,
    tau: &[f64],
    fs: &FoldedSpectrum,
    noise: f64,
) -> Result<AllocationSolution> {
    check_noise(noise)?;
    if !(power > 0.0) || !power.is_finite() {
        return Err(invalid("P", power, "finite and > 0"));
    }
    if tau.is_empty() {
        return Err(invalid("K", 0, ">= 1"));
    }
    let k = tau.len();
    let dt = fs.delta() * fs.pulse().period();
    let c = dt / (fs.support_measure() * noise);
    let (sigma2, level, degenerate) = if scheme.spatially_optimal() {
        let wf = waterfill_spatial(tau, power, c)?;
        (wf.sigma2, Some(wf.level), wf.degenerate)
    } else {
        (vec![power / k as f64; k], None, tau.iter().all(|&t| t <= 0.0))
    };
    Ok(AllocationSolution {
        scheme,
        sigma2,
        level,
        degenerate,
        fs: fs.clone(),
        power,
    })
}

/// (1/δT)·∫_S Σ_k G_d φ_k df_n, which equals P for every scheme.
pub fn power_integral(sol: &AllocationSolution) -> Result<f64> {
    let q = Quadrature::new(2, 16)?;
    let mut total = 0.0;
    for (a, b) in sol.pieces() {
        for k in 0..sol.sigma2.len() {
            total += integrate_checked(|f| sol.product(k, f), a, b, &q)?.value;
        }
    }
    Ok(total / sol.spacing())
}

/// Rate Σ_k ∫_S log2(1 + G_d φ_k τ_k / σ0²) df_n of an allocation.
pub fn scheme_rate(sol: &AllocationSolution, tau: &[f64], noise: f64) -> Result<CapacityResult> {
    check_noise(noise)?;
    if tau.len() != sol.sigma2.len() {
        return Err(FtnError::DimensionMismatch(format!(
            "{} eigenmodes for {} allocated channels",
            tau.len(),
            sol.sigma2.len()
        )));
    }
    let q = Quadrature::new(4, 16)?;
    let mut bits = 0.0;
    for (a, b) in sol.pieces() {
        for (k, &t) in tau.iter().enumerate() {
            if t <= 0.0 || sol.sigma2[k] <= 0.0 {
                continue;
            }
            let est = integrate_checked(|f| (sol.product(k, f) * t / noise).ln_1p(), a, b, &q)?;
            if est.relative_change > RATE_REL_TOL && est.value.abs() > 1e-300 {
                return Err(FtnError::QuadratureTolerance {
                    achieved: est.relative_change,
                    target: RATE_REL_TOL,
                });
            }
            bits += est.value;
        }
    }
    let fs = &sol.fs;
    Ok(CapacityResult::new(
        bits / std::f64::consts::LN_2,
        fs.delta(),
        fs.pulse().beta(),
        fs.is_full_band(),
        sol.degenerate,
    ))
}

/// Capacity of a frequency-selective channel with a global water level
/// over the eigenmodes τ_i(f_n) on a uniform grid of `grid` points across S.
pub fn fs_capacity(
    spec: &ChannelSpectrum,
    fs: &FoldedSpectrum,
    power: f64,
    noise: f64,
    grid: usize,
) -> Result<CapacityResult> {
    check_noise(noise)?;
    if !(power > 0.0) || !power.is_finite() {
        return Err(invalid("P", power, "finite and > 0"));
    }
    if grid < 256 {
        return Err(invalid("grid-size", grid, ">= 256"));
    }
    let delta = fs.delta();
    let beta = fs.pulse().beta();
    let dt = delta * fs.pulse().period();
    if (spec.spacing() - dt).abs() > 1e-12 * dt {
        return Err(FtnError::DimensionMismatch(format!(
            "channel spectrum spacing {} differs from folded spectrum spacing {dt}",
            spec.spacing()
        )));
    }
    let (iv, _) = fs.support();
    let (a, b) = iv[0];
    let h = (b - a) / (grid - 1) as f64;
    let mut weights = vec![h; grid];
    weights[0] *= 0.5;
    weights[grid - 1] *= 0.5;

    // Inverse gains σ0²/τ of live modes, with their trapezoid weights.
    let mut tau_max = 0.0f64;
    let mut samples: Vec<Vec<f64>> = Vec::with_capacity(grid);
    for i in 0..grid {
        let f = a + i as f64 * h;
        let t = spec.eigenmodes(f)?;
        tau_max = t.iter().fold(tau_max, |m, &x| m.max(x));
        samples.push(t);
    }
    let floor = 1e-14 * tau_max;
    let mut inv: Vec<(f64, f64)> = Vec::new();
    for (t, &w) in samples.iter().zip(&weights) {
        for &x in t {
            if x > floor {
                inv.push((noise / x, w));
            }
        }
    }
    if inv.is_empty() {
        return Ok(CapacityResult::new(0.0, delta, beta, fs.is_full_band(), true));
    }
    let used = |nu: f64| inv.iter().map(|&(g, w)| w * (nu - g).max(0.0)).sum::<f64>() / dt;
    let max_inv = inv.iter().fold(0.0f64, |m, &(g, _)| m.max(g));
    let hi = power * dt / fs.support_measure() + max_inv;
    let nu = bisect(|nu| used(nu) - power, 0.0, hi, 1e-12)?;
    let bits: f64 = inv
        .iter()
        .map(|&(g, w)| w * ((nu - g).max(0.0) / g).ln_1p())
        .sum::<f64>()
        / std::f64::consts::LN_2;
    Ok(CapacityResult::new(bits, delta, beta, fs.is_full_band(), false))
}
