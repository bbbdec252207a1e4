//! Instantaneous power statistics of FTN waveforms: analytic CCDFs,
//! Monte Carlo simulation and outage thresholds.

use crate::error::{invalid, FtnError, Result};
use crate::numerics::{bessel, bisect, gaussian_pair, GaussLegendre, RandomSource};
use crate::pulse::RrcPulse;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

/// Symbol streams for Monte Carlo draws start at this index.
pub const SYMBOL_STREAM_BASE: u64 = 1_000_000;
pub const MIN_RETAINED_SAMPLES: usize = 10_000;
/// Symbols whose pulse weight falls below this fraction of the largest are dropped
/// from the characteristic-function product.
const WEIGHT_CUTOFF: f64 = 1e-9;
/// Characteristic-function products below this magnitude are treated as zero.
const PRODUCT_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolSet {
    Gaussian,
    Qpsk,
}

impl fmt::Display for SymbolSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymbolSet::Gaussian => "gaussian",
            SymbolSet::Qpsk => "qpsk",
        })
    }
}

impl FromStr for SymbolSet {
    type Err = FtnError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(SymbolSet::Gaussian),
            "qpsk" => Ok(SymbolSet::Qpsk),
            _ => Err(invalid("symbol-set", s, "one of gaussian, qpsk")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IaprConfig {
    pulse: RrcPulse,
    delta: f64,
    symbols: SymbolSet,
    power: f64,
    n_symbols: usize,
    oversample: usize,
    window: f64,
}

impl IaprConfig {
    /// `window` is the one-sided truncation W_t in multiples of T.
    pub fn new(
        pulse: RrcPulse,
        delta: f64,
        symbols: SymbolSet,
        power: f64,
        n_symbols: usize,
        oversample: usize,
        window: f64,
    ) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(invalid("delta", delta, "0 < delta <= 1"));
        }
        if !(power > 0.0) || !power.is_finite() {
            return Err(invalid("P_k", power, "finite and > 0"));
        }
        if !(window > 0.0) || !window.is_finite() {
            return Err(invalid("W_t", window, "finite and > 0"));
        }
        if oversample < 4 {
            return Err(invalid("Q", oversample, "Q >= 4"));
        }
        if n_symbols % 2 == 0 {
            return Err(invalid("N", n_symbols, "odd (N = 2M + 1)"));
        }
        let cfg = Self {
            pulse,
            delta,
            symbols,
            power,
            n_symbols,
            oversample,
            window,
        };
        if n_symbols < 2 * cfg.half_window() + 1 {
            return Err(invalid("N", n_symbols, "N >= 2*ceil(W_t/delta) + 1"));
        }
        Ok(cfg)
    }

    /// Defaults: N = 1001, Q = 8, W_t = 30.
    pub fn with_defaults(pulse: RrcPulse, delta: f64, symbols: SymbolSet, power: f64) -> Result<Self> {
        Self::new(pulse, delta, symbols, power, 1001, 8, 30.0)
    }

    pub fn pulse(&self) -> &RrcPulse {
        &self.pulse
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn symbols(&self) -> SymbolSet {
        self.symbols
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn n_symbols(&self) -> usize {
        self.n_symbols
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    fn spacing(&self) -> f64 {
        self.delta * self.pulse.period()
    }

    /// Symbols on each side of t that fall inside the window, ceil(W_t/δ).
    pub fn half_window(&self) -> usize {
        (self.window / self.delta - 1e-9).ceil() as usize
    }

    /// Pulse energy outside |t| <= W_t·T, as 1 minus the energy inside.
    pub fn tail_energy(&self) -> f64 {
        let t = self.pulse.period();
        let rule = GaussLegendre::new(16);
        let panels = (self.window * 8.0).ceil() as usize;
        let h = self.window * t / panels as f64;
        let inside: f64 = (0..panels)
            .map(|i| {
                let a = i as f64 * h;
                rule.panel(|x| self.pulse.time(x).powi(2), a, a + h)
            })
            .sum();
        (1.0 - 2.0 * inside).max(0.0)
    }

    /// Pulse weights p(t - mδT) for |m| <= ceil(W_t/δ), t within one period.
    fn weights_at(&self, t: f64) -> Vec<f64> {
        let mw = self.half_window() as i64;
        let dt = self.spacing();
        (-mw..=mw).map(|m| self.pulse.time(t - m as f64 * dt)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Analytic,
    MonteCarlo,
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveKind::Analytic => "analytic",
            CurveKind::MonteCarlo => "monte-carlo",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    InstantPower,
    Iapr,
}

/// Average CCDF on an ascending γ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfCurve {
    pub gamma: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: CurveKind,
    pub normalization: Normalization,
    /// Per-antenna power P_k used for IAPR normalization.
    pub power: f64,
    /// Pooled mean of |x|², for simulated curves.
    pub mean_power: Option<f64>,
    /// Number of pooled samples, for simulated curves.
    pub samples: usize,
}

impl CcdfCurve {
    /// Same curve against γ' = γ/P_k.
    pub fn to_iapr(&self) -> CcdfCurve {
        match self.normalization {
            Normalization::Iapr => self.clone(),
            Normalization::InstantPower => CcdfCurve {
                gamma: self.gamma.iter().map(|g| g / self.power).collect(),
                normalization: Normalization::Iapr,
                ..self.clone()
            },
        }
    }

    /// Checks that values lie in [0, 1], are nonincreasing and start at 1 when γ = 0.
    pub fn validate(&self) -> Result<()> {
        for (i, &v) in self.values.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid("ccdf value", v, "within [0, 1]"));
            }
            if i > 0 && v > self.values[i - 1] + 1e-12 {
                return Err(invalid("ccdf value", v, "nonincreasing in gamma"));
            }
            if self.gamma[i] == 0.0 && v != 1.0 {
                return Err(invalid("ccdf at gamma = 0", v, "equal to 1"));
            }
        }
        Ok(())
    }
}

fn check_grid(gamma: &[f64]) -> Result<()> {
    for (i, &g) in gamma.iter().enumerate() {
        if !(g >= 0.0) || !g.is_finite() {
            return Err(invalid("gamma", g, "finite and >= 0"));
        }
        if i > 0 && g <= gamma[i - 1] {
            return Err(invalid("gamma", g, "strictly ascending grid"));
        }
    }
    Ok(())
}

/// Gaussian-symbol average CCDF exp(-γ / (P_k ∫ G over |f| <= 1/(2δT))).
pub fn gaussian_ccdf_closed(gamma: f64, power: f64, delta: f64, pulse: &RrcPulse) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(invalid("gamma", gamma, ">= 0"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid("delta", delta, "0 < delta <= 1"));
    }
    if gamma == 0.0 {
        return Ok(1.0);
    }
    let edge = 0.5 / (delta * pulse.period());
    let g = pulse.spectrum_integral(-edge, edge);
    Ok((-gamma / (power * g)).exp())
}

/// Receive-fixed form with P_k = E/(δT).
pub fn gaussian_ccdf_rx(gamma: f64, energy: f64, delta: f64, pulse: &RrcPulse) -> Result<f64> {
    if !(energy > 0.0) {
        return Err(invalid("E", energy, "> 0"));
    }
    gaussian_ccdf_closed(gamma, energy / (delta * pulse.period()), delta, pulse)
}

/// Time-averaged Gaussian CCDF (1/δT)∫ exp(-γ / (P_k δT Σ_m p²(t - mδT))) dt
/// with `t_points` Gauss-Legendre nodes over one period.
pub fn gaussian_ccdf_exact(gamma: f64, cfg: &IaprConfig, t_points: usize) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(invalid("gamma", gamma, ">= 0"));
    }
    if t_points == 0 {
        return Err(invalid("t-points", t_points, ">= 1"));
    }
    if gamma == 0.0 {
        return Ok(1.0);
    }
    let dt = cfg.spacing();
    let rule = GaussLegendre::new(t_points);
    let mut acc = 0.0;
    for (t, w) in rule.mapped(0.0, dt) {
        let s: f64 = cfg.weights_at(t).iter().map(|p| p * p).sum();
        acc += w * (-gamma / (cfg.power * dt * s)).exp();
    }
    Ok(acc / dt)
}

/// Quadrature controls for [`qpsk_ccdf_curve`].
#[derive(Debug, Clone)]
pub struct QpskQuad {
    /// Gauss-Legendre nodes over one symbol period for the time average.
    pub t_points: usize,
    /// Nodes per ζ panel.
    pub zeta_points: usize,
    /// Nodes per φ panel.
    pub phi_points: usize,
    /// Absolute panel contribution below which the ζ tail counts as quiet.
    pub tail_tol: f64,
    pub quiet_panels: usize,
    pub panel_cap: usize,
}

impl Default for QpskQuad {
    fn default() -> Self {
        Self {
            t_points: 16,
            zeta_points: 16,
            phi_points: 16,
            tail_tol: 1e-10,
            quiet_panels: 3,
            panel_cap: 20_000,
        }
    }
}

/// Pulse-weighted QPSK amplitudes at one time instant, sorted by magnitude.
struct Weights {
    w: Vec<f64>,
    abs_sum: f64,
}

impl Weights {
    fn new(cfg: &IaprConfig, t: f64) -> Self {
        let c = (0.5 * cfg.power * cfg.spacing()).sqrt();
        let mut w: Vec<f64> = cfg.weights_at(t).into_iter().map(|p| c * p).collect();
        let max = w.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        w.retain(|x| x.abs() > WEIGHT_CUTOFF * max);
        w.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
        let abs_sum = w.iter().map(|x| x.abs()).sum();
        Self { w, abs_sum }
    }

    /// Π_m cos(u w_m), stopping once the product is negligible.
    fn char_fn(&self, u: f64) -> f64 {
        let mut prod = 1.0;
        for &w in &self.w {
            prod *= (u * w).cos();
            if prod.abs() < PRODUCT_FLOOR {
                return 0.0;
            }
        }
        prod
    }

    /// (2/π)∫₀^{π/2} F(ζ cos φ)·F(ζ sin φ) dφ.
    fn radial(&self, zeta: f64, rule: &GaussLegendre, buf: &mut Vec<f64>) -> f64 {
        // Each panel spans two periods of the fastest component ζΣ|w|.
        let panels = 1 + (zeta * self.abs_sum / (4.0 * PI)).ceil() as usize;
        let h = FRAC_PI_2 / panels as f64;
        let n = rule.len();
        buf.clear();
        for p in 0..panels {
            let a = p as f64 * h;
            for (phi, _) in rule.mapped(a, a + h) {
                buf.push(self.char_fn(zeta * phi.cos()));
            }
        }
        // The node set is symmetric about π/4, so sin φ_j = cos φ_{last - j}.
        let total = buf.len();
        let mut acc = 0.0;
        for p in 0..panels {
            for (k, &wk) in rule.weights().iter().enumerate() {
                let j = p * n + k;
                acc += 0.5 * h * wk * buf[j] * buf[total - 1 - j];
            }
        }
        acc * 2.0 / PI
    }
}

/// Time-averaged radial characteristic function D̄(ζ) of the QPSK waveform.
pub struct QpskCharacteristic {
    weights: Vec<(Weights, f64)>,
    rule: GaussLegendre,
}

impl QpskCharacteristic {
    pub fn new(cfg: &IaprConfig, t_points: usize, phi_points: usize) -> Result<Self> {
        if t_points == 0 || phi_points == 0 {
            return Err(invalid("quadrature points", t_points.min(phi_points), ">= 1"));
        }
        let dt = cfg.spacing();
        let weights = GaussLegendre::new(t_points)
            .mapped(0.0, dt)
            .map(|(t, w)| (Weights::new(cfg, t), w / dt))
            .collect();
        Ok(Self {
            weights,
            rule: GaussLegendre::new(phi_points),
        })
    }

    pub fn eval(&self, zeta: f64) -> f64 {
        let mut buf = Vec::new();
        self.weights
            .iter()
            .map(|(w, tw)| tw * w.radial(zeta, &self.rule, &mut buf))
            .sum()
    }

    /// Full-circle φ average at one time node, without the symmetry reduction.
    pub fn eval_full_circle(&self, zeta: f64, t_index: usize, panels: usize) -> f64 {
        let w = &self.weights[t_index].0;
        let h = 2.0 * PI / panels as f64;
        let mut acc = 0.0;
        for p in 0..panels {
            let a = p as f64 * h;
            acc += self
                .rule
                .panel(|phi| w.char_fn(zeta * phi.cos()) * w.char_fn(zeta * phi.sin()), a, a + h);
        }
        acc / (2.0 * PI)
    }

    /// Reduced φ average at one time node.
    pub fn eval_reduced(&self, zeta: f64, t_index: usize) -> f64 {
        self.weights[t_index].0.radial(zeta, &self.rule, &mut Vec::new())
    }
}

/// Analytic QPSK average CCDF 1 - √γ∫₀^∞ J1(√γ ζ) D̄(ζ) dζ on a grid of γ.
///
/// D̄ is evaluated once per ζ node and shared by every γ; the ζ panels have
/// width π/√γ_max so each J1 oscillation of every requested γ is covered.
pub fn qpsk_ccdf_curve(gamma: &[f64], cfg: &IaprConfig, q: &QpskQuad) -> Result<Vec<f64>> {
    check_grid(gamma)?;
    let gmax = gamma.iter().fold(0.0f64, |m, &g| m.max(g));
    if gmax == 0.0 {
        return Ok(vec![1.0; gamma.len()]);
    }
    let ch = QpskCharacteristic::new(cfg, q.t_points, q.phi_points)?;
    let rule = GaussLegendre::new(q.zeta_points);
    let width = PI / gmax.sqrt();
    let roots: Vec<f64> = gamma.iter().map(|g| g.sqrt()).collect();
    let mut acc = vec![0.0; gamma.len()];
    let mut quiet = 0;
    let mut last = 0.0;
    for p in 0..q.panel_cap {
        let a = p as f64 * width;
        let mut contrib = vec![0.0; gamma.len()];
        for (zeta, w) in rule.mapped(a, a + width) {
            let d = ch.eval(zeta);
            for (c, &r) in contrib.iter_mut().zip(&roots) {
                if r > 0.0 {
                    *c += w * r * bessel::j1_unchecked(r * zeta) * d;
                }
            }
        }
        let worst = contrib.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        for (s, c) in acc.iter_mut().zip(&contrib) {
            *s += c;
        }
        last = worst;
        if worst < q.tail_tol {
            quiet += 1;
            if quiet >= q.quiet_panels {
                return Ok(acc
                    .iter()
                    .zip(gamma)
                    .map(|(s, &g)| if g == 0.0 { 1.0 } else { (1.0 - s).clamp(0.0, 1.0) })
                    .collect());
            }
        } else {
            quiet = 0;
        }
    }
    Err(FtnError::TailNoConvergence {
        panels: q.panel_cap,
        accumulated: acc.iter().fold(0.0f64, |m, s| m.max(s.abs())),
        last_panel: last,
    })
}

/// Single-γ form of [`qpsk_ccdf_curve`].
pub fn qpsk_ccdf(gamma: f64, cfg: &IaprConfig, q: &QpskQuad) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(invalid("gamma", gamma, ">= 0"));
    }
    Ok(qpsk_ccdf_curve(&[gamma], cfg, q)?[0])
}

/// Draws the N symbols of one realization.
pub fn draw_symbols(cfg: &IaprConfig, src: &mut RandomSource) -> Vec<(f64, f64)> {
    let e = cfg.power * cfg.spacing();
    match cfg.symbols {
        SymbolSet::Gaussian => {
            let s = (0.5 * e).sqrt();
            (0..cfg.n_symbols)
                .map(|_| {
                    let (x, y) = gaussian_pair(src);
                    (s * x, s * y)
                })
                .collect()
        }
        SymbolSet::Qpsk => {
            let a = (0.5 * e).sqrt();
            (0..cfg.n_symbols)
                .map(|_| (a * src.sign(), a * src.sign()))
                .collect()
        }
    }
}

/// Samples x(t) at t = sδT/Q over the interior where the full window is
/// populated, covering a whole number of periods.
pub fn synthesize(cfg: &IaprConfig, symbols: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if symbols.len() != cfg.n_symbols {
        return Err(FtnError::DimensionMismatch(format!(
            "{} symbols for N = {}",
            symbols.len(),
            cfg.n_symbols
        )));
    }
    let q = cfg.oversample as i64;
    let m = (cfg.n_symbols / 2) as i64;
    let mw = cfg.half_window() as i64;
    let span = mw * q;
    let dt = cfg.spacing();
    // tap[k] = p(k δT / Q) for |k| <= span.
    let taps: Vec<f64> = (-span..=span)
        .map(|k| cfg.pulse.time(k as f64 * dt / q as f64))
        .collect();
    let first = -m * q + span;
    let end = m * q - span;
    let mut out = Vec::with_capacity((end - first).max(0) as usize);
    for s in first..end {
        let lo = (s - span + q - 1).div_euclid(q).max(-m);
        let hi = (s + span).div_euclid(q).min(m);
        let (mut re, mut im) = (0.0, 0.0);
        for k in lo..=hi {
            let tap = taps[(s - k * q + span) as usize];
            let (a, b) = symbols[(k + m) as usize];
            re += a * tap;
            im += b * tap;
        }
        out.push((re, im));
    }
    Ok(out)
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 64 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// Empirical average CCDF of |x(t)|² pooled over `realizations` waveforms.
/// Realization r draws its symbols from stream 10⁶ + r.
pub fn simulate_ccdf(
    cfg: &IaprConfig,
    gamma: &[f64],
    master_seed: u64,
    realizations: usize,
) -> Result<CcdfCurve> {
    check_grid(gamma)?;
    if realizations == 0 {
        return Err(invalid("R", realizations, ">= 1"));
    }
    let mut power = Vec::new();
    for r in 0..realizations {
        let mut src = RandomSource::new(master_seed, SYMBOL_STREAM_BASE + r as u64);
        let sym = draw_symbols(cfg, &mut src);
        power.extend(synthesize(cfg, &sym)?.into_iter().map(|(a, b)| a * a + b * b));
    }
    if power.len() < MIN_RETAINED_SAMPLES {
        return Err(FtnError::InsufficientSamples {
            got: power.len(),
            need: MIN_RETAINED_SAMPLES,
        });
    }
    let mean = pairwise_sum(&power) / power.len() as f64;
    power.sort_by(f64::total_cmp);
    let n = power.len() as f64;
    let values = gamma
        .iter()
        .map(|&g| {
            let below = power.partition_point(|&x| x < g);
            (power.len() - below) as f64 / n
        })
        .collect();
    Ok(CcdfCurve {
        gamma: gamma.to_vec(),
        values,
        kind: CurveKind::MonteCarlo,
        normalization: Normalization::InstantPower,
        power: cfg.power,
        mean_power: Some(mean),
        samples: power.len(),
    })
}

/// Smallest γ with CCDF(γ) <= p_out for a continuous nonincreasing CCDF,
/// by bisection after doubling an upper bracket from `scale`.
pub fn outage_threshold_analytic<F: FnMut(f64) -> Result<f64>>(
    mut ccdf: F,
    p_out: f64,
    scale: f64,
) -> Result<f64> {
    if !(p_out > 0.0 && p_out <= 1.0) {
        return Err(invalid("p_out", p_out, "0 < p_out <= 1"));
    }
    if p_out == 1.0 {
        return Ok(0.0);
    }
    if !(scale > 0.0) {
        return Err(invalid("scale", scale, "> 0"));
    }
    let mut hi = scale;
    let mut v = ccdf(hi)?;
    let mut steps = 0;
    while v > p_out {
        hi *= 2.0;
        v = ccdf(hi)?;
        steps += 1;
        if steps > 200 {
            return Err(FtnError::NeverCrosses { p_out, min_prob: v });
        }
    }
    let mut err = None;
    let root = bisect(
        |g| match ccdf(g) {
            Ok(c) => c - p_out,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        hi,
        1e-12,
    );
    if let Some(e) = err {
        return Err(e);
    }
    root
}

/// Smallest γ with CCDF(γ) <= p_out on a tabulated curve, interpolating
/// linearly between the bracketing grid points.
pub fn outage_threshold(curve: &CcdfCurve, p_out: f64) -> Result<f64> {
    if !(p_out > 0.0 && p_out <= 1.0) {
        return Err(invalid("p_out", p_out, "0 < p_out <= 1"));
    }
    if p_out == 1.0 {
        return Ok(0.0);
    }
    let (g, v) = (&curve.gamma, &curve.values);
    let i = match v.iter().position(|&x| x <= p_out) {
        Some(i) => i,
        None => {
            return Err(FtnError::NeverCrosses {
                p_out,
                min_prob: v.iter().copied().fold(1.0, f64::min),
            })
        }
    };
    if i == 0 {
        return Ok(g[0]);
    }
    let (g0, g1, v0, v1) = (g[i - 1], g[i], v[i - 1], v[i]);
    if v0 == v1 {
        return Ok(g1);
    }
    Ok(g0 + (g1 - g0) * (v0 - p_out) / (v0 - v1))
}

/// Builds an analytic curve from pointwise values.
pub fn analytic_curve(gamma: &[f64], values: Vec<f64>, power: f64) -> Result<CcdfCurve> {
    check_grid(gamma)?;
    if values.len() != gamma.len() {
        return Err(FtnError::DimensionMismatch(format!(
            "{} values for {} grid points",
            values.len(),
            gamma.len()
        )));
    }
    Ok(CcdfCurve {
        gamma: gamma.to_vec(),
        values,
        kind: CurveKind::Analytic,
        normalization: Normalization::InstantPower,
        power,
        mean_power: None,
        samples: 0,
    })
}
