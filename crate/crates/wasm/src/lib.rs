//! Browser bindings: folded spectrum, capacity against δ and power CCDFs.
//!
//! The plain functions carry the logic; the `js_*` wrappers only convert errors.

use ftn_core::capacity::{scheme_rate, scheme_spectrum, Scheme, SnrConvention, SnrMode};
use ftn_core::iapr::{gaussian_ccdf_closed, gaussian_ccdf_exact, simulate_ccdf, IaprConfig, SymbolSet};
use ftn_core::pulse::{FoldedSpectrum, RrcPulse};
use ftn_core::Result;
use wasm_bindgen::prelude::*;

/// Symbol period used by the demo, matching the CLI default.
pub const PERIOD: f64 = 0.01;

/// G_d sampled at `points` normalized frequencies evenly spaced over [-1/2, 1/2].
pub fn folded_spectrum(beta: f64, delta: f64, points: usize) -> Result<Vec<f64>> {
    let fs = FoldedSpectrum::new(RrcPulse::new(beta, PERIOD)?, delta)?;
    let n = points.max(2);
    (0..n)
        .map(|i| fs.eval(-0.5 + i as f64 / (n - 1) as f64))
        .collect()
}

/// Capacity in bits/s/Hz for each scheme (OsOf, SsOf, OsSf, SsSf) at each δ,
/// scheme-major, for a channel with eigenmodes `tau`.
pub fn capacity_curves(beta: f64, snr_db: f64, receive_fixed: bool, tau: &[f64], deltas: &[f64]) -> Result<Vec<f64>> {
    let mode = if receive_fixed {
        SnrMode::ReceiveFixed
    } else {
        SnrMode::TransmitFixed
    };
    let snr = SnrConvention::from_db(mode, snr_db, 1.0)?;
    let pulse = RrcPulse::new(beta, PERIOD)?;
    let mut out = Vec::with_capacity(4 * deltas.len());
    for scheme in Scheme::ALL {
        for &d in deltas {
            let fs = FoldedSpectrum::new(pulse, d)?;
            let sol = scheme_spectrum(scheme, snr.power(d), tau, &fs, 1.0)?;
            out.push(scheme_rate(&sol, tau, 1.0)?.bits_per_s_per_hz);
        }
    }
    Ok(out)
}

/// Average CCDF of the instantaneous power at γ = g·P for each g in `gamma_over_p`.
/// Gaussian symbols use the exact time average; QPSK uses `realizations` simulated
/// waveforms with seed 1.
pub fn ccdf_curve(beta: f64, delta: f64, qpsk: bool, gamma_over_p: &[f64], realizations: usize) -> Result<Vec<f64>> {
    let pulse = RrcPulse::new(beta, PERIOD)?;
    let symbols = if qpsk { SymbolSet::Qpsk } else { SymbolSet::Gaussian };
    let cfg = IaprConfig::with_defaults(pulse, delta, symbols, 1.0)?;
    if qpsk {
        Ok(simulate_ccdf(&cfg, gamma_over_p, 1, realizations.max(1))?.values)
    } else {
        gamma_over_p.iter().map(|&g| gaussian_ccdf_exact(g, &cfg, 16)).collect()
    }
}

/// The δ-independent Gaussian reference exp(-γ/P) below the threshold.
pub fn gaussian_reference(beta: f64, gamma_over_p: &[f64]) -> Result<Vec<f64>> {
    let pulse = RrcPulse::new(beta, PERIOD)?;
    let d = 1.0 / (1.0 + beta);
    gamma_over_p
        .iter()
        .map(|&g| gaussian_ccdf_closed(g, 1.0, d, &pulse))
        .collect()
}

fn js<T>(r: Result<T>) -> std::result::Result<T, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = foldedSpectrum)]
pub fn js_folded_spectrum(beta: f64, delta: f64, points: usize) -> std::result::Result<Vec<f64>, JsError> {
    js(folded_spectrum(beta, delta, points))
}

#[wasm_bindgen(js_name = capacityCurves)]
pub fn js_capacity_curves(
    beta: f64,
    snr_db: f64,
    receive_fixed: bool,
    tau: Vec<f64>,
    deltas: Vec<f64>,
) -> std::result::Result<Vec<f64>, JsError> {
    js(capacity_curves(beta, snr_db, receive_fixed, &tau, &deltas))
}

#[wasm_bindgen(js_name = ccdfCurve)]
pub fn js_ccdf_curve(
    beta: f64,
    delta: f64,
    qpsk: bool,
    gamma_over_p: Vec<f64>,
    realizations: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    js(ccdf_curve(beta, delta, qpsk, &gamma_over_p, realizations))
}

#[wasm_bindgen(js_name = gaussianReference)]
pub fn js_gaussian_reference(beta: f64, gamma_over_p: Vec<f64>) -> std::result::Result<Vec<f64>, JsError> {
    js(gaussian_reference(beta, &gamma_over_p))
}
