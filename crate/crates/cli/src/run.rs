use crate::config::{CommandKind, ConfigError, ExperimentConfig};
use crate::csv_out::{fmt_sig, write_atomic, Table};
use ftn_core::capacity::{fs_capacity, scheme_rate, scheme_spectrum, SnrConvention};
use ftn_core::channel::{ChannelSpectrum, CMatrix, FlatMimoChannel, Tap, TappedDelayChannel};
use ftn_core::gram::szego_gap;
use ftn_core::iapr::{
    gaussian_ccdf_closed, gaussian_ccdf_exact, outage_threshold, outage_threshold_analytic,
    qpsk_ccdf_curve, simulate_ccdf, analytic_curve, QpskQuad, SymbolSet,
};
use ftn_core::numerics::RandomSource;
use ftn_core::pulse::FoldedSpectrum;
use ftn_core::FtnError;
use num_complex::Complex64;
use rayon::prelude::*;
use std::path::Path;
use thiserror::Error;

pub const CAPACITY_HEADER: &[&str] = &[
    "delta",
    "beta",
    "snr_db",
    "snr_mode",
    "scheme",
    "realization",
    "seed",
    "capacity_bps_hz",
    "mean_ratio",
];
pub const CCDF_HEADER: &[&str] = &["gamma_db", "gamma_over_P", "ccdf", "kind", "delta", "symbol_set", "snr_mode"];
pub const OUTAGE_HEADER: &[&str] = &["delta", "gamma_db", "p_out"];
pub const SZEGO_HEADER: &[&str] = &["N", "finite_rate", "limit_rate", "rel_gap"];

/// Gauss-Legendre nodes over one symbol period for time-averaged CCDFs.
const T_POINTS: usize = 16;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] FtnError),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}

type Result<T> = std::result::Result<T, RunError>;

/// Runs the configured command and returns the CSV table.
pub fn run(cfg: &ExperimentConfig) -> Result<Table> {
    let table = match cfg.command {
        CommandKind::CapacitySweep => run_capacity_sweep(cfg)?,
        CommandKind::CapacityFs => run_capacity_fs(cfg)?,
        CommandKind::Ccdf => run_ccdf(cfg)?,
        CommandKind::CcdfSim => run_ccdf_sim(cfg)?,
        CommandKind::Outage => run_outage(cfg)?,
        CommandKind::SzegoCheck => run_szego_check(cfg)?,
    };
    Ok(table)
}

/// Runs the command and writes its CSV to the configured output or stdout.
pub fn run_and_write(cfg: &ExperimentConfig) -> Result<()> {
    let text = run(cfg)?.to_csv_string();
    match &cfg.output {
        Some(p) => write_atomic(p, &text)?,
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn snr(cfg: &ExperimentConfig, db: f64) -> Result<SnrConvention> {
    Ok(SnrConvention::from_db(cfg.snr_mode, db, cfg.noise)?)
}

fn unit_diagonal(l: usize, k: usize) -> CMatrix {
    CMatrix::from_fn(l, k, |i, j| if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
}

fn read_channel_file(path: &Path) -> Result<TappedDelayChannel> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Unreadable {
        file: path.display().to_string(),
        reason: e.to_string(),
    })?;
    TappedDelayChannel::from_csv(&text).map_err(|e| {
        RunError::Config(ConfigError::Invalid {
            key: "channel-file".into(),
            value: path.display().to_string(),
            constraint: e.to_string(),
        })
    })
}

/// Flat channels, one per realization; a fixed or file channel is a single realization.
pub fn flat_channels(cfg: &ExperimentConfig) -> Result<Vec<FlatMimoChannel>> {
    if cfg.fixed_channel {
        return Ok(vec![FlatMimoChannel::new(unit_diagonal(cfg.rx, cfg.tx))?]);
    }
    if let Some(p) = &cfg.channel_file {
        let ch = read_channel_file(p)?;
        if ch.taps().len() != 1 || ch.taps()[0].delay != 0.0 {
            return Err(ConfigError::Invalid {
                key: "channel-file".into(),
                value: p.display().to_string(),
                constraint: "flat commands need a single tap at delay 0".into(),
            }
            .into());
        }
        return Ok(vec![FlatMimoChannel::new(ch.taps()[0].gains.clone())?]);
    }
    (0..cfg.realizations)
        .map(|r| {
            let mut src = RandomSource::new(cfg.seed, r as u64);
            Ok(FlatMimoChannel::sample(cfg.tx, cfg.rx, &mut src)?)
        })
        .collect()
}

pub fn fs_channels(cfg: &ExperimentConfig) -> Result<Vec<TappedDelayChannel>> {
    if cfg.fixed_channel {
        return Ok(vec![TappedDelayChannel::new(vec![Tap {
            delay: 0.0,
            gains: unit_diagonal(cfg.rx, cfg.tx),
        }])?]);
    }
    if let Some(p) = &cfg.channel_file {
        return Ok(vec![read_channel_file(p)?]);
    }
    (0..cfg.realizations)
        .map(|r| {
            let mut src = RandomSource::new(cfg.seed, r as u64);
            Ok(TappedDelayChannel::sample(cfg.tx, cfg.rx, cfg.taps, cfg.max_delay, &mut src)?)
        })
        .collect()
}

fn dump(cfg: &ExperimentConfig, channels: &[TappedDelayChannel]) -> Result<()> {
    if let Some(dir) = &cfg.dump_channels {
        std::fs::create_dir_all(dir)?;
        for (r, ch) in channels.iter().enumerate() {
            write_atomic(&dir.join(format!("channel_{r:05}.csv")), &ch.to_csv())?;
        }
    }
    Ok(())
}

fn check_finite(x: f64, what: &'static str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(FtnError::NonFinite {
            context: what,
            at: 0.0,
        }
        .into())
    }
}

/// Appends per-realization rows followed by the mean row of each cell.
/// `cells` are (delta, snr_db, scheme label); `values[r][c]` is the rate of cell c in realization r.
fn capacity_table(cfg: &ExperimentConfig, cells: &[(f64, f64, String)], values: &[Vec<f64>]) -> Result<Table> {
    let mut t = Table::new(CAPACITY_HEADER);
    let r_count = values.len();
    let means: Vec<f64> = (0..cells.len())
        .map(|c| {
            let s: f64 = values.iter().map(|v| v[c]).sum();
            s / r_count as f64
        })
        .collect();
    let reference = |snr_db: f64| {
        cells
            .iter()
            .position(|(d, s, sc)| *d == 1.0 && *s == snr_db && sc == "SsSf")
            .map(|i| means[i])
    };
    let seed = cfg.seed.to_string();
    for (c, (delta, snr_db, scheme)) in cells.iter().enumerate() {
        let head = vec![
            fmt_sig(*delta),
            fmt_sig(cfg.beta),
            fmt_sig(*snr_db),
            cfg.snr_mode.to_string(),
            scheme.clone(),
        ];
        for (r, v) in values.iter().enumerate() {
            let x = check_finite(v[c], "capacity")?;
            let mut row = head.clone();
            row.extend([r.to_string(), seed.clone(), fmt_sig(x), String::new()]);
            t.push(row);
        }
        let ratio = match reference(*snr_db) {
            Some(m) if m > 0.0 => fmt_sig(means[c] / m),
            _ => String::new(),
        };
        let mut row = head;
        row.extend(["mean".to_string(), seed.clone(), fmt_sig(means[c]), ratio]);
        t.push(row);
    }
    Ok(t)
}

pub fn run_capacity_sweep(cfg: &ExperimentConfig) -> Result<Table> {
    let channels = flat_channels(cfg)?;
    dump(cfg, &channels.iter().map(TappedDelayChannel::from_flat).collect::<Vec<_>>())?;
    let pulse = cfg.pulse();
    let mut cells = Vec::new();
    let mut plan = Vec::new();
    for &delta in &cfg.deltas {
        let fs = FoldedSpectrum::new(pulse, delta)?;
        for &db in &cfg.snr_db {
            let power = snr(cfg, db)?.power(delta);
            for &scheme in &cfg.schemes {
                cells.push((delta, db, scheme.to_string()));
                plan.push((fs.clone(), power, scheme));
            }
        }
    }
    let values: Vec<Vec<f64>> = channels
        .par_iter()
        .map(|h| -> Result<Vec<f64>> {
            let tau = h.eigenmodes()?;
            plan.iter()
                .map(|(fs, power, scheme)| {
                    let sol = scheme_spectrum(*scheme, *power, &tau, fs, cfg.noise)?;
                    Ok(scheme_rate(&sol, &tau, cfg.noise)?.bits_per_s_per_hz)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    capacity_table(cfg, &cells, &values)
}

pub fn run_capacity_fs(cfg: &ExperimentConfig) -> Result<Table> {
    let channels = fs_channels(cfg)?;
    dump(cfg, &channels)?;
    let pulse = cfg.pulse();
    let mut cells = Vec::new();
    let mut plan = Vec::new();
    for &delta in &cfg.deltas {
        let fs = FoldedSpectrum::new(pulse, delta)?;
        for &db in &cfg.snr_db {
            cells.push((delta, db, "fs".to_string()));
            plan.push((fs.clone(), snr(cfg, db)?.power(delta)));
        }
    }
    let values: Vec<Vec<f64>> = channels
        .par_iter()
        .map(|ch| -> Result<Vec<f64>> {
            plan.iter()
                .map(|(fs, power)| {
                    let spec = ChannelSpectrum::new(ch.clone(), fs.delta(), cfg.period)?;
                    Ok(fs_capacity(&spec, fs, *power, cfg.noise, cfg.fs_grid)?.bits_per_s_per_hz)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    capacity_table(cfg, &cells, &values)
}

/// Reference power P at δ = 1 and the absolute γ grid it scales.
fn gamma_grid(cfg: &ExperimentConfig) -> Result<(SnrConvention, Vec<f64>)> {
    let s = snr(cfg, cfg.snr_db[0])?;
    let p_ref = s.power(1.0);
    let grid = cfg
        .gamma_grid_db()
        .into_iter()
        .map(|db| p_ref * 10f64.powf(db / 10.0))
        .collect();
    Ok((s, grid))
}

fn ccdf_rows(t: &mut Table, cfg: &ExperimentConfig, p_ref: f64, delta: f64, gamma: &[f64], values: &[f64], kind: &str) -> Result<()> {
    for (g, v) in gamma.iter().zip(values) {
        let v = check_finite(*v, "ccdf")?;
        if !(0.0..=1.0).contains(&v) {
            return Err(FtnError::InvalidParameter {
                name: "ccdf".into(),
                value: v.to_string(),
                constraint: "within [0, 1]".into(),
            }
            .into());
        }
        t.push(vec![
            fmt_sig(10.0 * g.log10()),
            fmt_sig(g / p_ref),
            fmt_sig(v),
            kind.to_string(),
            fmt_sig(delta),
            cfg.symbol_set.to_string(),
            cfg.snr_mode.to_string(),
        ]);
    }
    Ok(())
}

fn qpsk_quad(cfg: &ExperimentConfig) -> QpskQuad {
    QpskQuad {
        tail_tol: cfg.tail_tol,
        ..QpskQuad::default()
    }
}

/// Analytic curves per δ, as (kind, values) pairs.
fn analytic_curves(cfg: &ExperimentConfig, s: &SnrConvention, gamma: &[f64]) -> Result<Vec<Vec<(&'static str, Vec<f64>)>>> {
    let pulse = cfg.pulse();
    cfg.deltas
        .par_iter()
        .map(|&delta| -> Result<Vec<(&'static str, Vec<f64>)>> {
            let pk = s.power(delta);
            let ic = cfg.iapr(delta, pk)?;
            Ok(match cfg.symbol_set {
                SymbolSet::Gaussian => {
                    let closed = gamma
                        .iter()
                        .map(|&g| gaussian_ccdf_closed(g, pk, delta, &pulse))
                        .collect::<std::result::Result<Vec<_>, _>>()?;
                    let exact = gamma
                        .iter()
                        .map(|&g| gaussian_ccdf_exact(g, &ic, T_POINTS))
                        .collect::<std::result::Result<Vec<_>, _>>()?;
                    vec![("analytic", closed), ("exact", exact)]
                }
                SymbolSet::Qpsk => vec![("analytic", qpsk_ccdf_curve(gamma, &ic, &qpsk_quad(cfg))?)],
            })
        })
        .collect()
}

pub fn run_ccdf(cfg: &ExperimentConfig) -> Result<Table> {
    let (s, gamma) = gamma_grid(cfg)?;
    let p_ref = s.power(1.0);
    let curves = analytic_curves(cfg, &s, &gamma)?;
    let mut t = Table::new(CCDF_HEADER);
    for (delta, set) in cfg.deltas.iter().zip(curves) {
        for (kind, values) in set {
            ccdf_rows(&mut t, cfg, p_ref, *delta, &gamma, &values, kind)?;
        }
    }
    Ok(t)
}

pub fn run_ccdf_sim(cfg: &ExperimentConfig) -> Result<Table> {
    let (s, gamma) = gamma_grid(cfg)?;
    let p_ref = s.power(1.0);
    let curves: Vec<Vec<f64>> = cfg
        .deltas
        .par_iter()
        .map(|&delta| -> Result<Vec<f64>> {
            let ic = cfg.iapr(delta, s.power(delta))?;
            Ok(simulate_ccdf(&ic, &gamma, cfg.seed, cfg.realizations)?.values)
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(CCDF_HEADER);
    for (delta, values) in cfg.deltas.iter().zip(curves) {
        ccdf_rows(&mut t, cfg, p_ref, *delta, &gamma, &values, "monte-carlo")?;
    }
    Ok(t)
}

pub fn run_outage(cfg: &ExperimentConfig) -> Result<Table> {
    let (s, gamma) = gamma_grid(cfg)?;
    let thresholds: Vec<f64> = cfg
        .deltas
        .par_iter()
        .map(|&delta| -> Result<f64> {
            let pk = s.power(delta);
            let ic = cfg.iapr(delta, pk)?;
            Ok(match cfg.symbol_set {
                SymbolSet::Gaussian => {
                    outage_threshold_analytic(|g| gaussian_ccdf_exact(g, &ic, T_POINTS), cfg.p_out, pk)?
                }
                SymbolSet::Qpsk => {
                    let values = qpsk_ccdf_curve(&gamma, &ic, &qpsk_quad(cfg))?;
                    outage_threshold(&analytic_curve(&gamma, values, pk)?, cfg.p_out)?
                }
            })
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(OUTAGE_HEADER);
    for (delta, g) in cfg.deltas.iter().zip(thresholds) {
        let g = check_finite(g, "outage threshold")?;
        t.push(vec![fmt_sig(*delta), fmt_sig(10.0 * g.log10()), fmt_sig(cfg.p_out)]);
    }
    Ok(t)
}

pub fn run_szego_check(cfg: &ExperimentConfig) -> Result<Table> {
    let h = flat_channels(cfg)?.swap_remove(0);
    let delta = cfg.deltas[0];
    let power = snr(cfg, cfg.snr_db[0])?.power(delta);
    let points = szego_gap(&h, &cfg.pulse(), delta, power, cfg.noise, &cfg.szego_n)?;
    let mut t = Table::new(SZEGO_HEADER);
    for p in points {
        t.push(vec![
            p.n.to_string(),
            fmt_sig(check_finite(p.finite_rate, "finite rate")?),
            fmt_sig(check_finite(p.limit_rate, "limit rate")?),
            fmt_sig(check_finite(p.rel_gap, "relative gap")?),
        ]);
    }
    Ok(t)
}
