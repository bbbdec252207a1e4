use clap::{Arg, ArgAction, Command};
use ftn_core::capacity::{Scheme, SnrMode};
use ftn_core::gram::MAX_FLAT_N;
use ftn_core::iapr::{IaprConfig, SymbolSet};
use ftn_core::numerics::eig::MAX_DIM;
use ftn_core::pulse::RrcPulse;
use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Help(String),
    #[error("invalid {key} = {value:?}: {constraint}")]
    Invalid {
        key: String,
        value: String,
        constraint: String,
    },
    #[error("unknown key {key:?} in {file}:{line}")]
    UnknownKey { key: String, file: String, line: usize },
    #[error("{file}:{line}: expected `key = value`")]
    Syntax { file: String, line: usize },
    #[error("cannot read {file}: {reason}")]
    Unreadable { file: String, reason: String },
}

fn bad(key: &str, value: impl fmt::Display, constraint: &str) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        value: value.to_string(),
        constraint: constraint.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    CapacitySweep,
    CapacityFs,
    Ccdf,
    CcdfSim,
    Outage,
    SzegoCheck,
}

impl CommandKind {
    pub const ALL: [CommandKind; 6] = [
        CommandKind::CapacitySweep,
        CommandKind::CapacityFs,
        CommandKind::Ccdf,
        CommandKind::CcdfSim,
        CommandKind::Outage,
        CommandKind::SzegoCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CommandKind::CapacitySweep => "capacity-sweep",
            CommandKind::CapacityFs => "capacity-fs",
            CommandKind::Ccdf => "ccdf",
            CommandKind::CcdfSim => "ccdf-sim",
            CommandKind::Outage => "outage",
            CommandKind::SzegoCheck => "szego-check",
        }
    }
}

impl FromStr for CommandKind {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| bad("command", s, "one of capacity-sweep, capacity-fs, ccdf, ccdf-sim, outage, szego-check"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: CommandKind,
    pub beta: f64,
    pub period: f64,
    pub tx: usize,
    pub rx: usize,
    pub taps: usize,
    pub max_delay: f64,
    pub deltas: Vec<f64>,
    pub snr_mode: SnrMode,
    pub snr_db: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub realizations: usize,
    pub seed: u64,
    pub symbol_set: SymbolSet,
    pub gamma_min_db: f64,
    pub gamma_max_db: f64,
    pub gamma_step_db: f64,
    pub p_out: f64,
    pub n_symbols: usize,
    pub oversample: usize,
    pub window: f64,
    pub noise: f64,
    pub szego_n: Vec<usize>,
    pub fs_grid: usize,
    pub tail_tol: f64,
    pub fixed_channel: bool,
    pub channel_file: Option<PathBuf>,
    pub dump_channels: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

/// (key, value name, help, default). Every key is both a flag and a config-file key.
const KEYS: &[(&str, &str, &str, Option<&str>)] = &[
    ("beta", "B", "roll-off factor in [0, 1]", Some("0.5")),
    ("period", "T", "symbol period T in seconds", Some("0.01")),
    ("tx", "K", "transmit antennas", Some("2")),
    ("rx", "L", "receive antennas", Some("2")),
    ("taps", "J", "channel taps for capacity-fs", Some("20")),
    ("max-delay", "D", "tap delays drawn from [0, D); defaults to 2T", None),
    ("delta", "LIST", "comma-separated acceleration factors in (0, 1]", Some("0.1,0.2,0.3,0.4,0.5,0.6,0.67,0.8,0.9,1.0")),
    ("snr-mode", "MODE", "tx (transmit-fixed) or rx (receive-fixed)", Some("tx")),
    ("snr-db", "LIST", "comma-separated SNR values in dB", Some("20")),
    ("scheme", "LIST", "comma-separated schemes out of OsOf, SsOf, OsSf, SsSf", Some("OsOf,SsOf,OsSf,SsSf")),
    ("realizations", "R", "channel or waveform realizations", Some("1000")),
    ("seed", "SEED", "master seed", Some("1")),
    ("symbol-set", "SET", "gaussian or qpsk", Some("gaussian")),
    ("gamma-min-db", "DB", "lowest gamma/P on the CCDF grid, in dB", Some("-10")),
    ("gamma-max-db", "DB", "highest gamma/P on the CCDF grid, in dB", Some("12")),
    ("gamma-step-db", "DB", "CCDF grid step in dB", Some("0.25")),
    ("p-out", "P", "outage probability in (0, 1)", Some("0.01")),
    ("symbols", "N", "symbols per simulated waveform (odd)", Some("1001")),
    ("oversample", "Q", "waveform samples per symbol spacing", Some("8")),
    ("window", "W", "one-sided pulse truncation in multiples of T", Some("30")),
    ("noise", "S0", "noise power spectral density", Some("1")),
    ("szego-n", "LIST", "block lengths for szego-check", Some("64,128,256,512")),
    ("fs-grid", "M", "frequency grid points for capacity-fs", Some("1024")),
    ("tail-tol", "TOL", "tail tolerance of the QPSK analytic integral", Some("1e-10")),
    ("channel-file", "PATH", "channel CSV used instead of random draws", None),
    ("dump-channels", "DIR", "directory receiving one CSV per channel realization", None),
    ("output", "PATH", "output CSV; stdout when absent", None),
];

const FLAGS: &[(&str, &str)] = &[("fixed-channel", "use the unit-diagonal channel instead of random draws")];

pub fn command() -> Command {
    let mut cmd = Command::new("ftn")
        .about("Capacity and instantaneous-power sweeps for MIMO faster-than-Nyquist signaling")
        .arg(
            Arg::new("command")
                .value_name("COMMAND")
                .help("capacity-sweep | capacity-fs | ccdf | ccdf-sim | outage | szego-check"),
        )
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("PATH")
                .help("`key = value` file; flags override its entries"),
        );
    for &(key, name, help, default) in KEYS {
        let help = match default {
            Some(d) => format!("{help} [default: {d}]"),
            None => help.to_string(),
        };
        cmd = cmd.arg(
            Arg::new(key)
                .long(key)
                .value_name(name)
                .help(help)
                .allow_negative_numbers(true),
        );
    }
    for &(key, help) in FLAGS {
        cmd = cmd.arg(Arg::new(key).long(key).help(help).action(ArgAction::SetTrue));
    }
    cmd
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str, file: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            file: file.to_string(),
            line: i + 1,
        })?;
        let k = k.trim();
        let known = k == "command" || KEYS.iter().any(|e| e.0 == k) || FLAGS.iter().any(|e| e.0 == k);
        if !known {
            return Err(ConfigError::UnknownKey {
                key: k.to_string(),
                file: file.to_string(),
                line: i + 1,
            });
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Parses argv (including the program name) into a validated configuration.
pub fn parse_config<I, S>(argv: I) -> Result<ExperimentConfig, ConfigError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    if argv.len() <= 1 {
        return Err(ConfigError::Usage(command().render_help().to_string()));
    }
    let m = command()
        .try_get_matches_from(argv)
        .map_err(|e| match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                ConfigError::Help(e.render().to_string())
            }
            _ => ConfigError::Usage(e.render().to_string()),
        })?;
    let mut raw = BTreeMap::new();
    if let Some(path) = m.get_one::<String>("config") {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Unreadable {
            file: path.clone(),
            reason: e.to_string(),
        })?;
        raw = parse_config_file(&text, path)?;
    }
    if let Some(c) = m.get_one::<String>("command") {
        raw.insert("command".into(), c.clone());
    }
    for &(key, ..) in KEYS {
        if let Some(v) = m.get_one::<String>(key) {
            raw.insert(key.into(), v.clone());
        }
    }
    for &(key, _) in FLAGS {
        if m.get_flag(key) {
            raw.insert(key.into(), "true".into());
        }
    }
    from_map(&raw)
}

fn value<'a>(raw: &'a BTreeMap<String, String>, key: &str) -> Option<&'a str> {
    raw.get(key)
        .map(String::as_str)
        .or_else(|| KEYS.iter().find(|e| e.0 == key).and_then(|e| e.3))
}

fn num<T: FromStr>(raw: &BTreeMap<String, String>, key: &str, what: &str) -> Result<T, ConfigError> {
    let v = value(raw, key).unwrap_or("");
    v.parse().map_err(|_| bad(key, v, what))
}

fn list<T: FromStr>(raw: &BTreeMap<String, String>, key: &str, what: &str) -> Result<Vec<T>, ConfigError> {
    let v = value(raw, key).unwrap_or("");
    let items: Result<Vec<T>, _> = v.split(',').map(|s| s.trim().parse::<T>()).collect();
    match items {
        Ok(x) if !x.is_empty() => Ok(x),
        _ => Err(bad(key, v, what)),
    }
}

fn flag(raw: &BTreeMap<String, String>, key: &str) -> Result<bool, ConfigError> {
    match raw.get(key).map(String::as_str) {
        None | Some("false") => Ok(false),
        Some("true") => Ok(true),
        Some(v) => Err(bad(key, v, "true or false")),
    }
}

fn require(ok: bool, key: &str, value: impl fmt::Display, constraint: &str) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(bad(key, value, constraint))
    }
}

fn from_map(raw: &BTreeMap<String, String>) -> Result<ExperimentConfig, ConfigError> {
    let command: CommandKind = match raw.get("command") {
        Some(c) => c.parse()?,
        None => return Err(ConfigError::Usage(command().render_help().to_string())),
    };
    let beta: f64 = num(raw, "beta", "a real number")?;
    require((0.0..=1.0).contains(&beta), "beta", beta, "must lie in [0, 1]")?;
    let period: f64 = num(raw, "period", "a real number")?;
    require(period > 0.0 && period.is_finite(), "period", period, "must be finite and > 0")?;
    let tx: usize = num(raw, "tx", "a positive integer")?;
    require((1..=MAX_DIM).contains(&tx), "tx", tx, &format!("must lie in [1, {MAX_DIM}]"))?;
    let rx: usize = num(raw, "rx", "a positive integer")?;
    require((1..=MAX_DIM).contains(&rx), "rx", rx, &format!("must lie in [1, {MAX_DIM}]"))?;
    let taps: usize = num(raw, "taps", "a positive integer")?;
    require(taps >= 1, "taps", taps, "must be >= 1")?;
    let max_delay: f64 = match raw.get("max-delay") {
        Some(_) => num(raw, "max-delay", "a real number")?,
        None => 2.0 * period,
    };
    require(max_delay > 0.0 && max_delay.is_finite(), "max-delay", max_delay, "must be finite and > 0")?;
    let deltas: Vec<f64> = list(raw, "delta", "comma-separated reals")?;
    for &d in &deltas {
        require(d > 0.0 && d <= 1.0, "delta", d, "each value must lie in (0, 1]")?;
    }
    let snr_mode: SnrMode = {
        let v = value(raw, "snr-mode").unwrap_or("");
        v.parse().map_err(|_| bad("snr-mode", v, "tx or rx"))?
    };
    let snr_db: Vec<f64> = list(raw, "snr-db", "comma-separated reals")?;
    for &s in &snr_db {
        require(s.is_finite() && s.abs() <= 300.0, "snr-db", s, "each value must be finite with |SNR| <= 300 dB")?;
    }
    let schemes: Vec<Scheme> = list(raw, "scheme", "comma-separated list of OsOf, SsOf, OsSf, SsSf")?;
    let realizations: usize = num(raw, "realizations", "a positive integer")?;
    require(realizations >= 1, "realizations", realizations, "must be >= 1")?;
    let seed: u64 = num(raw, "seed", "an unsigned 64-bit integer")?;
    let symbol_set: SymbolSet = {
        let v = value(raw, "symbol-set").unwrap_or("");
        v.parse().map_err(|_| bad("symbol-set", v, "gaussian or qpsk"))?
    };
    let gamma_min_db: f64 = num(raw, "gamma-min-db", "a real number")?;
    let gamma_max_db: f64 = num(raw, "gamma-max-db", "a real number")?;
    let gamma_step_db: f64 = num(raw, "gamma-step-db", "a real number")?;
    require(gamma_min_db.is_finite(), "gamma-min-db", gamma_min_db, "must be finite")?;
    require(
        gamma_max_db.is_finite() && gamma_max_db > gamma_min_db,
        "gamma-max-db",
        gamma_max_db,
        "must be finite and greater than gamma-min-db",
    )?;
    require(
        gamma_step_db > 0.0 && (gamma_max_db - gamma_min_db) / gamma_step_db <= 1e5,
        "gamma-step-db",
        gamma_step_db,
        "must be > 0 with at most 1e5 grid points",
    )?;
    let p_out: f64 = num(raw, "p-out", "a real number")?;
    require(p_out > 0.0 && p_out < 1.0, "p-out", p_out, "must lie in (0, 1)")?;
    let n_symbols: usize = num(raw, "symbols", "a positive integer")?;
    let oversample: usize = num(raw, "oversample", "a positive integer")?;
    let window: f64 = num(raw, "window", "a real number")?;
    let noise: f64 = num(raw, "noise", "a real number")?;
    require(noise > 0.0 && noise.is_finite(), "noise", noise, "must be finite and > 0")?;
    let szego_n: Vec<usize> = list(raw, "szego-n", "comma-separated positive integers")?;
    for &n in &szego_n {
        require((1..=MAX_FLAT_N).contains(&n), "szego-n", n, &format!("each value must lie in [1, {MAX_FLAT_N}]"))?;
    }
    let fs_grid: usize = num(raw, "fs-grid", "a positive integer")?;
    require(fs_grid >= 256, "fs-grid", fs_grid, "must be >= 256")?;
    let tail_tol: f64 = num(raw, "tail-tol", "a real number")?;
    require(tail_tol > 0.0 && tail_tol.is_finite(), "tail-tol", tail_tol, "must be finite and > 0")?;
    let fixed_channel = flag(raw, "fixed-channel")?;
    let channel_file = raw.get("channel-file").map(PathBuf::from);
    require(
        !(fixed_channel && channel_file.is_some()),
        "channel-file",
        channel_file.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
        "cannot be combined with fixed-channel",
    )?;

    let cfg = ExperimentConfig {
        command,
        beta,
        period,
        tx,
        rx,
        taps,
        max_delay,
        deltas,
        snr_mode,
        snr_db,
        schemes,
        realizations,
        seed,
        symbol_set,
        gamma_min_db,
        gamma_max_db,
        gamma_step_db,
        p_out,
        n_symbols,
        oversample,
        window,
        noise,
        szego_n,
        fs_grid,
        tail_tol,
        fixed_channel,
        channel_file,
        dump_channels: raw.get("dump-channels").map(PathBuf::from),
        output: raw.get("output").map(PathBuf::from),
    };
    cfg.check_waveform()?;
    if command == CommandKind::SzegoCheck {
        require(cfg.deltas.len() == 1, "delta", value(raw, "delta").unwrap_or(""), "szego-check takes a single value")?;
    }
    if matches!(command, CommandKind::Ccdf | CommandKind::CcdfSim | CommandKind::Outage) {
        require(cfg.snr_db.len() == 1, "snr-db", value(raw, "snr-db").unwrap_or(""), "CCDF commands take a single value")?;
    }
    Ok(cfg)
}

impl ExperimentConfig {
    pub fn pulse(&self) -> RrcPulse {
        RrcPulse::new(self.beta, self.period).expect("validated pulse parameters")
    }

    pub fn is_waveform_command(&self) -> bool {
        matches!(self.command, CommandKind::Ccdf | CommandKind::CcdfSim | CommandKind::Outage)
    }

    /// Waveform configuration at δ with per-antenna power `power`.
    pub fn iapr(&self, delta: f64, power: f64) -> Result<IaprConfig, ConfigError> {
        IaprConfig::new(
            self.pulse(),
            delta,
            self.symbol_set,
            power,
            self.n_symbols,
            self.oversample,
            self.window,
        )
        .map_err(|e| match e {
            ftn_core::FtnError::InvalidParameter { name, value, constraint } => {
                let key = match name {
                    "N" => "symbols",
                    "Q" => "oversample",
                    "W_t" => "window",
                    "delta" => "delta",
                    _ => "snr-db",
                };
                bad(key, value, &constraint)
            }
            other => bad("waveform", "", &other.to_string()),
        })
    }

    fn check_waveform(&self) -> Result<(), ConfigError> {
        if !self.is_waveform_command() {
            return Ok(());
        }
        for &d in &self.deltas {
            self.iapr(d, 1.0)?;
        }
        Ok(())
    }

    /// CCDF grid as γ/P in dB, from gamma-min-db to gamma-max-db inclusive.
    pub fn gamma_grid_db(&self) -> Vec<f64> {
        let n = ((self.gamma_max_db - self.gamma_min_db) / self.gamma_step_db + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| self.gamma_min_db + i as f64 * self.gamma_step_db)
            .collect()
    }
}
