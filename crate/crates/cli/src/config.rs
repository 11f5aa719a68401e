//! Experiment configuration from flags and an optional `key = value` file.
//!
//! Both sources are collected into one string map (flags win), then resolved
//! against the preset's defaults and validated in one place.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Parser;
use serde::Serialize;
use walklab_core::params::DEFAULT_MAX_STEPS;
use walklab_core::{DriftVariant, Epsilon};

use crate::error::CliError;

pub const WORKERS_ENV: &str = "WALKLAB_WORKERS";

const KNOWN_KEYS: [&str; 12] = [
    "preset",
    "epsilon",
    "n",
    "m",
    "replicas",
    "seed",
    "variant",
    "cookies",
    "halfplane-x",
    "workers",
    "format",
    "out",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Speed,
    TanExponent,
    CouplingAudit,
    Envelope,
    LemmaB,
    WindowedProgress,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Speed => "speed",
            Preset::TanExponent => "tan-exponent",
            Preset::CouplingAudit => "coupling-audit",
            Preset::Envelope => "envelope",
            Preset::LemmaB => "lemma-b",
            Preset::WindowedProgress => "windowed-progress",
        }
    }

    fn defaults(self) -> (Vec<&'static str>, Vec<u64>, u64) {
        match self {
            Preset::Speed => (vec!["0.1"], vec![1_000_000], 100),
            Preset::TanExponent => (vec!["0"], (12..=18).map(|k| 1u64 << k).collect(), 200),
            Preset::CouplingAudit => (vec!["0.1"], vec![10_000], 1000),
            Preset::Envelope => (vec!["0"], vec![10_000], 1000),
            Preset::LemmaB => (vec!["0"], vec![10, 100, 1000], 1),
            Preset::WindowedProgress => (vec!["0.1"], vec![100_000], 100),
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [
            Preset::Speed,
            Preset::TanExponent,
            Preset::CouplingAudit,
            Preset::Envelope,
            Preset::LemmaB,
            Preset::WindowedProgress,
        ]
        .into_iter()
        .find(|p| p.name() == s)
        .ok_or_else(|| format!("unknown preset {s:?}"))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format {other:?} (expected csv or json)")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub epsilon: Vec<Epsilon>,
    pub n: Vec<u64>,
    /// Progress horizon for windowed-progress; `ceil(n^(15/16))` when absent.
    pub m: Option<u64>,
    pub replicas: u64,
    pub seed: u64,
    pub variant: DriftVariant,
    pub cookies: u32,
    pub halfplane_x: Option<i64>,
    pub workers: usize,
    pub format: OutputFormat,
    pub out: PathBuf,
}

impl ExperimentConfig {
    /// `key=value` pairs of every field that influences results, in a fixed
    /// order. Scheduling and destination (`workers`, `out`) are left out.
    pub fn result_keys(&self) -> Vec<(&'static str, String)> {
        let join = |v: Vec<String>| v.join(",");
        vec![
            ("preset", self.preset.to_string()),
            ("epsilon", join(self.epsilon.iter().map(|e| e.to_string()).collect())),
            ("n", join(self.n.iter().map(|n| n.to_string()).collect())),
            ("m", self.m.map(|m| m.to_string()).unwrap_or_default()),
            ("replicas", self.replicas.to_string()),
            ("seed", self.seed.to_string()),
            ("variant", self.variant.to_string()),
            ("cookies", self.cookies.to_string()),
            ("halfplane-x", self.halfplane_x.map(|x| x.to_string()).unwrap_or_default()),
            ("format", self.format.to_string()),
        ]
    }

    /// Window for windowed-progress at walk size `n`.
    pub fn progress_window(&self, n: u64) -> u64 {
        self.m.unwrap_or_else(|| min_progress_window(n))
    }
}

pub fn min_progress_window(n: u64) -> u64 {
    (n as f64).powf(15.0 / 16.0).ceil() as u64
}

#[derive(Debug, Parser)]
#[command(name = "walklab", version, about = "Excited random walk Monte Carlo experiments")]
struct Flags {
    /// speed | tan-exponent | coupling-audit | envelope | lemma-b | windowed-progress
    #[arg(long)]
    preset: Option<String>,
    /// Drift strengths, comma separated decimals in [0, 1/4)
    #[arg(long)]
    epsilon: Option<String>,
    /// Walk lengths, comma separated
    #[arg(long)]
    n: Option<String>,
    /// Window width for windowed-progress
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    replicas: Option<String>,
    /// Master seed
    #[arg(long)]
    seed: Option<String>,
    /// fresh | literal
    #[arg(long)]
    variant: Option<String>,
    /// Cookies per site
    #[arg(long)]
    cookies: Option<String>,
    /// Pre-visit every site with x <= this value
    #[arg(long = "halfplane-x", allow_hyphen_values = true)]
    halfplane_x: Option<String>,
    #[arg(long)]
    workers: Option<String>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<String>,
    /// `key = value` file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn entries(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("preset", &self.preset),
            ("epsilon", &self.epsilon),
            ("n", &self.n),
            ("m", &self.m),
            ("replicas", &self.replicas),
            ("seed", &self.seed),
            ("variant", &self.variant),
            ("cookies", &self.cookies),
            ("halfplane-x", &self.halfplane_x),
            ("workers", &self.workers),
            ("format", &self.format),
            ("out", &self.out),
        ]
    }
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(at) => &raw[..at],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key = value", lineno + 1)))?;
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(CliError::usage(format!("unknown config key {key:?}")));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config_text(&text)
}

/// Outcome of argument parsing: either a config to run or text to print.
#[derive(Debug)]
pub enum Parsed {
    Run(ExperimentConfig),
    Exit { message: String, code: i32 },
}

/// Resolves flags, the optional config file and `WALKLAB_WORKERS` into a
/// validated config. `env_workers` is passed in so callers control the
/// environment.
pub fn parse_config<I, T>(argv: I, env_workers: Option<String>) -> Result<Parsed, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let flags = match Flags::try_parse_from(argv) {
        Ok(f) => f,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Ok(Parsed::Exit {
                message: e.render().to_string(),
                code,
            });
        }
    };
    let mut raw = match &flags.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    for (key, value) in flags.entries() {
        if let Some(v) = value {
            raw.insert(key.to_string(), v.clone());
        }
    }
    if let Some(w) = env_workers.filter(|w| !w.trim().is_empty()) {
        raw.insert("workers".to_string(), w);
    }
    resolve(&raw).map(Parsed::Run)
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .replace('_', "")
        .parse()
        .map_err(|e| CliError::usage(format!("--{key} {value:?}: {e}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, CliError>
where
    T::Err: fmt::Display,
{
    let items: Vec<T> = value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_value(key, s))
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(CliError::usage(format!("--{key} needs at least one value")));
    }
    Ok(items)
}

pub fn resolve(raw: &BTreeMap<String, String>) -> Result<ExperimentConfig, CliError> {
    if let Some(bad) = raw.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(CliError::usage(format!("unknown config key {bad:?}")));
    }
    let get = |k: &str| raw.get(k).map(String::as_str);
    let preset: Preset = parse_value("preset", get("preset").ok_or_else(|| CliError::usage("--preset is required"))?)?;
    let (eps_default, n_default, replicas_default) = preset.defaults();

    let epsilon: Vec<Epsilon> = match get("epsilon") {
        Some(v) => parse_list("epsilon", v)?,
        None => eps_default.iter().map(|s| s.parse().expect("preset epsilon")).collect(),
    };
    let n: Vec<u64> = match get("n") {
        Some(v) => parse_list("n", v)?,
        None => n_default,
    };
    let m = get("m").map(|v| parse_value::<u64>("m", v)).transpose()?;
    let replicas = match get("replicas") {
        Some(v) => parse_value("replicas", v)?,
        None => replicas_default,
    };
    let seed = get("seed").map(|v| parse_value("seed", v)).transpose()?.unwrap_or(0);
    let variant = get("variant").map(|v| parse_value("variant", v)).transpose()?.unwrap_or_default();
    let cookies = get("cookies").map(|v| parse_value("cookies", v)).transpose()?.unwrap_or(1);
    let halfplane_x = get("halfplane-x").map(|v| parse_value("halfplane-x", v)).transpose()?;
    let workers = match get("workers") {
        Some(v) => parse_value("workers", v)?,
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    let format = get("format").map(|v| parse_value("format", v)).transpose()?.unwrap_or(OutputFormat::Csv);
    let out = PathBuf::from(get("out").unwrap_or("walklab-out"));

    let config = ExperimentConfig {
        preset,
        epsilon,
        n,
        m,
        replicas,
        seed,
        variant,
        cookies,
        halfplane_x,
        workers,
        format,
        out,
    };
    validate(&config)?;
    Ok(config)
}

fn validate(c: &ExperimentConfig) -> Result<(), CliError> {
    if c.replicas == 0 {
        return Err(CliError::usage("--replicas must be at least 1"));
    }
    if c.cookies == 0 {
        return Err(CliError::usage("--cookies must be at least 1"));
    }
    if c.workers == 0 {
        return Err(CliError::usage("--workers must be at least 1"));
    }
    if c.n.contains(&0) && c.preset != Preset::LemmaB {
        return Err(CliError::usage("--n values must be positive"));
    }
    match c.preset {
        Preset::CouplingAudit if c.variant != DriftVariant::FreshDrift => {
            return Err(CliError::usage("coupling-audit needs --variant fresh"));
        }
        Preset::WindowedProgress => {
            for &n in &c.n {
                let m = c.progress_window(n);
                let floor = min_progress_window(n);
                if m < floor {
                    return Err(CliError::usage(format!("--m {m} is below n^(15/16) = {floor} for n = {n}")));
                }
                if m > n {
                    return Err(CliError::usage(format!("--m {m} exceeds n = {n}")));
                }
            }
        }
        Preset::LemmaB if c.n.iter().any(|&n| n == 0 || n > walklab_core::stats::EXACT_TAIL_MAX_N) => {
            return Err(CliError::usage("lemma-b grid needs 1 <= n <= 10000"));
        }
        _ => {}
    }
    let steps_per_walk = |n: u64| if c.preset == Preset::WindowedProgress { 2 * n } else { n };
    if let Some(&big) = c.n.iter().find(|&&n| steps_per_walk(n) > DEFAULT_MAX_STEPS) {
        return Err(CliError::Capacity(format!(
            "n = {big} needs {} steps, budget is {DEFAULT_MAX_STEPS}",
            steps_per_walk(big)
        )));
    }
    Ok(())
}
