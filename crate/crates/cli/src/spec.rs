//! Experiment settings merged from flags and an optional key=value file.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use ncmac::{p_grid, ComponentKind, MacPolicy, MprConfig, SimConfig, TrafficType};

/// Keys accepted in a config file. Each matches a long flag.
const FILE_KEYS: &[&str] = &[
    "topology", "n", "x1", "nc", "mpr", "cap2", "mac", "traffic", "p", "iters", "seed", "g",
    "horizon", "out", "trace", "plot-script",
];

#[derive(Args, Debug, Default, Clone)]
pub struct Opts {
    /// Component kind: cross or x.
    #[arg(long)]
    pub topology: Option<ComponentKind>,
    /// Node count (the last node is the relay).
    #[arg(long)]
    pub n: Option<usize>,
    /// Size of the first edge set of an X component.
    #[arg(long)]
    pub x1: Option<usize>,
    /// Enable XOR coding at the relay.
    #[arg(long)]
    pub nc: bool,
    /// Multi-packet reception order m.
    #[arg(long)]
    pub mpr: Option<usize>,
    /// Allow at most two simultaneous transmitters even when m > 2.
    #[arg(long)]
    pub cap2: bool,
    /// node-fair, flow-fair-literal or flow-fair-generalized.
    #[arg(long)]
    pub mac: Option<MacPolicy>,
    /// unicast or broadcast.
    #[arg(long)]
    pub traffic: Option<TrafficType>,
    /// Offered-load grid start:step:end.
    #[arg(long)]
    pub p: Option<String>,
    /// Monte Carlo iterations per grid point.
    #[arg(long)]
    pub iters: Option<u32>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Load granularity G (rho_i = k_i / G).
    #[arg(long)]
    pub g: Option<u32>,
    /// Measurement horizon in slots (defaults to G).
    #[arg(long)]
    pub horizon: Option<u32>,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-slot trace CSV of the first draw at every grid point.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write a matplotlib script that plots the CSV.
    #[arg(long = "plot-script")]
    pub plot_script: Option<PathBuf>,
    /// Flat key=value file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub sim: SimConfig,
    pub grid: Vec<f64>,
    pub seed_given: bool,
    pub out: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub plot_script: Option<PathBuf>,
}

pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key=value, got '{line}'", i + 1))?;
        let key = key.trim();
        if !FILE_KEYS.contains(&key) {
            bail!("line {}: unknown key '{key}'", i + 1);
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn from_file<T: FromStr>(file: &BTreeMap<String, String>, key: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    file.get(key)
        .map(|v| v.parse::<T>().map_err(|e| anyhow!("config key '{key}': {e}")))
        .transpose()
}

fn parse_bool(file: &BTreeMap<String, String>, key: &str) -> Result<bool> {
    match file.get(key).map(String::as_str) {
        None | Some("false") | Some("0") | Some("no") => Ok(false),
        Some("true") | Some("1") | Some("yes") => Ok(true),
        Some(other) => bail!("config key '{key}': expected true or false, got '{other}'"),
    }
}

pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, step, end] = parts.as_slice() else {
        bail!("load grid must be start:step:end, got '{s}'");
    };
    let num = |v: &str| v.trim().parse::<f64>().with_context(|| format!("bad number '{v}' in load grid"));
    Ok(p_grid(num(start)?, num(step)?, num(end)?)?)
}

impl Opts {
    pub fn resolve(&self) -> Result<ExperimentSpec> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                parse_config_file(&text).with_context(|| format!("in {}", path.display()))?
            }
            None => BTreeMap::new(),
        };
        let kind = match self.topology {
            Some(k) => k,
            None => from_file(&file, "topology")?.unwrap_or(ComponentKind::Cross),
        };
        let n = match self.n {
            Some(n) => n,
            None => from_file(&file, "n")?.unwrap_or(5),
        };
        let x1 = match self.x1 {
            Some(v) => v,
            None => from_file(&file, "x1")?.unwrap_or((n.max(3) - 1) / 2),
        };
        let m = match self.mpr {
            Some(m) => m,
            None => from_file(&file, "mpr")?.unwrap_or(1),
        };
        let nc = self.nc || parse_bool(&file, "nc")?;
        let cap2 = self.cap2 || parse_bool(&file, "cap2")?;
        let mac = match self.mac {
            Some(m) => m,
            None => from_file(&file, "mac")?.unwrap_or(MacPolicy::NodeFair),
        };
        let traffic = match self.traffic {
            Some(t) => t,
            None => from_file(&file, "traffic")?.unwrap_or(TrafficType::Unicast),
        };
        let grid_text = match &self.p {
            Some(p) => p.clone(),
            None => file.get("p").cloned().unwrap_or_else(|| "0.05:0.05:3".to_string()),
        };
        let iterations = match self.iters {
            Some(v) => v,
            None => from_file(&file, "iters")?.unwrap_or(1000),
        };
        let seed = match self.seed {
            Some(s) => Some(s),
            None => from_file(&file, "seed")?,
        };
        let g = match self.g {
            Some(v) => v,
            None => from_file(&file, "g")?.unwrap_or(100),
        };
        let horizon = match self.horizon {
            Some(v) => v,
            None => from_file(&file, "horizon")?.unwrap_or(g),
        };
        let path = |flag: &Option<PathBuf>, key: &str| flag.clone().or_else(|| file.get(key).map(PathBuf::from));

        let sim = SimConfig {
            kind,
            n,
            x1,
            traffic,
            nc,
            mpr: MprConfig { m, cap2 },
            mac,
            horizon,
            g,
            iterations,
            seed: seed.unwrap_or(0),
        };
        sim.validate()?;
        Ok(ExperimentSpec {
            sim,
            grid: parse_grid(&grid_text)?,
            seed_given: seed.is_some(),
            out: path(&self.out, "out"),
            trace: path(&self.trace, "trace"),
            plot_script: path(&self.plot_script, "plot-script"),
        })
    }
}
