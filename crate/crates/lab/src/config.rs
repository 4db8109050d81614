//! Run configuration as flat `section.key = value` text.
//!
//! Blank lines and lines starting with `#` are ignored. Lists are comma
//! separated; norm indices are `s,p,r` triples separated by `;`, with `inf`
//! for infinite exponents.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use mhdlab_core::data::DataSpec;
use mhdlab_core::lp::{BesovIndex, LPFilterBank};
use mhdlab_core::solver::SolverConfig;
use mhdlab_core::{make_grid, DataError, SolveError, SpectralError};

use crate::error::ConfigError;

/// What a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Viscosity,
    DataPerturbation,
    Mollification,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Viscosity => "viscosity",
            SweepAxis::DataPerturbation => "data-perturbation",
            SweepAxis::Mollification => "mollification",
        }
    }
}

impl FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "viscosity" => Ok(SweepAxis::Viscosity),
            "data-perturbation" => Ok(SweepAxis::DataPerturbation),
            "mollification" => Ok(SweepAxis::Mollification),
            _ => Err(format!(
                "unknown sweep kind `{s}` (viscosity, data-perturbation, mollification)"
            )),
        }
    }
}

/// Which field a data perturbation is added to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbationTarget {
    Velocity,
    Magnetic,
    Both,
}

impl PerturbationTarget {
    pub fn name(self) -> &'static str {
        match self {
            PerturbationTarget::Velocity => "velocity",
            PerturbationTarget::Magnetic => "magnetic",
            PerturbationTarget::Both => "both",
        }
    }
}

impl FromStr for PerturbationTarget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "velocity" => Ok(PerturbationTarget::Velocity),
            "magnetic" => Ok(PerturbationTarget::Magnetic),
            "both" => Ok(PerturbationTarget::Both),
            _ => Err(format!("unknown target `{s}` (velocity, magnetic, both)")),
        }
    }
}

/// Time step: fixed, or a fraction of the advective CFL step of the
/// initial state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeStep {
    Fixed(f64),
    Cfl(f64),
}

impl fmt::Display for TimeStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeStep::Fixed(dt) => write!(f, "{dt:?}"),
            TimeStep::Cfl(c) => write!(f, "cfl:{c:?}"),
        }
    }
}

impl FromStr for TimeStep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.strip_prefix("cfl:") {
            Some(c) => parse_f64(c).map(TimeStep::Cfl),
            None => parse_f64(s).map(TimeStep::Fixed),
        }
    }
}

/// Everything a CLI run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub n: usize,
    pub mu: f64,
    pub nu: f64,
    pub dt: TimeStep,
    pub t_end: f64,
    pub snapshot_stride: usize,
    pub blowup_threshold: f64,
    pub cfl_limit: f64,
    pub norms: Vec<BesovIndex>,
    pub sweep_kind: SweepAxis,
    pub sweep_values: Vec<f64>,
    /// Mollification indices `j` for split runs.
    pub sweep_levels: Vec<i32>,
    pub data: DataSpec,
    pub perturbation_seed: u64,
    pub perturbation_amplitude: f64,
    pub perturbation_target: PerturbationTarget,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let solver = SolverConfig::default();
        Self {
            dim: 2,
            n: 64,
            mu: solver.mu,
            nu: solver.nu,
            dt: TimeStep::Fixed(solver.dt),
            t_end: solver.t_end,
            snapshot_stride: solver.snapshot_stride,
            blowup_threshold: solver.blowup_threshold,
            cfl_limit: solver.cfl_limit,
            norms: vec![
                BesovIndex::sobolev(2.5),
                BesovIndex {
                    s: 2.1,
                    p: 4.0,
                    r: 2.0,
                },
            ],
            sweep_kind: SweepAxis::Viscosity,
            sweep_values: (1..=6).map(|k| 0.1 * 0.5f64.powi(k)).collect(),
            sweep_levels: vec![2, 3],
            data: DataSpec::default(),
            perturbation_seed: 7,
            perturbation_amplitude: 0.1,
            perturbation_target: PerturbationTarget::Velocity,
            output_dir: None,
        }
    }
}

const KEYS: [&str; 22] = [
    "grid.dim",
    "grid.n",
    "solver.mu",
    "solver.nu",
    "solver.dt",
    "solver.t_end",
    "solver.snapshot_stride",
    "solver.blowup_threshold",
    "solver.cfl_limit",
    "norms.indices",
    "sweep.kind",
    "sweep.values",
    "sweep.levels",
    "data.seed",
    "data.gamma",
    "data.band",
    "data.amplitude",
    "data.s",
    "perturbation.seed",
    "perturbation.amplitude",
    "perturbation.target",
    "output.dir",
];

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| format!("`{s}` is not a number"))
}

fn parse_num<T: FromStr>(s: &str) -> Result<T, String> {
    s.trim()
        .parse::<T>()
        .map_err(|_| format!("`{s}` is not a valid integer"))
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| item(x.trim())).collect()
}

/// Parses `"s,p,r; s,p,r"`.
pub fn parse_indices(s: &str) -> Result<Vec<BesovIndex>, String> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let v = parse_list(t, parse_f64)?;
            if v.len() != 3 {
                return Err(format!("`{}` is not an s,p,r triple", t.trim()));
            }
            BesovIndex::new(v[0], v[1], v[2]).map_err(|e| e.to_string())
        })
        .collect()
}

fn join<T>(items: &[T], sep: &str, f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(sep)
}

fn index_text(idx: &BesovIndex) -> String {
    format!("{:?},{:?},{:?}", idx.s, idx.p, idx.r)
}

impl RunConfig {
    /// Parses the text form; keys not given keep their defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut seen = BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError::new(format!("line {}", lineno + 1), "expected `key = value`")
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(ConfigError::new(key, "given more than once"));
            }
            cfg.set(key, value).map_err(|m| ConfigError::new(key, m))?;
        }
        Ok(cfg)
    }

    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "grid.dim" => self.dim = parse_num(value)?,
            "grid.n" => self.n = parse_num(value)?,
            "solver.mu" => self.mu = parse_f64(value)?,
            "solver.nu" => self.nu = parse_f64(value)?,
            "solver.dt" => self.dt = value.parse()?,
            "solver.t_end" => self.t_end = parse_f64(value)?,
            "solver.snapshot_stride" => self.snapshot_stride = parse_num(value)?,
            "solver.blowup_threshold" => self.blowup_threshold = parse_f64(value)?,
            "solver.cfl_limit" => self.cfl_limit = parse_f64(value)?,
            "norms.indices" => self.norms = parse_indices(value)?,
            "sweep.kind" => self.sweep_kind = value.parse()?,
            "sweep.values" => self.sweep_values = parse_list(value, parse_f64)?,
            "sweep.levels" => self.sweep_levels = parse_list(value, parse_num)?,
            "data.seed" => self.data.seed = parse_num(value)?,
            "data.gamma" => self.data.gamma = parse_f64(value)?,
            "data.band" => {
                let b = parse_list(value, parse_f64)?;
                if b.len() != 2 {
                    return Err("expected `k_min,k_max`".into());
                }
                self.data.band = (b[0], b[1]);
            }
            "data.amplitude" => self.data.amplitude = parse_f64(value)?,
            "data.s" => self.data.s = parse_f64(value)?,
            "perturbation.seed" => self.perturbation_seed = parse_num(value)?,
            "perturbation.amplitude" => self.perturbation_amplitude = parse_f64(value)?,
            "perturbation.target" => self.perturbation_target = value.parse()?,
            "output.dir" => self.output_dir = (!value.is_empty()).then(|| PathBuf::from(value)),
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Every key in a fixed order; `parse(serialize(c)) == c`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put(KEYS[0], self.dim.to_string());
        put(KEYS[1], self.n.to_string());
        put(KEYS[2], format!("{:?}", self.mu));
        put(KEYS[3], format!("{:?}", self.nu));
        put(KEYS[4], self.dt.to_string());
        put(KEYS[5], format!("{:?}", self.t_end));
        put(KEYS[6], self.snapshot_stride.to_string());
        put(KEYS[7], format!("{:?}", self.blowup_threshold));
        put(KEYS[8], format!("{:?}", self.cfl_limit));
        put(KEYS[9], join(&self.norms, "; ", index_text));
        put(KEYS[10], self.sweep_kind.name().to_string());
        put(
            KEYS[11],
            join(&self.sweep_values, ",", |v| format!("{v:?}")),
        );
        put(KEYS[12], join(&self.sweep_levels, ",", |v| v.to_string()));
        put(KEYS[13], self.data.seed.to_string());
        put(KEYS[14], format!("{:?}", self.data.gamma));
        put(
            KEYS[15],
            format!("{:?},{:?}", self.data.band.0, self.data.band.1),
        );
        put(KEYS[16], format!("{:?}", self.data.amplitude));
        put(KEYS[17], format!("{:?}", self.data.s));
        put(KEYS[18], self.perturbation_seed.to_string());
        put(KEYS[19], format!("{:?}", self.perturbation_amplitude));
        put(KEYS[20], self.perturbation_target.name().to_string());
        if let Some(dir) = &self.output_dir {
            put(KEYS[21], dir.display().to_string());
        }
        out
    }

    /// Solver settings with a fixed step; a CFL-relative step needs the
    /// initial speed, see [`RunConfig::solver_for_speed`].
    pub fn solver(&self) -> SolverConfig {
        let dt = match self.dt {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Cfl(_) => SolverConfig::default().dt,
        };
        SolverConfig {
            mu: self.mu,
            nu: self.nu,
            dt,
            t_end: self.t_end,
            snapshot_stride: self.snapshot_stride,
            blowup_threshold: self.blowup_threshold,
            cfl_limit: self.cfl_limit,
        }
    }

    /// Solver settings for initial data whose summed peak speed is `speed`.
    pub fn solver_for_speed(&self, speed: f64) -> SolverConfig {
        let mut cfg = self.solver();
        if let TimeStep::Cfl(fraction) = self.dt {
            if speed > 0.0 {
                cfg.dt = fraction * (2.0 * std::f64::consts::PI / self.n as f64) / speed;
            }
        }
        cfg
    }

    /// Checks every field against the ranges of the module that uses it.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let grid = make_grid(self.dim, self.n).map_err(|e| match e {
            SpectralError::UnsupportedDimension(_) => ConfigError::new("grid.dim", e.to_string()),
            _ => ConfigError::new("grid.n", e.to_string()),
        })?;
        if let TimeStep::Cfl(c) = self.dt {
            if !(c > 0.0 && c.is_finite()) {
                return Err(ConfigError::new(
                    "solver.dt",
                    "CFL fraction must be positive",
                ));
            }
        }
        self.solver().validate().map_err(|e| match e {
            SolveError::InvalidConfig(msg) => {
                let name = msg.split_whitespace().next().unwrap_or("");
                ConfigError::new(format!("solver.{name}"), msg)
            }
            other => ConfigError::new("solver", other.to_string()),
        })?;
        self.data.validate(&grid).map_err(|e| {
            let field = match e {
                DataError::InvalidDecay(_) => "data.gamma",
                DataError::InvalidAmplitude(_) => "data.amplitude",
                DataError::EmptyBand(..) | DataError::BandAboveCutoff { .. } => "data.band",
            };
            ConfigError::new(field, e.to_string())
        })?;
        if !self.data.s.is_finite() {
            return Err(ConfigError::new("data.s", "must be finite"));
        }
        if self.norms.is_empty() {
            return Err(ConfigError::new(
                "norms.indices",
                "at least one index is required",
            ));
        }
        if self
            .sweep_values
            .iter()
            .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return Err(ConfigError::new(
                "sweep.values",
                "values must be finite and non-negative",
            ));
        }
        if self.sweep_values.windows(2).any(|w| w[1] > w[0]) {
            return Err(ConfigError::new(
                "sweep.values",
                "values must decrease toward 0",
            ));
        }
        let bank =
            LPFilterBank::new(&grid).map_err(|e| ConfigError::new("grid.n", e.to_string()))?;
        if let Some(j) = self
            .sweep_levels
            .iter()
            .find(|&&j| j < -1 || j > bank.j_max())
        {
            return Err(ConfigError::new(
                "sweep.levels",
                format!("level {j} outside -1..={}", bank.j_max()),
            ));
        }
        if !(self.perturbation_amplitude.is_finite() && self.perturbation_amplitude >= 0.0) {
            return Err(ConfigError::new(
                "perturbation.amplitude",
                "must be finite and non-negative",
            ));
        }
        Ok(())
    }
}
