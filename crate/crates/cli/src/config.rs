//! Run configuration: `key = value` lines, `#` starts a comment.

use std::fmt::Write as _;
use std::path::PathBuf;

use glitch_core::{ArbiterParams, InputPair, PulseShape, ThreeStepConfig, TimeGrid};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub arbiter: ArbiterParams,
    pub amplitude: f64,
    pub width: f64,
    /// Pulse width used for the signed-pulse nets of `connectivity`.
    pub net_width: f64,
    /// Start times of the finite net lie in `(0, net_radius]`.
    pub net_radius: f64,
    pub net_count: usize,
    pub grid_step: f64,
    pub truncation: u32,
    pub metrics_n_min: u32,
    pub metrics_n_max: u32,
    pub axiom_triples: usize,
    pub convergence_tolerance: f64,
    pub convergence_n_min: u32,
    pub convergence_n_max: u32,
    pub base_time: f64,
    pub sweep_skew_min: f64,
    pub sweep_skew_max: f64,
    pub sweep_points: usize,
    pub search_lo: f64,
    pub search_hi: f64,
    pub search_max_iterations: usize,
    pub path_points: usize,
    pub early_time: f64,
    pub out: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            arbiter: ArbiterParams::default(),
            amplitude: 1.0,
            width: 0.1,
            net_width: 1.0,
            net_radius: 1.0,
            net_count: 32,
            grid_step: glitch_core::DEFAULT_STEP,
            truncation: glitch_core::DEFAULT_TRUNCATION,
            metrics_n_min: 1,
            metrics_n_max: 20,
            axiom_triples: 100,
            convergence_tolerance: 1e-3,
            convergence_n_min: 20,
            convergence_n_max: 30,
            base_time: 0.5,
            sweep_skew_min: 1e-8,
            sweep_skew_max: 1e-3,
            sweep_points: 30,
            search_lo: -0.1,
            search_hi: 0.2,
            search_max_iterations: 64,
            path_points: 512,
            early_time: 3.0,
            out: PathBuf::from("out"),
            seed: 0,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Validation(format!("bad value for {key}: {value:?}")))
}

impl RunConfig {
    /// Keys in the order they are written.
    pub const KEYS: [&'static str; 31] = [
        "tau",
        "gain",
        "theta",
        "out_amp",
        "sat",
        "step",
        "horizon",
        "amplitude",
        "width",
        "net_width",
        "net_radius",
        "net_count",
        "grid_step",
        "truncation",
        "metrics_n_min",
        "metrics_n_max",
        "axiom_triples",
        "convergence_tolerance",
        "convergence_n_min",
        "convergence_n_max",
        "base_time",
        "sweep_skew_min",
        "sweep_skew_max",
        "sweep_points",
        "search_lo",
        "search_hi",
        "search_max_iterations",
        "path_points",
        "early_time",
        "out",
        "seed",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let a = &mut self.arbiter;
        match key {
            "tau" => a.tau = parse_num(key, value)?,
            "gain" => a.gain = parse_num(key, value)?,
            "theta" => a.theta = parse_num(key, value)?,
            "out_amp" => a.out_amp = parse_num(key, value)?,
            "sat" => a.sat = parse_num(key, value)?,
            "step" => a.step = parse_num(key, value)?,
            "horizon" => a.horizon = parse_num(key, value)?,
            "amplitude" => self.amplitude = parse_num(key, value)?,
            "width" => self.width = parse_num(key, value)?,
            "net_width" => self.net_width = parse_num(key, value)?,
            "net_radius" => self.net_radius = parse_num(key, value)?,
            "net_count" => self.net_count = parse_num(key, value)?,
            "grid_step" => self.grid_step = parse_num(key, value)?,
            "truncation" => self.truncation = parse_num(key, value)?,
            "metrics_n_min" => self.metrics_n_min = parse_num(key, value)?,
            "metrics_n_max" => self.metrics_n_max = parse_num(key, value)?,
            "axiom_triples" => self.axiom_triples = parse_num(key, value)?,
            "convergence_tolerance" => self.convergence_tolerance = parse_num(key, value)?,
            "convergence_n_min" => self.convergence_n_min = parse_num(key, value)?,
            "convergence_n_max" => self.convergence_n_max = parse_num(key, value)?,
            "base_time" => self.base_time = parse_num(key, value)?,
            "sweep_skew_min" => self.sweep_skew_min = parse_num(key, value)?,
            "sweep_skew_max" => self.sweep_skew_max = parse_num(key, value)?,
            "sweep_points" => self.sweep_points = parse_num(key, value)?,
            "search_lo" => self.search_lo = parse_num(key, value)?,
            "search_hi" => self.search_hi = parse_num(key, value)?,
            "search_max_iterations" => self.search_max_iterations = parse_num(key, value)?,
            "path_points" => self.path_points = parse_num(key, value)?,
            "early_time" => self.early_time = parse_num(key, value)?,
            "out" => {
                if value.is_empty() {
                    return Err(CliError::Validation("out must not be empty".into()));
                }
                self.out = PathBuf::from(value)
            }
            "seed" => self.seed = parse_num(key, value)?,
            _ => return Err(CliError::Validation(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let a = &self.arbiter;
        let f = |x: f64| format!("{x:?}");
        Some(match key {
            "tau" => f(a.tau),
            "gain" => f(a.gain),
            "theta" => f(a.theta),
            "out_amp" => f(a.out_amp),
            "sat" => f(a.sat),
            "step" => f(a.step),
            "horizon" => f(a.horizon),
            "amplitude" => f(self.amplitude),
            "width" => f(self.width),
            "net_width" => f(self.net_width),
            "net_radius" => f(self.net_radius),
            "net_count" => self.net_count.to_string(),
            "grid_step" => f(self.grid_step),
            "truncation" => self.truncation.to_string(),
            "metrics_n_min" => self.metrics_n_min.to_string(),
            "metrics_n_max" => self.metrics_n_max.to_string(),
            "axiom_triples" => self.axiom_triples.to_string(),
            "convergence_tolerance" => f(self.convergence_tolerance),
            "convergence_n_min" => self.convergence_n_min.to_string(),
            "convergence_n_max" => self.convergence_n_max.to_string(),
            "base_time" => f(self.base_time),
            "sweep_skew_min" => f(self.sweep_skew_min),
            "sweep_skew_max" => f(self.sweep_skew_max),
            "sweep_points" => self.sweep_points.to_string(),
            "search_lo" => f(self.search_lo),
            "search_hi" => f(self.search_hi),
            "search_max_iterations" => self.search_max_iterations.to_string(),
            "path_points" => self.path_points.to_string(),
            "early_time" => f(self.early_time),
            "out" => self.out.display().to_string(),
            "seed" => self.seed.to_string(),
            _ => return None,
        })
    }

    /// Applies `key = value` lines on top of `self`. Later lines win.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Validation(format!("line {}: expected `key = value`, got {raw:?}", i + 1))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| CliError::Validation(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    /// Defaults overridden by `text`, then validated.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut config = Self::default();
        config.apply_text(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_text(&self) -> String {
        let mut text = String::new();
        for key in Self::KEYS {
            let value = self.get(key).expect("listed key");
            writeln!(text, "{key} = {value}").expect("write to string");
        }
        text
    }

    pub fn shape(&self) -> PulseShape {
        PulseShape::new(self.amplitude, self.width).expect("validated shape")
    }

    pub fn net_shape(&self) -> PulseShape {
        PulseShape::new(self.amplitude, self.net_width).expect("validated shape")
    }

    /// Grid for function-space experiments: `[0, truncation]`.
    pub fn grid(&self) -> TimeGrid {
        TimeGrid::covering(self.truncation as f64, self.grid_step).expect("validated grid")
    }

    /// Log-spaced skews from `sweep_skew_min` to `sweep_skew_max`.
    pub fn sweep_skews(&self) -> Vec<f64> {
        let n = self.sweep_points;
        if n == 0 {
            return Vec::new();
        }
        if n == 1 {
            return vec![self.sweep_skew_min];
        }
        let (lo, hi) = (self.sweep_skew_min.ln(), self.sweep_skew_max.ln());
        let mut skews: Vec<f64> = (0..n)
            .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
            .collect();
        skews[0] = self.sweep_skew_min;
        skews[n - 1] = self.sweep_skew_max;
        skews
    }

    pub fn three_step(&self) -> ThreeStepConfig {
        ThreeStepConfig {
            path_points: self.path_points,
            early_time: self.early_time,
            truncation: self.truncation,
            ..ThreeStepConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let invalid = |msg: String| Err(CliError::Validation(msg));
        self.arbiter.validate()?;
        PulseShape::new(self.amplitude, self.width)?;
        PulseShape::new(self.amplitude, self.net_width)?;
        if self.truncation == 0 {
            return invalid("truncation must be at least 1".into());
        }
        TimeGrid::covering(self.truncation as f64, self.grid_step)?;
        if !(self.net_radius.is_finite() && self.net_radius > 0.0) {
            return invalid(format!("net_radius must be positive, got {}", self.net_radius));
        }
        if self.net_count < 2 {
            return invalid(format!("net_count must be at least 2, got {}", self.net_count));
        }
        if self.metrics_n_min == 0 || self.convergence_n_min == 0 {
            return invalid("sequence indices start at 1".into());
        }
        if !(self.convergence_tolerance > 0.0) {
            return invalid(format!(
                "convergence_tolerance must be positive, got {}",
                self.convergence_tolerance
            ));
        }
        if !(self.sweep_skew_min > 0.0 && self.sweep_skew_min <= self.sweep_skew_max) {
            return invalid(format!(
                "need 0 < sweep_skew_min <= sweep_skew_max, got {} and {}",
                self.sweep_skew_min, self.sweep_skew_max
            ));
        }
        InputPair::with_skew(self.base_time, self.sweep_skew_max)?;
        InputPair::with_skew(self.base_time, -self.sweep_skew_max)?;
        if !(self.search_lo < self.search_hi) {
            return invalid(format!(
                "search bracket ({}, {}) is empty",
                self.search_lo, self.search_hi
            ));
        }
        InputPair::with_skew(self.base_time, self.search_lo)?;
        InputPair::with_skew(self.base_time, self.search_hi)?;
        if self.path_points < 2 {
            return invalid(format!("path_points must be at least 2, got {}", self.path_points));
        }
        if !(self.early_time > 0.0 && self.early_time < self.arbiter.horizon) {
            return invalid(format!(
                "early_time must lie in (0, horizon), got {}",
                self.early_time
            ));
        }
        Ok(())
    }
}
