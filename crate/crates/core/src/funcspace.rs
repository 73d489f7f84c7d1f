//! Sampled real functions of time and the distances between them.
//!
//! A [`SampledSignal`] stands in for a continuous function `R -> R`: it holds
//! samples on a uniform [`TimeGrid`] and an [`Extension`] rule for times the
//! grid does not reach. Every signal is treated as starting at `t = 0`, so
//! windows are `[0, r]`.
//!
//! Three distances are provided:
//!
//! * [`point_distance`], the usual `|x - y|` on the reals;
//! * [`window_distance`], the sup of the pointwise distance over `[0, r]`;
//! * [`compact_open_distance`], the weighted series
//!   `sum_{r=1..R} 2^-r d_r / (1 + d_r)`, which goes to zero exactly when a
//!   sequence converges uniformly on every bounded window.

use crate::error::{domain, Error, Result};

/// Default sample spacing for generated signals.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Default number of windows kept in the compact-open series. The dropped
/// tail is at most `2^-20`.
pub const DEFAULT_TRUNCATION: u32 = 20;

/// Tolerance, in grid steps, used when mapping a time onto a sample index.
const INDEX_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_start: f64,
    step: f64,
    count: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, step: f64, count: usize) -> Result<Self> {
        if !t_start.is_finite() {
            return domain("grid start must be finite");
        }
        if !(step.is_finite() && step > 0.0) {
            return domain(format!("grid step must be positive, got {step}"));
        }
        if count < 2 {
            return domain(format!("grid needs at least 2 samples, got {count}"));
        }
        Ok(Self {
            t_start,
            step,
            count,
        })
    }

    /// Grid starting at 0 whose last sample is at or just past `t_end`.
    pub fn covering(t_end: f64, step: f64) -> Result<Self> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return domain(format!("grid end must be positive, got {t_end}"));
        }
        if !(step.is_finite() && step > 0.0) {
            return domain(format!("grid step must be positive, got {step}"));
        }
        let intervals = (t_end / step - INDEX_SNAP).ceil().max(1.0) as usize;
        Self::new(0.0, step, intervals + 1)
    }

    /// `[0, DEFAULT_TRUNCATION]` at [`DEFAULT_STEP`].
    pub fn standard() -> Self {
        Self::covering(DEFAULT_TRUNCATION as f64, DEFAULT_STEP).expect("valid default grid")
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn time(&self, k: usize) -> f64 {
        self.t_start + k as f64 * self.step
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.count - 1)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |k| self.time(k))
    }

    /// Fractional sample position of `t`.
    fn position(&self, t: f64) -> f64 {
        (t - self.t_start) / self.step
    }

    /// Largest index whose sample time is `<= t`.
    pub fn index_at_or_before(&self, t: f64) -> Option<usize> {
        let pos = self.position(t);
        if pos < -INDEX_SNAP {
            return None;
        }
        let k = (pos + INDEX_SNAP).floor() as usize;
        Some(k.min(self.count - 1))
    }

    /// Smallest index whose sample time is `>= t`.
    pub fn index_at_or_after(&self, t: f64) -> Option<usize> {
        let pos = self.position(t);
        let k = (pos - INDEX_SNAP).ceil().max(0.0) as usize;
        (k < self.count).then_some(k)
    }

    /// True when `[a, b]` lies inside the sampled span.
    pub fn covers(&self, a: f64, b: f64) -> bool {
        self.position(a) >= -INDEX_SNAP && self.position(b) <= (self.count - 1) as f64 + INDEX_SNAP
    }

    fn starts_after(&self, t: f64) -> bool {
        self.position(t) < -INDEX_SNAP
    }

    fn ends_before(&self, t: f64) -> bool {
        self.position(t) > (self.count - 1) as f64 + INDEX_SNAP
    }
}

/// How a signal is continued beyond its sampled span.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    ZeroOutside,
    HoldEnds,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    grid: TimeGrid,
    values: Vec<f64>,
    extension: Extension,
}

impl SampledSignal {
    pub fn new(grid: TimeGrid, values: Vec<f64>, extension: Extension) -> Result<Self> {
        if values.len() != grid.count {
            return domain(format!(
                "expected {} samples, got {}",
                grid.count,
                values.len()
            ));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return domain(format!("sample {k} is not finite"));
        }
        Ok(Self {
            grid,
            values,
            extension,
        })
    }

    pub fn from_fn(grid: TimeGrid, extension: Extension, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.times().map(f).collect();
        Self::new(grid, values, extension)
    }

    pub fn zero(grid: TimeGrid, extension: Extension) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.count],
            extension,
        }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    pub fn negated(&self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| -v).collect(),
            extension: self.extension,
        }
    }

    /// Drops the samples after `t_end`. Window distances up to `t_end` are
    /// unchanged.
    pub fn truncated(&self, t_end: f64) -> Result<Self> {
        let last = self
            .grid
            .index_at_or_before(t_end)
            .ok_or_else(|| Error::Domain(format!("{t_end} precedes the grid")))?;
        if last == self.grid.count - 1 {
            return Ok(self.clone());
        }
        let grid = TimeGrid::new(self.grid.t_start, self.grid.step, last + 1)?;
        Self::new(grid, self.values[..=last].to_vec(), self.extension)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Value used for times before the first sample.
    pub fn before_start(&self) -> f64 {
        match self.extension {
            Extension::ZeroOutside => 0.0,
            Extension::HoldEnds => self.values[0],
        }
    }

    /// Value used for times after the last sample.
    pub fn after_end(&self) -> f64 {
        match self.extension {
            Extension::ZeroOutside => 0.0,
            Extension::HoldEnds => self.values[self.values.len() - 1],
        }
    }

    /// Evaluates the signal at an arbitrary time, interpolating linearly
    /// between samples.
    pub fn eval(&self, t: f64) -> f64 {
        let pos = self.grid.position(t);
        let last = (self.grid.count - 1) as f64;
        if pos < -INDEX_SNAP {
            return self.before_start();
        }
        if pos > last + INDEX_SNAP {
            return self.after_end();
        }
        let nearest = pos.round();
        if (pos - nearest).abs() <= INDEX_SNAP {
            return self.values[nearest.clamp(0.0, last) as usize];
        }
        let k = pos.floor() as usize;
        let frac = pos - k as f64;
        self.values[k] * (1.0 - frac) + self.values[k + 1] * frac
    }
}

/// The usual metric on the reals.
pub fn point_distance(x: f64, y: f64) -> Result<f64> {
    if !(x.is_finite() && y.is_finite()) {
        return domain(format!("point_distance needs finite inputs, got ({x}, {y})"));
    }
    Ok((x - y).abs())
}

fn check_same_grid(f: &SampledSignal, g: &SampledSignal) -> Result<()> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

fn sample_sup(f: &SampledSignal, g: &SampledSignal, from: usize, to: usize) -> f64 {
    f.values[from..=to]
        .iter()
        .zip(&g.values[from..=to])
        .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()))
}

/// Sup of `|f(t) - g(t)|` over the sampled times in `[0, r]`, plus the
/// extension values wherever the window runs past the grid.
pub fn window_distance(f: &SampledSignal, g: &SampledSignal, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return domain(format!("window radius must be positive, got {r}"));
    }
    check_same_grid(f, g)?;
    let grid = &f.grid;
    let mut sup = 0.0_f64;
    if grid.starts_after(0.0) {
        sup = sup.max((f.before_start() - g.before_start()).abs());
    }
    if let (Some(lo), Some(hi)) = (grid.index_at_or_after(0.0), grid.index_at_or_before(r)) {
        if lo <= hi {
            sup = sup.max(sample_sup(f, g, lo, hi));
        }
    }
    if grid.ends_before(r) {
        sup = sup.max((f.after_end() - g.after_end()).abs());
    }
    Ok(sup)
}

/// Incremental scan producing `d_1, d_2, ...` for consecutive integer radii.
struct WindowScan<'a> {
    f: &'a SampledSignal,
    g: &'a SampledSignal,
    next: Option<usize>,
    sup: f64,
    radius: u32,
}

impl<'a> WindowScan<'a> {
    fn new(f: &'a SampledSignal, g: &'a SampledSignal) -> Result<Self> {
        check_same_grid(f, g)?;
        let sup = if f.grid.starts_after(0.0) {
            (f.before_start() - g.before_start()).abs()
        } else {
            0.0
        };
        Ok(Self {
            f,
            g,
            next: f.grid.index_at_or_after(0.0),
            sup,
            radius: 0,
        })
    }
}

impl Iterator for WindowScan<'_> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        self.radius += 1;
        let r = self.radius as f64;
        let grid = &self.f.grid;
        if let (Some(lo), Some(hi)) = (self.next, grid.index_at_or_before(r)) {
            if lo <= hi {
                self.sup = self.sup.max(sample_sup(self.f, self.g, lo, hi));
                self.next = Some(hi + 1);
            }
        }
        let mut d = self.sup;
        if grid.ends_before(r) {
            d = d.max((self.f.after_end() - self.g.after_end()).abs());
        }
        Some(d)
    }
}

/// `[d_1, ..., d_R]` computed in one pass over the samples.
pub fn window_profile(f: &SampledSignal, g: &SampledSignal, truncation: u32) -> Result<Vec<f64>> {
    if truncation < 1 {
        return domain("truncation must be at least 1");
    }
    Ok(WindowScan::new(f, g)?.take(truncation as usize).collect())
}

#[inline]
fn series_term(r: u32, d: f64) -> f64 {
    0.5_f64.powi(r as i32) * (d / (1.0 + d))
}

/// Truncated compact-open metric `sum_{r=1..R} 2^-r d_r / (1 + d_r)`.
///
/// The result lies in `[0, 1)` and differs from the full series by at most
/// `2^-R`.
pub fn compact_open_distance(f: &SampledSignal, g: &SampledSignal, truncation: u32) -> Result<f64> {
    let profile = window_profile(f, g, truncation)?;
    Ok(profile
        .iter()
        .zip(1..)
        .map(|(&d, r)| series_term(r, d))
        .sum())
}

/// Like [`compact_open_distance`] but gives up, returning `None`, as soon
/// as the partial sum exceeds `cutoff`. Terms are non-negative, so a `None`
/// means the full value is above `cutoff` too.
pub fn compact_open_distance_within(
    f: &SampledSignal,
    g: &SampledSignal,
    truncation: u32,
    cutoff: f64,
) -> Result<Option<f64>> {
    if truncation < 1 {
        return domain("truncation must be at least 1");
    }
    let mut total = 0.0;
    for (d, r) in WindowScan::new(f, g)?.zip(1..=truncation) {
        total += series_term(r, d);
        if total > cutoff {
            return Ok(None);
        }
    }
    Ok(Some(total))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// `(n, d*(f_n, limit))` for every index examined.
    pub distances: Vec<(u32, f64)>,
    pub passed: bool,
    pub tolerance: f64,
    pub threshold_index: u32,
}

/// Checks `d*(f_n, f) <= tolerance` for every `n` in `[n_min, n_max]` and
/// that the last distance does not exceed the first.
///
/// The limit is realized on the grid of each sequence member, so members
/// are free to carry their own grids.
pub fn verify_convergence<S, L>(
    mut sequence: S,
    mut limit: L,
    tolerance: f64,
    n_min: u32,
    n_max: u32,
    truncation: u32,
) -> Result<ConvergenceReport>
where
    S: FnMut(u32) -> Result<SampledSignal>,
    L: FnMut(&TimeGrid) -> Result<SampledSignal>,
{
    if !(tolerance > 0.0) {
        return domain(format!("tolerance must be positive, got {tolerance}"));
    }
    if n_min > n_max {
        return domain(format!("empty index range [{n_min}, {n_max}]"));
    }
    let mut distances = Vec::with_capacity((n_max - n_min + 1) as usize);
    for n in n_min..=n_max {
        let f_n = sequence(n)?;
        let target = limit(f_n.grid())?;
        distances.push((n, compact_open_distance(&f_n, &target, truncation)?));
    }
    let within = distances.iter().all(|&(_, d)| d <= tolerance);
    let first = distances[0].1;
    let last = distances[distances.len() - 1].1;
    Ok(ConvergenceReport {
        passed: within && last <= first,
        distances,
        tolerance,
        threshold_index: n_min,
    })
}

/// Tent of height 1 on `[0, 2/n]` over `[0, DEFAULT_TRUNCATION]`.
pub fn tent_function(n: u32) -> Result<SampledSignal> {
    tent_function_with(n, DEFAULT_TRUNCATION as f64, DEFAULT_STEP)
}

/// Tent `f_n` with a grid fine enough to place samples exactly on `1/n` and
/// `2/n`; the spacing is `1/(n m)` for the smallest `m` keeping it at or
/// below `max_step`.
pub fn tent_function_with(n: u32, horizon: f64, max_step: f64) -> Result<SampledSignal> {
    if n < 1 {
        return domain("tent index must be at least 1");
    }
    if !(max_step > 0.0) {
        return domain(format!("step must be positive, got {max_step}"));
    }
    let per_ramp = (1.0 / (n as f64 * max_step) - INDEX_SNAP).ceil().max(1.0) as usize;
    let step = 1.0 / (n as f64 * per_ramp as f64);
    let grid = TimeGrid::covering(horizon, step)?;
    let m = per_ramp as f64;
    let values = (0..grid.count())
        .map(|k| {
            // Exact rational ramp values, independent of rounding in the times.
            if k <= per_ramp {
                k as f64 / m
            } else if k <= 2 * per_ramp {
                (2 * per_ramp - k) as f64 / m
            } else {
                0.0
            }
        })
        .collect();
    SampledSignal::new(grid, values, Extension::ZeroOutside)
}

/// `t -> e^(t - n)` on the standard grid.
pub fn exp_function(n: u32) -> Result<SampledSignal> {
    exp_function_on(n, TimeGrid::standard())
}

pub fn exp_function_on(n: u32, grid: TimeGrid) -> Result<SampledSignal> {
    if n < 1 {
        return domain("exponential index must be at least 1");
    }
    let shift = n as f64;
    SampledSignal::from_fn(grid, Extension::HoldEnds, |t| (t - shift).exp())
}
