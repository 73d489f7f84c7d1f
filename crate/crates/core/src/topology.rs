//! Connectivity of finite signal nets and the glitch argument in executable
//! form.
//!
//! Path-connectedness cannot be observed from finitely many samples. What is
//! checked instead is delta-chain connectivity: two signals are linked when
//! they are joined by a chain of steps with compact-open distance at most
//! `delta`. A disconnection claim is backed by [`min_cross_distance`], the
//! smallest distance between the two pieces, which must exceed `delta`.

use crate::arbiter::{decision_of, delta as device_map, ArbiterParams, Decision, Sign};
use crate::error::{domain, Error, Result};
use crate::funcspace::{compact_open_distance, compact_open_distance_within, SampledSignal};
use crate::pulses::{input_path_point, InputPair, PulseShape};

/// Bisection stops once the skew magnitude drops below this.
pub const SKEW_UNDERFLOW: f64 = 1e-15;

#[derive(Debug, Clone)]
struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityReport {
    pub component_count: usize,
    /// Component of each input signal, numbered in order of first appearance.
    pub component_labels: Vec<usize>,
    pub delta: f64,
    pub min_cross_distance: Option<f64>,
}

/// Groups `signals` into delta-chain components under the truncated
/// compact-open metric.
pub fn epsilon_components(
    signals: &[SampledSignal],
    delta: f64,
    truncation: u32,
) -> Result<ConnectivityReport> {
    if signals.is_empty() {
        return domain("need at least one signal");
    }
    if !(delta > 0.0) {
        return domain(format!("delta must be positive, got {delta}"));
    }
    let n = signals.len();
    let mut sets = UnionFind::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if sets.find(i) == sets.find(j) {
                continue;
            }
            if compact_open_distance_within(&signals[i], &signals[j], truncation, delta)?.is_some() {
                sets.union(i, j);
            }
        }
    }
    let mut label_of_root = vec![usize::MAX; n];
    let mut next = 0;
    let component_labels = (0..n)
        .map(|i| {
            let root = sets.find(i);
            if label_of_root[root] == usize::MAX {
                label_of_root[root] = next;
                next += 1;
            }
            label_of_root[root]
        })
        .collect();
    Ok(ConnectivityReport {
        component_count: next,
        component_labels,
        delta,
        min_cross_distance: None,
    })
}

/// Smallest compact-open distance between a member of `a` and a member of
/// `b`.
pub fn min_cross_distance(a: &[SampledSignal], b: &[SampledSignal], truncation: u32) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return domain("both sets must be nonempty");
    }
    let mut best = f64::INFINITY;
    for f in a {
        for g in b {
            let d = if best.is_finite() {
                compact_open_distance_within(f, g, truncation, best)?
            } else {
                Some(compact_open_distance(f, g, truncation)?)
            };
            if let Some(d) = d {
                best = best.min(d);
            }
        }
    }
    Ok(best)
}

/// Largest compact-open distance between neighbours in a sequence.
pub fn max_consecutive_gap(signals: &[SampledSignal], truncation: u32) -> Result<f64> {
    let mut gap = 0.0_f64;
    for pair in signals.windows(2) {
        gap = gap.max(compact_open_distance(&pair[0], &pair[1], truncation)?);
    }
    Ok(gap)
}

/// `points` evenly spaced samples of the straight path from `from` to `to`.
pub fn straight_path(from: &InputPair, to: &InputPair, points: usize) -> Result<Vec<InputPair>> {
    if points < 2 {
        return domain(format!("a path needs at least 2 points, got {points}"));
    }
    let last = (points - 1) as f64;
    (0..points)
        .map(|j| input_path_point(from, to, j as f64 / last))
        .collect()
}

#[derive(Debug, Clone)]
pub struct ImageChainReport {
    pub connectivity: ConnectivityReport,
    /// Device outputs along the path, restricted to `[0, truncation]`.
    pub outputs: Vec<SampledSignal>,
    pub decisions: Vec<Option<Decision>>,
    pub max_consecutive_gap: f64,
}

impl ImageChainReport {
    pub fn endpoint_decisions(&self) -> (Option<Decision>, Option<Decision>) {
        (self.decisions[0], self.decisions[self.decisions.len() - 1])
    }

    /// True when both endpoints decide, with opposite signs.
    pub fn endpoints_disagree(&self) -> bool {
        matches!(self.endpoint_decisions(), (Some(a), Some(b)) if a.sign != b.sign)
    }
}

/// Pushes every path point through the device and checks delta-chain
/// connectivity of the images.
pub fn image_chain_check(
    path: &[InputPair],
    shape: &PulseShape,
    params: &ArbiterParams,
    delta: f64,
    truncation: u32,
) -> Result<ImageChainReport> {
    let (outputs, decisions) = path_images(path, shape, params, truncation)?;
    let gap = max_consecutive_gap(&outputs, truncation)?;
    let connectivity = epsilon_components(&outputs, delta, truncation)?;
    Ok(ImageChainReport {
        connectivity,
        outputs,
        decisions,
        max_consecutive_gap: gap,
    })
}

/// Device outputs (restricted to `[0, truncation]`) and decisions for every
/// path point.
pub fn path_images(
    path: &[InputPair],
    shape: &PulseShape,
    params: &ArbiterParams,
    truncation: u32,
) -> Result<(Vec<SampledSignal>, Vec<Option<Decision>>)> {
    if path.is_empty() {
        return domain("path is empty");
    }
    let mut outputs = Vec::with_capacity(path.len());
    let mut decisions = Vec::with_capacity(path.len());
    for input in path {
        let out = device_map(input, shape, params)?;
        decisions.push(decision_of(&out, params));
        outputs.push(out.truncated(truncation as f64)?);
    }
    Ok((outputs, decisions))
}

/// One bisection step of [`glitch_search`].
#[derive(Debug, Clone, PartialEq)]
pub struct SearchStep {
    pub iteration: usize,
    /// Bracket after this step.
    pub lo: f64,
    pub hi: f64,
    pub skew: f64,
    pub decision: Option<Decision>,
    /// Longest decision time seen so far; infinite once an input never
    /// decides.
    pub best_time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlitchSearchResult {
    pub succeeded: bool,
    /// The qualifying skew, or the slowest one seen if none qualified.
    pub skew: f64,
    /// `None` when that input never decides within the horizon.
    pub achieved_time: Option<f64>,
    pub iterations: usize,
    pub bracket: (f64, f64),
    pub steps: Vec<SearchStep>,
}

fn decide(base_time: f64, skew: f64, shape: &PulseShape, params: &ArbiterParams) -> Result<Option<Decision>> {
    let input = InputPair::with_skew(base_time, skew)?;
    Ok(decision_of(&device_map(&input, shape, params)?, params))
}

/// Bisects on the skew of `(base_time, base_time + skew)` inside `bracket`,
/// keeping endpoints with opposite decisions, until an input decides no
/// earlier than `target` (or never decides).
pub fn glitch_search(
    target: f64,
    base_time: f64,
    bracket: (f64, f64),
    shape: &PulseShape,
    params: &ArbiterParams,
    max_iterations: usize,
) -> Result<GlitchSearchResult> {
    params.validate()?;
    if !(target >= 0.0 && target < params.horizon) {
        return Err(Error::Precondition(format!(
            "target {target} must lie in [0, horizon = {})",
            params.horizon
        )));
    }
    let (lo0, hi0) = bracket;
    if !(lo0 < hi0) {
        return domain(format!("bracket ({lo0}, {hi0}) is empty"));
    }
    let lo_decision = decide(base_time, lo0, shape, params)?;
    let hi_decision = decide(base_time, hi0, shape, params)?;
    let lo_sign = match (lo_decision, hi_decision) {
        (Some(a), Some(b)) if a.sign != b.sign => a.sign,
        _ => {
            return Err(Error::Precondition(format!(
                "bracket endpoints must decide with opposite signs, got {lo_decision:?} and {hi_decision:?}"
            )))
        }
    };

    let time_of = |d: Option<Decision>| d.map_or(f64::INFINITY, |d| d.time);
    let (mut best_skew, mut best_time) = if time_of(lo_decision) >= time_of(hi_decision) {
        (lo0, time_of(lo_decision))
    } else {
        (hi0, time_of(hi_decision))
    };

    let mut lo = lo0;
    let mut width = hi0 - lo0;
    let mut steps = Vec::new();
    let mut succeeded = false;
    for iteration in 1..=max_iterations {
        let skew = lo + 0.5 * width;
        let decision = decide(base_time, skew, shape, params)?;
        width *= 0.5;
        if let Some(d) = decision {
            if d.sign == lo_sign {
                lo = skew;
            }
        }
        let t = time_of(decision);
        if t > best_time {
            best_time = t;
            best_skew = skew;
        }
        steps.push(SearchStep {
            iteration,
            lo,
            hi: lo + width,
            skew,
            decision,
            best_time,
        });
        if t >= target {
            succeeded = true;
            best_skew = skew;
            best_time = t;
            break;
        }
        if skew.abs() < SKEW_UNDERFLOW {
            break;
        }
    }
    Ok(GlitchSearchResult {
        succeeded,
        skew: best_skew,
        achieved_time: best_time.is_finite().then_some(best_time),
        iterations: steps.len(),
        bracket: (lo, lo + width),
        steps,
    })
}

/// `d*(delta(i_eps), delta(i))` for inputs whose `a` pulse is delayed by each
/// `eps`.
pub fn continuity_profile(
    input: &InputPair,
    perturbations: &[f64],
    shape: &PulseShape,
    params: &ArbiterParams,
    truncation: u32,
) -> Result<Vec<(f64, f64)>> {
    let reference = device_map(input, shape, params)?;
    perturbations
        .iter()
        .map(|&eps| {
            let moved = InputPair::new(input.t_a() + eps, input.t_b())?;
            let out = device_map(&moved, shape, params)?;
            Ok((eps, compact_open_distance(&out, &reference, truncation)?))
        })
        .collect()
}

/// Distances strictly decrease and the last one is at most `tolerance`.
pub fn continuity_holds(profile: &[(f64, f64)], tolerance: f64) -> bool {
    !profile.is_empty()
        && profile.windows(2).all(|w| w[1].1 < w[0].1)
        && profile[profile.len() - 1].1 <= tolerance
}

#[derive(Debug, Clone)]
pub struct ThreeStepConfig {
    pub path_from: InputPair,
    pub path_to: InputPair,
    pub path_points: usize,
    /// Outputs deciding no later than this form the early-decider sets.
    pub early_time: f64,
    pub continuity_input: InputPair,
    pub perturbations: Vec<f64>,
    pub continuity_tolerance: f64,
    pub truncation: u32,
}

impl Default for ThreeStepConfig {
    fn default() -> Self {
        Self {
            path_from: InputPair::new(0.2, 0.8).expect("valid input"),
            path_to: InputPair::new(0.8, 0.2).expect("valid input"),
            path_points: 512,
            early_time: 3.0,
            continuity_input: InputPair::new(0.2, 0.8).expect("valid input"),
            perturbations: vec![1e-2, 1e-3, 1e-4, 1e-5],
            continuity_tolerance: 1e-3,
            truncation: crate::funcspace::DEFAULT_TRUNCATION,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ThreeStepReport {
    pub continuity: Vec<(f64, f64)>,
    pub continuity_passed: bool,
    pub chain: ImageChainReport,
    /// Chaining threshold: the largest gap between neighbouring images.
    pub chain_delta: f64,
    pub early_positive: usize,
    pub early_negative: usize,
    /// Smallest distance between early `+` and early `-` deciders.
    pub early_separation: Option<f64>,
    /// Path points not decided by `early_time`.
    pub late_points: Vec<(InputPair, Option<Decision>)>,
}

impl ThreeStepReport {
    /// Continuity, a connected image, and separated early deciders together
    /// force late deciders on the path; this also checks that some exist.
    pub fn holds(&self) -> bool {
        self.continuity_passed
            && self.chain.connectivity.component_count == 1
            && self.early_separation.is_some_and(|s| s > self.chain_delta)
            && !self.late_points.is_empty()
    }
}

pub fn three_step_check(
    config: &ThreeStepConfig,
    shape: &PulseShape,
    params: &ArbiterParams,
) -> Result<ThreeStepReport> {
    let continuity = continuity_profile(
        &config.continuity_input,
        &config.perturbations,
        shape,
        params,
        config.truncation,
    )?;
    let continuity_passed = continuity_holds(&continuity, config.continuity_tolerance);

    let path = straight_path(&config.path_from, &config.path_to, config.path_points)?;
    let (outputs, decisions) = path_images(&path, shape, params, config.truncation)?;
    let chain_delta = max_consecutive_gap(&outputs, config.truncation)?;
    let connectivity = epsilon_components(&outputs, chain_delta.max(f64::MIN_POSITIVE), config.truncation)?;

    let mut early_pos = Vec::new();
    let mut early_neg = Vec::new();
    let mut late_points = Vec::new();
    for ((input, decision), out) in path.iter().zip(&decisions).zip(&outputs) {
        match decision {
            Some(d) if d.time <= config.early_time => match d.sign {
                Sign::Positive => early_pos.push(out.clone()),
                Sign::Negative => early_neg.push(out.clone()),
            },
            _ => late_points.push((*input, *decision)),
        }
    }
    let early_separation = if early_pos.is_empty() || early_neg.is_empty() {
        None
    } else {
        Some(min_cross_distance(&early_pos, &early_neg, config.truncation)?)
    };

    Ok(ThreeStepReport {
        continuity,
        continuity_passed,
        chain: ImageChainReport {
            connectivity,
            outputs,
            decisions,
            max_consecutive_gap: chain_delta,
        },
        chain_delta,
        early_positive: early_pos.len(),
        early_negative: early_neg.len(),
        early_separation,
        late_points,
    })
}
