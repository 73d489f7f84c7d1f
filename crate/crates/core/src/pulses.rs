//! Pulse families, pulse-pair inputs, and the explicit paths through them.

use crate::error::{domain, Result};
use crate::funcspace::{compact_open_distance, Extension, SampledSignal, TimeGrid};
use std::f64::consts::PI;

/// Tolerance, in grid steps, for treating a pulse start as grid-aligned.
const ALIGN_SNAP: f64 = 1e-9;

/// Raised-cosine pulse `p_0(t) = A (1 - cos(2 pi t / w)) / 2` on `[0, w]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseShape {
    amplitude: f64,
    width: f64,
}

impl PulseShape {
    pub fn new(amplitude: f64, width: f64) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude > 0.0) {
            return domain(format!("pulse amplitude must be positive, got {amplitude}"));
        }
        if !(width.is_finite() && width > 0.0) {
            return domain(format!("pulse width must be positive, got {width}"));
        }
        Ok(Self { amplitude, width })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Value of the pulse starting at time 0.
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        if (0.0..=self.width).contains(&t) {
            0.5 * self.amplitude * (1.0 - (2.0 * PI * t / self.width).cos())
        } else {
            0.0
        }
    }
}

impl Default for PulseShape {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            width: 0.1,
        }
    }
}

/// Arrival times of the pulses on wires `a` and `b`, both in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputPair {
    t_a: f64,
    t_b: f64,
}

impl InputPair {
    pub fn new(t_a: f64, t_b: f64) -> Result<Self> {
        for (wire, t) in [("a", t_a), ("b", t_b)] {
            if !(t > 0.0 && t < 1.0) {
                return domain(format!("arrival time on wire {wire} must lie in (0, 1), got {t}"));
            }
        }
        Ok(Self { t_a, t_b })
    }

    /// Input whose `b` pulse trails the `a` pulse by `skew`.
    pub fn with_skew(base_time: f64, skew: f64) -> Result<Self> {
        Self::new(base_time, base_time + skew)
    }

    pub fn t_a(&self) -> f64 {
        self.t_a
    }

    pub fn t_b(&self) -> f64 {
        self.t_b
    }

    /// `t_b - t_a`; positive when `a` arrives first.
    pub fn skew(&self) -> f64 {
        self.t_b - self.t_a
    }

    pub fn swapped(&self) -> Self {
        Self {
            t_a: self.t_b,
            t_b: self.t_a,
        }
    }
}

/// `+p_s`, `-p_s`, or the zero function (the pulse that never arrives).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignedPulse {
    Positive(f64),
    Negative(f64),
    Zero,
}

impl SignedPulse {
    pub fn to_signal(self, shape: &PulseShape, grid: TimeGrid) -> Result<SampledSignal> {
        match self {
            SignedPulse::Positive(s) => pulse_signal(shape, s, grid),
            SignedPulse::Negative(s) => Ok(pulse_signal(shape, s, grid)?.negated()),
            SignedPulse::Zero => Ok(SampledSignal::zero(grid, Extension::ZeroOutside)),
        }
    }
}

/// Samples of `p_s(t) = p_0(t - s)`.
///
/// The offset `t_k - s` is formed from the integer index distance to the
/// start, so shifting `s` by a whole number of grid steps shifts the samples
/// bit for bit.
pub fn pulse_signal(shape: &PulseShape, s: f64, grid: TimeGrid) -> Result<SampledSignal> {
    if !(s.is_finite() && s >= 0.0) {
        return domain(format!("pulse start must be finite and non-negative, got {s}"));
    }
    let pos = (s - grid.t_start()) / grid.step();
    let nearest = pos.round();
    let (base, frac) = if (pos - nearest).abs() <= ALIGN_SNAP {
        (nearest, 0.0)
    } else {
        (pos.floor(), pos - pos.floor())
    };
    let step = grid.step();
    let values = (0..grid.count())
        .map(|k| shape.value(((k as f64 - base) - frac) * step))
        .collect();
    SampledSignal::new(grid, values, Extension::ZeroOutside)
}

/// Component signals `(p_{t_a}, p_{t_b})` for the two wires.
pub fn input_signals(
    pair: &InputPair,
    shape: &PulseShape,
    grid: TimeGrid,
) -> Result<(SampledSignal, SampledSignal)> {
    Ok((
        pulse_signal(shape, pair.t_a, grid)?,
        pulse_signal(shape, pair.t_b, grid)?,
    ))
}

fn check_unit(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return domain(format!("path parameter must lie in [0, 1], got {lambda}"));
    }
    Ok(())
}

/// Straight-line path between two inputs in arrival-time space.
pub fn input_path_point(i0: &InputPair, i1: &InputPair, lambda: f64) -> Result<InputPair> {
    check_unit(lambda)?;
    let mix = |a: f64, b: f64| (1.0 - lambda) * a + lambda * b;
    InputPair::new(mix(i0.t_a, i1.t_a), mix(i0.t_b, i1.t_b))
}

/// Point of the path from `p_1` through the zero function to `-p_1`.
///
/// Starts beyond `horizon` collapse to [`SignedPulse::Zero`]; on any grid
/// ending before `horizon` those pulses have no samples anyway.
pub fn u_infty_member(lambda: f64, horizon: f64) -> Result<SignedPulse> {
    check_unit(lambda)?;
    let member = if lambda < 0.5 {
        let s = 1.0 / (1.0 - 2.0 * lambda);
        if s > horizon {
            SignedPulse::Zero
        } else {
            SignedPulse::Positive(s)
        }
    } else if lambda > 0.5 {
        let s = 1.0 / (2.0 * lambda - 1.0);
        if s > horizon {
            SignedPulse::Zero
        } else {
            SignedPulse::Negative(s)
        }
    } else {
        SignedPulse::Zero
    };
    Ok(member)
}

pub fn u_infty_path_point(lambda: f64, shape: &PulseShape, grid: TimeGrid) -> Result<SampledSignal> {
    u_infty_member(lambda, grid.t_end())?.to_signal(shape, grid)
}

/// Which family of signed pulses to sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyRadius {
    /// `{+-p_s : 0 < s <= r}`.
    Finite(f64),
    /// The radius-1 family continued along the path to the zero function.
    Infinite,
}

/// A finite net of signed pulses in chain order.
#[derive(Debug, Clone)]
pub struct PulseNet {
    pub members: Vec<SignedPulse>,
    pub signals: Vec<SampledSignal>,
    /// Largest compact-open distance between chain neighbours.
    pub resolution: f64,
}

impl PulseNet {
    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }

    pub fn positive(&self) -> Vec<SampledSignal> {
        self.select(|m| matches!(m, SignedPulse::Positive(_)))
    }

    pub fn negative(&self) -> Vec<SampledSignal> {
        self.select(|m| matches!(m, SignedPulse::Negative(_)))
    }

    fn select(&self, keep: impl Fn(&SignedPulse) -> bool) -> Vec<SampledSignal> {
        self.members
            .iter()
            .zip(&self.signals)
            .filter(|(m, _)| keep(m))
            .map(|(_, s)| s.clone())
            .collect()
    }
}

fn max_gap(chain: &[SampledSignal], truncation: u32) -> Result<f64> {
    let mut gap = 0.0_f64;
    for pair in chain.windows(2) {
        gap = gap.max(compact_open_distance(&pair[0], &pair[1], truncation)?);
    }
    Ok(gap)
}

/// Samples `count` start times per sign, evenly spaced in `(0, r]`.
///
/// For [`FamilyRadius::Infinite`] the positive and negative branches are
/// extended along [`u_infty_member`] at the same start spacing until a
/// pulse is no farther from zero than the base resolution, and joined
/// through the zero signal when `include_zero` is set.
///
/// Finite families are ordered `+p` ascending then `-p` ascending and
/// report the largest gap inside either branch. Infinite families are
/// ordered as one chain from `+p_{1/count}` to `-p_{1/count}`.
pub fn sample_family(
    radius: FamilyRadius,
    count: usize,
    include_zero: bool,
    shape: &PulseShape,
    grid: TimeGrid,
    truncation: u32,
) -> Result<PulseNet> {
    if count < 2 {
        return domain(format!("family needs at least 2 samples per sign, got {count}"));
    }
    let r = match radius {
        FamilyRadius::Finite(r) if r.is_finite() && r > 0.0 => r,
        FamilyRadius::Finite(r) => return domain(format!("family radius must be positive, got {r}")),
        FamilyRadius::Infinite => 1.0,
    };
    let spacing = r / count as f64;
    let starts: Vec<f64> = (1..=count).map(|i| i as f64 * spacing).collect();

    let positives = starts
        .iter()
        .map(|&s| pulse_signal(shape, s, grid))
        .collect::<Result<Vec<_>>>()?;
    let base_gap = max_gap(&positives, truncation)?;

    match radius {
        FamilyRadius::Finite(_) => {
            let mut members: Vec<SignedPulse> = starts.iter().map(|&s| SignedPulse::Positive(s)).collect();
            members.extend(starts.iter().map(|&s| SignedPulse::Negative(s)));
            let mut signals = positives.clone();
            signals.extend(positives.iter().map(SampledSignal::negated));
            Ok(PulseNet {
                members,
                signals,
                // The negative branch mirrors the positive one exactly.
                resolution: base_gap,
            })
        }
        FamilyRadius::Infinite => {
            let zero = SampledSignal::zero(grid, Extension::ZeroOutside);
            let mut far_members = Vec::new();
            let mut far_signals: Vec<SampledSignal> = Vec::new();
            let mut k = 1usize;
            loop {
                let s = r + k as f64 * spacing;
                // Reach the pulse through the path parameter it sits at.
                let lambda = 0.5 * (1.0 - 1.0 / s);
                let member = u_infty_member(lambda, grid.t_end())?;
                if member == SignedPulse::Zero {
                    break;
                }
                let signal = member.to_signal(shape, grid)?;
                let to_zero = compact_open_distance(&signal, &zero, truncation)?;
                far_members.push(member);
                far_signals.push(signal);
                if to_zero <= base_gap {
                    break;
                }
                k += 1;
            }

            let mut members: Vec<SignedPulse> = starts.iter().map(|&s| SignedPulse::Positive(s)).collect();
            members.extend(far_members.iter().copied());
            let mut signals = positives;
            signals.extend(far_signals.iter().cloned());
            if include_zero {
                members.push(SignedPulse::Zero);
                signals.push(zero);
            }
            let flip = |m: &SignedPulse| match *m {
                SignedPulse::Positive(s) => SignedPulse::Negative(s),
                other => other,
            };
            let positive_len = starts.len() + far_members.len();
            for i in (0..positive_len).rev() {
                members.push(flip(&members[i]));
                signals.push(signals[i].negated());
            }
            let resolution = max_gap(&signals, truncation)?;
            Ok(PulseNet {
                members,
                signals,
                resolution,
            })
        }
    }
}
