//! A bistable latch driven by two input pulses.
//!
//! The latch state follows
//!
//! ```text
//! dx/dt = (x - x^3) / tau + k (a(t) - b(t))
//! ```
//!
//! where `a` and `b` are the pulses on the two wires. `x = 0` is the
//! metastable equilibrium and `x = +-1` are the two stable ones. The
//! observable output is `o(t) = out_amp * tanh(x(t) / sat)`, and a decision is
//! the first sample where `|o|` reaches `theta * out_amp`.

use crate::error::{domain, Result};
use crate::funcspace::{Extension, SampledSignal, TimeGrid};
use crate::ode::integrate_fixed;
use crate::pulses::{InputPair, PulseShape};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArbiterParams {
    /// Regeneration time constant.
    pub tau: f64,
    /// Input coupling `k`.
    pub gain: f64,
    /// Decision threshold as a fraction of `out_amp`.
    pub theta: f64,
    pub out_amp: f64,
    /// Output saturation scale.
    pub sat: f64,
    /// Integrator step.
    pub step: f64,
    /// Observation window `[0, horizon]`.
    pub horizon: f64,
}

impl Default for ArbiterParams {
    fn default() -> Self {
        Self {
            tau: 1.0,
            gain: 50.0,
            theta: 0.9,
            out_amp: 1.0,
            sat: 0.4,
            step: 1e-3,
            horizon: 40.0,
        }
    }
}

impl ArbiterParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tau", self.tau),
            ("gain", self.gain),
            ("out_amp", self.out_amp),
            ("sat", self.sat),
            ("step", self.step),
            ("horizon", self.horizon),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return domain(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return domain(format!("theta must lie in (0, 1), got {}", self.theta));
        }
        if self.step > self.tau / 10.0 {
            return domain(format!(
                "step {} exceeds tau/10 = {}",
                self.step,
                self.tau / 10.0
            ));
        }
        if self.horizon < 2.0 {
            return domain(format!("horizon must be at least 2, got {}", self.horizon));
        }
        Ok(())
    }

    /// State level at which the output crosses the decision threshold.
    pub fn state_threshold(&self) -> f64 {
        self.sat * self.theta.atanh()
    }

    pub fn output_of(&self, x: f64) -> f64 {
        self.out_amp * (x / self.sat).tanh()
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::covering(self.horizon, self.step)
    }

    /// Radius outside which the drift always points inward:
    /// the positive root of `(x^3 - x) / tau = k * A`.
    pub fn trapping_bound(&self, shape: &PulseShape) -> f64 {
        let c = self.gain * shape.amplitude() * self.tau;
        // x^3 - x - c is convex for x > 0, so Newton from the right converges.
        let mut x = 1.0 + c.cbrt();
        for _ in 0..64 {
            let next = x - (x * x * x - x - c) / (3.0 * x * x - 1.0);
            if (next - x).abs() <= 1e-15 * x {
                return next;
            }
            x = next;
        }
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn of(v: f64) -> Self {
        if v >= 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub sign: Sign,
    pub time: f64,
}

/// Simulated latch state and output over `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub state: SampledSignal,
    pub output: SampledSignal,
    pub params: ArbiterParams,
}

impl Trajectory {
    pub fn decision(&self) -> Option<Decision> {
        decision_of(&self.output, &self.params)
    }
}

/// Runs the latch from `x(0) = x0` under an arbitrary input drive
/// `forcing(t)`, which enters the dynamics as `k * forcing(t)`.
pub fn integrate_forced<F>(x0: f64, forcing: F, params: &ArbiterParams) -> Result<Trajectory>
where
    F: Fn(f64) -> f64,
{
    params.validate()?;
    let grid = params.grid()?;
    let inv_tau = 1.0 / params.tau;
    let k = params.gain;
    let rhs = |t: f64, x: f64| (x - x * x * x) * inv_tau + k * forcing(t);
    let states = integrate_fixed(rhs, x0, grid.t_start(), grid.step(), grid.count() - 1)?;
    let outputs = states.iter().map(|&x| params.output_of(x)).collect();
    Ok(Trajectory {
        state: SampledSignal::new(grid, states, Extension::HoldEnds)?,
        output: SampledSignal::new(grid, outputs, Extension::HoldEnds)?,
        params: *params,
    })
}

/// Latch response to the pulse pair, starting from the metastable point.
pub fn integrate(input: &InputPair, shape: &PulseShape, params: &ArbiterParams) -> Result<Trajectory> {
    let (t_a, t_b) = (input.t_a(), input.t_b());
    integrate_forced(
        0.0,
        |t| shape.value(t - t_a) - shape.value(t - t_b),
        params,
    )
}

/// The device map: input pair to output signal.
pub fn delta(input: &InputPair, shape: &PulseShape, params: &ArbiterParams) -> Result<SampledSignal> {
    Ok(integrate(input, shape, params)?.output)
}

/// First sample with `|o| >= theta * out_amp`, if any.
pub fn decision_of(output: &SampledSignal, params: &ArbiterParams) -> Option<Decision> {
    let threshold = params.theta * params.out_amp;
    output
        .values()
        .iter()
        .position(|o| o.abs() >= threshold)
        .map(|k| Decision {
            sign: Sign::of(output.values()[k]),
            time: output.grid().time(k),
        })
}

/// Escape time of the linearized latch `dx/dt = x / tau` from `x0` to the
/// state threshold.
pub fn escape_time_oracle(x0: f64, params: &ArbiterParams) -> Result<f64> {
    if !(x0.is_finite() && x0 != 0.0) {
        return domain(format!("escape time needs a finite nonzero start, got {x0}"));
    }
    Ok(params.tau * (params.state_threshold() / x0.abs()).ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub skew: f64,
    /// `Ok(None)` when the input never decides within the horizon.
    pub outcome: Result<Option<Decision>>,
}

/// Decision for each input `(base_time, base_time + skew)`. Invalid inputs
/// produce an error row and the sweep continues.
pub fn decision_time_curve(
    skews: &[f64],
    base_time: f64,
    shape: &PulseShape,
    params: &ArbiterParams,
) -> Vec<CurveRow> {
    skews
        .iter()
        .map(|&skew| CurveRow {
            skew,
            outcome: InputPair::with_skew(base_time, skew)
                .and_then(|input| integrate(&input, shape, params))
                .map(|traj| traj.decision()),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn defaults() -> (PulseShape, ArbiterParams) {
        (PulseShape::default(), ArbiterParams::default())
    }

    fn short(horizon: f64) -> ArbiterParams {
        ArbiterParams {
            horizon,
            ..ArbiterParams::default()
        }
    }

    #[test]
    fn params_validation() {
        assert!(ArbiterParams::default().validate().is_ok());
        let bad = [
            ArbiterParams { tau: 0.0, ..Default::default() },
            ArbiterParams { theta: 1.0, ..Default::default() },
            ArbiterParams { theta: 0.0, ..Default::default() },
            ArbiterParams { step: 0.2, ..Default::default() },
            ArbiterParams { horizon: 1.5, ..Default::default() },
            ArbiterParams { sat: f64::NAN, ..Default::default() },
        ];
        for p in bad {
            assert!(matches!(p.validate(), Err(Error::Domain(_))), "{p:?}");
        }
    }

    #[test]
    fn threshold_lies_inside_the_well() {
        let p = ArbiterParams::default();
        assert!(p.state_threshold() < 1.0);
        assert!(p.output_of(1.0) >= p.theta * p.out_amp);
    }

    #[test]
    fn symmetric_input_stays_at_equilibrium() {
        let (shape, params) = defaults();
        let input = InputPair::new(0.5, 0.5).unwrap();
        let traj = integrate(&input, &shape, &params).unwrap();
        assert!(traj.state.is_zero());
        assert!(traj.output.is_zero());
        assert_eq!(traj.decision(), None);
    }

    #[test]
    fn swapping_inputs_negates_exactly() {
        let (shape, params) = defaults();
        let input = InputPair::new(0.2, 0.8).unwrap();
        let fwd = integrate(&input, &shape, &params).unwrap();
        let back = integrate(&input.swapped(), &shape, &params).unwrap();
        assert_eq!(back.state, fwd.state.negated());
        assert_eq!(back.output, fwd.output.negated());
        let d = fwd.decision().unwrap();
        let e = back.decision().unwrap();
        assert_eq!(d.time, e.time);
        assert_eq!(d.sign, e.sign.flipped());
    }

    #[test]
    fn decisive_input_decides_for_a() {
        let (shape, params) = defaults();
        let input = InputPair::new(0.2, 0.8).unwrap();
        let out = delta(&input, &shape, &params).unwrap();
        let d = decision_of(&out, &params).unwrap();
        assert_eq!(d.sign, Sign::Positive);
        assert!(d.time >= input.t_a());
        assert!(out.values().iter().any(|&o| o >= params.theta * params.out_amp));
    }

    #[test]
    fn decision_of_zero_and_negated_signals() {
        let params = ArbiterParams::default();
        let z = SampledSignal::zero(params.grid().unwrap(), Extension::HoldEnds);
        assert_eq!(decision_of(&z, &params), None);
        let (shape, _) = defaults();
        let out = delta(&InputPair::new(0.3, 0.6).unwrap(), &shape, &params).unwrap();
        let d = decision_of(&out, &params).unwrap();
        let n = decision_of(&out.negated(), &params).unwrap();
        assert_eq!((d.time, d.sign.flipped()), (n.time, n.sign));
    }

    #[test]
    fn escape_oracle_laws() {
        let p = ArbiterParams::default();
        assert_eq!(escape_time_oracle(p.state_threshold(), &p).unwrap(), 0.0);
        let a = escape_time_oracle(1e-4, &p).unwrap();
        let b = escape_time_oracle(5e-5, &p).unwrap();
        assert!((b - a - p.tau * 2.0_f64.ln()).abs() < 1e-12);
        assert!(escape_time_oracle(0.0, &p).is_err());
        assert_eq!(
            escape_time_oracle(-1e-4, &p).unwrap(),
            escape_time_oracle(1e-4, &p).unwrap()
        );
    }

    #[test]
    fn nonlinear_escape_matches_oracle() {
        let p = short(20.0);
        for x0 in [1e-3, 1e-4, 1e-5, -1e-3] {
            let traj = integrate_forced(x0, |_| 0.0, &p).unwrap();
            let simulated = traj.decision().unwrap();
            let oracle = escape_time_oracle(x0, &p).unwrap();
            assert!(
                (simulated.time - oracle).abs() <= 0.05 * oracle,
                "x0={x0}: {} vs {oracle}",
                simulated.time
            );
            assert_eq!(simulated.sign, Sign::of(x0));
        }
    }

    #[test]
    fn state_stays_inside_trapping_region() {
        let (shape, params) = defaults();
        let bound = params.trapping_bound(&shape);
        let cubic = bound * bound * bound - bound;
        assert!((cubic - params.gain * shape.amplitude() * params.tau).abs() < 1e-9);
        for (ta, tb) in [(0.2, 0.8), (0.8, 0.2), (0.1, 0.15), (0.5, 0.5001), (0.9, 0.05)] {
            let traj = integrate(&InputPair::new(ta, tb).unwrap(), &shape, &params).unwrap();
            let peak = traj.state.values().iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            assert!(peak <= bound, "({ta}, {tb}): {peak}");
        }
    }

    #[test]
    fn curve_rows_and_errors() {
        let (shape, params) = defaults();
        let p = ArbiterParams { horizon: 30.0, ..params };
        let rows = decision_time_curve(&[0.0, 1e-3, -1e-3, 0.9], 0.5, &shape, &p);
        assert_eq!(rows[0].outcome, Ok(None));
        let pos = rows[1].outcome.clone().unwrap().unwrap();
        let neg = rows[2].outcome.clone().unwrap().unwrap();
        assert_eq!(pos.sign, Sign::Positive);
        assert_eq!(neg.sign, Sign::Negative);
        assert!((pos.time - neg.time).abs() < 0.01);
        assert!(matches!(rows[3].outcome, Err(Error::Domain(_))));
    }

    #[test]
    fn halving_skew_adds_tau_ln2() {
        let (shape, params) = defaults();
        let rows = decision_time_curve(&[1e-5, 2e-5], 0.5, &shape, &params);
        let t1 = rows[0].outcome.clone().unwrap().unwrap().time;
        let t2 = rows[1].outcome.clone().unwrap().unwrap().time;
        let gain = t1 - t2;
        assert!((gain - 2.0_f64.ln()).abs() < 0.15 * 2.0_f64.ln(), "{gain}");
    }
}
