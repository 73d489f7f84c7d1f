//! Numerical laboratory for the arbiter glitch.
//!
//! A device that picks one of finitely many outcomes from a continuum of
//! inputs, and responds continuously to those inputs, must have inputs on
//! which it decides arbitrarily late. This crate makes each ingredient of
//! that argument computable:
//!
//! * [`funcspace`]: sampled signals, the windowed sup distance and the
//!   compact-open metric;
//! * [`pulses`]: the pulse family, pulse-pair inputs and explicit paths;
//! * [`arbiter`]: a bistable latch realizing the device map and its
//!   decisions;
//! * [`topology`]: delta-chain connectivity, separation certificates and a
//!   bisection search that constructs late-deciding inputs.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arbiter;
pub mod error;
pub mod funcspace;
pub mod ode;
pub mod pulses;
pub mod topology;

pub use arbiter::{
    decision_of, decision_time_curve, delta, escape_time_oracle, integrate, integrate_forced,
    ArbiterParams, CurveRow, Decision, Sign, Trajectory,
};
pub use error::{Error, Result};
pub use funcspace::{
    compact_open_distance, exp_function, point_distance, tent_function, verify_convergence,
    window_distance, ConvergenceReport, Extension, SampledSignal, TimeGrid, DEFAULT_STEP,
    DEFAULT_TRUNCATION,
};
pub use pulses::{
    input_path_point, input_signals, pulse_signal, sample_family, u_infty_path_point, FamilyRadius,
    InputPair, PulseNet, PulseShape, SignedPulse,
};
pub use topology::{
    epsilon_components, glitch_search, image_chain_check, min_cross_distance, three_step_check,
    ConnectivityReport, GlitchSearchResult, ThreeStepConfig, ThreeStepReport,
};
