//! Inputs shared by the benchmarks.

use glitch_core::{pulse_signal, sample_family, FamilyRadius, PulseNet, PulseShape, SampledSignal, TimeGrid};

/// Two default pulses half a unit apart on the standard grid.
pub fn pulse_pair() -> (SampledSignal, SampledSignal) {
    let shape = PulseShape::default();
    let grid = TimeGrid::standard();
    (
        pulse_signal(&shape, 0.5, grid).expect("valid pulse"),
        pulse_signal(&shape, 1.0, grid).expect("valid pulse"),
    )
}

/// Signed unit-width pulse net with `per_sign` starts per sign.
pub fn unit_net(per_sign: usize) -> PulseNet {
    let shape = PulseShape::new(1.0, 1.0).expect("valid shape");
    sample_family(FamilyRadius::Finite(1.0), per_sign, false, &shape, TimeGrid::standard(), 20)
        .expect("valid net")
}
