//! Classical fourth-order Runge-Kutta for scalar, time-dependent ODEs.

use crate::error::{Error, Result};

#[inline]
pub fn rk4_step<F>(f: &F, t: f64, x: f64, h: f64) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let half = 0.5 * h;
    let k1 = f(t, x);
    let k2 = f(t + half, x + half * k1);
    let k3 = f(t + half, x + half * k2);
    let k4 = f(t + h, x + h * k3);
    x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Integrates `dx/dt = f(t, x)` from `x(t0) = x0` over `steps` steps of
/// size `h`, returning the `steps + 1` states. Stops with
/// [`Error::Divergence`] at the first non-finite state.
pub fn integrate_fixed<F>(f: F, x0: f64, t0: f64, h: f64, steps: usize) -> Result<Vec<f64>>
where
    F: Fn(f64, f64) -> f64,
{
    let mut states = Vec::with_capacity(steps + 1);
    let mut x = x0;
    states.push(x);
    for k in 0..steps {
        let t = t0 + k as f64 * h;
        x = rk4_step(&f, t, x, h);
        if !x.is_finite() {
            return Err(Error::Divergence { time: t + h });
        }
        states.push(x);
    }
    Ok(states)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth_is_fourth_order() {
        let exact = 1.0_f64.exp();
        let err = |steps: usize| {
            let h = 1.0 / steps as f64;
            let xs = integrate_fixed(|_, x| x, 1.0, 0.0, h, steps).unwrap();
            (xs[steps] - exact).abs()
        };
        let ratio = err(20) / err(40);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn time_dependent_forcing() {
        // x' = cos t, x(0) = 0  =>  x = sin t
        let xs = integrate_fixed(|t, _| t.cos(), 0.0, 0.0, 0.01, 100).unwrap();
        assert!((xs[100] - 1.0_f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn divergence_is_reported() {
        let err = integrate_fixed(|_, x| x * x, 1.0, 0.0, 0.1, 100).unwrap_err();
        assert!(matches!(err, Error::Divergence { time } if time > 0.5 && time < 2.0));
    }
}
