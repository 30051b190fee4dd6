//! Laser profiles of the example problems.

use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Asymmetric sine lobes: a fast `sin(25πt)` half-wave on `[3n/5, 3n/5 + 1/25]`
/// followed by `sin(5πt)` up to `3n/5 + 6/25`, for `n ≥ 1`. Zero elsewhere,
/// in particular before `t = 3/5`.
///
/// The profile jumps at `3n/5 + 1/25` and `3n/5 + 6/25`; steps of a size
/// dividing `1/25` keep every jump on a step boundary.
pub fn e1(t: f64) -> f64 {
    let n = (t / 0.6).floor();
    if n < 1.0 {
        return 0.0;
    }
    let offset = t - 0.6 * n;
    if offset <= 1.0 / 25.0 {
        (25.0 * PI * t).sin()
    } else if offset <= 6.0 / 25.0 {
        (5.0 * PI * t).sin()
    } else {
        0.0
    }
}

/// A highly oscillatory chirped pulse centred at `t = 1`.
pub fn e2(t: f64) -> f64 {
    let s = t - 1.0;
    10.0 * (-10.0 * s * s).exp() * (500.0 * s.powi(4) + 10.0).sin()
}

/// A weak few-cycle pulse centred at `t = 250`.
pub fn e5(t: f64) -> f64 {
    let s = t - 250.0;
    -0.01 / (s / 85.0).cosh() * (0.12 * s).cos()
}
