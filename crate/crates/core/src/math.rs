//! Float helpers on top of `libm`, so results do not depend on the platform libm.

pub(crate) use libm::{exp, expm1, log, sqrt};

/// Below this `|x|` the series of `expm1(x) / x` replaces the quotient.
pub(crate) const SMALL_RATE: f64 = 1e-8;

/// `(e^x - 1) / x`, continuous at `x = 0` where it equals 1.
pub(crate) fn expm1_over(x: f64) -> f64 {
    if x.abs() < SMALL_RATE {
        1.0 + x * (0.5 + x / 6.0)
    } else {
        expm1(x) / x
    }
}

/// `x / (e^x - 1)`, the reciprocal of [`expm1_over`].
pub(crate) fn x_over_expm1(x: f64) -> f64 {
    if x.abs() < SMALL_RATE {
        1.0 - x * (0.5 - x / 12.0)
    } else {
        x / expm1(x)
    }
}
