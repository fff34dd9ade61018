//! Trigonometric functions of rational multiples of π, with the zeros and
//! unit values that occur on the Fourier grid returned exactly.

use std::f64::consts::PI;

/// `sin(π p / q)` for integer `p` and positive `q`.
pub fn sin_pi_ratio(p: i64, q: i64) -> f64 {
    debug_assert!(q > 0);
    let period = 2 * q;
    let r = p.rem_euclid(period);
    if r == 0 || r == q {
        return 0.0;
    }
    if 2 * r == q {
        return 1.0;
    }
    if 2 * r == 3 * q {
        return -1.0;
    }
    // fold into (-q, q] to keep the argument small
    let r = if r > q { r - period } else { r };
    (PI * r as f64 / q as f64).sin()
}

/// `cos(π p / q)` for integer `p` and positive `q`.
pub fn cos_pi_ratio(p: i64, q: i64) -> f64 {
    // cos(x) = sin(x + π/2); shift in units of π/(2q)
    sin_pi_ratio(2 * p + q, 2 * q)
}
