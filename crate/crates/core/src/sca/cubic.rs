//! Unique positive root of the depressed cubic `A x³ − C x − D = 0`.
//!
//! With `A > 0` and `C, D ≥ 0` the cubic is negative on `(0, x*)` and
//! increasing and convex beyond `√(C/3A)`, so exactly one positive root
//! exists. Writing `s = √(C/A)` and `t = ∛(D/A)` it lies in
//! `[max(s, t), s + t]`: `f(s) = −D`, `f(t) = −C t`, and
//! `f(s + t) = A (2 s² t + 3 s t²)`. Newton started from the right end of
//! that bracket decreases monotonically onto the root.

use crate::error::{Error, Result};

const MAX_NEWTON: usize = 100;

pub fn cubic_positive_root(cube_coeff: f64, lin_coeff: f64, const_coeff: f64) -> Result<f64> {
    let (a, c, d) = (cube_coeff, lin_coeff, const_coeff);
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidInput(format!("cubic coefficient must be positive, got {a}")));
    }
    if !(c.is_finite() && c >= 0.0 && d.is_finite() && d >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "linear and constant coefficients must be nonnegative, got {c}, {d}"
        )));
    }
    if c == 0.0 && d == 0.0 {
        return Err(Error::InvalidInput("cubic has no positive root when C = D = 0".into()));
    }
    let s = (c / a).sqrt();
    let t = (d / a).cbrt();
    if d == 0.0 {
        return Ok(s);
    }
    if c == 0.0 {
        return Ok(t);
    }
    let lo = s.max(t);
    let mut x = s + t;
    for _ in 0..MAX_NEWTON {
        let f = (a * x * x - c) * x - d;
        let fp = 3.0 * a * x * x - c;
        if f <= 0.0 || fp <= 0.0 {
            break;
        }
        let next = (x - f / fp).max(lo);
        if next >= x {
            break;
        }
        x = next;
    }
    Ok(x)
}

/// `|A x³ − C x − D| / max(1, A x³)`.
pub fn scaled_residual(cube_coeff: f64, lin_coeff: f64, const_coeff: f64, x: f64) -> f64 {
    let lead = cube_coeff * x * x * x;
    (lead - lin_coeff * x - const_coeff).abs() / lead.max(1.0)
}
