//! Real roots of the depressed cubic `c3 u^3 + c1 u + c0`.
//!
//! Three real roots use the trigonometric form, a single real root the
//! hyperbolic form. Inputs whose discriminant is within a relative `1e-12`
//! of zero are treated as having a double root.

use std::f64::consts::PI;

use crate::error::{ensure_finite, Error, Result};

/// Relative discriminant tolerance deciding the multiple-root boundary.
pub const DISCRIMINANT_TOL: f64 = 1e-12;

/// All real roots of `c3 u^3 + c1 u + c0`, ascending.
///
/// With `c3 == 0` the linear fallback `c1 u + c0` is solved instead.
pub fn cubic_real_roots(c3: f64, c1: f64, c0: f64) -> Result<Vec<f64>> {
    ensure_finite("c3", c3)?;
    ensure_finite("c1", c1)?;
    ensure_finite("c0", c0)?;
    if c3 == 0.0 {
        if c1 == 0.0 {
            return Err(Error::DegenerateCubic);
        }
        return Ok(vec![-c0 / c1]);
    }
    let p = c1 / c3;
    let q = c0 / c3;

    let mut roots = if p == 0.0 {
        vec![(-q).cbrt()]
    } else {
        let disc = 4.0 * p * p * p + 27.0 * q * q;
        let scale = 4.0 * p.abs().powi(3) + 27.0 * q * q;
        if disc.abs() <= DISCRIMINANT_TOL * scale {
            // simple root 3q/p, double root -3q/(2p)
            let simple = 3.0 * q / p;
            let double = -1.5 * q / p;
            if simple == double {
                vec![simple]
            } else {
                vec![polish(p, q, simple), double]
            }
        } else if disc < 0.0 {
            // p < 0 here
            let r = 2.0 * (-p / 3.0).sqrt();
            let arg = (1.5 * q / p * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
            let theta = arg.acos() / 3.0;
            (0..3)
                .map(|k| polish(p, q, r * (theta - 2.0 * PI * k as f64 / 3.0).cos()))
                .collect()
        } else if p < 0.0 {
            let s = (-p / 3.0).sqrt();
            let arg = -1.5 * q.abs() / p * (-3.0 / p).sqrt();
            let root = -2.0 * q.signum() * s * (arg.acosh() / 3.0).cosh();
            vec![polish(p, q, root)]
        } else {
            let s = (p / 3.0).sqrt();
            let arg = 1.5 * q / p * (3.0 / p).sqrt();
            let root = -2.0 * s * (arg.asinh() / 3.0).sinh();
            vec![polish(p, q, root)]
        }
    };
    roots.sort_by(|a, b| a.total_cmp(b));
    roots.dedup();
    Ok(roots)
}

/// A few Newton steps on `u^3 + p u + q`, kept only while the residual drops.
fn polish(p: f64, q: f64, mut u: f64) -> f64 {
    let f = |u: f64| (u * u + p) * u + q;
    let mut r = f(u).abs();
    for _ in 0..4 {
        let d = 3.0 * u * u + p;
        if d == 0.0 || r == 0.0 {
            break;
        }
        let next = u - f(u) / d;
        let rn = f(next).abs();
        if rn < r {
            u = next;
            r = rn;
        } else {
            break;
        }
    }
    u
}

/// Residual scale `|c3||u|^3 + |c1||u| + |c0|` used to certify a root.
pub fn residual_scale(c3: f64, c1: f64, c0: f64, u: f64) -> f64 {
    c3.abs() * u.abs().powi(3) + c1.abs() * u.abs() + c0.abs()
}
