//! The power-exponential family `psi = |x|^c exp(-|x/a|^b)` and its quartic
//! tail truncation.
//!
//! Its spreads reach `1e4 a` while the structure near the origin sits at
//! `a`, so moments come from Gamma-function closed forms or from adaptive
//! quadrature in the variable `v = ln (x/a)^b`, never from a grid. In that
//! variable every moment integral reads
//!
//! ```text
//! int_0^inf x^(2c+m) e^(-2s) g(s)^2 dx
//!     = a^(2c+m+1)/b  int exp(alpha v - 2 e^v) g(e^v)^2 dv,   alpha = (2c+m+1)/b
//! ```
//!
//! which is smooth, has no endpoint singularity and decays at both ends.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::grid::{GridSpec, GridWavefunction};
use crate::error::{Error, Result};
use crate::geometry::{real_initial_fourth, GeometryReport};
use crate::moment_core::MomentVector;
use crate::quadrature::{integrate, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerExpParams {
    pub c: f64,
    pub b: f64,
    pub a: f64,
}

impl PowerExpParams {
    /// Requires `b > 0`, `a > 0` and `c > 3/2`, below which `<P^4>` diverges.
    pub fn new(c: f64, b: f64, a: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) || !(a > 0.0 && a.is_finite()) || !(c > 1.5 && c.is_finite()) {
            return Err(Error::ParameterDomain(format!(
                "power-exponential needs b > 0, a > 0, c > 3/2; got c={c}, b={b}, a={a}"
            )));
        }
        Ok(Self { c, b, a })
    }

    pub fn psi(&self, x: f64) -> f64 {
        let x = x.abs();
        x.powf(self.c) * (-(x / self.a).powf(self.b)).exp()
    }

    /// `psi'` for `x >= 0`.
    pub fn dpsi(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let s = (x / self.a).powf(self.b);
        self.psi(x) * (self.c - self.b * s) / x
    }

    /// `psi''` for `x >= 0`; infinite at the origin when `c < 2`.
    pub fn d2psi(&self, x: f64) -> f64 {
        if x == 0.0 {
            return match self.c.partial_cmp(&2.0) {
                Some(std::cmp::Ordering::Greater) => 0.0,
                Some(std::cmp::Ordering::Equal) => 2.0,
                _ => f64::INFINITY,
            };
        }
        let s = (x / self.a).powf(self.b);
        let h = self.c - self.b * s;
        self.psi(x) / (x * x) * (h * (h - 1.0) - self.b * self.b * s)
    }
}

/// Even-state moments at `t = t0 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerExpMoments {
    pub x2: f64,
    pub p2: f64,
    /// `<X^4>`
    pub y0: f64,
    pub y2: f64,
    /// `<P^4>`
    pub y4: f64,
    pub hbar: f64,
}

impl PowerExpMoments {
    pub fn sigma2(&self) -> f64 {
        self.x2.sqrt()
    }

    pub fn sigma4(&self) -> f64 {
        self.y0.powf(0.25)
    }

    pub fn kurtosis(&self) -> f64 {
        self.y0 / (self.x2 * self.x2)
    }

    /// `<P^2>^2 / <P^4>`
    pub fn p2_sq_over_p4(&self) -> f64 {
        self.p2 * self.p2 / self.y4
    }

    /// `y_2 y_4 - y_3^2` with `y_3 = 0`.
    pub fn omega4(&self) -> f64 {
        self.y2 * self.y4
    }

    pub fn fourth_order(&self, mass: f64) -> Result<MomentVector> {
        MomentVector::new(vec![self.y0, 0.0, self.y2, 0.0, self.y4], mass, self.hbar)
    }

    pub fn second_order(&self, mass: f64) -> Result<MomentVector> {
        MomentVector::new(vec![self.x2, 0.0, self.p2], mass, self.hbar)
    }

    /// Geometry of `Y_0(u)` for this real initial state.
    pub fn geometry(&self) -> Result<GeometryReport> {
        real_initial_fourth(self.y0, self.y2, self.y4)
    }
}

/// `ln Gamma(p) - ln Gamma(q)`, both arguments positive.
fn ln_gamma_ratio(p: f64, q: f64) -> f64 {
    ln_gamma(p) - ln_gamma(q)
}

/// `sigma_2` from its closed form; defined for `(2c+1)/b > 0`, so it can also
/// probe the `c = 3/2` edge of the family.
pub fn sigma2_closed(c: f64, b: f64, a: f64) -> Result<f64> {
    if !(b > 0.0) || !(a > 0.0) || !(c > -0.5) {
        return Err(Error::ParameterDomain(format!(
            "sigma2 closed form needs b > 0, a > 0, c > -1/2; got c={c}, b={b}, a={a}"
        )));
    }
    let ln_x2 = 2.0 * a.ln() - 2.0 / b * std::f64::consts::LN_2
        + ln_gamma_ratio((2.0 * c + 3.0) / b, (2.0 * c + 1.0) / b);
    Ok((0.5 * ln_x2).exp())
}

/// Gamma-function closed forms.
pub fn closed_form_moments(p: &PowerExpParams, hbar: f64) -> Result<PowerExpMoments> {
    let PowerExpParams { c, b, a } = *p;
    let ln2 = std::f64::consts::LN_2;
    let base = (2.0 * c + 1.0) / b;
    let x2 = (2.0 * a.ln() - 2.0 / b * ln2 + ln_gamma_ratio((2.0 * c + 3.0) / b, base)).exp();
    let p2 = hbar * hbar * (b * (2.0 * c - 1.0) + 1.0)
        * (-2.0 * a.ln() + (-2.0 + 2.0 / b) * ln2 + ln_gamma_ratio((2.0 * c - 1.0) / b, base)).exp();
    let y0 = (4.0 * a.ln() - 4.0 / b * ln2 + ln_gamma_ratio((2.0 * c + 5.0) / b, base)).exp();
    let y2 = hbar * hbar * (b * (2.0 * c + 1.0) - 1.0) / 4.0;
    let e = c - 1.5;
    let f = 9.0 + 2.0 * b * e * (10.0 + 2.0 * b * b + 6.0 * b * e);
    let y4 = hbar.powi(4) * f
        * (-4.0 * a.ln() + (-4.0 + 4.0 / b) * ln2 + ln_gamma_ratio((2.0 * c - 3.0) / b, base)).exp();
    let m = PowerExpMoments {
        x2,
        p2,
        y0,
        y2,
        y4,
        hbar,
    };
    if [x2, p2, y0, y4].iter().any(|v| !v.is_finite()) {
        return Err(Error::ParameterDomain(format!("moments overflow for c={c}, b={b}, a={a}")));
    }
    Ok(m)
}

/// `(ln prefactor, integral)` with
/// `int_0^X x^(2c+m) e^(-2 (x/a)^b) g(s)^2 dx = exp(ln prefactor) * integral`,
/// where `X = a s_max^(1/b)` or infinity.
fn log_moment<G: Fn(f64) -> f64>(p: &PowerExpParams, m: f64, g: G, s_max: Option<f64>) -> Result<(f64, f64)> {
    let PowerExpParams { c, b, a } = *p;
    let power = 2.0 * c + m + 1.0;
    let alpha = power / b;
    if !(alpha > 0.0) {
        return Err(Error::ParameterDomain(format!("moment integral with exponent {power} diverges")));
    }
    let v_star = (alpha / 2.0).ln();
    let e_star = v_star.exp();
    let phi = |v: f64| alpha * (v - v_star) - 2.0 * (v.exp() - e_star);
    const CUTOFF: f64 = -80.0;
    let mut step = 1.0;
    let mut lo = v_star - step;
    while phi(lo) > CUTOFF {
        step *= 2.0;
        lo = v_star - step;
    }
    let mut hi = v_star + 1.0;
    while phi(hi) > CUTOFF {
        hi += 0.5;
    }
    if let Some(s) = s_max {
        let cap = s.ln();
        if cap <= lo {
            return Err(Error::ParameterDomain("truncation point lies below the support".into()));
        }
        hi = hi.min(cap);
    }
    let f = |v: f64| {
        let gv = g(v.exp());
        phi(v).exp() * gv * gv
    };
    let tol = Tolerance {
        rel: 1e-13,
        abs: 0.0,
        max_intervals: 20_000,
    };
    let split = v_star.clamp(lo, hi);
    let value = integrate(f, lo, split, tol)?.value + integrate(f, split, hi, tol)?.value;
    let ln_pre = alpha * v_star - 2.0 * e_star + power * a.ln() - b.ln();
    Ok((ln_pre, value))
}

/// Ratio `I_num / I_den` of two log-scaled integrals.
fn ratio(num: (f64, f64), den: (f64, f64)) -> f64 {
    (num.0 - den.0).exp() * num.1 / den.1
}

/// Moments by adaptive quadrature, independent of the Gamma closed forms.
pub fn quadrature_moments(p: &PowerExpParams, hbar: f64) -> Result<PowerExpMoments> {
    let (c, b) = (p.c, p.b);
    let one = |_s: f64| 1.0;
    let h1 = move |s: f64| c - b * s;
    let h2 = move |s: f64| {
        let h = c - b * s;
        h * (h - 1.0) - b * b * s
    };
    let n = log_moment(p, 0.0, one, None)?;
    let x2 = ratio(log_moment(p, 2.0, one, None)?, n);
    let x4 = ratio(log_moment(p, 4.0, one, None)?, n);
    let p2 = ratio(log_moment(p, -2.0, h1, None)?, n);
    let q = ratio(log_moment(p, 0.0, h1, None)?, n);
    let p4 = ratio(log_moment(p, -4.0, h2, None)?, n);
    Ok(PowerExpMoments {
        x2,
        p2: hbar * hbar * p2,
        y0: x4,
        // for real psi: y2 = hbar^2 (<x^2 psi'^2> / <psi^2> - 1/2)
        y2: hbar * hbar * (q - 0.5),
        y4: hbar.powi(4) * p4,
        hbar,
    })
}

/// Smallest `sigma_2` found on the closed non-classical region
/// `c >= 3/2, 0 < b <= 1/(2c+1)` (where `y_2 <= 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeScan {
    pub c: f64,
    pub b: f64,
    pub sigma2: f64,
}

/// Scans `c` over `[3/2, c_max]` and `b` over `(0, 1/(2c+1)]` on a
/// `steps x steps` lattice, in units of `a`.
pub fn sigma2_edge_scan(c_max: f64, steps: usize) -> Result<EdgeScan> {
    if !(c_max >= 1.5) || steps < 2 {
        return Err(Error::InvalidInput(format!("edge scan needs c_max >= 3/2 and steps >= 2, got {c_max}, {steps}")));
    }
    let mut best: Option<EdgeScan> = None;
    for i in 0..steps {
        let c = 1.5 + (c_max - 1.5) * i as f64 / (steps - 1) as f64;
        let b_edge = 1.0 / (2.0 * c + 1.0);
        for j in 1..=steps {
            let b = b_edge * j as f64 / steps as f64;
            let s = sigma2_closed(c, b, 1.0)?;
            if best.is_none_or(|e| s < e.sigma2) {
                best = Some(EdgeScan { c, b, sigma2: s });
            }
        }
    }
    Ok(best.expect("lattice is non-empty"))
}

/// Samples the family on `grid`. Only useful for display: the relevant
/// scales are far beyond what a uniform grid resolves.
pub fn make_power_exponential(
    p: &PowerExpParams,
    grid: GridSpec,
    hbar: f64,
    mass: f64,
) -> Result<(GridWavefunction, PowerExpMoments)> {
    let m = closed_form_moments(p, hbar)?;
    let psi = GridWavefunction::from_fn(grid, hbar, mass, |x| Complex64::new(p.psi(x), 0.0))?;
    Ok((psi, m))
}

/// Power-exponential core with a quartic tail: equal to the family for
/// `|x| <= x_match`, a quartic matching value, slope and curvature at
/// `x_match` and vanishing with zero slope at `x_zero`, and zero beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedPowerExp {
    pub params: PowerExpParams,
    pub x_match: f64,
    pub x_zero: f64,
    /// `Q(x) = (x - x_zero)^2 (r0 + r1 (x - x_match) + r2 (x - x_match)^2)`
    pub r: [f64; 3],
}

impl TruncatedPowerExp {
    /// Junctions at `match_at` and `zero_at` multiples of the untruncated `sigma_2`.
    pub fn new(params: PowerExpParams, match_at: f64, zero_at: f64) -> Result<Self> {
        if !(match_at > 0.0) || !(zero_at > match_at) || !zero_at.is_finite() {
            return Err(Error::SingularMatching(format!(
                "need zero_at > match_at > 0, got match_at={match_at}, zero_at={zero_at}"
            )));
        }
        let sigma2 = sigma2_closed(params.c, params.b, params.a)?;
        Self::at_points(params, match_at * sigma2, zero_at * sigma2)
    }

    /// Junctions at absolute positions.
    pub fn at_points(params: PowerExpParams, x_match: f64, x_zero: f64) -> Result<Self> {
        let h = x_match - x_zero;
        if !(x_match > 0.0) || !(h < 0.0) || !x_zero.is_finite() {
            return Err(Error::SingularMatching(format!(
                "degenerate junctions x_match={x_match}, x_zero={x_zero}"
            )));
        }
        let (v0, v1, v2) = (params.psi(x_match), params.dpsi(x_match), params.d2psi(x_match));
        let r0 = v0 / (h * h);
        let r1 = (v1 - 2.0 * h * r0) / (h * h);
        let r2 = (v2 - 2.0 * r0 - 4.0 * h * r1) / (2.0 * h * h);
        if ![r0, r1, r2].iter().all(|r| r.is_finite()) {
            return Err(Error::SingularMatching(format!(
                "matching system is singular at x_match={x_match}, x_zero={x_zero}"
            )));
        }
        Ok(Self {
            params,
            x_match,
            x_zero,
            r: [r0, r1, r2],
        })
    }

    fn quartic(&self, x: f64) -> (f64, f64, f64) {
        let [r0, r1, r2] = self.r;
        let d = x - self.x_match;
        let z = x - self.x_zero;
        let rr = r0 + r1 * d + r2 * d * d;
        let dr = r1 + 2.0 * r2 * d;
        (z * z * rr, 2.0 * z * rr + z * z * dr, 2.0 * rr + 4.0 * z * dr + 2.0 * r2 * z * z)
    }

    pub fn psi(&self, x: f64) -> f64 {
        let x = x.abs();
        if x <= self.x_match {
            self.params.psi(x)
        } else if x < self.x_zero {
            self.quartic(x).0
        } else {
            0.0
        }
    }

    /// `psi'` for `x >= 0`.
    pub fn dpsi(&self, x: f64) -> f64 {
        if x <= self.x_match {
            self.params.dpsi(x)
        } else if x < self.x_zero {
            self.quartic(x).1
        } else {
            0.0
        }
    }

    /// `psi''` for `x >= 0`; left limit at `x_zero`, where it jumps.
    pub fn d2psi(&self, x: f64) -> f64 {
        if x <= self.x_match {
            self.params.d2psi(x)
        } else if x <= self.x_zero {
            self.quartic(x).2
        } else {
            0.0
        }
    }

    /// Inner quadrature in the log variable plus Gauss-Kronrod on the
    /// polynomial tail.
    pub fn moments(&self, hbar: f64) -> Result<PowerExpMoments> {
        let p = &self.params;
        let (c, b) = (p.c, p.b);
        let s_max = Some((self.x_match / p.a).powf(b));
        let inner = |m: f64, which: u8| -> Result<f64> {
            let (ln_pre, v) = match which {
                0 => log_moment(p, m, |_s| 1.0, s_max)?,
                1 => log_moment(p, m, |s| c - b * s, s_max)?,
                _ => log_moment(
                    p,
                    m,
                    |s| {
                        let h = c - b * s;
                        h * (h - 1.0) - b * b * s
                    },
                    s_max,
                )?,
            };
            Ok(ln_pre.exp() * v)
        };
        let tol = Tolerance {
            rel: 1e-13,
            abs: 0.0,
            max_intervals: 5000,
        };
        let outer = |f: &dyn Fn(f64) -> f64| -> Result<f64> {
            Ok(integrate(f, self.x_match, self.x_zero, tol)?.value)
        };
        let q = |x: f64| self.quartic(x);
        let n = inner(0.0, 0)? + outer(&|x| q(x).0.powi(2))?;
        let x2 = inner(2.0, 0)? + outer(&|x| (x * q(x).0).powi(2))?;
        let x4 = inner(4.0, 0)? + outer(&|x| (x * x * q(x).0).powi(2))?;
        let p2 = inner(-2.0, 1)? + outer(&|x| q(x).1.powi(2))?;
        let xd = inner(0.0, 1)? + outer(&|x| (x * q(x).1).powi(2))?;
        let p4 = inner(-4.0, 2)? + outer(&|x| q(x).2.powi(2))?;
        let out = PowerExpMoments {
            x2: x2 / n,
            p2: hbar * hbar * p2 / n,
            y0: x4 / n,
            y2: hbar * hbar * (xd / n - 0.5),
            y4: hbar.powi(4) * p4 / n,
            hbar,
        };
        if [n, out.x2, out.p2, out.y0, out.y4].iter().any(|v| !v.is_finite()) {
            return Err(Error::Quadrature { value: n, error: f64::NAN });
        }
        Ok(out)
    }

    pub fn sample(&self, grid: GridSpec, hbar: f64, mass: f64) -> Result<GridWavefunction> {
        GridWavefunction::from_fn(grid, hbar, mass, |x| Complex64::new(self.psi(x), 0.0))
    }
}

/// Truncated state sampled on `grid` (defaulting to `[-1.25 x_zero, 1.25 x_zero)`
/// with `2^14` points) together with its construction.
pub fn make_truncated_power_exponential(
    p: &PowerExpParams,
    match_at: f64,
    zero_at: f64,
    grid: Option<GridSpec>,
    hbar: f64,
    mass: f64,
) -> Result<(GridWavefunction, TruncatedPowerExp)> {
    let t = TruncatedPowerExp::new(*p, match_at, zero_at)?;
    let grid = match grid {
        Some(g) => g,
        None => GridSpec::centered(1 << 14, 2.5 * t.x_zero)?,
    };
    Ok((t.sample(grid, hbar, mass)?, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn domain() {
        assert!(PowerExpParams::new(1.5, 0.24, 1.0).is_err());
        assert!(PowerExpParams::new(1.51, 0.0, 1.0).is_err());
        assert!(PowerExpParams::new(1.51, 0.24, -1.0).is_err());
        assert!(PowerExpParams::new(1.51, 0.24, 1.0).is_ok());
    }

    #[test]
    fn closed_forms_at_the_worked_example() {
        let p = PowerExpParams::new(1.51, 0.24, 1.0).unwrap();
        let m = closed_form_moments(&p, 1.0).unwrap();
        assert!((m.y2 + 0.0088).abs() < 1e-12);
        assert!(rel(m.sigma2(), 15539.8) < 1e-4, "{}", m.sigma2());
        assert!(rel(m.sigma4(), 31934.9) < 1e-4, "{}", m.sigma4());
        assert!(rel(m.kurtosis(), 17.835) < 1e-3);
        assert!(rel(m.p2_sq_over_p4(), 2.839e-7) < 1e-3);
        let g = m.geometry().unwrap();
        assert!(rel(g.u0.unwrap(), 367.805) < 1e-4);
    }

    #[test]
    fn quadrature_matches_closed_forms_in_easy_regime() {
        let p = PowerExpParams::new(2.0, 2.0, 1.3).unwrap();
        let cf = closed_form_moments(&p, 0.7).unwrap();
        let q = quadrature_moments(&p, 0.7).unwrap();
        for (a, b) in [(q.x2, cf.x2), (q.p2, cf.p2), (q.y0, cf.y0), (q.y2, cf.y2), (q.y4, cf.y4)] {
            assert!(rel(a, b) < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn edge_sigma2() {
        assert!(rel(sigma2_closed(1.5, 0.25, 1.0).unwrap(), 8787.74) < 1e-5);
        let e = sigma2_edge_scan(3.0, 16).unwrap();
        assert_eq!((e.c, e.b), (1.5, 0.25));
    }

    #[test]
    fn truncation_continuity_and_support() {
        let p = PowerExpParams::new(1.51, 0.24, 1.0).unwrap();
        let t = TruncatedPowerExp::new(p, 6.0, 15.0).unwrap();
        let x = t.x_match;
        let (q0, q1, q2) = t.quartic(x);
        assert!(rel(q0, p.psi(x)) < 1e-8);
        assert!(rel(q1, p.dpsi(x)) < 1e-8);
        assert!(rel(q2, p.d2psi(x)) < 1e-8);
        assert_eq!(t.psi(t.x_zero), 0.0);
        assert_eq!(t.psi(-1.2 * t.x_zero), 0.0);
        let (z0, z1, _) = t.quartic(t.x_zero);
        assert_eq!((z0, z1), (0.0, 0.0));
        assert!(TruncatedPowerExp::new(p, 6.0, 6.0).is_err());
    }
}
