//! Named wavefunction families with their closed-form moments.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{GridSpec, GridWavefunction};
use super::measure::ShapeMetrics;
use super::power_exp::{make_power_exponential, make_truncated_power_exponential, PowerExpParams};
use crate::error::{Error, Result};
use crate::moment_core::MomentVector;

pub const FAMILY_NAMES: [&str; 6] = [
    "gaussian",
    "skew_gaussian",
    "power_exp",
    "power_exp_truncated",
    "abs_exp",
    "sqrt_exp",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `exp(-x^2/a^2)`
    Gaussian { a: f64 },
    /// `(1 + i b x/a) exp(-x^2/2a^2)`
    SkewGaussian { b: f64, a: f64 },
    /// `|x|^c exp(-|x/a|^b)`
    PowerExp { c: f64, b: f64, a: f64 },
    PowerExpTruncated {
        c: f64,
        b: f64,
        a: f64,
        match_at: f64,
        zero_at: f64,
    },
    /// `exp(-|x|/a)`
    AbsExp { a: f64 },
    /// `exp(-sqrt(|x|/a))`
    SqrtExp { a: f64 },
}

fn positive(label: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::ParameterDomain(format!("{label} must be positive, got {v}")))
    }
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Gaussian { .. } => "gaussian",
            Family::SkewGaussian { .. } => "skew_gaussian",
            Family::PowerExp { .. } => "power_exp",
            Family::PowerExpTruncated { .. } => "power_exp_truncated",
            Family::AbsExp { .. } => "abs_exp",
            Family::SqrtExp { .. } => "sqrt_exp",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Family::Gaussian { a } | Family::AbsExp { a } | Family::SqrtExp { a } => positive("a", a),
            Family::SkewGaussian { b, a } => {
                positive("a", a)?;
                if b.is_finite() {
                    Ok(())
                } else {
                    Err(Error::ParameterDomain(format!("b must be finite, got {b}")))
                }
            }
            Family::PowerExp { c, b, a } => PowerExpParams::new(c, b, a).map(|_| ()),
            Family::PowerExpTruncated {
                c,
                b,
                a,
                match_at,
                zero_at,
            } => {
                PowerExpParams::new(c, b, a)?;
                if match_at > 0.0 && zero_at > match_at && zero_at.is_finite() {
                    Ok(())
                } else {
                    Err(Error::SingularMatching(format!(
                        "need zero_at > match_at > 0, got match_at={match_at}, zero_at={zero_at}"
                    )))
                }
            }
        }
    }

    /// Grid that resolves the family's moments (display-only for the
    /// power-exponential states).
    pub fn default_grid(&self) -> Result<GridSpec> {
        self.validate()?;
        match *self {
            Family::Gaussian { a } | Family::SkewGaussian { a, .. } => GridSpec::centered(4096, 80.0 * a),
            Family::AbsExp { a } => GridSpec::centered(1 << 16, 120.0 * a),
            Family::SqrtExp { a } => GridSpec::centered(1 << 18, 2000.0 * a),
            Family::PowerExp { c, b, a } => {
                let s = super::power_exp::sigma2_closed(c, b, a)?;
                GridSpec::centered(1 << 14, 40.0 * s)
            }
            Family::PowerExpTruncated { c, b, a, zero_at, .. } => {
                let s = super::power_exp::sigma2_closed(c, b, a)?;
                GridSpec::centered(1 << 14, 2.5 * zero_at * s)
            }
        }
    }

    /// Samples the state on `grid`, or on the default grid.
    pub fn build(&self, grid: Option<GridSpec>, hbar: f64, mass: f64) -> Result<GridWavefunction> {
        let grid = match grid {
            Some(g) => g,
            None => self.default_grid()?,
        };
        self.validate()?;
        match *self {
            Family::Gaussian { a } => gaussian(a, grid, hbar, mass),
            Family::SkewGaussian { b, a } => Ok(make_skew_gaussian(b, a, grid, hbar, mass)?.0),
            Family::AbsExp { a } => abs_exp(a, grid, hbar, mass),
            Family::SqrtExp { a } => sqrt_exp(a, grid, hbar, mass),
            Family::PowerExp { c, b, a } => {
                Ok(make_power_exponential(&PowerExpParams::new(c, b, a)?, grid, hbar, mass)?.0)
            }
            Family::PowerExpTruncated {
                c,
                b,
                a,
                match_at,
                zero_at,
            } => Ok(make_truncated_power_exponential(
                &PowerExpParams::new(c, b, a)?,
                match_at,
                zero_at,
                Some(grid),
                hbar,
                mass,
            )?
            .0),
        }
    }

    /// Highest order whose moments are all finite, or `None` when every
    /// order is. `exp(-|x|/a)` has a kink, so `<P^3>` already diverges;
    /// `exp(-sqrt(|x|/a))` has a cusp and an infinite `<P^2>`.
    pub fn finite_moment_order(&self) -> Option<usize> {
        match self {
            Family::AbsExp { .. } => Some(2),
            Family::SqrtExp { .. } => Some(1),
            _ => None,
        }
    }

    /// Closed-form spatial shape, where one is known.
    pub fn closed_form_shape(&self) -> Option<ShapeMetrics> {
        match *self {
            Family::Gaussian { a } => ShapeMetrics::from_central(a * a / 4.0, 0.0, 3.0 * a.powi(4) / 16.0).ok(),
            Family::AbsExp { a } => ShapeMetrics::from_central(a * a / 2.0, 0.0, 1.5 * a.powi(4)).ok(),
            Family::SqrtExp { a } => ShapeMetrics::from_central(7.5 * a * a, 0.0, 1417.5 * a.powi(4)).ok(),
            Family::PowerExp { c, b, a } => {
                let p = PowerExpParams::new(c, b, a).ok()?;
                let m = super::power_exp::closed_form_moments(&p, 1.0).ok()?;
                ShapeMetrics::from_central(m.x2, 0.0, m.y0).ok()
            }
            _ => None,
        }
    }
}

pub fn gaussian(a: f64, grid: GridSpec, hbar: f64, mass: f64) -> Result<GridWavefunction> {
    positive("a", a)?;
    GridWavefunction::from_fn(grid, hbar, mass, |x| Complex64::new((-(x / a).powi(2)).exp(), 0.0))
}

/// Moments of `exp(-x^2/a^2)` at `t = 0`.
pub fn gaussian_moments(a: f64, order: usize, mass: f64, hbar: f64) -> Result<MomentVector> {
    positive("a", a)?;
    let values = match order {
        2 => vec![a * a / 4.0, 0.0, hbar * hbar / (a * a)],
        4 => vec![3.0 * a.powi(4) / 16.0, 0.0, hbar * hbar / 4.0, 0.0, 3.0 * hbar.powi(4) / a.powi(4)],
        n => return Err(Error::UnsupportedOrder(n)),
    };
    MomentVector::new(values, mass, hbar)
}

/// Closed forms for the skew-Gaussian at `t = 0` (where `t0 = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkewGaussianMoments {
    pub y1: f64,
    pub y3: f64,
    pub omega3: f64,
    pub p_mean: f64,
    pub hbar: f64,
}

impl SkewGaussianMoments {
    pub fn new(b: f64, a: f64, hbar: f64) -> Self {
        let d = 2.0 + b * b;
        Self {
            y1: -2.0 * b.powi(3) * a * hbar / (d * d),
            y3: 2.0 * b.powi(3) * (2.0 - 3.0 * b * b) * hbar.powi(3) / (d.powi(3) * a.powi(3)),
            omega3: 4.0 * b.powi(6) * (3.0 * b * b - 2.0) * hbar.powi(4) / (d.powi(5) * a * a),
            p_mean: 2.0 * b / d * hbar / a,
            hbar,
        }
    }

    /// `sqrt(-Omega_3)/|y_3|` when `Omega_3 < 0`.
    pub fn u0(&self) -> Option<f64> {
        (self.omega3 < 0.0 && self.y3 != 0.0).then(|| (-self.omega3).sqrt() / self.y3.abs())
    }

    pub fn third_order(&self, mass: f64) -> Result<MomentVector> {
        MomentVector::new(vec![0.0, self.y1, 0.0, self.y3], mass, self.hbar)
    }
}

pub fn make_skew_gaussian(
    b: f64,
    a: f64,
    grid: GridSpec,
    hbar: f64,
    mass: f64,
) -> Result<(GridWavefunction, SkewGaussianMoments)> {
    positive("a", a)?;
    let psi = GridWavefunction::from_fn(grid, hbar, mass, |x| {
        Complex64::new(1.0, b * x / a) * (-0.5 * (x / a).powi(2)).exp()
    })?;
    Ok((psi, SkewGaussianMoments::new(b, a, hbar)))
}

pub fn abs_exp(a: f64, grid: GridSpec, hbar: f64, mass: f64) -> Result<GridWavefunction> {
    positive("a", a)?;
    GridWavefunction::from_fn(grid, hbar, mass, |x| Complex64::new((-x.abs() / a).exp(), 0.0))
}

pub fn sqrt_exp(a: f64, grid: GridSpec, hbar: f64, mass: f64) -> Result<GridWavefunction> {
    positive("a", a)?;
    GridWavefunction::from_fn(grid, hbar, mass, |x| Complex64::new((-(x.abs() / a).sqrt()).exp(), 0.0))
}
