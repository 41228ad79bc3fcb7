use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Uniform spatial grid: `x_i = x_min + i dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub points: usize,
    pub x_min: f64,
    pub dx: f64,
}

impl GridSpec {
    /// `points` samples covering `[-extent/2, extent/2)`, so that `x = 0` is
    /// a grid point for even `points`.
    pub fn centered(points: usize, extent: f64) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidInput(format!("grid needs at least 2 points, got {points}")));
        }
        if !(extent > 0.0) || !extent.is_finite() {
            return Err(Error::InvalidInput(format!("grid extent must be positive, got {extent}")));
        }
        Ok(Self {
            points,
            x_min: -0.5 * extent,
            dx: extent / points as f64,
        })
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn extent(&self) -> f64 {
        self.points as f64 * self.dx
    }
}

/// Complex amplitudes on a uniform grid.
///
/// Amplitudes need not be normalized; every measurement divides by the norm.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWavefunction {
    amplitudes: Vec<Complex64>,
    grid: GridSpec,
    hbar: f64,
    mass: f64,
}

impl GridWavefunction {
    pub fn new(amplitudes: Vec<Complex64>, x_min: f64, dx: f64, hbar: f64, mass: f64) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::InvalidInput("wavefunction needs at least 2 samples".into()));
        }
        ensure_finite("x_min", x_min)?;
        for (label, v) in [("dx", dx), ("hbar", hbar), ("mass", mass)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!("{label} must be positive and finite, got {v}")));
            }
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidInput("amplitudes must be finite".into()));
        }
        let grid = GridSpec {
            points: amplitudes.len(),
            x_min,
            dx,
        };
        let psi = Self {
            amplitudes,
            grid,
            hbar,
            mass,
        };
        let norm = psi.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidInput(format!("wavefunction is not normalizable (norm {norm})")));
        }
        Ok(psi)
    }

    /// Samples `f` on `grid`.
    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: GridSpec, hbar: f64, mass: f64, f: F) -> Result<Self> {
        let amps = (0..grid.points).map(|i| f(grid.x(i))).collect();
        Self::new(amps, grid.x_min, grid.dx, hbar, mass)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn dx(&self) -> f64 {
        self.grid.dx
    }

    pub fn x_min(&self) -> f64 {
        self.grid.x_min
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn x(&self, i: usize) -> f64 {
        self.grid.x(i)
    }

    /// `sum |psi|^2 dx`
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx
    }

    /// Probability density `|psi|^2 / norm`.
    pub fn density(&self) -> Vec<f64> {
        let n = self.norm();
        self.amplitudes.iter().map(|a| a.norm_sqr() / n).collect()
    }

    pub fn normalized(&self) -> Self {
        let s = self.norm().sqrt().recip();
        Self {
            amplitudes: self.amplitudes.iter().map(|a| a * s).collect(),
            ..self.clone()
        }
    }

    pub fn require_power_of_two(&self) -> Result<()> {
        if self.len().is_power_of_two() {
            Ok(())
        } else {
            Err(Error::NotPowerOfTwo(self.len()))
        }
    }

    pub(crate) fn with_amplitudes(&self, amplitudes: Vec<Complex64>) -> Self {
        Self {
            amplitudes,
            ..self.clone()
        }
    }

    /// Probability mass within `fraction` of the grid length at each edge.
    pub fn edge_density(&self, fraction: f64) -> f64 {
        let n = self.len();
        let w = ((n as f64 * fraction).ceil() as usize).clamp(1, n / 2);
        let total: f64 = self.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let edge: f64 = self.amplitudes[..w]
            .iter()
            .chain(&self.amplitudes[n - w..])
            .map(|a| a.norm_sqr())
            .sum();
        edge / total
    }
}

/// Forward/inverse FFT pair of one length; the inverse is normalized.
pub(crate) struct Spectral {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Spectral {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.forward.process(data);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.inverse.process(data);
        let s = 1.0 / self.n as f64;
        data.iter_mut().for_each(|v| *v *= s);
    }
}

/// Angular wave numbers in FFT order for `n` samples spaced `dx`. The Nyquist
/// entry is zeroed so odd powers of the derivative stay Hermitian.
pub(crate) fn wave_numbers(n: usize, dx: f64) -> Vec<f64> {
    let dk = 2.0 * PI / (n as f64 * dx);
    (0..n)
        .map(|j| {
            if n.is_multiple_of(2) && j == n / 2 {
                0.0
            } else if j <= n / 2 {
                j as f64 * dk
            } else {
                (j as f64 - n as f64) * dk
            }
        })
        .collect()
}

/// Fraction of spectral energy above half the Nyquist wave number.
pub(crate) fn spectral_tail_fraction(psi: &GridWavefunction) -> f64 {
    let n = psi.len();
    let mut buf = psi.amplitudes().to_vec();
    Spectral::new(n).forward(&mut buf);
    let total: f64 = buf.iter().map(|c| c.norm_sqr()).sum();
    let tail: f64 = buf
        .iter()
        .enumerate()
        .filter(|(j, _)| {
            let m = if *j <= n / 2 { *j } else { n - j };
            m > n / 4
        })
        .map(|(_, c)| c.norm_sqr())
        .sum();
    tail / total
}
