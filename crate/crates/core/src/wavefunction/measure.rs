//! Symmetrized moments by averaging every operator ordering.
//!
//! The state is zero-padded four-fold, then `X = x - <x>` and
//! `P = -i hbar d/dx - <p>` are applied right to left. Orderings that share a
//! suffix share the intermediate vectors, so all `2^n` words of length `n` cost
//! `2^(n+1) - 2` operator applications.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{spectral_tail_fraction, wave_numbers, GridWavefunction, Spectral};
use crate::error::{Error, Result};
use crate::moment_core::{binomial, MomentVector};

/// Highest order accepted by the operator-averaging measurement.
pub const MAX_MEASURED_ORDER: usize = 6;
/// Spectral energy fraction above half Nyquist tolerated before refusing.
pub const RESOLUTION_LIMIT: f64 = 1e-8;
/// Fraction of `|X|^n |psi|^2` tolerated in the outer sixteenth of the grid.
pub const CONVERGENCE_LIMIT: f64 = 1e-8;
const PAD_FACTOR: usize = 4;

/// Centroid `(<x>, <p>)`.
pub fn centroid(psi: &GridWavefunction) -> (f64, f64) {
    let rho = psi.density();
    let dx = psi.dx();
    let x_mean = rho.iter().enumerate().map(|(i, r)| psi.x(i) * r).sum::<f64>() * dx;

    let n = psi.len();
    let mut buf = psi.amplitudes().to_vec();
    Spectral::new(n).forward(&mut buf);
    let k = wave_numbers(n, dx);
    let total: f64 = buf.iter().map(|c| c.norm_sqr()).sum();
    let k_mean = buf.iter().zip(&k).map(|(c, k)| c.norm_sqr() * k).sum::<f64>() / total;
    (x_mean, psi.hbar() * k_mean)
}

fn check_resolution(psi: &GridWavefunction) -> Result<()> {
    let tail = spectral_tail_fraction(psi);
    if tail > RESOLUTION_LIMIT {
        return Err(Error::Resolution {
            tail,
            limit: RESOLUTION_LIMIT,
        });
    }
    Ok(())
}

/// Share of `sum |X|^power |psi|^2` held in the outer sixteenth at either edge.
fn edge_fraction(psi: &GridWavefunction, x_mean: f64, power: i32) -> f64 {
    let n = psi.len();
    let w = (n / 16).max(1);
    let mut total = 0.0;
    let mut edge = 0.0;
    for (i, a) in psi.amplitudes().iter().enumerate() {
        let v = (psi.x(i) - x_mean).abs().powi(power) * a.norm_sqr();
        total += v;
        if i < w || i >= n - w {
            edge += v;
        }
    }
    if total > 0.0 {
        edge / total
    } else {
        0.0
    }
}

fn check_convergence(psi: &GridWavefunction, x_mean: f64, order: usize) -> Result<()> {
    let fraction = edge_fraction(psi, x_mean, order as i32);
    if fraction > CONVERGENCE_LIMIT {
        return Err(Error::Convergence { order, fraction });
    }
    Ok(())
}

/// Operator-averaged moments of one order with their diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderedMoments {
    pub order: usize,
    /// Real parts, `values[k]` carrying `k` momentum factors.
    pub values: Vec<f64>,
    /// Imaginary parts left over by the ordering average.
    pub imag_residuals: Vec<f64>,
    /// `sigma_x^(n-k) sigma_p^k`, the natural size of each entry.
    pub scales: Vec<f64>,
    pub centroid: (f64, f64),
}

struct Engine {
    psi: Vec<Complex64>,
    x: Vec<f64>,
    k: Vec<f64>,
    spectral: Spectral,
    hbar: f64,
    p_mean: f64,
    weight: f64,
}

impl Engine {
    fn new(psi: &GridWavefunction, x_mean: f64, p_mean: f64) -> Self {
        let n = psi.len();
        let m = n * PAD_FACTOR;
        let offset = (m - n) / 2;
        let dx = psi.dx();
        let mut padded = vec![Complex64::new(0.0, 0.0); m];
        padded[offset..offset + n].copy_from_slice(psi.amplitudes());
        let x0 = psi.x_min() - offset as f64 * dx;
        Self {
            x: (0..m).map(|i| x0 + i as f64 * dx - x_mean).collect(),
            k: wave_numbers(m, dx),
            spectral: Spectral::new(m),
            hbar: psi.hbar(),
            p_mean,
            weight: 1.0 / psi.amplitudes().iter().map(|a| a.norm_sqr()).sum::<f64>(),
            psi: padded,
        }
    }

    fn apply_x(&self, v: &[Complex64]) -> Vec<Complex64> {
        v.iter().zip(&self.x).map(|(a, x)| a * x).collect()
    }

    fn apply_p(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut buf = v.to_vec();
        self.spectral.forward(&mut buf);
        buf.iter_mut().zip(&self.k).for_each(|(c, k)| *c *= self.hbar * k);
        self.spectral.inverse(&mut buf);
        buf.iter_mut().zip(v).for_each(|(c, a)| *c -= a * self.p_mean);
        buf
    }

    fn expectation(&self, v: &[Complex64]) -> Complex64 {
        self.psi.iter().zip(v).map(|(a, b)| a.conj() * b).sum::<Complex64>() * self.weight
    }

    /// Adds `<psi| w |psi>` for every word `w` of length `depth` extending the
    /// already applied suffix into `sums[#P]`.
    fn walk(&self, state: &[Complex64], depth: usize, p_count: usize, sums: &mut [Complex64]) {
        if depth == 0 {
            sums[p_count] += self.expectation(state);
            return;
        }
        self.walk(&self.apply_x(state), depth - 1, p_count, sums);
        self.walk(&self.apply_p(state), depth - 1, p_count + 1, sums);
    }
}

/// All symmetrized moments of order `n` by ordering average.
pub fn ordered_moments(psi: &GridWavefunction, n: usize) -> Result<OrderedMoments> {
    if n > MAX_MEASURED_ORDER {
        return Err(Error::OrderTooLarge {
            order: n,
            max: MAX_MEASURED_ORDER,
        });
    }
    check_resolution(psi)?;
    let (x_mean, p_mean) = centroid(psi);
    check_convergence(psi, x_mean, n)?;
    let engine = Engine::new(psi, x_mean, p_mean);
    let mut sums = vec![Complex64::new(0.0, 0.0); n + 1];
    let start = engine.psi.clone();
    engine.walk(&start, n, 0, &mut sums);

    let x2 = engine.expectation(&engine.apply_x(&engine.apply_x(&start))).re;
    let p2 = engine.expectation(&engine.apply_p(&engine.apply_p(&start))).re;
    let (sx, sp) = (x2.max(0.0).sqrt(), p2.max(0.0).sqrt());

    let mut values = Vec::with_capacity(n + 1);
    let mut imag = Vec::with_capacity(n + 1);
    let mut scales = Vec::with_capacity(n + 1);
    for (k, s) in sums.iter().enumerate() {
        let avg = s / binomial(n, k) as f64;
        values.push(avg.re);
        imag.push(avg.im);
        scales.push(sx.powi((n - k) as i32) * sp.powi(k as i32));
    }
    if n == 1 {
        // about the centroid the first moments vanish by definition
        values.fill(0.0);
    }
    Ok(OrderedMoments {
        order: n,
        values,
        imag_residuals: imag,
        scales,
        centroid: (x_mean, p_mean),
    })
}

/// `Y_k` of order `n` about the centroid.
pub fn symmetrized_moment(psi: &GridWavefunction, k: usize, n: usize) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidInput(format!("k = {k} exceeds n = {n}")));
    }
    Ok(ordered_moments(psi, n)?.values[k])
}

/// Moment vector of order `n` measured on the grid.
pub fn symmetrized_moments(psi: &GridWavefunction, n: usize) -> Result<MomentVector> {
    if n == 0 {
        return Err(Error::InvalidInput("moment order must be at least 1".into()));
    }
    MomentVector::new(ordered_moments(psi, n)?.values, psi.mass(), psi.hbar())
}

/// Spatial spreads of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeMetrics {
    pub sigma2: f64,
    pub sigma4: f64,
    /// `<X^3> / <X^2>`
    pub skew_length: f64,
    pub kurtosis: f64,
}

impl ShapeMetrics {
    /// From the central position moments `<X^2>, <X^3>, <X^4>`.
    pub fn from_central(x2: f64, x3: f64, x4: f64) -> Result<Self> {
        if !(x2 > 0.0) || !(x4 > 0.0) || !x3.is_finite() || !x2.is_finite() || !x4.is_finite() {
            return Err(Error::InvalidInput(format!(
                "central moments must give positive spreads: <X^2>={x2}, <X^4>={x4}"
            )));
        }
        Ok(Self {
            sigma2: x2.sqrt(),
            sigma4: x4.powf(0.25),
            skew_length: x3 / x2,
            kurtosis: x4 / (x2 * x2),
        })
    }
}

/// `<(x - <x>)^j>` for `j = 0..=max` from the density.
pub fn central_position_moments(psi: &GridWavefunction, max: usize) -> Result<Vec<f64>> {
    let rho = psi.density();
    let dx = psi.dx();
    let x_mean = rho.iter().enumerate().map(|(i, r)| psi.x(i) * r).sum::<f64>() * dx;
    check_convergence(psi, x_mean, max)?;
    let mut out = vec![0.0; max + 1];
    for (i, r) in rho.iter().enumerate() {
        let d = psi.x(i) - x_mean;
        let mut pw = r * dx;
        for slot in out.iter_mut() {
            *slot += pw;
            pw *= d;
        }
    }
    Ok(out)
}

pub fn shape_metrics(psi: &GridWavefunction) -> Result<ShapeMetrics> {
    let m = central_position_moments(psi, 4)?;
    ShapeMetrics::from_central(m[2], m[3], m[4])
}
