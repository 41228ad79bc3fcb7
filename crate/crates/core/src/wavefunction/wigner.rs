//! Wigner function on the sample grid.
//!
//! The state is first upsampled two-fold by spectral interpolation so that
//! `psi*(x + s/2) psi(x - s/2)` is available for every lag `s = m dx`. Each row
//! is one FFT of length `2N`; the momentum spacing is `pi hbar / (N dx)` and
//! the range is `[-pi hbar/dx, pi hbar/dx)`. Both marginals are exact sums of
//! the grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::grid::{spectral_tail_fraction, GridWavefunction, Spectral};
use super::measure::RESOLUTION_LIMIT;
use crate::error::{Error, Result};
use crate::moment_core::{binomial, MomentVector};

/// Wigner function sampled on `nx` positions by `np` momenta, row-major in x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub values: Vec<f64>,
    pub nx: usize,
    pub np: usize,
    pub x_min: f64,
    pub dx: f64,
    pub p_min: f64,
    pub dp: f64,
    pub hbar: f64,
}

impl WignerGrid {
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn p(&self, l: usize) -> f64 {
        self.p_min + l as f64 * self.dp
    }

    pub fn at(&self, i: usize, l: usize) -> f64 {
        self.values[i * self.np + l]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.np..(i + 1) * self.np]
    }

    /// `sum W dx dp`
    pub fn total(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.dx * self.dp
    }

    /// `int W dp` at each x.
    pub fn position_marginal(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.row(i).iter().sum::<f64>() * self.dp).collect()
    }

    /// `int W dx` at each p.
    pub fn momentum_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.np];
        for i in 0..self.nx {
            for (o, w) in out.iter_mut().zip(self.row(i)) {
                *o += w * self.dx;
            }
        }
        out
    }
}

/// Spectral two-fold upsampling; even output samples reproduce the input.
fn upsample(psi: &[Complex64]) -> Vec<Complex64> {
    let n = psi.len();
    let mut spec = psi.to_vec();
    Spectral::new(n).forward(&mut spec);
    let m = 2 * n;
    let mut wide = vec![Complex64::new(0.0, 0.0); m];
    let half = n / 2;
    wide[..half].copy_from_slice(&spec[..half]);
    wide[m - half + 1..].copy_from_slice(&spec[half + 1..]);
    // split the Nyquist bin between +/- frequencies
    wide[half] = spec[half] * 0.5;
    wide[m - half] = spec[half] * 0.5;
    Spectral::new(m).inverse(&mut wide);
    wide.iter_mut().for_each(|v| *v *= 2.0);
    wide
}

struct RowKernel {
    up: Vec<Complex64>,
    n: usize,
    scale: f64,
    fft: std::sync::Arc<dyn rustfft::Fft<f64>>,
}

impl RowKernel {
    fn new(psi: &GridWavefunction) -> Result<Self> {
        psi.require_power_of_two()?;
        let tail = spectral_tail_fraction(psi);
        if tail > RESOLUTION_LIMIT {
            return Err(Error::Resolution {
                tail,
                limit: RESOLUTION_LIMIT,
            });
        }
        let n = psi.len();
        let norm = psi.norm();
        Ok(Self {
            up: upsample(psi.amplitudes()),
            n,
            scale: psi.dx() / (2.0 * PI * psi.hbar() * norm),
            fft: FftPlanner::new().plan_fft_inverse(2 * n),
        })
    }

    /// Row `j` in momentum order `l = -N..N`.
    fn row(&self, j: usize, out: &mut [f64], buf: &mut [Complex64]) {
        let n = self.n as isize;
        let m = 2 * n;
        let i0 = 2 * j as isize;
        for lag in -n..n {
            let a = i0 + lag;
            let b = i0 - lag;
            let v = if a >= 0 && a < m && b >= 0 && b < m {
                self.up[a as usize].conj() * self.up[b as usize]
            } else {
                Complex64::new(0.0, 0.0)
            };
            buf[lag.rem_euclid(m) as usize] = v;
        }
        self.fft.process(buf);
        for (q, o) in out.iter_mut().enumerate() {
            let l = (q as isize - n).rem_euclid(m) as usize;
            *o = buf[l].re * self.scale;
        }
    }
}

pub fn wigner_transform(psi: &GridWavefunction) -> Result<WignerGrid> {
    let kernel = RowKernel::new(psi)?;
    let n = psi.len();
    let np = 2 * n;
    let mut values = vec![0.0; n * np];
    values.par_chunks_mut(np).enumerate().for_each_init(
        || vec![Complex64::new(0.0, 0.0); np],
        |buf, (j, out)| kernel.row(j, out, buf),
    );
    let dp = PI * psi.hbar() / (n as f64 * psi.dx());
    Ok(WignerGrid {
        values,
        nx: n,
        np,
        x_min: psi.x_min(),
        dx: psi.dx(),
        p_min: -(n as f64) * dp,
        dp,
        hbar: psi.hbar(),
    })
}

/// `sum_l W p^a` for `a <= n` along one row.
fn row_power_sums(ps: &[f64], w: &[f64], n: usize) -> Vec<f64> {
    let mut by_p = vec![0.0; n + 1];
    for (p, w) in ps.iter().zip(w) {
        let mut pw = *w;
        for slot in by_p.iter_mut() {
            *slot += pw;
            pw *= p;
        }
    }
    by_p
}

/// Raw sums `S[a][b] = sum W p^a x^b` for `a + b <= n`, accumulated in row
/// order so the result does not depend on thread scheduling.
fn accumulate_rows(rows: &[(f64, Vec<f64>)], n: usize) -> Vec<Vec<f64>> {
    let mut raw = vec![vec![0.0; n + 1]; n + 1];
    for (x, by_p) in rows {
        for (a, s) in by_p.iter().enumerate() {
            let mut xb = *s;
            for slot in raw[a].iter_mut().take(n + 1 - a) {
                *slot += xb;
                xb *= x;
            }
        }
    }
    raw
}

/// Central moments about `(xc, pc)` from raw sums over shifted coordinates.
fn central_from_grid(w: &WignerGrid, n: usize, xc: f64, pc: f64) -> Vec<f64> {
    let ps: Vec<f64> = (0..w.np).map(|l| w.p(l) - pc).collect();
    let rows: Vec<(f64, Vec<f64>)> = (0..w.nx)
        .into_par_iter()
        .map(|i| (w.x(i) - xc, row_power_sums(&ps, w.row(i), n)))
        .collect();
    let s = accumulate_rows(&rows, n);
    (0..=n).map(|k| s[k][n - k] * w.dx * w.dp).collect()
}

fn grid_centroid(w: &WignerGrid) -> (f64, f64) {
    let s = central_from_grid(w, 1, 0.0, 0.0);
    let total = w.total();
    (s[0] / total, s[1] / total)
}

/// `int int W (p - <p>)^k (x - <x>)^(n-k) dx dp`.
pub fn wigner_moment(w: &WignerGrid, k: usize, n: usize) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidInput(format!("k = {k} exceeds n = {n}")));
    }
    if n == 1 {
        return Ok(0.0);
    }
    let (xc, pc) = grid_centroid(w);
    Ok(central_from_grid(w, n, xc, pc)[k] / w.total())
}

/// All order-`n` moments of `psi` through the Wigner function, one row at a
/// time so the full grid is never held in memory.
pub fn wigner_moments(psi: &GridWavefunction, n: usize) -> Result<MomentVector> {
    if n == 0 {
        return Err(Error::InvalidInput("moment order must be at least 1".into()));
    }
    let kernel = RowKernel::new(psi)?;
    let np = 2 * psi.len();
    let dp = PI * psi.hbar() / (psi.len() as f64 * psi.dx());
    let p_min = -(psi.len() as f64) * dp;
    let ps: Vec<f64> = (0..np).map(|l| p_min + l as f64 * dp).collect();

    let sums = (0..psi.len())
        .into_par_iter()
        .map_init(
            || (vec![Complex64::new(0.0, 0.0); np], vec![0.0; np]),
            |(buf, row), j| {
                kernel.row(j, row, buf);
                (psi.x(j), row_power_sums(&ps, row, n))
            },
        )
        .collect::<Vec<_>>();

    // raw moments about the origin, then a binomial shift to the centroid
    let raw = accumulate_rows(&sums, n);
    let total = raw[0][0];
    let xc = raw[0][1] / total;
    let pc = raw[1][0] / total;
    let mut values = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let j = n - k;
        let mut acc = 0.0;
        for a in 0..=k {
            for b in 0..=j {
                let c = binomial(k, a) as f64 * binomial(j, b) as f64;
                acc += c * raw[a][b] * (-pc).powi((k - a) as i32) * (-xc).powi((j - b) as i32);
            }
        }
        values.push(acc / total);
    }
    if n == 1 {
        values.fill(0.0);
    }
    MomentVector::new(values, psi.mass(), psi.hbar())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefunction::grid::GridSpec;

    fn state<F: Fn(f64) -> Complex64>(f: F) -> GridWavefunction {
        GridWavefunction::from_fn(GridSpec::centered(256, 16.0).unwrap(), 1.0, 1.0, f).unwrap()
    }

    #[test]
    fn upsample_keeps_samples() {
        let psi = state(|x| Complex64::new((-x * x).exp(), 0.3 * x * (-x * x).exp()));
        let up = upsample(psi.amplitudes());
        for (i, a) in psi.amplitudes().iter().enumerate() {
            assert!((up[2 * i] - a).norm() < 1e-13);
        }
    }

    #[test]
    fn gaussian_wigner() {
        let psi = state(|x| Complex64::new((-x * x).exp(), 0.0));
        let w = wigner_transform(&psi).unwrap();
        assert!((w.total() - 1.0).abs() < 1e-12);
        assert!(w.values.iter().all(|v| *v > -1e-14));
        assert!((wigner_moment(&w, 2, 4).unwrap() - 0.25).abs() < 1e-10);
        assert!(wigner_moment(&w, 1, 2).unwrap().abs() < 1e-12);
        // minimum uncertainty: sigma_x sigma_p = hbar / 2
        let sx = wigner_moment(&w, 0, 2).unwrap().sqrt();
        let sp = wigner_moment(&w, 2, 2).unwrap().sqrt();
        assert!((sx * sp - 0.5).abs() < 1e-10);
    }

    #[test]
    fn odd_state_is_negative_at_origin() {
        let psi = state(|x| Complex64::new(x * (-x * x / 2.0).exp(), 0.0));
        let w = wigner_transform(&psi).unwrap();
        let i0 = w.nx / 2;
        let l0 = w.np / 2;
        assert_eq!(w.x(i0), 0.0);
        assert!(w.p(l0).abs() < 1e-15);
        assert!((w.at(i0, l0) + 1.0 / PI).abs() < 1e-8);
    }

    #[test]
    fn marginals() {
        let psi = state(|x| Complex64::from_polar((-(x - 0.4).powi(2)).exp() * (1.0 + 0.3 * x), 1.1 * x));
        let w = wigner_transform(&psi).unwrap();
        let rho = psi.density();
        let px = w.position_marginal();
        let l1: f64 = px.iter().zip(&rho).map(|(a, b)| (a - b).abs()).sum::<f64>() * psi.dx();
        assert!(l1 < 1e-12);

        // momentum marginal against |phi(p)|^2 at the even momentum samples
        let pm = w.momentum_marginal();
        let mut err = 0.0;
        let mut mass = 0.0;
        for l in (0..w.np).step_by(2) {
            let p = w.p(l);
            let phi: Complex64 = psi
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(i, a)| a * Complex64::from_polar(1.0, -p * psi.x(i)))
                .sum::<Complex64>()
                * psi.dx()
                / (2.0 * PI * psi.norm()).sqrt();
            err += (pm[l] - phi.norm_sqr()).abs();
            mass += phi.norm_sqr();
        }
        assert!(err / mass < 1e-6, "{}", err / mass);
    }

    #[test]
    fn streaming_matches_stored() {
        let psi = state(|x| Complex64::from_polar((-(x + 0.5).powi(2)).exp() * (1.0 + 0.5 * x), 0.7 * x));
        let w = wigner_transform(&psi).unwrap();
        let s = wigner_moments(&psi, 3).unwrap();
        for k in 0..=3 {
            let a = wigner_moment(&w, k, 3).unwrap();
            assert!((a - s.get(k)).abs() < 1e-10, "k={k}: {a} vs {}", s.get(k));
        }
    }

    #[test]
    fn non_power_of_two_refused() {
        let g = GridSpec::centered(100, 16.0).unwrap();
        let psi = GridWavefunction::from_fn(g, 1.0, 1.0, |x| Complex64::new((-x * x).exp(), 0.0)).unwrap();
        assert!(matches!(wigner_transform(&psi), Err(Error::NotPowerOfTwo(100))));
    }
}
