use num_complex::Complex64;

use super::grid::{wave_numbers, GridWavefunction, Spectral};
use crate::error::{Error, Result};

/// Probability tolerated in the outer 1/32 of the grid on each side.
pub const BOUNDARY_LIMIT: f64 = 1e-10;
const BOUNDARY_FRACTION: f64 = 1.0 / 32.0;

/// Exact free evolution: each momentum amplitude picks up
/// `exp(-i hbar k^2 t / 2m)`.
pub fn free_propagate(psi: &GridWavefunction, t: f64) -> Result<GridWavefunction> {
    if !t.is_finite() {
        return Err(Error::InvalidInput(format!("time must be finite, got {t}")));
    }
    psi.require_power_of_two()?;
    if t == 0.0 {
        return Ok(psi.clone());
    }
    let n = psi.len();
    let spectral = Spectral::new(n);
    let mut buf = psi.amplitudes().to_vec();
    spectral.forward(&mut buf);
    let c = -psi.hbar() * t / (2.0 * psi.mass());
    // the Nyquist bin is shared by +/-k, both carrying the same phase
    let mut k = wave_numbers(n, psi.dx());
    k[n / 2] = std::f64::consts::PI / psi.dx();
    for (a, k) in buf.iter_mut().zip(&k) {
        *a *= Complex64::from_polar(1.0, c * k * k);
    }
    spectral.inverse(&mut buf);
    let out = psi.with_amplitudes(buf);
    let density = out.edge_density(BOUNDARY_FRACTION);
    if density > BOUNDARY_LIMIT {
        return Err(Error::BoundaryOverflow { time: t, density });
    }
    Ok(out)
}
