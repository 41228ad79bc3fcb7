//! Wavefunction import and export.
//!
//! CSV: header `x,re,im`, one uniformly spaced sample per row.
//!
//! Binary, little-endian:
//!
//! | offset | type    | field                |
//! |--------|---------|----------------------|
//! | 0      | [u8; 4] | magic `FMWF`         |
//! | 4      | u32     | version (1)          |
//! | 8      | u64     | number of points `n` |
//! | 16     | f64     | `x_min`              |
//! | 24     | f64     | `dx`                 |
//! | 32     | f64     | `hbar`               |
//! | 40     | f64     | `mass`               |
//! | 48     | f64 x2n | interleaved re, im   |

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::GridWavefunction;
use crate::error::{Error, Result};

pub const BINARY_MAGIC: [u8; 4] = *b"FMWF";
pub const BINARY_VERSION: u32 = 1;
const HEADER_LEN: usize = 48;
/// Relative deviation from uniform spacing accepted in CSV input.
const SPACING_TOL: f64 = 1e-6;

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    x: f64,
    re: f64,
    im: f64,
}

pub fn write_csv<W: Write>(psi: &GridWavefunction, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (i, a) in psi.amplitudes().iter().enumerate() {
        w.serialize(Row {
            x: psi.x(i),
            re: a.re,
            im: a.im,
        })
        .map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}

/// Reads `x,re,im` rows; the spacing must be uniform.
pub fn read_csv<R: Read>(input: R, hbar: f64, mass: f64) -> Result<GridWavefunction> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = r.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["x", "re", "im"] {
        return Err(Error::Parse(format!("expected header x,re,im, got {}", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut xs = Vec::new();
    let mut amps = Vec::new();
    for (line, row) in r.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| Error::Parse(format!("row {}: {e}", line + 1)))?;
        xs.push(row.x);
        amps.push(Complex64::new(row.re, row.im));
    }
    if xs.len() < 2 {
        return Err(Error::Parse("need at least two samples".into()));
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::Parse("non-finite x".into()));
    }
    let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    if !(dx > 0.0) {
        return Err(Error::Parse("x must increase".into()));
    }
    for (i, x) in xs.iter().enumerate() {
        if (x - (xs[0] + i as f64 * dx)).abs() > SPACING_TOL * dx {
            return Err(Error::Parse(format!("non-uniform spacing at row {}", i + 1)));
        }
    }
    GridWavefunction::new(amps, xs[0], dx, hbar, mass)
}

pub fn to_binary(psi: &GridWavefunction) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * psi.len());
    out.extend_from_slice(&BINARY_MAGIC);
    out.extend_from_slice(&BINARY_VERSION.to_le_bytes());
    out.extend_from_slice(&(psi.len() as u64).to_le_bytes());
    for v in [psi.x_min(), psi.dx(), psi.hbar(), psi.mass()] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for a in psi.amplitudes() {
        out.extend_from_slice(&a.re.to_le_bytes());
        out.extend_from_slice(&a.im.to_le_bytes());
    }
    out
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8-byte slice"))
}

pub fn from_binary(bytes: &[u8]) -> Result<GridWavefunction> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Parse(format!("binary wavefunction truncated: {} bytes", bytes.len())));
    }
    if bytes[..4] != BINARY_MAGIC {
        return Err(Error::Parse("bad magic".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4-byte slice"));
    if version != BINARY_VERSION {
        return Err(Error::Parse(format!("unsupported version {version}")));
    }
    let n = u64::from_le_bytes(bytes[8..16].try_into().expect("8-byte slice"));
    let payload = bytes.len() - HEADER_LEN;
    if !payload.is_multiple_of(16) || (payload / 16) as u64 != n {
        return Err(Error::Parse(format!("header declares {n} points, payload holds {} bytes", payload)));
    }
    let amps = (0..n as usize)
        .map(|i| {
            let at = HEADER_LEN + 16 * i;
            Complex64::new(f64_at(bytes, at), f64_at(bytes, at + 8))
        })
        .collect();
    GridWavefunction::new(amps, f64_at(bytes, 16), f64_at(bytes, 24), f64_at(bytes, 32), f64_at(bytes, 40))
        .map_err(|e| Error::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefunction::grid::GridSpec;

    fn sample() -> GridWavefunction {
        let g = GridSpec::centered(16, 4.0).unwrap();
        GridWavefunction::from_fn(g, 0.5, 2.0, |x| Complex64::new((-x * x).exp(), 0.1 * x)).unwrap()
    }

    #[test]
    fn binary_round_trip() {
        let psi = sample();
        let bytes = to_binary(&psi);
        assert_eq!(bytes.len(), 48 + 16 * 16);
        assert_eq!(from_binary(&bytes).unwrap(), psi);
    }

    #[test]
    fn binary_rejects_damage() {
        let bytes = to_binary(&sample());
        assert!(from_binary(&bytes[..40]).is_err());
        assert!(from_binary(&bytes[..bytes.len() - 8]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(from_binary(&bad).is_err());
        let mut bad = bytes.clone();
        bad[4] = 2;
        assert!(from_binary(&bad).is_err());
        let mut bad = bytes;
        bad[8] = 0xff;
        assert!(from_binary(&bad).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let psi = sample();
        let mut buf = Vec::new();
        write_csv(&psi, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("x,re,im\n"));
        let back = read_csv(buf.as_slice(), 0.5, 2.0).unwrap();
        assert_eq!(back.len(), psi.len());
        for (a, b) in back.amplitudes().iter().zip(psi.amplitudes()) {
            assert_eq!(a, b);
        }
        assert!((back.dx() - psi.dx()).abs() < 1e-15);
    }

    #[test]
    fn csv_rejects_bad_input() {
        assert!(read_csv("x,re\n0,1\n1,1\n".as_bytes(), 1.0, 1.0).is_err());
        assert!(read_csv("x,re,im\n0,1,0\n".as_bytes(), 1.0, 1.0).is_err());
        assert!(read_csv("x,re,im\n0,1,0\n1,1,0\n3,1,0\n".as_bytes(), 1.0, 1.0).is_err());
        assert!(read_csv("x,re,im\n0,1,0\n1,abc,0\n".as_bytes(), 1.0, 1.0).is_err());
        assert!(read_csv("x,re,im\n1,1,0\n0,1,0\n".as_bytes(), 1.0, 1.0).is_err());
    }
}
