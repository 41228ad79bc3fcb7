//! Finite sets of free classical particles of equal mass.
//!
//! Ensemble moments `N^-1 sum P^k X^(n-k)` about the centroid obey the same
//! linear evolution as the quantum symmetrized moments, but the empirical
//! measure is a genuine density, so `Omega_4 >= 0` always holds.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moment_core::{MomentVector, MAX_ORDER};

/// Particle count above which moment sums run in parallel.
const PARALLEL_THRESHOLD: usize = 1 << 14;
const CHUNK: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEnsemble")]
pub struct ParticleEnsemble {
    positions: Vec<f64>,
    momenta: Vec<f64>,
    mass: f64,
}

#[derive(Deserialize)]
struct RawEnsemble {
    positions: Vec<f64>,
    momenta: Vec<f64>,
    mass: f64,
}

impl TryFrom<RawEnsemble> for ParticleEnsemble {
    type Error = Error;

    fn try_from(raw: RawEnsemble) -> Result<Self> {
        ParticleEnsemble::new(raw.positions, raw.momenta, raw.mass)
    }
}

impl ParticleEnsemble {
    pub fn new(positions: Vec<f64>, momenta: Vec<f64>, mass: f64) -> Result<Self> {
        if positions.len() != momenta.len() {
            return Err(Error::InvalidInput(format!(
                "{} positions but {} momenta",
                positions.len(),
                momenta.len()
            )));
        }
        if positions.len() < 2 {
            return Err(Error::DegenerateEnsemble(positions.len()));
        }
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidInput(format!("mass must be positive and finite, got {mass}")));
        }
        if positions.iter().chain(&momenta).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("positions and momenta must be finite".into()));
        }
        Ok(Self {
            positions,
            momenta,
            mass,
        })
    }

    /// Accepts a per-particle mass list, which must be uniform.
    pub fn with_masses(positions: Vec<f64>, momenta: Vec<f64>, masses: &[f64]) -> Result<Self> {
        let Some(&m) = masses.first() else {
            return Err(Error::DegenerateEnsemble(0));
        };
        if masses.len() != positions.len() {
            return Err(Error::InvalidInput(format!(
                "{} masses for {} particles",
                masses.len(),
                positions.len()
            )));
        }
        if masses.iter().any(|v| *v != m) {
            return Err(Error::UnequalMasses);
        }
        Self::new(positions, momenta, m)
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// `(x_bar, p_bar)`
    pub fn centroid(&self) -> (f64, f64) {
        let n = self.len() as f64;
        (
            self.positions.iter().sum::<f64>() / n,
            self.momenta.iter().sum::<f64>() / n,
        )
    }

    /// Sums `sum_mu P^k X^(n-k)` for every `k`, in one pass.
    fn sums(&self, n: usize) -> Vec<f64> {
        let (xc, pc) = self.centroid();
        let term = |(x, p): (&f64, &f64)| {
            let (dx, dp) = (x - xc, p - pc);
            let mut out = vec![0.0; n + 1];
            let mut pk = 1.0;
            for (k, slot) in out.iter_mut().enumerate() {
                *slot = pk * dx.powi((n - k) as i32);
                pk *= dp;
            }
            out
        };
        let add = |mut a: Vec<f64>, b: Vec<f64>| {
            a.iter_mut().zip(&b).for_each(|(a, b)| *a += b);
            a
        };
        if self.len() >= PARALLEL_THRESHOLD {
            // fixed chunks summed in order keep the result independent of
            // thread scheduling
            let partial: Vec<Vec<f64>> = self
                .positions
                .par_chunks(CHUNK)
                .zip(self.momenta.par_chunks(CHUNK))
                .map(|(xs, ps)| xs.iter().zip(ps).map(term).fold(vec![0.0; n + 1], add))
                .collect();
            partial.into_iter().fold(vec![0.0; n + 1], add)
        } else {
            self.positions
                .iter()
                .zip(&self.momenta)
                .map(term)
                .fold(vec![0.0; n + 1], add)
        }
    }

    /// All order-`n` moments; `hbar` only labels the result for comparison
    /// with quantum bounds.
    pub fn moments(&self, n: usize, hbar: f64) -> Result<MomentVector> {
        if n == 0 || n > MAX_ORDER {
            return Err(Error::OrderTooLarge { order: n, max: MAX_ORDER });
        }
        let count = self.len() as f64;
        let mut values: Vec<f64> = self.sums(n).into_iter().map(|s| s / count).collect();
        if n == 1 {
            values.fill(0.0);
        }
        MomentVector::new(values, self.mass, hbar)
    }

    /// Free drift: `x += p t / m`.
    pub fn drift(&self, t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::InvalidInput(format!("time must be finite, got {t}")));
        }
        let v = t / self.mass;
        Ok(Self {
            positions: self.positions.iter().zip(&self.momenta).map(|(x, p)| x + p * v).collect(),
            momenta: self.momenta.clone(),
            mass: self.mass,
        })
    }
}

/// `Y_k` of order `n` about the centroid.
pub fn ensemble_moment(e: &ParticleEnsemble, k: usize, n: usize) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidInput(format!("k = {k} exceeds n = {n}")));
    }
    if n == 0 {
        return Ok(1.0);
    }
    Ok(e.moments(n, 1.0)?.get(k))
}

pub fn drift(e: &ParticleEnsemble, t: f64) -> Result<ParticleEnsemble> {
    e.drift(t)
}

/// `Y_2 Y_4 - Y_3^2` of the fourth-order ensemble moments.
pub fn classical_omega4(e: &ParticleEnsemble) -> f64 {
    let y = e.sums(4);
    let n = e.len() as f64;
    (y[2] * y[4] - y[3] * y[3]) / (n * n)
}

/// Natural size of `Omega_4`, `Y_2 Y_4 + Y_3^2`, for relative comparisons.
pub fn omega4_scale(e: &ParticleEnsemble) -> f64 {
    let y = e.sums(4);
    let n = e.len() as f64;
    (y[2].abs() * y[4].abs() + y[3] * y[3]) / (n * n)
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    x: f64,
    p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<f64>,
}

/// Reads `x,p` rows, with an optional uniform `m` column; `mass` applies
/// when the column is absent.
pub fn read_csv<R: Read>(input: R, mass: f64) -> Result<ParticleEnsemble> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers: Vec<String> = r
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    let has_mass = match headers.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["x", "p"] => false,
        ["x", "p", "m"] => true,
        other => return Err(Error::Parse(format!("expected header x,p[,m], got {}", other.join(",")))),
    };
    let mut xs = Vec::new();
    let mut ps = Vec::new();
    let mut ms = Vec::new();
    for (line, row) in r.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| Error::Parse(format!("row {}: {e}", line + 1)))?;
        xs.push(row.x);
        ps.push(row.p);
        if has_mass {
            ms.push(row.m.ok_or_else(|| Error::Parse(format!("row {}: missing mass", line + 1)))?);
        }
    }
    if has_mass {
        ParticleEnsemble::with_masses(xs, ps, &ms)
    } else {
        ParticleEnsemble::new(xs, ps, mass)
    }
}

pub fn write_csv<W: Write>(e: &ParticleEnsemble, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (x, p) in e.positions.iter().zip(&e.momenta) {
        w.serialize(Row { x: *x, p: *p, m: None })
            .map_err(|err| Error::Parse(err.to_string()))?;
    }
    w.flush().map_err(|err| Error::Parse(err.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point(p: [f64; 2]) -> ParticleEnsemble {
        ParticleEnsemble::new(vec![-1.0, 1.0], p.to_vec(), 1.0).unwrap()
    }

    #[test]
    fn two_point_examples() {
        let e = two_point([0.0, 0.0]);
        assert_eq!(ensemble_moment(&e, 0, 2).unwrap(), 1.0);
        let e = two_point([-1.0, 1.0]);
        let y = e.moments(2, 1.0).unwrap();
        assert_eq!(y.get(1), 1.0);
        assert_eq!(y.get(0) * y.get(2) - y.get(1).powi(2), 0.0);
        let y4 = e.moments(4, 1.0).unwrap();
        assert_eq!((y4.get(2), y4.get(3), y4.get(4)), (1.0, 1.0, 1.0));
        assert_eq!(classical_omega4(&e), 0.0);
        assert_eq!(ensemble_moment(&e, 1, 1).unwrap(), 0.0);
    }

    #[test]
    fn equal_momenta_give_zero_omega4() {
        let e = ParticleEnsemble::new(vec![0.0, 1.0, 5.0], vec![2.0; 3], 1.0).unwrap();
        assert_eq!(classical_omega4(&e), 0.0);
    }

    #[test]
    fn drift_example() {
        let e = ParticleEnsemble::new(vec![0.0, 0.0], vec![-1.0, 1.0], 1.0).unwrap();
        assert_eq!(e.drift(2.0).unwrap().positions(), &[-2.0, 2.0]);
        assert_eq!(e.drift(0.0).unwrap(), e);
        assert!(e.drift(f64::INFINITY).is_err());
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            ParticleEnsemble::new(vec![1.0], vec![1.0], 1.0),
            Err(Error::DegenerateEnsemble(1))
        );
        assert!(ParticleEnsemble::new(vec![1.0, 2.0], vec![1.0], 1.0).is_err());
        assert!(ParticleEnsemble::new(vec![1.0, f64::NAN], vec![1.0, 2.0], 1.0).is_err());
        assert_eq!(
            ParticleEnsemble::with_masses(vec![0.0, 1.0], vec![0.0, 1.0], &[1.0, 2.0]),
            Err(Error::UnequalMasses)
        );
        assert!(ParticleEnsemble::with_masses(vec![0.0, 1.0], vec![0.0, 1.0], &[2.0, 2.0]).is_ok());
    }

    #[test]
    fn csv_round_trip_and_masses() {
        let e = ParticleEnsemble::new(vec![0.5, -1.25, 3.0], vec![1.0, 0.0, -2.0], 2.0).unwrap();
        let mut buf = Vec::new();
        write_csv(&e, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("x,p\n"));
        assert_eq!(read_csv(buf.as_slice(), 2.0).unwrap(), e);
        assert_eq!(read_csv("x,p,m\n0,1,2\n1,0,3\n".as_bytes(), 1.0), Err(Error::UnequalMasses));
        assert_eq!(read_csv("x,p,m\n0,1,2\n1,0,2\n".as_bytes(), 1.0).unwrap().mass(), 2.0);
        assert!(read_csv("x,q\n0,1\n1,0\n".as_bytes(), 1.0).is_err());
    }
}
