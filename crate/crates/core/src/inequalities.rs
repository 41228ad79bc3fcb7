//! Inequalities that quantum moments must satisfy.
//!
//! Each check returns an [`InequalityReport`] with `satisfied` decided by
//! `lhs >= rhs - max(1e-10, 1e-6 |rhs|)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moment_core::MomentVector;

/// Absolute floor of the satisfaction tolerance.
pub const ABS_TOL: f64 = 1e-10;
/// Relative part of the satisfaction tolerance.
pub const REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum InequalityName {
    /// `Omega_2 >= hbar^2/4`
    #[serde(rename = "SCHRODINGER_2")]
    Schrodinger2,
    /// `Y_0 Y_2 >= hbar^2/4`
    #[serde(rename = "HEISENBERG_2")]
    Heisenberg2,
    /// `Omega_4 >= (<P^2>^2 - <P^4>/4) hbar^2`
    #[serde(rename = "OMEGA4_BOUND")]
    Omega4Bound,
    /// `Y_2 >= (<P^2>^2/<P^4> - 1/4) hbar^2`, the form taken when `Y_3 = 0`
    #[serde(rename = "OMEGA4_BOUND_EVEN_ODD")]
    Omega4BoundEvenOdd,
    /// `y_0 y_n >= c_n hbar^n`
    EvenProduct,
    KurtSkewX,
    KurtSkewP,
}

impl InequalityName {
    pub fn as_str(&self) -> &'static str {
        match self {
            InequalityName::Schrodinger2 => "SCHRODINGER_2",
            InequalityName::Heisenberg2 => "HEISENBERG_2",
            InequalityName::Omega4Bound => "OMEGA4_BOUND",
            InequalityName::Omega4BoundEvenOdd => "OMEGA4_BOUND_EVEN_ODD",
            InequalityName::EvenProduct => "EVEN_PRODUCT",
            InequalityName::KurtSkewX => "KURT_SKEW_X",
            InequalityName::KurtSkewP => "KURT_SKEW_P",
        }
    }
}

/// Where the moments came from. Quantum bounds need not hold for classical
/// input, and a violation there is reported rather than treated as a fault.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    #[default]
    Quantum,
    Classical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: InequalityName,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs`
    pub margin: f64,
    pub satisfied: bool,
    /// Closeness to equality: `rhs/lhs` when both are positive, `lhs/rhs`
    /// when both are negative, else 0. Equals 1 at saturation.
    pub saturation_ratio: f64,
    pub provenance: Provenance,
}

impl InequalityReport {
    pub fn new(name: InequalityName, lhs: f64, rhs: f64, provenance: Provenance) -> Self {
        let tol = ABS_TOL.max(REL_TOL * rhs.abs());
        let saturation_ratio = if lhs > 0.0 && rhs > 0.0 {
            rhs / lhs
        } else if lhs < 0.0 && rhs < 0.0 {
            lhs / rhs
        } else {
            0.0
        };
        Self {
            name,
            lhs,
            rhs,
            margin: lhs - rhs,
            satisfied: lhs >= rhs - tol,
            saturation_ratio,
            provenance,
        }
    }

    /// A quantum-sourced report that fails signals inconsistent moments.
    pub fn is_violation(&self) -> bool {
        !self.satisfied && self.provenance == Provenance::Quantum
    }
}

fn require_order(y: &MomentVector, n: usize) -> Result<()> {
    if y.order() != n {
        return Err(Error::InvalidInput(format!("expected order {n} moments, got order {}", y.order())));
    }
    Ok(())
}

/// `Omega_2 = Y_0 Y_2 - Y_1^2 >= hbar^2/4`, followed by the weaker
/// `Y_0 Y_2 >= hbar^2/4`.
pub fn check_schrodinger(y: &MomentVector, provenance: Provenance) -> Result<[InequalityReport; 2]> {
    require_order(y, 2)?;
    let bound = y.hbar() * y.hbar() / 4.0;
    let (y0, y1, y2) = (y.get(0), y.get(1), y.get(2));
    Ok([
        InequalityReport::new(InequalityName::Schrodinger2, y0 * y2 - y1 * y1, bound, provenance),
        InequalityReport::new(InequalityName::Heisenberg2, y0 * y2, bound, provenance),
    ])
}

/// `Omega_4 >= (p2^2 - p4/4) hbar^2` with `p2 = <P^2>`, `p4 = <P^4>` of the
/// same state. When `Y_3 = 0` the `Y_2` form is reported as well.
pub fn check_omega4_bound(
    y4: &MomentVector,
    p2: f64,
    p4: f64,
    provenance: Provenance,
) -> Result<Vec<InequalityReport>> {
    require_order(y4, 4)?;
    if !(p4 > 0.0) || !p4.is_finite() || !p2.is_finite() {
        return Err(Error::InvalidInput(format!("need finite p2 and p4 > 0, got p2={p2}, p4={p4}")));
    }
    let h2 = y4.hbar() * y4.hbar();
    let (y2, y3, yy4) = (y4.get(2), y4.get(3), y4.get(4));
    let omega = y2 * yy4 - y3 * y3;
    let mut out = vec![InequalityReport::new(
        InequalityName::Omega4Bound,
        omega,
        (p2 * p2 - 0.25 * p4) * h2,
        provenance,
    )];
    if y3 == 0.0 {
        out.push(InequalityReport::new(
            InequalityName::Omega4BoundEvenOdd,
            y2,
            (p2 * p2 / p4 - 0.25) * h2,
            provenance,
        ));
    }
    Ok(out)
}

/// `y_0 y_n >= c_n hbar^n`, with `c_2 = 1/4` and `c_4 = 3/8`.
pub fn check_even_product(y0: f64, yn: f64, n: usize, hbar: f64, provenance: Provenance) -> Result<InequalityReport> {
    let c = match n {
        2 => 0.25,
        4 => 0.375,
        _ => return Err(Error::UnsupportedOrder(n)),
    };
    if !(y0 > 0.0) || !(yn > 0.0) || !y0.is_finite() || !yn.is_finite() {
        return Err(Error::InvalidInput(format!("need y0, yn > 0, got y0={y0}, yn={yn}")));
    }
    Ok(InequalityReport::new(
        InequalityName::EvenProduct,
        y0 * yn,
        c * hbar.powi(n as i32),
        provenance,
    ))
}

/// Which variable a kurtosis-skewness check concerns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    P,
}

/// `m4/m2^2 >= m3^2/m2^3` for central moments of either variable.
pub fn check_kurtosis_skewness(m2: f64, m3: f64, m4: f64, axis: Axis, provenance: Provenance) -> Result<InequalityReport> {
    if !(m2 > 0.0) || !m2.is_finite() || !m3.is_finite() || !m4.is_finite() {
        return Err(Error::InvalidInput(format!("need finite moments with m2 > 0, got m2={m2}")));
    }
    let name = match axis {
        Axis::X => InequalityName::KurtSkewX,
        Axis::P => InequalityName::KurtSkewP,
    };
    Ok(InequalityReport::new(name, m4 / (m2 * m2), m3 * m3 / m2.powi(3), provenance))
}

/// Every check applicable to a state, given its moments of orders 2, 3 and 4
/// taken at the same time.
pub fn check_state(
    y2: &MomentVector,
    y3: &MomentVector,
    y4: &MomentVector,
    provenance: Provenance,
) -> Result<Vec<InequalityReport>> {
    require_order(y2, 2)?;
    require_order(y3, 3)?;
    require_order(y4, 4)?;
    let hbar = y2.hbar();
    let mut out: Vec<InequalityReport> = check_schrodinger(y2, provenance)?.into();
    out.extend(check_omega4_bound(y4, y2.get(2), y4.get(4), provenance)?);
    out.push(check_even_product(y2.get(0), y2.get(2), 2, hbar, provenance)?);
    out.push(check_even_product(y4.get(0), y4.get(4), 4, hbar, provenance)?);
    out.push(check_kurtosis_skewness(y2.get(0), y3.get(0), y4.get(0), Axis::X, provenance)?);
    out.push(check_kurtosis_skewness(y2.get(2), y3.get(3), y4.get(4), Axis::P, provenance)?);
    Ok(out)
}
