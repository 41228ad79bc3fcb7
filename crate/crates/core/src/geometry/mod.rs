//! Shape of the `Y_0(t)` evolution for third- and fourth-order moments.
//!
//! Critical points are reported in scaled time `u = (t - t0) / m`, where
//! `t0 = -m y_{n-1} / y_n`. Because `t0` moves with the state, a report is
//! unchanged when the input is propagated; only the absolute times
//! `t0 + m u` shift.

mod cubic;

pub use cubic::{cubic_real_roots, residual_scale, DISCRIMINANT_TOL};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moment_core::{InvariantSet, MomentVector};

/// Relative tolerance for deciding that an input sits on a case boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticalKind {
    Minimum,
    Maximum,
    Inflection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub u: f64,
    pub kind: CriticalKind,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CaseLabel {
    /// Third order, `Omega_3 >= 0`: monotone with one inflection.
    MonotoneInflection,
    /// Third order, `Omega_3 < 0`: extremum pair around an inflection.
    MaxInflectionMin,
    /// Fourth order, `Omega_4 > 0`.
    SingleMin,
    /// Fourth order, `Omega_4 <= 0`, `|Lambda_4| >= 2|Omega_4|^{3/2}`.
    SingleMinWithInflections,
    /// Fourth order, `Omega_4 <= 0`, `|Lambda_4| < 2|Omega_4|^{3/2}`.
    MinMaxMin,
    /// Third order with `y_3 = 0`: `Y_0` is quadratic in time.
    QuadraticExtremum,
    /// Third order with `y_3 = y_2 = 0`: `Y_0` is linear in time.
    NoCriticalPoints,
}

/// Classified critical points of `Y_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub order: usize,
    #[serde(rename = "case")]
    pub case_label: CaseLabel,
    pub u0: Option<f64>,
    pub critical_points: Vec<CriticalPoint>,
    pub boundary: bool,
    /// Reference time for `u`.
    pub t0: f64,
    #[serde(skip)]
    pub invariants_used: Option<InvariantSet>,
}

impl GeometryReport {
    /// Absolute time of a critical point.
    pub fn time_of(&self, point: &CriticalPoint, mass: f64) -> f64 {
        self.t0 + mass * point.u
    }

    pub fn extrema(&self) -> impl Iterator<Item = &CriticalPoint> {
        self.critical_points
            .iter()
            .filter(|c| c.kind != CriticalKind::Inflection)
    }

    pub fn count(&self, kind: CriticalKind) -> usize {
        self.critical_points.iter().filter(|c| c.kind == kind).count()
    }
}

fn sort_points(points: &mut [CriticalPoint]) {
    points.sort_by(|a, b| a.u.total_cmp(&b.u));
}

fn require_order(y: &MomentVector, n: usize) -> Result<()> {
    if y.order() != n {
        return Err(Error::InvalidInput(format!(
            "expected order {n} moments, got order {}",
            y.order()
        )));
    }
    Ok(())
}

/// Classifies third-order evolution (`y_3 != 0`).
///
/// With `Omega_3 < 0` the extrema sit at `u = -/+ u0`, `u0 = sqrt|Omega_3| / |y_3|`,
/// with values `(Lambda_3 +/- 2|Omega_3|^{3/2}) / y_3^2`. For `y_3 > 0` the
/// maximum comes first; `y_3 < 0` is the time-reversed picture, so the
/// minimum comes first and the label still reads `MAX_INFLECTION_MIN`.
pub fn classify_third(y: &MomentVector) -> Result<GeometryReport> {
    require_order(y, 3)?;
    let y3 = y.top();
    if y3 == 0.0 {
        return Err(Error::DegenerateTopMoment { order: 3 });
    }
    let z = y.invariants()?;
    let omega = z.z()[2];
    let lambda = z.z()[3];
    let v = y.values();
    let omega_scale = (v[1] * v[3]).abs() + v[2] * v[2];
    let boundary = omega.abs() <= BOUNDARY_TOL * omega_scale;

    let y0_at = |u: f64| y3 * u * u * u + 3.0 * (omega / y3) * u + lambda / (y3 * y3);
    let inflection = CriticalPoint {
        u: 0.0,
        kind: CriticalKind::Inflection,
        value: lambda / (y3 * y3),
    };

    let (case_label, u0, mut points) = if omega >= 0.0 || boundary {
        (CaseLabel::MonotoneInflection, None, vec![inflection])
    } else {
        let u0 = omega.abs().sqrt() / y3.abs();
        // Y_0'' is proportional to Y_2 = y_3 u
        let kind_at = |u: f64| {
            if y3 * u > 0.0 {
                CriticalKind::Minimum
            } else {
                CriticalKind::Maximum
            }
        };
        let pts = vec![
            CriticalPoint {
                u: -u0,
                kind: kind_at(-u0),
                value: y0_at(-u0),
            },
            inflection,
            CriticalPoint {
                u: u0,
                kind: kind_at(u0),
                value: y0_at(u0),
            },
        ];
        (CaseLabel::MaxInflectionMin, Some(u0), pts)
    };
    sort_points(&mut points);
    Ok(GeometryReport {
        order: 3,
        case_label,
        u0,
        critical_points: points,
        boundary,
        t0: z.t0(),
        invariants_used: Some(z),
    })
}

/// Third order with `y_3 = 0`: `Y_2` is constant and `Y_0` is quadratic,
/// with its extremum at `t0 = -m y_1 / (2 y_2)`.
pub fn special_case_topzero(y: &MomentVector) -> Result<GeometryReport> {
    require_order(y, 3)?;
    let v = y.values();
    if v[3] != 0.0 {
        return Err(Error::InvalidInput(format!(
            "special case needs y_3 = 0, got {}",
            v[3]
        )));
    }
    let (y0, y1, y2) = (v[0], v[1], v[2]);
    if y2 == 0.0 {
        return Ok(GeometryReport {
            order: 3,
            case_label: CaseLabel::NoCriticalPoints,
            u0: None,
            critical_points: Vec::new(),
            boundary: false,
            t0: 0.0,
            invariants_used: None,
        });
    }
    let t0 = -y.mass() * y1 / (2.0 * y2);
    let kind = if y2 > 0.0 {
        CriticalKind::Minimum
    } else {
        CriticalKind::Maximum
    };
    Ok(GeometryReport {
        order: 3,
        case_label: CaseLabel::QuadraticExtremum,
        u0: None,
        critical_points: vec![CriticalPoint {
            u: 0.0,
            kind,
            value: y0 - 3.0 * y1 * y1 / (4.0 * y2),
        }],
        boundary: false,
        t0: if t0 == 0.0 { 0.0 } else { t0 },
        invariants_used: None,
    })
}

/// Classifies fourth-order evolution of a physical quantum state
/// (`y_0 > 0`, `y_4 > 0`).
pub fn classify_fourth(y: &MomentVector) -> Result<GeometryReport> {
    require_order(y, 4)?;
    if y.top() <= 0.0 {
        return Err(Error::InvalidEvenTopMoment(y.top()));
    }
    y.check_even_positivity()?;
    classify_fourth_inner(y)
}

/// Like [`classify_fourth`] but accepts unphysical signs, for exploring
/// classical-ensemble data. A negative `y_4` is handled by classifying
/// `-Y` and swapping minima with maxima.
pub fn classify_fourth_raw(y: &MomentVector) -> Result<GeometryReport> {
    require_order(y, 4)?;
    let y4 = y.top();
    if y4 == 0.0 {
        return Err(Error::DegenerateTopMoment { order: 4 });
    }
    if y4 > 0.0 {
        return classify_fourth_inner(y);
    }
    let neg = MomentVector::new(y.values().iter().map(|v| -v).collect(), y.mass(), y.hbar())?;
    let mut report = classify_fourth_inner(&neg)?;
    for p in &mut report.critical_points {
        p.value = -p.value;
        p.kind = match p.kind {
            CriticalKind::Minimum => CriticalKind::Maximum,
            CriticalKind::Maximum => CriticalKind::Minimum,
            CriticalKind::Inflection => CriticalKind::Inflection,
        };
    }
    report.invariants_used = Some(y.invariants()?);
    Ok(report)
}

fn classify_fourth_inner(y: &MomentVector) -> Result<GeometryReport> {
    let z = y.invariants()?;
    let y4 = z.yn();
    let (omega, lambda, theta) = (z.z()[2], z.z()[3], z.z()[4]);
    let v = y.values();

    let y0_at = |u: f64| {
        let u2 = u * u;
        y4 * u2 * u2 + 6.0 * (omega / y4) * u2 + 4.0 * (lambda / (y4 * y4)) * u + theta / (y4 * y4 * y4)
    };
    let point = |u: f64, kind| CriticalPoint {
        u,
        kind,
        value: y0_at(u),
    };
    // extrema of Y_0 are the zeros of Y_1 = y4 u^3 + 3 (Omega/y4) u + Lambda/y4^2
    let roots = cubic_real_roots(y4, 3.0 * omega / y4, lambda / (y4 * y4))?;

    let omega_boundary = omega.abs() <= BOUNDARY_TOL * ((v[2] * v[4]).abs() + v[3] * v[3]);
    if omega > 0.0 && !omega_boundary {
        let u = roots[0];
        return Ok(GeometryReport {
            order: 4,
            case_label: CaseLabel::SingleMin,
            u0: None,
            critical_points: vec![point(u, CriticalKind::Minimum)],
            boundary: false,
            t0: z.t0(),
            invariants_used: Some(z),
        });
    }

    let abs_om = omega.abs();
    let u0 = if omega_boundary { 0.0 } else { abs_om.sqrt() / y4 };
    let inflections = if u0 > 0.0 {
        vec![
            point(-u0, CriticalKind::Inflection),
            point(u0, CriticalKind::Inflection),
        ]
    } else {
        vec![point(0.0, CriticalKind::Inflection)]
    };
    // sign of Lambda^2 - 4|Omega|^3 decides between one and two minima
    let d = lambda * lambda - 4.0 * abs_om.powi(3);
    let d_scale = lambda * lambda + 4.0 * abs_om.powi(3);
    let lambda_boundary = d.abs() <= BOUNDARY_TOL * d_scale;
    let boundary = omega_boundary || lambda_boundary;

    let (case_label, mut points) = if d > 0.0 || boundary || roots.len() < 3 {
        let u_min = if lambda > 0.0 {
            roots[0]
        } else if lambda < 0.0 {
            roots[roots.len() - 1]
        } else {
            roots[roots.len() / 2]
        };
        let mut pts = inflections;
        pts.push(point(u_min, CriticalKind::Minimum));
        (CaseLabel::SingleMinWithInflections, pts)
    } else {
        let mut pts = inflections;
        pts.push(point(roots[0], CriticalKind::Minimum));
        pts.push(point(roots[1], CriticalKind::Maximum));
        pts.push(point(roots[2], CriticalKind::Minimum));
        (CaseLabel::MinMaxMin, pts)
    };
    sort_points(&mut points);
    Ok(GeometryReport {
        order: 4,
        case_label,
        u0: Some(u0),
        critical_points: points,
        boundary: boundary || (roots.len() < 3 && d <= 0.0),
        t0: z.t0(),
        invariants_used: Some(z),
    })
}

/// Fourth-order evolution of an initially real wavefunction (`y_1 = y_3 = 0`),
/// where `Y_0 = y_0 + 6 y_2 u^2 + y_4 u^4` and `t0 = 0`.
pub fn real_initial_fourth(y0: f64, y2: f64, y4: f64) -> Result<GeometryReport> {
    if !(y4 > 0.0) || !y4.is_finite() {
        return Err(Error::InvalidEvenTopMoment(y4));
    }
    let z = MomentVector::unit(vec![y0, 0.0, y2, 0.0, y4])?.invariants()?;
    let y0_at = |u: f64| y0 + 6.0 * y2 * u * u + y4 * u.powi(4);
    if y2 >= 0.0 {
        return Ok(GeometryReport {
            order: 4,
            case_label: CaseLabel::SingleMin,
            u0: None,
            critical_points: vec![CriticalPoint {
                u: 0.0,
                kind: CriticalKind::Minimum,
                value: y0,
            }],
            boundary: y2 == 0.0,
            t0: 0.0,
            invariants_used: Some(z),
        });
    }
    let u0 = (-y2 / y4).sqrt();
    let um = 3f64.sqrt() * u0;
    let min_value = y0 - 9.0 * y2 * y2 / y4;
    let infl_value = y0 - 5.0 * y2 * y2 / y4;
    debug_assert!((y0_at(um) - min_value).abs() <= 1e-9 * min_value.abs().max(y0.abs()));
    let points = vec![
        CriticalPoint {
            u: -um,
            kind: CriticalKind::Minimum,
            value: min_value,
        },
        CriticalPoint {
            u: -u0,
            kind: CriticalKind::Inflection,
            value: infl_value,
        },
        CriticalPoint {
            u: 0.0,
            kind: CriticalKind::Maximum,
            value: y0,
        },
        CriticalPoint {
            u: u0,
            kind: CriticalKind::Inflection,
            value: infl_value,
        },
        CriticalPoint {
            u: um,
            kind: CriticalKind::Minimum,
            value: min_value,
        },
    ];
    Ok(GeometryReport {
        order: 4,
        case_label: CaseLabel::MinMaxMin,
        u0: Some(u0),
        critical_points: points,
        boundary: false,
        t0: 0.0,
        invariants_used: Some(z),
    })
}

/// For a real initial state with `y_2 < 0`, the positive time `sqrt(6) u0`
/// at which `Y_0` climbs back to `y_0`.
pub fn real_initial_return_time(y2: f64, y4: f64) -> Option<f64> {
    (y2 < 0.0 && y4 > 0.0).then(|| 6f64.sqrt() * (-y2 / y4).sqrt())
}

/// Routes third- and fourth-order moments to the matching classifier,
/// including the `y_3 = 0` special case.
pub fn classify(y: &MomentVector) -> Result<GeometryReport> {
    match y.order() {
        3 if y.top() == 0.0 => special_case_topzero(y),
        3 => classify_third(y),
        4 => classify_fourth(y),
        n => Err(Error::InvalidInput(format!(
            "geometry is classified for orders 3 and 4 only, got {n}"
        ))),
    }
}
