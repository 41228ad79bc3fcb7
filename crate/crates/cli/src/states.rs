//! Turns a parsed state specification into grid samples and closed forms.

use std::path::Path;

use freemoments::wavefunction::io::{from_binary, read_csv};
use freemoments::wavefunction::{
    closed_form_moments, gaussian_moments, ordered_moments, quadrature_moments, Family, GridSpec, GridWavefunction,
    PowerExpParams, SkewGaussianMoments, TruncatedPowerExp,
};
use freemoments::MomentVector;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{CliError, Context};
use crate::state_spec::StateSpec;

/// Measured values below this fraction of their natural scale are reported
/// as exact zeros, so symmetric states classify as symmetric.
pub const MEASUREMENT_FLOOR: f64 = 1e-12;

/// Largest grid for which Wigner moments are computed; the transform costs
/// one FFT of twice the grid length per grid point.
pub const WIGNER_MAX_POINTS: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridInfo {
    pub points: usize,
    pub x_min: f64,
    pub dx: f64,
}

impl GridInfo {
    pub fn of(psi: &GridWavefunction) -> Self {
        Self {
            points: psi.len(),
            x_min: psi.x_min(),
            dx: psi.dx(),
        }
    }
}

pub struct PreparedState {
    pub family: Option<Family>,
    pub description: Value,
    pub label: String,
    pub grid: Option<GridWavefunction>,
    pub notes: Vec<String>,
    hbar: f64,
    mass: f64,
}

/// Canonical spelling of a family with all its parameters.
pub fn family_label(f: &Family) -> String {
    match *f {
        Family::Gaussian { a } => format!("gaussian a={a}"),
        Family::SkewGaussian { b, a } => format!("skew_gaussian b={b} a={a}"),
        Family::PowerExp { c, b, a } => format!("power_exp c={c} b={b} a={a}"),
        Family::PowerExpTruncated {
            c,
            b,
            a,
            match_at,
            zero_at,
        } => format!("power_exp_truncated c={c} b={b} a={a} match_at={match_at} zero_at={zero_at}"),
        Family::AbsExp { a } => format!("abs_exp a={a}"),
        Family::SqrtExp { a } => format!("sqrt_exp a={a}"),
    }
}

fn read_file(path: &Path, config: &RunConfig) -> Result<GridWavefunction, CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let parsed = if is_csv {
        read_csv(bytes.as_slice(), config.hbar, config.mass)
    } else {
        from_binary(&bytes)
    };
    parsed.map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a JSON moment vector.
pub fn read_moment_file(path: &Path) -> Result<MomentVector, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn is_power_exp(f: &Family) -> bool {
    matches!(f, Family::PowerExp { .. } | Family::PowerExpTruncated { .. })
}

impl PreparedState {
    /// Samples the state. Power-exponential states are handled through
    /// their closed forms and get no grid.
    pub fn new(spec: &StateSpec, config: &RunConfig) -> Result<Self, CliError> {
        let grid_spec = config
            .grid
            .map(|g| GridSpec::centered(g.points, g.extent))
            .transpose()
            .context(|| "grid configuration".into())?;
        match spec {
            StateSpec::Family(f) => {
                let mut notes = Vec::new();
                let grid = if is_power_exp(f) {
                    notes.push("moments from closed forms and quadrature; no grid sampling".to_string());
                    None
                } else {
                    Some(f.build(grid_spec, config.hbar, config.mass).context(|| format!("sampling {}", f.name()))?)
                };
                Ok(Self {
                    family: Some(*f),
                    description: serde_json::to_value(f).expect("families serialize"),
                    label: family_label(f),
                    grid,
                    notes,
                    hbar: config.hbar,
                    mass: config.mass,
                })
            }
            StateSpec::File(path) => {
                let psi = read_file(path, config)?;
                let mut notes = Vec::new();
                if psi.hbar() != config.hbar || psi.mass() != config.mass {
                    notes.push(format!(
                        "file carries hbar={} mass={}, used instead of the configured values",
                        psi.hbar(),
                        psi.mass()
                    ));
                }
                Ok(Self {
                    family: None,
                    description: json!({ "file": path.display().to_string() }),
                    label: format!("file={}", path.display()),
                    hbar: psi.hbar(),
                    mass: psi.mass(),
                    grid: Some(psi),
                    notes,
                })
            }
            StateSpec::Moments(_) | StateSpec::MomentsFile(_) => Err(CliError::Usage(
                "this command needs a wavefunction (a family or file=<path>), not a moment vector".into(),
            )),
        }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Highest order with finite moments, if the state has a limit.
    pub fn finite_order(&self) -> Option<usize> {
        self.family.and_then(|f| f.finite_moment_order())
    }

    /// Fails when some moment of `order` diverges for this state.
    pub fn require_finite(&self, order: usize) -> Result<(), CliError> {
        match self.finite_order() {
            Some(limit) if order > limit => Err(CliError::Numeric {
                context: format!("moments of order {order}"),
                source: freemoments::Error::ParameterDomain(format!(
                    "{} has divergent momentum moments beyond order {limit}",
                    self.label
                )),
            }),
            _ => Ok(()),
        }
    }

    /// Closed-form moments at `t = 0`, where the family has them.
    pub fn closed_form(&self, order: usize) -> Result<Option<MomentVector>, CliError> {
        let (hbar, mass) = (self.hbar, self.mass);
        let Some(f) = self.family else { return Ok(None) };
        let zeros = |n: usize| MomentVector::new(vec![0.0; n + 1], mass, hbar).map(Some);
        let what = || format!("closed-form moments of order {order}");
        let even = order.is_multiple_of(2);
        match f {
            Family::Gaussian { a } if even => gaussian_moments(a, order, mass, hbar).map(Some),
            Family::Gaussian { .. } => zeros(order),
            Family::SkewGaussian { b, a } if order == 3 => SkewGaussianMoments::new(b, a, hbar).third_order(mass).map(Some),
            Family::SkewGaussian { .. } if order == 1 => zeros(1),
            Family::PowerExp { c, b, a } if even => {
                let m = closed_form_moments(&PowerExpParams::new(c, b, a).context(what)?, hbar).context(what)?;
                if order == 2 { m.second_order(mass) } else { m.fourth_order(mass) }.map(Some)
            }
            Family::PowerExpTruncated {
                c,
                b,
                a,
                match_at,
                zero_at,
            } if even => {
                let p = PowerExpParams::new(c, b, a).context(what)?;
                let m = TruncatedPowerExp::new(p, match_at, zero_at).context(what)?.moments(hbar).context(what)?;
                if order == 2 { m.second_order(mass) } else { m.fourth_order(mass) }.map(Some)
            }
            Family::PowerExp { .. } | Family::PowerExpTruncated { .. } => zeros(order),
            _ => Ok(None),
        }
        .context(what)
    }

    /// Independent numerical check of the power-exponential closed forms.
    pub fn quadrature(&self, order: usize) -> Result<Option<MomentVector>, CliError> {
        let what = || format!("quadrature moments of order {order}");
        match self.family {
            Some(Family::PowerExp { c, b, a }) if order == 2 || order == 4 => {
                let m = quadrature_moments(&PowerExpParams::new(c, b, a).context(what)?, self.hbar).context(what)?;
                if order == 2 { m.second_order(self.mass) } else { m.fourth_order(self.mass) }
                    .map(Some)
                    .context(what)
            }
            _ => Ok(None),
        }
    }
}

/// Operator-ordered moments with values under the measurement floor zeroed.
pub fn measured(psi: &GridWavefunction, order: usize) -> freemoments::Result<MomentVector> {
    let m = ordered_moments(psi, order)?;
    let values = m
        .values
        .iter()
        .zip(&m.scales)
        .map(|(v, s)| if v.abs() <= MEASUREMENT_FLOOR * s { 0.0 } else { *v })
        .collect();
    MomentVector::new(values, psi.mass(), psi.hbar())
}
