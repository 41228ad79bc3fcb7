//! `analyze`: every moment, invariant, shape metric and inequality of a state.

use std::collections::BTreeMap;

use freemoments::geometry::{classify, GeometryReport};
use freemoments::inequalities::{
    check_even_product, check_kurtosis_skewness, check_schrodinger, check_state, Axis, InequalityReport, Provenance,
};
use freemoments::wavefunction::{central_position_moments, centroid, shape_metrics, wigner_moments, ShapeMetrics};
use freemoments::{InvariantSet, MomentVector};
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::{CliError, Context};
use crate::output::{Units, SCHEMA};
use crate::state_spec::StateSpec;
use crate::states::{measured, GridInfo, PreparedState, WIGNER_MAX_POINTS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Centroid {
    pub x: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderMoments {
    pub order: usize,
    /// The method whose values feed invariants, geometry and inequalities.
    pub primary: &'static str,
    pub methods: BTreeMap<&'static str, MomentVector>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderInvariants {
    pub order: usize,
    pub invariants: Option<InvariantSet>,
    pub t0: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeReport {
    pub schema: u32,
    pub command: &'static str,
    pub units: Units,
    pub state: Value,
    pub grid: Option<GridInfo>,
    pub centroid: Option<Centroid>,
    pub moments: Vec<OrderMoments>,
    pub invariants: Vec<OrderInvariants>,
    pub geometry: Vec<GeometryReport>,
    pub shape: Option<ShapeMetrics>,
    pub inequalities: Vec<InequalityReport>,
    pub notes: Vec<String>,
}

pub fn analyze(spec: &StateSpec, max_order: usize, config: &RunConfig) -> Result<AnalyzeReport, CliError> {
    if !(2..=4).contains(&max_order) {
        return Err(CliError::Usage(format!("analyze takes --order 2, 3 or 4, got {max_order}")));
    }
    let state = PreparedState::new(spec, config)?;
    let mut notes = state.notes.clone();
    let psi = state.grid.as_ref();
    let wigner_ok = psi.is_some_and(|p| p.len() <= WIGNER_MAX_POINTS);
    if psi.is_some() && !wigner_ok {
        notes.push(format!("Wigner moments skipped: grid exceeds {WIGNER_MAX_POINTS} points"));
    }

    let limit = state.finite_order().map_or(max_order, |l| l.min(max_order));
    if limit < max_order {
        notes.push(format!("momentum moments beyond order {limit} diverge for this state and are not reported"));
    }
    // order 1 is trivially zero, so it is only reported next to higher orders
    let top = if limit >= 2 { limit } else { 0 };

    let mut moments = Vec::new();
    let mut primaries: Vec<MomentVector> = Vec::new();
    for n in 1..=top {
        let mut methods = BTreeMap::new();
        if let Some(y) = state.closed_form(n)? {
            methods.insert("closed_form", y);
        }
        if let Some(y) = state.quadrature(n)? {
            methods.insert("quadrature", y);
        }
        if let Some(psi) = psi {
            methods.insert("operator_ordering", measured(psi, n).context(|| format!("operator-ordered moments of order {n}"))?);
            if wigner_ok {
                methods.insert("wigner", wigner_moments(psi, n).context(|| format!("Wigner moments of order {n}"))?);
            }
        }
        let primary = if methods.contains_key("closed_form") { "closed_form" } else { "operator_ordering" };
        primaries.push(methods[primary].clone());
        moments.push(OrderMoments { order: n, primary, methods });
    }

    let invariants = primaries
        .iter()
        .skip(1)
        .map(|y| match y.invariants() {
            Ok(z) => OrderInvariants {
                order: y.order(),
                t0: Some(z.t0()),
                invariants: Some(z),
                note: None,
            },
            Err(e) => OrderInvariants {
                order: y.order(),
                invariants: None,
                t0: None,
                note: Some(e.to_string()),
            },
        })
        .collect();

    let mut geometry = Vec::new();
    for y in primaries.iter().filter(|y| y.order() >= 3) {
        geometry.push(classify(y).context(|| format!("geometry of order {}", y.order()))?);
    }

    let shape = match (psi, state.family) {
        (Some(psi), _) => Some(shape_metrics(psi).context(|| "shape metrics".into())?),
        (None, Some(f)) => f.closed_form_shape(),
        (None, None) => None,
    };

    let centroid = match psi {
        Some(psi) => {
            let (x, p) = centroid(psi);
            Some(Centroid { x, p })
        }
        // power-exponential states are even
        None => Some(Centroid { x: 0.0, p: 0.0 }),
    };

    let inequalities = if top == 4 {
        check_state(&primaries[1], &primaries[2], &primaries[3], Provenance::Quantum)
            .context(|| "inequality checks".into())?
    } else {
        let what = || "inequality checks".to_string();
        let mut out = Vec::new();
        if let Some(y) = primaries.get(1) {
            out.extend(check_schrodinger(y, Provenance::Quantum).context(what)?);
            out.push(check_even_product(y.get(0), y.get(2), 2, y.hbar(), Provenance::Quantum).context(what)?);
        }
        if let Some(psi) = psi {
            let c = central_position_moments(psi, 4).context(|| "central position moments".into())?;
            out.push(check_kurtosis_skewness(c[2], c[3], c[4], Axis::X, Provenance::Quantum).context(what)?);
        }
        notes.push("fourth-order moments unavailable; only the remaining inequalities are checked".into());
        out
    };

    Ok(AnalyzeReport {
        schema: SCHEMA,
        command: "analyze",
        units: Units::of(config),
        state: state.description.clone(),
        grid: psi.map(GridInfo::of),
        centroid,
        moments,
        invariants,
        geometry,
        shape,
        inequalities,
        notes,
    })
}
