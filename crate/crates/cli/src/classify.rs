//! `classify`: geometry of `Y_0(t)` at third and fourth order.

use freemoments::geometry::{classify as classify_moments, GeometryReport};
use freemoments::MomentVector;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{CliError, Context};
use crate::output::{Units, SCHEMA};
use crate::state_spec::StateSpec;
use crate::states::{measured, read_moment_file, PreparedState};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub order: usize,
    pub source: &'static str,
    pub moments: MomentVector,
    pub report: GeometryReport,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyReport {
    pub schema: u32,
    pub command: &'static str,
    pub units: Units,
    pub state: Value,
    pub classifications: Vec<Classification>,
}

fn classify_one(y: MomentVector, source: &'static str) -> Result<Classification, CliError> {
    let order = y.order();
    if order != 3 && order != 4 {
        return Err(CliError::Usage(format!(
            "classification needs moments of order 3 or 4, got order {order}"
        )));
    }
    let note = (y.top() == 0.0).then(|| format!("y_{order} = 0: degenerate top moment, special-case classifier"));
    let report = classify_moments(&y).context(|| format!("classifying order {order}"))?;
    Ok(Classification {
        order,
        source,
        moments: y,
        report,
        note,
    })
}

pub fn classify(spec: &StateSpec, order: Option<usize>, config: &RunConfig) -> Result<ClassifyReport, CliError> {
    let (state, classifications) = match spec {
        StateSpec::Moments(values) => {
            let y = MomentVector::new(values.clone(), config.mass, config.hbar).map_err(|e| CliError::Usage(e.to_string()))?;
            (json!({ "moments": values }), vec![classify_one(y, "input")?])
        }
        StateSpec::MomentsFile(path) => {
            let y = read_moment_file(path)?;
            (json!({ "moments_file": path.display().to_string() }), vec![classify_one(y, "input")?])
        }
        _ => {
            let state = PreparedState::new(spec, config)?;
            let orders = match order {
                Some(n @ (3 | 4)) => vec![n],
                Some(n) => return Err(CliError::Usage(format!("classify takes --order 3 or 4, got {n}"))),
                None => vec![3, 4],
            };
            let mut out = Vec::new();
            for n in orders {
                state.require_finite(n)?;
                let (y, source) = match (state.closed_form(n)?, &state.grid) {
                    (Some(y), _) => (y, "closed_form"),
                    (None, Some(psi)) => (
                        measured(psi, n).context(|| format!("operator-ordered moments of order {n}"))?,
                        "operator_ordering",
                    ),
                    (None, None) => unreachable!("every state without a grid has closed forms"),
                };
                out.push(classify_one(y, source)?);
            }
            (state.description.clone(), out)
        }
    };
    Ok(ClassifyReport {
        schema: SCHEMA,
        command: "classify",
        units: Units::of(config),
        state,
        classifications,
    })
}
