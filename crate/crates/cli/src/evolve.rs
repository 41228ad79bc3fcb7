//! `evolve`: moment time series in scaled time `u = (t - t0)/m`.

use freemoments::wavefunction::free_propagate;
use freemoments::MomentVector;
use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};
use crate::error::{CliError, Context};
use crate::output::{number, to_json, Units, SCHEMA};
use crate::state_spec::StateSpec;
use crate::states::{measured, PreparedState};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub u: f64,
    pub t: f64,
    pub source: &'static str,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolveReport {
    pub schema: u32,
    pub command: &'static str,
    pub units: Units,
    pub state: Value,
    pub label: String,
    pub order: usize,
    pub t0: f64,
    pub notes: Vec<String>,
    pub samples: Vec<Sample>,
}

pub fn evolve(spec: &StateSpec, order: usize, config: &RunConfig) -> Result<EvolveReport, CliError> {
    if !(2..=4).contains(&order) {
        return Err(CliError::Usage(format!("evolve takes --order 2, 3 or 4, got {order}")));
    }
    let state = PreparedState::new(spec, config)?;
    state.require_finite(order)?;
    let mut notes = state.notes.clone();
    let mass = state.mass();

    let grid_initial = match &state.grid {
        Some(psi) => match measured(psi, order) {
            Ok(y) => Some(y),
            Err(e) => {
                notes.push(format!("grid source dropped: {e}"));
                None
            }
        },
        None => None,
    };
    let (initial, source): (MomentVector, &'static str) = match (state.closed_form(order)?, &grid_initial) {
        (Some(y), _) => (y, "closed_form"),
        (None, Some(y)) => (y.clone(), "propagated"),
        (None, None) => {
            return Err(CliError::Numeric {
                context: format!("initial moments of order {order}"),
                source: freemoments::Error::InvalidInput("no closed form and no usable grid".into()),
            })
        }
    };
    let t0 = match initial.reference_time() {
        Ok(t0) => t0,
        Err(e) => {
            notes.push(format!("t0 undefined ({e}); u = t/m"));
            0.0
        }
    };

    let times = config.time.samples();
    let mut samples = Vec::with_capacity(2 * times.len());
    for &u in &times {
        let t = t0 + mass * u;
        let y = initial.propagate(t).context(|| format!("propagating to u={u}"))?;
        samples.push(Sample {
            u,
            t,
            source,
            values: y.values().to_vec(),
        });
    }
    if let (Some(psi), Some(_)) = (&state.grid, &grid_initial) {
        for &u in &times {
            let t = t0 + mass * u;
            let psi_t = free_propagate(psi, t).context(|| format!("grid evolution at u={u} (t={t})"))?;
            let y = measured(&psi_t, order).context(|| format!("grid moments at u={u} (t={t})"))?;
            samples.push(Sample {
                u,
                t,
                source: "grid",
                values: y.values().to_vec(),
            });
        }
    }

    Ok(EvolveReport {
        schema: SCHEMA,
        command: "evolve",
        units: Units::of(config),
        state: state.description.clone(),
        label: state.label.clone(),
        order,
        t0,
        notes,
        samples,
    })
}

/// `#` metadata lines, then `u,Y0,...,Yn,source`.
pub fn to_csv(report: &EvolveReport) -> String {
    let mut out = String::new();
    let u = report.units;
    out.push_str(&format!("# schema={} command=evolve\n", report.schema));
    out.push_str(&format!("# state={}\n", report.label));
    out.push_str(&format!("# hbar={} mass={} length_scale={}\n", u.hbar, u.mass, u.length_scale));
    out.push_str(&format!("# order={} t0={}\n", report.order, number(report.t0)));
    for note in &report.notes {
        out.push_str(&format!("# note={note}\n"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["u".to_string()];
    header.extend((0..=report.order).map(|k| format!("Y{k}")));
    header.push("source".into());
    w.write_record(&header).expect("in-memory write");
    for s in &report.samples {
        let mut row = vec![number(s.u)];
        row.extend(s.values.iter().map(|v| number(*v)));
        row.push(s.source.to_string());
        w.write_record(&row).expect("in-memory write");
    }
    out.push_str(std::str::from_utf8(&w.into_inner().expect("in-memory write")).expect("ascii"));
    out
}

pub fn render(report: &EvolveReport, format: Format) -> String {
    match format {
        Format::Csv => to_csv(report),
        Format::Json => to_json(report),
    }
}
