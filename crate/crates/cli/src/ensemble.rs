//! `ensemble`: moments and checks of a classical particle ensemble.
//!
//! The source is a CSV file with columns `x,p[,m]` or
//! `random n=<count> sx=<spread> sp=<spread> rho=<correlation>`, a seeded
//! correlated Gaussian ensemble.

use std::path::Path;

use freemoments::classical_ensemble::{classical_omega4, omega4_scale, read_csv, ParticleEnsemble};
use freemoments::geometry::{classify, GeometryReport};
use freemoments::inequalities::{check_state, InequalityReport, Provenance};
use freemoments::MomentVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use serde_json::{json, Value};

use crate::analyze::{Centroid, OrderInvariants};
use crate::config::RunConfig;
use crate::error::{CliError, Context};
use crate::output::{Units, SCHEMA};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Omega4 {
    pub value: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleReport {
    pub schema: u32,
    pub command: &'static str,
    pub units: Units,
    pub source: Value,
    pub particles: usize,
    pub centroid: Centroid,
    pub moments: Vec<MomentVector>,
    pub invariants: Vec<OrderInvariants>,
    pub omega4: Omega4,
    pub geometry: Vec<GeometryReport>,
    pub inequalities: Vec<InequalityReport>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomEnsemble {
    pub n: usize,
    pub sx: f64,
    pub sp: f64,
    pub rho: f64,
}

/// Parses `random key=value...`.
pub fn parse_random<S: AsRef<str>>(words: &[S]) -> Result<RandomEnsemble, CliError> {
    let mut r = RandomEnsemble {
        n: 1000,
        sx: 1.0,
        sp: 1.0,
        rho: 0.0,
    };
    for w in words {
        let w = w.as_ref();
        let (k, v) = w
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected key=value, got '{w}'")))?;
        let bad = || CliError::Usage(format!("invalid value for {k}: '{v}'"));
        match k {
            "n" => r.n = v.parse().map_err(|_| bad())?,
            "sx" => r.sx = v.parse().map_err(|_| bad())?,
            "sp" => r.sp = v.parse().map_err(|_| bad())?,
            "rho" => r.rho = v.parse().map_err(|_| bad())?,
            _ => return Err(CliError::Usage(format!("random ensembles take n, sx, sp, rho; got '{k}'"))),
        }
    }
    if r.n < 2 || !(r.sx > 0.0 && r.sx.is_finite()) || !(r.sp > 0.0 && r.sp.is_finite()) || !(r.rho.abs() < 1.0) {
        return Err(CliError::Usage(
            "random ensembles need n >= 2, sx > 0, sp > 0 and |rho| < 1".into(),
        ));
    }
    Ok(r)
}

pub fn sample(r: RandomEnsemble, seed: u64, mass: f64) -> freemoments::Result<ParticleEnsemble> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut xs, mut ps) = (Vec::with_capacity(r.n), Vec::with_capacity(r.n));
    for _ in 0..r.n {
        let a: f64 = StandardNormal.sample(&mut rng);
        let b: f64 = StandardNormal.sample(&mut rng);
        xs.push(r.sx * a);
        ps.push(r.sp * (r.rho * a + (1.0 - r.rho * r.rho).sqrt() * b));
    }
    ParticleEnsemble::new(xs, ps, mass)
}

pub fn load<S: AsRef<str>>(words: &[S], seed: u64, config: &RunConfig) -> Result<(ParticleEnsemble, Value), CliError> {
    let (head, rest) = words
        .split_first()
        .ok_or_else(|| CliError::Usage("ensemble needs a CSV path or 'random'".into()))?;
    if head.as_ref() == "random" {
        let r = parse_random(rest)?;
        let e = sample(r, seed, config.mass).context(|| "sampling ensemble".into())?;
        let source = json!({"random": {"n": r.n, "sx": r.sx, "sp": r.sp, "rho": r.rho, "seed": seed}});
        return Ok((e, source));
    }
    if let Some(extra) = rest.first() {
        return Err(CliError::Usage(format!("unexpected argument '{}'", extra.as_ref())));
    }
    let path = Path::new(head.as_ref());
    let file = std::fs::File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let e = read_csv(file, config.mass).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })?;
    Ok((e, json!({ "file": path.display().to_string() })))
}

pub fn ensemble<S: AsRef<str>>(words: &[S], max_order: usize, seed: u64, config: &RunConfig) -> Result<EnsembleReport, CliError> {
    if !(2..=6).contains(&max_order) {
        return Err(CliError::Usage(format!("ensemble takes --order 2 to 6, got {max_order}")));
    }
    let (e, source) = load(words, seed, config)?;
    let hbar = config.hbar;
    let mut notes = vec!["classical provenance: the quantum bounds need not hold".to_string()];
    let moments = (1..=max_order.max(4))
        .map(|n| e.moments(n, hbar).context(|| format!("moments of order {n}")))
        .collect::<Result<Vec<_>, _>>()?;
    let invariants = moments[1..max_order]
        .iter()
        .map(|y| match y.invariants() {
            Ok(z) => OrderInvariants {
                order: y.order(),
                t0: Some(z.t0()),
                invariants: Some(z),
                note: None,
            },
            Err(err) => OrderInvariants {
                order: y.order(),
                invariants: None,
                t0: None,
                note: Some(err.to_string()),
            },
        })
        .collect();
    let mut geometry = Vec::new();
    for y in &moments[2..4] {
        match classify(y) {
            Ok(g) => geometry.push(g),
            Err(err) => notes.push(format!("order {} geometry: {err}", y.order())),
        }
    }
    let inequalities = check_state(&moments[1], &moments[2], &moments[3], Provenance::Classical)
        .context(|| "inequality checks".into())?;
    let (x, p) = e.centroid();
    Ok(EnsembleReport {
        schema: SCHEMA,
        command: "ensemble",
        units: Units::of(config),
        source,
        particles: e.len(),
        centroid: Centroid { x, p },
        moments: moments[..max_order].to_vec(),
        invariants,
        omega4: Omega4 {
            value: classical_omega4(&e),
            scale: omega4_scale(&e),
        },
        geometry,
        inequalities,
        notes,
    })
}
