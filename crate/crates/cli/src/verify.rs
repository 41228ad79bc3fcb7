//! `verify`: seeded property sweeps over the library.

use freemoments::classical_ensemble::{classical_omega4, omega4_scale, ParticleEnsemble};
use freemoments::inequalities::{check_state, Provenance};
use freemoments::moment_core::binomial;
use freemoments::wavefunction::{
    closed_form_moments, free_propagate, quadrature_moments, symmetrized_moments, wigner_moments, Family, GridSpec,
    GridWavefunction, PowerExpParams, SkewGaussianMoments,
};
use freemoments::MomentVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Context};
use crate::output::{Units, SCHEMA};
use crate::states::measured;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Invariance,
    Oracle,
    Inequalities,
    Classical,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub case: usize,
    pub seed: u64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub metric: &'static str,
    pub cases: usize,
    pub failed: usize,
    /// Largest recorded value; the check passes when it is within `limit`.
    pub worst: f64,
    pub limit: f64,
    pub passed: bool,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub command: &'static str,
    pub units: Units,
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

/// Failures kept per check; the count is still exact.
const MAX_LOGGED: usize = 20;

struct Tracker {
    result: CheckResult,
}

impl Tracker {
    fn new(name: &'static str, metric: &'static str, limit: f64) -> Self {
        Self {
            result: CheckResult {
                name,
                metric,
                cases: 0,
                failed: 0,
                worst: f64::NEG_INFINITY,
                limit,
                passed: true,
                failures: Vec::new(),
            },
        }
    }

    /// Records one case; `value` fails when it exceeds the limit or is NaN.
    fn record(&mut self, case: usize, seed: u64, value: f64, detail: impl FnOnce() -> String) {
        self.result.cases += 1;
        if value > self.result.worst || value.is_nan() {
            self.result.worst = value;
        }
        if !(value <= self.result.limit) {
            self.result.passed = false;
            self.result.failed += 1;
            if self.result.failures.len() < MAX_LOGGED {
                self.result.failures.push(Failure {
                    case,
                    seed,
                    detail: detail(),
                });
            }
        }
    }

    fn finish(self) -> CheckResult {
        self.result
    }
}

/// Per-case seeds drawn from the suite seed, so a failing case can be
/// regenerated on its own.
fn case_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random()).collect()
}

/// A normalizable superposition of one to three moving Gaussians.
pub fn random_smooth_state(seed: u64, grid: GridSpec, hbar: f64, mass: f64) -> freemoments::Result<GridWavefunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms: Vec<(f64, f64, f64, Complex64)> = (0..rng.random_range(1..=3))
        .map(|_| {
            (
                rng.random_range(-2.0..2.0),
                rng.random_range(0.7..1.4),
                rng.random_range(-1.5..1.5),
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            )
        })
        .collect();
    GridWavefunction::from_fn(grid, hbar, mass, |x| {
        terms
            .iter()
            .map(|(c, w, k, a)| a * Complex64::from_polar((-((x - c) / w).powi(2)).exp(), k * x / hbar))
            .sum()
    })
}

fn random_vector(rng: &mut ChaCha8Rng, mass: f64, hbar: f64) -> MomentVector {
    let n = rng.random_range(2..=6);
    let mut v: Vec<f64> = (0..=n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let top = rng.random_range(0.1..1.0);
    v[n] = if rng.random_bool(0.5) { top } else { -top };
    MomentVector::new(v, mass, hbar).expect("finite values")
}

/// Largest change of any invariant, relative to its natural scale.
fn invariant_drift(a: &MomentVector, b: &MomentVector) -> freemoments::Result<f64> {
    let (za, zb) = (a.invariants()?, b.invariants()?);
    let (sa, sb) = (a.invariant_scales(), b.invariant_scales());
    Ok((2..=a.order())
        .filter(|&l| sa[l].max(sb[l]) > 0.0)
        .map(|l| (za.z()[l] - zb.z()[l]).abs() / sa[l].max(sb[l]))
        .fold(0.0, f64::max))
}

fn invariance(seed: u64, config: &RunConfig) -> Result<Vec<CheckResult>, CliError> {
    let (hbar, mass) = (config.hbar, config.mass);
    let mut drift = Tracker::new("propagate_invariants", "relative invariant drift", 1e-12);
    let mut compose = Tracker::new("propagate_composition", "relative error", 1e-12);
    for (case, s) in case_seeds(seed, 2000).into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let y = random_vector(&mut rng, mass, hbar);
        let (t1, t2) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let moved = y.propagate(t1).context(|| "propagation".into())?;
        let d = invariant_drift(&y, &moved).context(|| "invariants".into())?;
        drift.record(case, s, d, || format!("order {} t={t1}: drift {d:e}", y.order()));

        let stepwise = moved.propagate(t2).context(|| "propagation".into())?;
        let direct = y.propagate(t1 + t2).context(|| "propagation".into())?;
        let scale = y.values().iter().map(|v| v.abs()).sum::<f64>()
            * (1.0 + (t1.abs() + t2.abs()) / mass).powi(y.order() as i32);
        let err = (0..=y.order())
            .map(|k| (stepwise.get(k) - direct.get(k)).abs() / scale)
            .fold(0.0, f64::max);
        compose.record(case, s, err, || format!("order {} t1={t1} t2={t2}: {err:e}", y.order()));
    }

    let mut grid = Tracker::new("grid_invariants", "relative invariant drift", 1e-8);
    let spec = GridSpec::centered(2048, 80.0 * config.length_scale).context(|| "grid".into())?;
    for (case, s) in case_seeds(seed ^ 1, 3).into_iter().enumerate() {
        let psi = random_smooth_state(s, spec, hbar, mass).context(|| "random state".into())?;
        for n in 2..=4 {
            let y = measured(&psi, n).context(|| format!("moments of order {n}"))?;
            if y.top() == 0.0 {
                continue;
            }
            for t in [-2.0, 1.0, 2.5] {
                let evolved = free_propagate(&psi, t).context(|| format!("evolution to t={t}"))?;
                let later = measured(&evolved, n).context(|| format!("moments at t={t}"))?;
                let d = invariant_drift(&y, &later).context(|| "invariants".into())?;
                grid.record(case, s, d, || format!("order {n} t={t}: drift {d:e}"));
            }
        }
    }
    Ok(vec![drift.finish(), compose.finish(), grid.finish()])
}

fn oracle(seed: u64, config: &RunConfig) -> Result<Vec<CheckResult>, CliError> {
    let (hbar, mass, a) = (config.hbar, config.mass, config.length_scale);
    let spec = GridSpec::centered(512, 40.0 * a).context(|| "grid".into())?;
    let seeds = case_seeds(seed, 6);
    let mut states = vec![
        (0, Family::Gaussian { a }.build(Some(spec), hbar, mass).context(|| "gaussian".into())?),
        (
            0,
            Family::SkewGaussian { b: 0.671, a }
                .build(Some(spec), hbar, mass)
                .context(|| "skew_gaussian".into())?,
        ),
    ];
    for &s in &seeds[..4] {
        states.push((s, random_smooth_state(s, spec, hbar, mass).context(|| "random state".into())?));
    }
    let mut wigner = Tracker::new("operator_vs_wigner", "|diff| / max(1e-6, 1e-4 |value|)", 1.0);
    for (case, (s, psi)) in states.iter().enumerate() {
        for n in 1..=4 {
            let ops = symmetrized_moments(psi, n).context(|| format!("operator moments of order {n}"))?;
            let wig = wigner_moments(psi, n).context(|| format!("Wigner moments of order {n}"))?;
            for k in 0..=n {
                let (x, y) = (ops.get(k), wig.get(k));
                let r = (x - y).abs() / 1e-6f64.max(1e-4 * x.abs());
                wigner.record(case, *s, r, || format!("n={n} k={k}: operator {x} Wigner {y}"));
            }
        }
    }

    let mut quad = Tracker::new("closed_form_vs_quadrature", "relative difference", 1e-6);
    let mut skew = Tracker::new("closed_form_vs_grid", "difference / moment scale", 1e-8);
    for (case, s) in case_seeds(seed ^ 2, 20).into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let (c, b) = (rng.random_range(1.6..3.0), rng.random_range(0.3..2.0));
        let p = PowerExpParams::new(c, b, a).context(|| "power_exp parameters".into())?;
        let cf = closed_form_moments(&p, hbar).context(|| "closed forms".into())?;
        let q = quadrature_moments(&p, hbar).context(|| "quadrature".into())?;
        let err = [(q.x2, cf.x2), (q.p2, cf.p2), (q.y0, cf.y0), (q.y2, cf.y2), (q.y4, cf.y4)]
            .iter()
            .map(|(x, y)| ((x - y) / y).abs())
            .fold(0.0, f64::max);
        quad.record(case, s, err, || format!("c={c} b={b}: {err:e}"));

        if case < 5 {
            let bs = rng.random_range(0.0..1.5);
            let psi = Family::SkewGaussian { b: bs, a }
                .build(Some(GridSpec::centered(2048, 80.0 * a).context(|| "grid".into())?), hbar, mass)
                .context(|| "skew_gaussian".into())?;
            let m = freemoments::wavefunction::ordered_moments(&psi, 3).context(|| "grid moments".into())?;
            let y = SkewGaussianMoments::new(bs, a, hbar).third_order(mass).context(|| "closed forms".into())?;
            let err = (0..=3)
                .map(|k| (m.values[k] - y.get(k)).abs() / m.scales[k])
                .fold(0.0, f64::max);
            skew.record(case, s, err, || format!("b={bs}: {err:e}"));
        }
    }
    Ok(vec![wigner.finish(), quad.finish(), skew.finish()])
}

fn inequalities(seed: u64, config: &RunConfig) -> Result<Vec<CheckResult>, CliError> {
    let (hbar, mass, a) = (config.hbar, config.mass, config.length_scale);
    // equivalent to the satisfied rule: shortfall <= max(1e-10, 1e-6 |rhs|)
    let mut quantum = Tracker::new("quantum_states", "shortfall / max(1e-4, |rhs|)", 1e-6);
    let mut check = |case: usize, s: u64, label: &str, y: [MomentVector; 3]| -> Result<(), CliError> {
        for r in check_state(&y[0], &y[1], &y[2], Provenance::Quantum).context(|| "inequality checks".into())? {
            let shortfall = (r.rhs - r.lhs) / r.rhs.abs().max(1e-4);
            quantum.record(case, s, shortfall, || format!("{label}: {} lhs {} rhs {}", r.name.as_str(), r.lhs, r.rhs));
        }
        Ok(())
    };
    let measure = |psi: &GridWavefunction| -> Result<[MomentVector; 3], CliError> {
        Ok([
            measured(psi, 2).context(|| "order 2".into())?,
            measured(psi, 3).context(|| "order 3".into())?,
            measured(psi, 4).context(|| "order 4".into())?,
        ])
    };
    let mut case = 0;
    for f in [
        Family::Gaussian { a },
        Family::SkewGaussian { b: 0.3, a },
        Family::SkewGaussian { b: 0.671, a },
        Family::SkewGaussian { b: 1.5, a },
    ] {
        let psi = f.build(None, hbar, mass).context(|| f.name().into())?;
        check(case, 0, f.name(), measure(&psi)?)?;
        case += 1;
    }
    let spec = GridSpec::centered(1024, 60.0 * a).context(|| "grid".into())?;
    for s in case_seeds(seed, 20) {
        let psi = random_smooth_state(s, spec, hbar, mass).context(|| "random state".into())?;
        check(case, s, "random state", measure(&psi)?)?;
        case += 1;
    }
    for (c, b) in [(1.51, 0.24), (1.51, 0.12), (1.51, 0.06), (2.0, 0.5), (3.0, 1.0)] {
        let m = closed_form_moments(&PowerExpParams::new(c, b, a).context(|| "power_exp".into())?, hbar)
            .context(|| "closed forms".into())?;
        let zeros = MomentVector::new(vec![0.0; 4], mass, hbar).context(|| "zeros".into())?;
        let y = [
            m.second_order(mass).context(|| "order 2".into())?,
            zeros,
            m.fourth_order(mass).context(|| "order 4".into())?,
        ];
        check(case, 0, &format!("power_exp c={c} b={b}"), y)?;
        case += 1;
    }
    Ok(vec![quantum.finish()])
}

fn random_ensemble(seed: u64, mass: f64) -> freemoments::Result<ParticleEnsemble> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=1000);
    let (sx, sp) = (rng.random_range(0.1..3.0), rng.random_range(0.1..3.0));
    let rho: f64 = rng.random_range(-0.99..0.99);
    let skewed = rng.random_bool(0.3);
    let (mut xs, mut ps) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for _ in 0..n {
        let a: f64 = StandardNormal.sample(&mut rng);
        let b: f64 = StandardNormal.sample(&mut rng);
        let x = if skewed { a + 0.4 * a * a } else { a };
        xs.push(sx * x);
        ps.push(sp * (rho * a + (1.0 - rho * rho).sqrt() * b));
    }
    ParticleEnsemble::new(xs, ps, mass)
}

fn classical(seed: u64, config: &RunConfig) -> Result<Vec<CheckResult>, CliError> {
    let mut omega = Tracker::new("omega4_nonnegative", "-Omega4 / scale", 1e-12);
    let mut drift = Tracker::new("drift_law", "relative error", 1e-10);
    for (case, s) in case_seeds(seed, 500).into_iter().enumerate() {
        let e = random_ensemble(s, config.mass).context(|| "random ensemble".into())?;
        let o = classical_omega4(&e) / omega4_scale(&e);
        omega.record(case, s, -o, || format!("{} particles: Omega4/scale = {o:e}", e.len()));

        let t = ChaCha8Rng::seed_from_u64(s ^ 0xd1f7).random_range(-3.0..3.0);
        let moved = e.drift(t).context(|| "drift".into())?;
        for n in 1..=6 {
            let y = e.moments(n, config.hbar).context(|| "moments".into())?;
            let predicted = y.propagate(t).context(|| "propagation".into())?;
            let got = moved.moments(n, config.hbar).context(|| "moments".into())?;
            let tau = (t / e.mass()).abs();
            let (xc, pc) = moved.centroid();
            for k in 0..=n {
                let propagated: f64 = (0..=n - k)
                    .map(|l| binomial(n - k, l) as f64 * tau.powi(l as i32) * y.get(k + l).abs())
                    .sum();
                let absolute = moved
                    .positions()
                    .iter()
                    .zip(moved.momenta())
                    .map(|(x, p)| (p - pc).abs().powi(k as i32) * (x - xc).abs().powi((n - k) as i32))
                    .sum::<f64>()
                    / moved.len() as f64;
                let scale = propagated.max(absolute);
                let err = (got.get(k) - predicted.get(k)).abs() / scale.max(f64::MIN_POSITIVE);
                drift.record(case, s, err, || format!("n={n} k={k} t={t}: {err:e}"));
            }
        }
    }
    Ok(vec![omega.finish(), drift.finish()])
}

pub fn verify(suite: Suite, seed: u64, config: &RunConfig) -> Result<VerifyReport, CliError> {
    let checks = match suite {
        Suite::Invariance => invariance(seed, config)?,
        Suite::Oracle => oracle(seed, config)?,
        Suite::Inequalities => inequalities(seed, config)?,
        Suite::Classical => classical(seed, config)?,
    };
    Ok(VerifyReport {
        schema: SCHEMA,
        command: "verify",
        units: Units::of(config),
        suite,
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// Plain-text summary, one row per check.
pub fn table(report: &VerifyReport) -> String {
    let mut out = format!("suite {:?} seed {}\n", report.suite, report.seed).to_lowercase();
    out.push_str(&format!(
        "{:<28} {:>6} {:>6} {:>12} {:>10}  {:<6} metric\n",
        "check", "cases", "failed", "worst", "limit", "result"
    ));
    for c in &report.checks {
        out.push_str(&format!(
            "{:<28} {:>6} {:>6} {:>12.3e} {:>10.1e}  {:<6} {}\n",
            c.name,
            c.cases,
            c.failed,
            c.worst,
            c.limit,
            if c.passed { "PASS" } else { "FAIL" },
            c.metric
        ));
        for f in &c.failures {
            out.push_str(&format!("    case {} seed {}: {}\n", f.case, f.seed, f.detail));
        }
    }
    out.push_str(if report.passed { "all checks passed\n" } else { "some checks FAILED\n" });
    out
}
