//! Replays the checked-in fuzz corpus, plus seeded mutations of it, through
//! every parser and decoder entry point so the targets are exercised on a
//! stable toolchain.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use freemoments::classical_ensemble::{self, ParticleEnsemble};
use freemoments::geometry::classify;
use freemoments::moment_core::moments_from_invariants;
use freemoments::wavefunction::io::{from_binary, read_csv, to_binary, write_csv};
use freemoments::{InvariantSet, MomentVector};
use freemoments_cli::config::parse_config;
use freemoments_cli::state_spec::parse_state_spec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MUTATIONS_PER_SEED: usize = 200;

fn corpus(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut seeds: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            let bytes = fs::read(&path).unwrap();
            (path, bytes)
        })
        .collect();
    seeds.sort();
    assert!(!seeds.is_empty(), "no seeds in {}", dir.display());
    seeds
}

fn mutate(seed: &[u8], rng: &mut ChaCha8Rng) -> Vec<u8> {
    let mut out = seed.to_vec();
    for _ in 0..rng.random_range(1..=4) {
        let at = if out.is_empty() { 0 } else { rng.random_range(0..out.len()) };
        match rng.random_range(0..5) {
            0 if !out.is_empty() => out[at] ^= 1 << rng.random_range(0..8),
            1 if !out.is_empty() => out[at] = *b",.-e0 =\n9".get(rng.random_range(0..9)).unwrap(),
            2 => out.insert(at, rng.random()),
            3 if !out.is_empty() => {
                out.remove(at);
            }
            _ => out.truncate(at),
        }
    }
    out
}

fn replay(target: &str, body: impl Fn(&[u8])) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (path, seed) in corpus(target) {
        body(&seed);
        for _ in 0..MUTATIONS_PER_SEED {
            let input = mutate(&seed, &mut rng);
            let result = catch_unwind(AssertUnwindSafe(|| body(&input)));
            assert!(result.is_ok(), "{target}: panic on mutation of {} {:?}", path.display(), input);
        }
    }
}

#[test]
fn wavefunction_csv() {
    replay("wavefunction_csv", |data| {
        let Ok(psi) = read_csv(data, 1.0, 1.0) else { return };
        let mut out = Vec::new();
        write_csv(&psi, &mut out).expect("accepted grids serialize");
        let back = read_csv(out.as_slice(), 1.0, 1.0).expect("written grids parse");
        assert_eq!(back.len(), psi.len());
    });
}

#[test]
fn wavefunction_binary() {
    replay("wavefunction_binary", |data| {
        let Ok(psi) = from_binary(data) else { return };
        let bytes = to_binary(&psi);
        let back = from_binary(&bytes).expect("encoded grids decode");
        assert_eq!(to_binary(&back), bytes);
    });
}

#[test]
fn ensemble_csv() {
    replay("ensemble_csv", |data| {
        if let Ok(e) = classical_ensemble::read_csv(data, 1.0) {
            let _ = e.moments(4, 1.0);
        }
    });
}

#[test]
fn moments_json() {
    replay("moments_json", |data| {
        if let Ok(y) = serde_json::from_slice::<MomentVector>(data) {
            if let Ok(z) = y.invariants() {
                let _ = moments_from_invariants(&z, 0.0, y.mass(), y.hbar());
            }
            if (3..=4).contains(&y.order()) {
                let _ = classify(&y);
            }
        }
        let _ = serde_json::from_slice::<InvariantSet>(data);
        let _ = serde_json::from_slice::<ParticleEnsemble>(data);
    });
}

#[test]
fn state_spec() {
    replay("state_spec", |data| {
        let Ok(text) = std::str::from_utf8(data) else { return };
        let words: Vec<&str> = text.split_whitespace().collect();
        let _ = parse_state_spec(&words, 1.0);
    });
}

#[test]
fn run_config() {
    replay("run_config", |data| {
        let Ok(text) = std::str::from_utf8(data) else { return };
        if let Ok(c) = parse_config(text) {
            let _ = c.time.samples();
        }
    });
}

#[test]
fn well_formed_seeds_parse() {
    for (path, bytes) in corpus("wavefunction_binary") {
        let name = path.file_name().unwrap().to_str().unwrap();
        assert_eq!(from_binary(&bytes).is_ok(), matches!(name, "gaussian.bin" | "units.bin"), "{name}");
    }
    for (path, bytes) in corpus("run_config") {
        let name = path.file_name().unwrap().to_str().unwrap();
        let ok = parse_config(std::str::from_utf8(&bytes).unwrap()).is_ok();
        assert_eq!(ok, matches!(name, "full.toml" | "empty.toml" | "units.toml"), "{name}");
    }
}
