#![no_main]

use freemoments::classical_ensemble::ParticleEnsemble;
use freemoments::geometry::classify;
use freemoments::moment_core::moments_from_invariants;
use freemoments::{InvariantSet, MomentVector};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
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
