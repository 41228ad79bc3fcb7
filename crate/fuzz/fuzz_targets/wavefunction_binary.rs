#![no_main]

use freemoments::wavefunction::io::{from_binary, to_binary};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(psi) = from_binary(data) else { return };
    let bytes = to_binary(&psi);
    let back = from_binary(&bytes).expect("encoded grids decode");
    assert_eq!(to_binary(&back), bytes);
});
