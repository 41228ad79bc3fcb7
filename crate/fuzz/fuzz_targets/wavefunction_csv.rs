#![no_main]

use freemoments::wavefunction::io::{read_csv, write_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(psi) = read_csv(data, 1.0, 1.0) else { return };
    // anything accepted must survive a write and re-read
    let mut out = Vec::new();
    write_csv(&psi, &mut out).expect("accepted grids serialize");
    let back = read_csv(out.as_slice(), 1.0, 1.0).expect("written grids parse");
    assert_eq!(back.len(), psi.len());
});
