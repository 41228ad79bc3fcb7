#![no_main]

use freemoments::classical_ensemble::read_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(e) = read_csv(data, 1.0) {
        let _ = e.moments(4, 1.0);
    }
});
