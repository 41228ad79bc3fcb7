#![no_main]

use freemoments_cli::state_spec::parse_state_spec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let words: Vec<&str> = text.split_whitespace().collect();
    let _ = parse_state_spec(&words, 1.0);
});
