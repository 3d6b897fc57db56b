#![no_main]

use libfuzzer_sys::fuzz_target;
use mcmr::composite::{time_reversal, xy_error_at, CompositePulse};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(seq) = CompositePulse::from_json(text) {
        let _ = xy_error_at(&seq, 1.0);
        let _ = time_reversal(&seq);
    }
});
