#![no_main]

use libfuzzer_sys::fuzz_target;
use mcmr::experiments::ScanSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = ScanSpec::from_json(text) {
        let _ = s.hash();
    }
});
