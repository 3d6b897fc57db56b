#![no_main]

use libfuzzer_sys::fuzz_target;
use mcmr::config::RunConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(c) = RunConfig::from_json(text) {
        if c.scheme.is_none() && c.noise.is_none() && c.sequence.is_none() {
            let _ = c.to_scan_spec();
        }
    }
});
