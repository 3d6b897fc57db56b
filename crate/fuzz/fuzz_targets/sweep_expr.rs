#![no_main]

use libfuzzer_sys::fuzz_target;
use mcmr::config::{parse_sweep, MAX_SWEEP_POINTS};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(v) = parse_sweep(text) {
        assert!(!v.is_empty() && v.len() <= MAX_SWEEP_POINTS);
        assert!(v.iter().all(|x| x.is_finite()));
    }
});
