#![no_main]

use libfuzzer_sys::fuzz_target;
use mcmr::ion::LevelScheme;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = LevelScheme::from_json(text) {
        let again = LevelScheme::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(s, again);
    }
});
