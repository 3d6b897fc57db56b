#![no_main]

use libfuzzer_sys::fuzz_target;
use mcmr::compiler::Schedule;
use mcmr::ion::LevelScheme;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = Schedule::from_json(text) {
        let _ = s.validate(&LevelScheme::yb171(), 2);
        let _ = s.total_duration();
    }
});
