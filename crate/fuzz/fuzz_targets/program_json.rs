#![no_main]

use libfuzzer_sys::fuzz_target;
use mcmr::compiler::{compile, MCMRProgram};
use mcmr::ion::LevelScheme;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = MCMRProgram::from_json(text) {
        if p.roles.len() <= 8 && p.pump_cycles <= 64 {
            let _ = compile(&p, &LevelScheme::yb171());
        }
    }
});
