use std::path::{Path, PathBuf};

use mcmr::compiler::{compile, MCMRProgram, Schedule};
use mcmr::composite::CompositePulse;
use mcmr::config::{parse_sweep, RunConfig};
use mcmr::experiments::ScanSpec;
use mcmr::ion::{LevelScheme, NoiseModel};

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let text = std::fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn every_seed_parses() {
    for (p, t) in seeds("scheme_json") {
        LevelScheme::from_json(&t).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, t) in seeds("noise_json") {
        NoiseModel::from_json(&t).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, t) in seeds("composite_json") {
        CompositePulse::from_json(&t).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, t) in seeds("schedule_json") {
        Schedule::from_json(&t).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, t) in seeds("program_json") {
        let prog = MCMRProgram::from_json(&t).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        compile(&prog, &LevelScheme::yb171()).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, t) in seeds("scan_spec_json") {
        ScanSpec::from_json(&t).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, t) in seeds("run_config_json") {
        RunConfig::from_json(&t)
            .and_then(|c| c.to_scan_spec())
            .unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
    for (p, t) in seeds("sweep_expr") {
        parse_sweep(&t).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
    }
}
