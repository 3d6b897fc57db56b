use std::path::{Path, PathBuf};

use mcmr::compiler::{compile, ItemKind, MCMRProgram, Schedule};
use mcmr::ion::LevelScheme;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn check_golden(program: &str, golden: &str) -> Schedule {
    let p = MCMRProgram::load(&data(program)).unwrap();
    let compiled = compile(&p, &LevelScheme::yb171()).unwrap();
    let expected = Schedule::load(&data(golden)).unwrap();
    assert_eq!(compiled, expected, "{program} no longer compiles to {golden}");
    compiled
}

#[test]
fn measure_schedule_matches_golden() {
    let s = check_golden("program-measure.json", "schedule-measure.json");
    let purposes: Vec<&str> = s.items.iter().map(|i| i.purpose.as_str()).collect();
    assert_eq!(purposes, ["shelve", "shelve", "detect", "echo", "detect", "unshelve", "unshelve", "unshelve"]);
    assert_eq!(s.items.iter().filter(|i| i.record).count(), 1);
}

#[test]
fn reset_schedule_matches_golden() {
    let s = check_golden("program-reset.json", "schedule-reset.json");
    assert_eq!(s.items.iter().filter(|i| i.kind == ItemKind::Repump).count(), 4);
    assert_eq!(s.items.first().unwrap().purpose, "dress");
    assert_eq!(s.items.last().unwrap().purpose, "undress");
}

#[test]
fn golden_schedules_round_trip_through_json() {
    for name in ["schedule-measure.json", "schedule-reset.json"] {
        let s = Schedule::load(&data(name)).unwrap();
        assert_eq!(Schedule::from_json(&s.to_json().unwrap()).unwrap(), s);
    }
}

#[test]
fn schema_version_is_checked() {
    let text = std::fs::read_to_string(data("schedule-measure.json")).unwrap();
    let bumped = text.replacen("\"schema_version\": 1", "\"schema_version\": 99", 1);
    assert!(Schedule::from_json(&bumped).is_err());
}
