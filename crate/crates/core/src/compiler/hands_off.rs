use std::f64::consts::PI;

use super::program::{MCMRProgram, Method};
use super::schedule::{ItemKind, Schedule, ScheduleItem};
use super::shelving::{composite_items, dressing_tones, optical_pi};
use crate::composite::time_reversal;
use crate::dressing::dressed_basis;
use crate::error::{Error, Result};
use crate::ion::{LevelScheme, Pulse, Shape, Target};

/// Detuning and peak Rabi frequency of the pumping tone that drives the
/// selected dressed state to D through its component on the pump line's
/// lower level.
pub fn dressed_pump_tone(program: &MCMRProgram, scheme: &LevelScheme) -> Result<Pulse> {
    let d = program
        .dressing
        .as_ref()
        .ok_or_else(|| Error::Compile("hands-off reset requires dressing parameters".into()))?;
    let t = &program.transitions;
    let raman = scheme.transition(&t.raman)?;
    let pump = scheme.transition(&t.pump_target)?;
    let basis = dressed_basis(d)?;
    let state = basis.state(program.branch);
    let (component, lower_energy) = if pump.lower == raman.lower {
        (state.population(0).sqrt(), d.detuning)
    } else if pump.lower == raman.upper {
        (state.population(1).sqrt(), 0.0)
    } else {
        return Err(Error::Compile(format!(
            "pump line `{}` does not start in the dressed qubit",
            t.pump_target
        )));
    };
    if component < 1e-6 {
        return Err(Error::Compile("selected dressed state has no overlap with the pump line".into()));
    }
    let tau = program.timing.pump_pulse;
    let rabi = Pulse::rabi_for_angle(PI, tau, Shape::Blackman) / component;
    Ok(Pulse::new(
        &t.pump_target,
        rabi,
        lower_energy - basis.shift(program.branch),
        0.0,
        tau,
        Shape::Blackman,
        Target::Global,
    ))
}

/// Hands-off reset: rotate the auxiliary ions into the dressed basis, run
/// `pump_cycles` rounds of (dressed-state π, `|2⟩` π, `|3⟩` π, repump) with
/// the dressing on throughout, then rotate back. Population accumulates in
/// the unpumped dressed state, which maps to the reset target.
pub fn compile_hands_off_reset(program: &MCMRProgram, scheme: &LevelScheme) -> Result<Schedule> {
    program.validate()?;
    if program.method != Method::HandsOff {
        return Err(Error::Compile(format!("{:?} is not a reset method", program.method)));
    }
    if program.pump_cycles == 0 {
        return Err(Error::Compile("pump_cycles must be at least 1".into()));
    }
    let d = program.dressing.as_ref().expect("validated");
    let t = &program.transitions;
    let timing = &program.timing;
    let aux = program.aux_ions();
    let seq = program.rotation_sequence()?;
    let background = dressing_tones(&t.raman, d, &aux);

    let mut items = composite_items(&seq, &t.raman, d, &aux, "dress")?;
    let pump = dressed_pump_tone(program, scheme)?;
    let cycle = [
        ScheduleItem::coherent(vec![pump], "pump"),
        ScheduleItem::coherent(vec![optical_pi(&t.pump_minus, timing.optical_pi, 0.0)], "pump"),
        ScheduleItem::coherent(vec![optical_pi(&t.pump_plus, timing.optical_pi, 0.0)], "pump"),
        ScheduleItem::window(ItemKind::Repump, timing.repump, "repump"),
    ]
    .map(|i| i.with_background(&background));
    for _ in 0..program.pump_cycles {
        items.extend(cycle.iter().cloned());
    }
    items.extend(composite_items(&time_reversal(&seq)?, &t.raman, d, &aux, "undress")?);
    let s = Schedule::new(items);
    s.validate(scheme, program.roles.len())?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ion::Role;

    #[test]
    fn zero_cycles_rejected() {
        let p = MCMRProgram::hands_off(vec![Role::Data, Role::Auxiliary], 0);
        assert!(compile_hands_off_reset(&p, &LevelScheme::yb171()).is_err());
    }

    #[test]
    fn cycle_structure() {
        let p = MCMRProgram::hands_off(vec![Role::Data, Role::Auxiliary], 3);
        let s = compile_hands_off_reset(&p, &LevelScheme::yb171()).unwrap();
        assert_eq!(s.items.iter().filter(|i| i.kind == ItemKind::Repump).count(), 3);
        assert_eq!(s.items.iter().filter(|i| i.purpose == "pump").count(), 9);
        // the dressing stays on through every cycle item
        for i in s.items.iter().filter(|i| i.purpose == "pump" || i.purpose == "repump") {
            assert!(i.tones.iter().any(|t| t.drive == "raman_01" && t.target == Target::Individual(1)));
        }
    }

    #[test]
    fn pump_tone_matches_dressed_shift() {
        let p = MCMRProgram::hands_off(vec![Role::Auxiliary], 1);
        let tone = dressed_pump_tone(&p, &LevelScheme::yb171()).unwrap();
        let d = p.dressing.unwrap();
        let expected = -0.5 * (d.detuning + d.rabi.hypot(d.detuning));
        assert!((tone.detuning - expected).abs() < 1e-6 * expected.abs());
    }

    #[test]
    fn requires_dressing() {
        let mut p = MCMRProgram::hands_off(vec![Role::Auxiliary], 1);
        p.dressing = None;
        assert!(compile_hands_off_reset(&p, &LevelScheme::yb171()).is_err());
    }
}
