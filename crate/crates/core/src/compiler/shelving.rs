use std::f64::consts::PI;

use super::program::{MCMRProgram, Method, Timing, TransitionMap};
use super::schedule::{ItemKind, Schedule, ScheduleItem};
use super::simulate::{simulate_schedule, SimulateOptions};
use crate::composite::{time_reversal, CompositePulse};
use crate::dressing::DressingParams;
use crate::error::{Error, Result};
use crate::ion::{Ion, IonRegister, LevelScheme, Manifold, NoiseModel, Pulse, Role, Shape, Target};
use crate::quantum::{fidelity, CVector, QuantumState, C64};

const VERIFY_TOL: f64 = 1e-9;

pub(crate) fn optical_pi(drive: &str, duration: f64, detuning: f64) -> Pulse {
    Pulse::new(drive, Pulse::rabi_for_angle(PI, duration, Shape::Blackman), detuning, 0.0, duration, Shape::Blackman, Target::Global)
}

fn raman_pi(drive: &str, duration: f64, ion: usize) -> Pulse {
    Pulse::new(
        drive,
        Pulse::rabi_for_angle(PI, duration, Shape::Rectangular),
        0.0,
        0.0,
        duration,
        Shape::Rectangular,
        Target::Individual(ion),
    )
}

fn raman_on(ions: &[usize], t: &TransitionMap, timing: &Timing, purpose: &str) -> Option<ScheduleItem> {
    if ions.is_empty() {
        return None;
    }
    Some(ScheduleItem::coherent(ions.iter().map(|&i| raman_pi(&t.raman, timing.raman_pi, i)).collect(), purpose))
}

/// Continuous dressing tones, one per auxiliary ion.
pub(crate) fn dressing_tones(raman: &str, d: &DressingParams, aux: &[usize]) -> Vec<Pulse> {
    aux.iter()
        .map(|&a| Pulse::new(raman, d.rabi, d.detuning, 0.0, 1.0, Shape::Rectangular, Target::Individual(a)))
        .collect()
}

/// One coherent item per pulse of `seq`, applied to every auxiliary ion at
/// the dressing Rabi frequency.
pub(crate) fn composite_items(seq: &CompositePulse, raman: &str, d: &DressingParams, aux: &[usize], purpose: &str) -> Result<Vec<ScheduleItem>> {
    let ratio = d.detuning / d.rabi;
    if (ratio - seq.nominal_detuning_ratio).abs() > 1e-9 {
        return Err(Error::Compile(format!(
            "sequence is designed for detuning ratio {} but the dressing has {ratio}",
            seq.nominal_detuning_ratio
        )));
    }
    Ok(seq
        .pulses
        .iter()
        .filter(|p| p.tau_omega > 0.0)
        .map(|p| {
            let tones = aux
                .iter()
                .map(|&a| {
                    Pulse::new(
                        raman,
                        d.rabi,
                        p.delta_over_omega * d.rabi,
                        p.phi,
                        p.tau_omega / d.rabi,
                        Shape::Rectangular,
                        Target::Individual(a),
                    )
                })
                .collect();
            ScheduleItem::coherent(tones, purpose)
        })
        .collect())
}

/// `true` when the shelving transition starts in the S(F=0) level, so one
/// global pulse shelves the same state on every ion.
fn global_shelving_possible(scheme: &LevelScheme, t: &TransitionMap) -> Result<bool> {
    let tr = scheme.transition(&t.shelve)?;
    let lower = scheme.level(&tr.lower)?;
    Ok(lower.manifold == Manifold::SGround && lower.f == 0)
}

fn detection_with_echo(program: &MCMRProgram, echo: &Pulse) -> Vec<ScheduleItem> {
    let t = &program.timing;
    if program.echo {
        vec![
            ScheduleItem::window(ItemKind::Detection, t.detection / 2.0, "detect").recorded(),
            ScheduleItem::coherent(vec![echo.clone()], "echo"),
            ScheduleItem::window(ItemKind::Detection, t.detection / 2.0, "detect"),
        ]
    } else {
        vec![ScheduleItem::window(ItemKind::Detection, t.detection, "detect").recorded()]
    }
}

/// Mid-circuit measurement by shelving.
///
/// Qubit-rotation variant: a global π pulse moves `|0⟩ → |D⟩` on every ion
/// and an individual Raman π moves data `|1⟩ → |0⟩`, so only the auxiliary
/// `|1⟩` scatters. The detection window is split by a global echo π that
/// swaps the data populations between `|0⟩` and `|D⟩`; unshelving is then
/// `G·R·G` (or `G·R` without echo).
///
/// Dressing variant: the auxiliary ions are rotated into the dressed basis,
/// the global shelving pulse runs at bare resonance with the dressing on, and
/// the rotation is undone, leaving the auxiliary ions in place.
pub fn compile_shelving_measure(program: &MCMRProgram, scheme: &LevelScheme) -> Result<Schedule> {
    program.validate()?;
    let t = &program.transitions;
    let timing = &program.timing;
    let data = program.data_ions();
    let aux = program.aux_ions();
    let g = optical_pi(&t.shelve, timing.optical_pi, 0.0);
    let r = raman_on(&data, t, timing, "shelve");

    let items = match program.method {
        Method::ShelvingQubitRotation if !global_shelving_possible(scheme, t)? => {
            let mut shelve = Vec::new();
            for &a in &aux {
                shelve.extend(compile_individual_shelve_with(scheme, a, program.roles.len(), t, timing)?.items);
            }
            let unshelve = inverse_items(&shelve, "unshelve");
            let mut items = shelve;
            items.push(ScheduleItem::window(ItemKind::Detection, timing.detection, "detect").recorded());
            items.extend(unshelve);
            items
        }
        Method::ShelvingQubitRotation => {
            let mut items = vec![ScheduleItem::coherent(vec![g.clone()], "shelve")];
            items.extend(r.clone());
            items.extend(detection_with_echo(program, &g));
            let g_un = ScheduleItem::coherent(vec![g.clone()], "unshelve");
            if program.echo {
                items.push(g_un.clone());
            }
            items.extend(raman_on(&data, t, timing, "unshelve"));
            items.push(g_un);
            items
        }
        Method::ShelvingDressing => {
            let d = program
                .dressing
                .as_ref()
                .ok_or_else(|| Error::Compile("dressing variant requires dressing parameters".into()))?;
            let seq = program.rotation_sequence()?;
            let dress_in = composite_items(&seq, &t.raman, d, &aux, "dress")?;
            let undress = composite_items(&time_reversal(&seq)?, &t.raman, d, &aux, "undress")?;
            let background = dressing_tones(&t.raman, d, &aux);
            let g_dressed = |purpose: &str| {
                ScheduleItem::coherent(vec![optical_pi(&t.shelve, timing.dressed_optical_pi, 0.0)], purpose).with_background(&background)
            };

            let mut items = dress_in.clone();
            items.push(g_dressed("shelve"));
            items.extend(undress.clone());
            items.extend(r);
            items.extend(detection_with_echo(program, &g));
            if program.echo {
                items.push(ScheduleItem::coherent(vec![g.clone()], "unshelve"));
            }
            items.extend(raman_on(&data, t, timing, "unshelve"));
            items.extend(dress_in.into_iter().map(|mut i| {
                i.purpose = "unshelve".into();
                i
            }));
            items.push(g_dressed("unshelve"));
            items.extend(undress.into_iter().map(|mut i| {
                i.purpose = "unshelve".into();
                i
            }));
            items
        }
        Method::HandsOff => return Err(Error::Compile("hands-off programs compile to a reset, not a measurement".into())),
    };
    let s = Schedule::new(items);
    s.validate(scheme, program.roles.len())?;
    Ok(s)
}

/// Reverses resonant π-pulse items with each phase advanced by π, which
/// inverts every item exactly.
fn inverse_items(items: &[ScheduleItem], purpose: &str) -> Vec<ScheduleItem> {
    items
        .iter()
        .rev()
        .map(|i| {
            let mut inv = i.clone();
            for tone in &mut inv.tones {
                tone.phase = (tone.phase + PI).rem_euclid(2.0 * PI);
            }
            inv.purpose = purpose.into();
            inv
        })
        .collect()
}

/// `|0⟩, |1⟩, |±⟩, |±i⟩` on the two given levels.
pub fn tomography_states(scheme: &LevelScheme, zero: &str, one: &str) -> Result<Vec<QuantumState>> {
    let i0 = scheme.index(zero)?;
    let i1 = scheme.index(one)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let pairs = [
        (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
        (C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
        (C64::new(s, 0.0), C64::new(s, 0.0)),
        (C64::new(s, 0.0), C64::new(-s, 0.0)),
        (C64::new(s, 0.0), C64::new(0.0, s)),
        (C64::new(s, 0.0), C64::new(0.0, -s)),
    ];
    pairs
        .iter()
        .map(|&(a, b)| {
            let mut v = CVector::zeros(scheme.dim());
            v[i0] = a;
            v[i1] = b;
            QuantumState::pure(v, Some(scheme.labels()))
        })
        .collect()
}

/// Shelves the designated state of `target` only, using the yb171 scheme
/// and default transitions and timing.
pub fn compile_individual_shelve(target: usize, n_ions: usize) -> Result<Schedule> {
    compile_individual_shelve_with(&LevelScheme::yb171(), target, n_ions, &TransitionMap::default(), &Timing::default())
}

/// Shelves the lower level of the global shelving line on `target` only.
///
/// With more than one ion the sequence is three rounds of (global shelve π,
/// Raman π on every other ion). Non-targets cycle their qubit through the
/// shelf and come back; the target sees three shelving pulses. The net
/// effect is simulated before returning.
pub fn compile_individual_shelve_with(scheme: &LevelScheme, target: usize, n_ions: usize, t: &TransitionMap, timing: &Timing) -> Result<Schedule> {
    if n_ions == 0 {
        return Err(Error::Compile("register is empty".into()));
    }
    if target >= n_ions {
        return Err(Error::Compile(format!("target ion {target} out of range for {n_ions} ions")));
    }
    let g = optical_pi(&t.shelve, timing.optical_pi, 0.0);
    let mut items = Vec::new();
    if n_ions == 1 {
        items.push(ScheduleItem::coherent(vec![g], "shelve"));
    } else {
        let others: Vec<usize> = (0..n_ions).filter(|&i| i != target).collect();
        for _ in 0..3 {
            items.push(ScheduleItem::coherent(vec![g.clone()], "shelve"));
            items.extend(raman_on(&others, t, timing, "shelve"));
        }
    }
    let schedule = Schedule::new(items);
    schedule.validate(scheme, n_ions)?;
    verify_individual_shelve(scheme, &schedule, target, n_ions, t)?;
    Ok(schedule)
}

fn verify_individual_shelve(scheme: &LevelScheme, schedule: &Schedule, target: usize, n_ions: usize, t: &TransitionMap) -> Result<()> {
    let shelve = scheme.transition(&t.shelve)?;
    let raman = scheme.transition(&t.raman)?;
    let upper = scheme.index(&shelve.upper)?;
    let partner = if raman.lower == shelve.lower { &raman.upper } else { &raman.lower };
    let mut noise = NoiseModel::ideal();
    noise.crosstalk_fraction = 0.0;
    for input in tomography_states(scheme, &shelve.lower, partner)? {
        let shelved_start = QuantumState::basis(scheme.dim(), scheme.index(&shelve.lower)?).with_relabel(scheme.labels())?;
        let ions = (0..n_ions)
            .map(|i| Ion {
                role: Role::Data,
                state: if i == target { shelved_start.clone() } else { input.clone() },
            })
            .collect();
        let reg = IonRegister::new(scheme.clone(), ions)?;
        let out = simulate_schedule(schedule, &reg, &noise, &SimulateOptions::noiseless())?.register;
        let shelved = out.state(target).population(upper);
        if shelved < 1.0 - VERIFY_TOL {
            return Err(Error::Compile(format!("target ion shelved population {shelved} below tolerance")));
        }
        for i in (0..n_ions).filter(|&i| i != target) {
            let f = fidelity(out.state(i), &input)?;
            if f < 1.0 - VERIFY_TOL {
                return Err(Error::Compile(format!("ion {i} disturbed by individual shelving (fidelity {f})")));
            }
        }
    }
    Ok(())
}
