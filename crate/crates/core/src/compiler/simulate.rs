use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::schedule::{ItemKind, Schedule};
use crate::error::Result;
use crate::ion::{
    build_detection_leak, build_noise_dissipator, build_repump_dissipator, detect, detuning_error_diagonal, evolve_segment, Dissipator,
    IonRegister, LevelScheme, NoiseModel, ScaledTone, Segment, Target,
};
use crate::quantum::QuantumState;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulateOptions {
    /// Drop decoherence and the static detuning error. Detection SPAM and
    /// crosstalk still apply.
    pub noiseless: bool,
    /// Sample a detection outcome per recorded window and condition on it.
    pub sample_seed: Option<u64>,
}

impl SimulateOptions {
    pub fn noiseless() -> Self {
        Self {
            noiseless: true,
            sample_seed: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub item: usize,
    pub ion: usize,
    pub p_bright: f64,
    /// `Some(bright)` when sampling.
    pub outcome: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct SimulationOutput {
    pub register: IonRegister,
    pub records: Vec<MeasurementRecord>,
}

/// Rabi scale of a tone on `ion`: global beams hit every ion equally,
/// individual beams hit their target fully and nearest neighbors at the
/// crosstalk fraction.
pub fn tone_scale(target: Target, ion: usize, crosstalk: f64) -> f64 {
    match target {
        Target::Global => 1.0,
        Target::Individual(t) if t == ion => 1.0,
        Target::Individual(t) if t.abs_diff(ion) == 1 => crosstalk,
        Target::Individual(_) => 0.0,
    }
}

struct Channels {
    noise: Dissipator,
    repump: Dissipator,
    leak: Dissipator,
    detuning: Option<Vec<f64>>,
}

fn concat(a: &Dissipator, b: &Dissipator) -> Dissipator {
    a.iter().chain(b).cloned().collect()
}

fn run_ion(
    scheme: &LevelScheme,
    schedule: &Schedule,
    ion: usize,
    start: &QuantumState,
    noise: &NoiseModel,
    ch: &Channels,
    opts: &SimulateOptions,
) -> Result<(QuantumState, Vec<MeasurementRecord>)> {
    let mut state = start.clone();
    let mut records = Vec::new();
    let mut rng = opts.sample_seed.map(|s| {
        let mut r = ChaCha20Rng::seed_from_u64(s);
        r.set_stream(ion as u64);
        r
    });
    for (k, item) in schedule.items.iter().enumerate() {
        let tones: Vec<ScaledTone> = item
            .tones
            .iter()
            .map(|p| ScaledTone {
                pulse: p,
                scale: tone_scale(p.target, ion, noise.crosstalk_fraction),
            })
            .collect();
        let (dissipator, extra_diagonal) = match item.kind {
            ItemKind::Coherent => (ch.noise.clone(), None),
            ItemKind::Noise => (ch.noise.clone(), ch.detuning.clone()),
            ItemKind::Repump => (concat(&ch.repump, &ch.noise), ch.detuning.clone()),
            ItemKind::Detection => {
                let d = detect(scheme, &state, noise);
                state = if item.record {
                    let outcome = rng.as_mut().map(|r| r.gen::<f64>() < d.p_bright);
                    records.push(MeasurementRecord {
                        item: k,
                        ion,
                        p_bright: d.p_bright,
                        outcome,
                    });
                    match outcome {
                        Some(true) => d.bright,
                        Some(false) => d.dark,
                        None => d.unconditional,
                    }
                } else {
                    d.unconditional
                };
                (concat(&ch.noise, &ch.leak), ch.detuning.clone())
            }
        };
        let seg = Segment {
            tones,
            duration: item.duration,
            extra_diagonal,
            dissipator,
        };
        state = evolve_segment(scheme, &state, &seg)?;
    }
    Ok((state, records))
}

/// Runs `schedule` on every ion of `register`. Ions evolve independently
/// and in parallel; records are ordered by item, then ion.
pub fn simulate_schedule(schedule: &Schedule, register: &IonRegister, noise: &NoiseModel, opts: &SimulateOptions) -> Result<SimulationOutput> {
    let scheme = register.scheme();
    noise.validate()?;
    schedule.validate(scheme, register.len())?;
    let ch = if opts.noiseless {
        Channels {
            noise: Vec::new(),
            repump: build_repump_dissipator(scheme)?,
            leak: Vec::new(),
            detuning: None,
        }
    } else {
        Channels {
            noise: build_noise_dissipator(scheme, noise)?,
            repump: build_repump_dissipator(scheme)?,
            leak: build_detection_leak(scheme, noise),
            detuning: detuning_error_diagonal(scheme, noise),
        }
    };
    let results: Vec<(QuantumState, Vec<MeasurementRecord>)> = (0..register.len())
        .into_par_iter()
        .map(|i| run_ion(scheme, schedule, i, register.state(i), noise, &ch, opts))
        .collect::<Result<_>>()?;
    let mut out = register.clone();
    let mut records = Vec::new();
    for (i, (state, recs)) in results.into_iter().enumerate() {
        out.set_state(i, state)?;
        records.extend(recs);
    }
    records.sort_by_key(|r| (r.item, r.ion));
    Ok(SimulationOutput { register: out, records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::ScheduleItem;
    use crate::ion::{Pulse, Role, Shape};
    use crate::quantum::fidelity;
    use std::f64::consts::PI;

    fn register(n: usize) -> IonRegister {
        IonRegister::uniform(LevelScheme::yb171(), &vec![Role::Data; n], "0").unwrap()
    }

    #[test]
    fn empty_schedule_is_identity() {
        let r = register(2);
        let out = simulate_schedule(&Schedule::default(), &r, &NoiseModel::default(), &SimulateOptions::default()).unwrap();
        assert_eq!(out.register, r);
        assert!(out.records.is_empty());
    }

    #[test]
    fn individual_pulse_without_crosstalk() {
        let r = register(2);
        let tau = 6e-6;
        let p = Pulse::new("raman_01", Pulse::rabi_for_angle(PI, tau, Shape::Rectangular), 0.0, 0.0, tau, Shape::Rectangular, Target::Individual(0));
        let s = Schedule::new(vec![ScheduleItem::coherent(vec![p], "flip")]);
        let out = simulate_schedule(&s, &r, &NoiseModel::ideal(), &SimulateOptions::noiseless()).unwrap();
        assert!(out.register.state(0).population(1) > 1.0 - 1e-12);
        assert!(fidelity(out.register.state(1), r.state(1)).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn target_out_of_range() {
        let r = register(1);
        let p = Pulse::new("raman_01", 1e5, 0.0, 0.0, 1e-6, Shape::Rectangular, Target::Individual(3));
        let s = Schedule::new(vec![ScheduleItem::coherent(vec![p], "x")]);
        assert!(simulate_schedule(&s, &r, &NoiseModel::ideal(), &SimulateOptions::noiseless()).is_err());
    }

    #[test]
    fn sampling_is_reproducible() {
        let r = register(3);
        let s = Schedule::new(vec![ScheduleItem::window(ItemKind::Detection, 1e-6, "detect").recorded()]);
        let opts = SimulateOptions {
            noiseless: true,
            sample_seed: Some(5),
        };
        let a = simulate_schedule(&s, &r, &NoiseModel::default(), &opts).unwrap();
        let b = simulate_schedule(&s, &r, &NoiseModel::default(), &opts).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.records.len(), 3);
        assert!(a.records.iter().all(|x| x.outcome.is_some()));
    }
}
