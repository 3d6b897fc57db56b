use std::f64::consts::PI;

use rayon::prelude::*;

use super::analysis::{fit_sinusoid, parabolic_peak, spam_correct};
use super::scan::{Sampler, ScanResult, ScanRow, ScanSpec, Scenario};
use crate::compiler::{
    compile, composite_items, dressing_tones, reference_sequence, simulate_schedule, MCMRProgram, Method, Schedule, ScheduleItem,
    SimulateOptions, HANDS_OFF_DRESSING_RABI,
};
use crate::composite::{sequence_unitary, xy_error, CompositePulse};
use crate::dressing::{dressed_basis, target_for_fraction, Branch, DressingParams, Regime};
use crate::error::{Error, Result};
use crate::ion::{bright_probability, Ion, IonRegister, LevelScheme, Pulse, Role, Shape, Target};
use crate::quantum::{rotation_vector, CVector, QuantumState, C64};

/// Default spectroscopy pulse length.
pub const SPECTRUM_PROBE_DURATION: f64 = 200e-6;
/// Rabi fractions flagged as the fluctuation band.
pub const FLUCTUATION_BAND: (f64, f64) = (0.90, 1.05);

/// Runs the scenario named in `spec`.
pub fn run_scan(spec: &ScanSpec) -> Result<ScanResult> {
    spec.validate()?;
    match spec.scenario {
        Scenario::DstateSpectrum => run_dstate_spectrum(spec),
        Scenario::MeasureFidelity => run_measure_fidelity(spec),
        Scenario::RamseyPhase => run_ramsey(spec),
        Scenario::PumpConvergence => run_pump_convergence(spec),
        Scenario::DressRotateError => run_dress_rotate_error(spec),
    }
}

fn expect(spec: &ScanSpec, scenario: Scenario) -> Result<()> {
    spec.validate()?;
    if spec.scenario != scenario {
        return Err(Error::InvalidArgument(format!(
            "spec is for {}, not {}",
            spec.scenario.name(),
            scenario.name()
        )));
    }
    Ok(())
}

fn sampler(spec: &ScanSpec) -> Sampler {
    Sampler {
        shots: spec.shots,
        seed: spec.seed,
    }
}

fn sim_options(spec: &ScanSpec) -> SimulateOptions {
    SimulateOptions {
        noiseless: spec.options.noiseless,
        sample_seed: None,
    }
}

fn qubit_state(scheme: &LevelScheme, a: C64, b: C64) -> Result<QuantumState> {
    let mut v = CVector::zeros(scheme.dim());
    v[scheme.index("0")?] = a;
    v[scheme.index("1")?] = b;
    QuantumState::pure(v, Some(scheme.labels()))
}

fn level_state(scheme: &LevelScheme, level: &str) -> Result<QuantumState> {
    QuantumState::basis(scheme.dim(), scheme.index(level)?).with_relabel(scheme.labels())
}

fn register(scheme: &LevelScheme, ions: Vec<(Role, QuantumState)>) -> Result<IonRegister> {
    IonRegister::new(scheme.clone(), ions.into_iter().map(|(role, state)| Ion { role, state }).collect())
}

/// Qubit fidelity with the equal superposition, maximized over a `z`
/// rotation: `(p₀ + p₁)/2 + |ρ₀₁|`. Deterministic phases from light shifts
/// and frame changes are a classical frame update and do not count.
pub fn phase_corrected_fidelity(scheme: &LevelScheme, state: &QuantumState) -> Result<f64> {
    let i0 = scheme.index("0")?;
    let i1 = scheme.index("1")?;
    Ok(0.5 * (state.population(i0) + state.population(i1)) + state.coherence(i0, i1).norm())
}

fn par_rows<F>(n: usize, f: F) -> Result<Vec<ScanRow>>
where
    F: Fn(usize) -> Result<ScanRow> + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

fn insert_sinusoid(result: &mut ScanResult, x: &[f64], y: &[f64]) -> Option<[f64; 3]> {
    let c = fit_sinusoid(x, y).ok()?;
    result.summary.insert("fit_c0".into(), c[0]);
    result.summary.insert("fit_c1".into(), c[1]);
    result.summary.insert("fit_c2".into(), c[2]);
    Some(c)
}

/// Rotation vector and XY error of the dressed-basis rotation across Rabi
/// fractions; rows inside the fluctuation band are flagged.
pub fn run_dress_rotate_error(spec: &ScanSpec) -> Result<ScanResult> {
    expect(spec, Scenario::DressRotateError)?;
    let seq = spec.options.sequence.clone().unwrap_or_else(|| reference_sequence(Regime::HandsOff));
    let values = &spec.sweep.values;
    let rows = par_rows(values.len(), |k| {
        let f = values[k];
        if f < 0.0 {
            return Err(Error::InvalidArgument(format!("Rabi fraction must be non-negative, got {f}")));
        }
        let u = sequence_unitary(&seq, f, 1.0)?;
        let v = rotation_vector(&u)?;
        let e = xy_error(&u, &target_for_fraction(seq.nominal_detuning_ratio, f)?)?;
        let in_band = (FLUCTUATION_BAND.0..=FLUCTUATION_BAND.1).contains(&f);
        Ok(ScanRow {
            value: f,
            values: vec![v[0], v[1], v[2], (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt(), e, f64::from(u8::from(in_band))],
            uncertainty: None,
        })
    })?;
    let mut result = ScanResult::new(spec, &["rot_x", "rot_y", "rot_z", "angle", "xy_error", "in_band"], rows);
    let band_max = result
        .rows
        .iter()
        .filter(|r| r.values[5] > 0.5)
        .map(|r| r.values[4])
        .fold(f64::NAN, f64::max);
    if band_max.is_finite() {
        result.summary.insert("max_xy_error_in_band".into(), band_max);
    }
    Ok(result)
}

fn measure_program(spec: &ScanSpec) -> MCMRProgram {
    let roles = vec![Role::Data, Role::Auxiliary];
    let mut p = match spec.options.method {
        Some(Method::ShelvingDressing) => MCMRProgram::shelving_dressing(roles),
        _ => MCMRProgram::shelving_qubit_rotation(roles),
    };
    if let Some(e) = spec.options.echo {
        p.echo = e;
    }
    p
}

/// Auxiliary prepared by `R_x(θ)` from `|0⟩`, measured by the shelving
/// schedule with the data ion in `|0⟩`. Fits `p = c₀ + c₁cosθ + c₂sinθ`;
/// the `|0⟩` fidelity is `1 − p(0)` and the `|1⟩` fidelity `p(π)` of the fit.
pub fn run_measure_fidelity(spec: &ScanSpec) -> Result<ScanResult> {
    expect(spec, Scenario::MeasureFidelity)?;
    let scheme = &spec.scheme;
    let program = measure_program(spec);
    let schedule = compile(&program, scheme)?;
    let opts = sim_options(spec);
    let sampler = sampler(spec);
    let values = &spec.sweep.values;
    let rows = par_rows(values.len(), |k| {
        let theta = values[k];
        let aux = qubit_state(scheme, C64::new((theta / 2.0).cos(), 0.0), C64::new(0.0, -(theta / 2.0).sin()))?;
        let reg = register(scheme, vec![(Role::Data, level_state(scheme, "0")?), (Role::Auxiliary, aux)])?;
        let out = simulate_schedule(&schedule, &reg, &spec.noise, &opts)?;
        let p = out
            .records
            .iter()
            .find(|r| r.ion == 1)
            .map(|r| r.p_bright)
            .ok_or_else(|| Error::Compile("measurement schedule records nothing".into()))?;
        let (v, s) = sampler.observe(p, k, 0);
        Ok(ScanRow {
            value: theta,
            values: vec![v],
            uncertainty: (!sampler.exact()).then(|| vec![s]),
        })
    })?;
    let mut result = ScanResult::new(spec, &["p_bright"], rows);
    let y = result.column("p_bright").expect("column");
    if let Some(c) = insert_sinusoid(&mut result, values, &y) {
        let f0 = 1.0 - (c[0] + c[1]);
        let f1 = c[0] - c[1];
        result.summary.insert("fidelity_0".into(), f0);
        result.summary.insert("fidelity_1".into(), f1);
        result.summary.insert("fidelity".into(), 0.5 * (f0 + f1));
    }
    Ok(result)
}

/// Data-ion Ramsey sequence around the measurement: `π/2`, shelving
/// measurement of the auxiliary, `π/2` at the swept phase, then a SPAM
/// corrected readout of `|1⟩`.
pub fn run_ramsey(spec: &ScanSpec) -> Result<ScanResult> {
    expect(spec, Scenario::RamseyPhase)?;
    let scheme = &spec.scheme;
    let program = measure_program(spec);
    let measure = compile(&program, scheme)?;
    let aux_level = spec.options.aux_level.clone().unwrap_or_else(|| "0".into());
    let aux_start = level_state(scheme, &aux_level)?;
    let opts = sim_options(spec);
    let sampler = sampler(spec);
    let tau = program.timing.raman_pi;
    let half_pi = |phase: f64| {
        let p = Pulse::new(
            &program.transitions.raman,
            Pulse::rabi_for_angle(PI / 2.0, tau, Shape::Rectangular),
            0.0,
            phase,
            tau,
            Shape::Rectangular,
            Target::Individual(0),
        );
        ScheduleItem::coherent(vec![p], "ramsey")
    };
    let noise = &spec.noise;
    let values = &spec.sweep.values;
    let raw_rows = par_rows(values.len(), |k| {
        let mut items = vec![half_pi(0.0)];
        items.extend(measure.items.iter().cloned());
        items.push(half_pi(values[k]));
        let reg = register(scheme, vec![(Role::Data, level_state(scheme, "0")?), (Role::Auxiliary, aux_start.clone())])?;
        let out = simulate_schedule(&Schedule::new(items), &reg, noise, &opts)?;
        let raw = bright_probability(scheme, out.register.state(0), noise);
        let aux = out.records.iter().find(|r| r.ion == 1).map_or(f64::NAN, |r| r.p_bright);
        let (v, s) = sampler.observe(raw, k, 0);
        Ok(ScanRow {
            value: values[k],
            values: vec![v, aux],
            uncertainty: (!sampler.exact()).then(|| vec![s, f64::NAN]),
        })
    })?;
    let raw: Vec<f64> = raw_rows.iter().map(|r| r.values[0]).collect();
    let corrected = spam_correct(&raw, noise.spam_dark_error, noise.spam_bright_error)?;
    let scale = 1.0 - noise.spam_dark_error - noise.spam_bright_error;
    let rows = raw_rows
        .into_iter()
        .zip(&corrected.values)
        .map(|(r, &p1)| ScanRow {
            value: r.value,
            values: vec![p1, r.values[0], r.values[1]],
            uncertainty: r.uncertainty.map(|u| vec![u[0] / scale, u[0], u[1]]),
        })
        .collect();
    let mut result = ScanResult::new(spec, &["p1", "p1_raw", "aux_p_bright"], rows);
    result.clamp_events = corrected.clamp_events;
    if let Some(c) = insert_sinusoid(&mut result, values, &corrected.values) {
        let contrast = 2.0 * c[1].hypot(c[2]);
        result.summary.insert("contrast".into(), contrast);
        result.summary.insert("fidelity".into(), 0.5 * (1.0 + contrast));
    }
    Ok(result)
}

fn hands_off_program(spec: &ScanSpec, cycles: usize) -> MCMRProgram {
    let mut p = MCMRProgram::hands_off(vec![Role::Data, Role::Auxiliary], cycles);
    if let Some(r) = spec.options.dressing_rabi {
        p.dressing = Some(DressingParams::for_regime(Regime::HandsOff, r));
    }
    p.sequence = spec.options.sequence.clone();
    if let Some(t) = spec.options.pump_pulse {
        p.timing.pump_pulse = t;
    }
    if let Some(t) = spec.options.repump {
        p.timing.repump = t;
    }
    if let Some(b) = spec.options.branch {
        p.branch = b;
    }
    p
}

fn split_by_purpose(s: &Schedule) -> (Schedule, Schedule, Schedule) {
    let pre: Vec<ScheduleItem> = s.items.iter().take_while(|i| i.purpose == "dress").cloned().collect();
    let post: Vec<ScheduleItem> = s.items.iter().skip(pre.len()).skip_while(|i| i.purpose != "undress").cloned().collect();
    let cycle: Vec<ScheduleItem> = s.items[pre.len()..s.items.len() - post.len()].to_vec();
    (Schedule::new(pre), Schedule::new(cycle), Schedule::new(post))
}

/// Auxiliary reset error and data fidelity against the number of pumping
/// cycles, for the auxiliary starting in `|0⟩` and in `|1⟩`. Cycles are
/// simulated incrementally; each row rotates a copy out of the dressed basis.
pub fn run_pump_convergence(spec: &ScanSpec) -> Result<ScanResult> {
    expect(spec, Scenario::PumpConvergence)?;
    let scheme = &spec.scheme;
    let cycles: Vec<usize> = spec.sweep.values.iter().map(|v| *v as usize).collect();
    let max = cycles.iter().copied().max().unwrap_or(0);
    let program = hands_off_program(spec, 1);
    let (pre, cycle, post) = split_by_purpose(&compile(&program, scheme)?);
    let raman = scheme.transition(&program.transitions.raman)?;
    let target = scheme.index(if program.branch == Branch::Plus { &raman.upper } else { &raman.lower })?;
    let opts = sim_options(spec);
    let noise = &spec.noise;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let data_start = qubit_state(scheme, C64::new(s, 0.0), C64::new(s, 0.0))?;

    // (aux error, data fidelity) after n cycles for n = 0..=max
    let trace = |aux_level: &str| -> Result<Vec<(f64, f64)>> {
        let mut reg = register(scheme, vec![(Role::Data, data_start.clone()), (Role::Auxiliary, level_state(scheme, aux_level)?)])?;
        let mut out = vec![(1.0 - reg.state(1).population(target), phase_corrected_fidelity(scheme, reg.state(0))?)];
        if max == 0 {
            return Ok(out);
        }
        reg = simulate_schedule(&pre, &reg, noise, &opts)?.register;
        for _ in 0..max {
            reg = simulate_schedule(&cycle, &reg, noise, &opts)?.register;
            let fin = simulate_schedule(&post, &reg, noise, &opts)?.register;
            out.push((1.0 - fin.state(1).population(target), phase_corrected_fidelity(scheme, fin.state(0))?));
        }
        Ok(out)
    };
    let (from0, from1) = rayon::join(|| trace("0"), || trace("1"));
    let (from0, from1) = (from0?, from1?);
    let sampler = sampler(spec);
    let rows: Vec<ScanRow> = cycles
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let (e0, s0) = sampler.observe(1.0 - from0[n].0, k, 0);
            let (e1, s1) = sampler.observe(1.0 - from1[n].0, k, 1);
            ScanRow {
                value: n as f64,
                values: vec![1.0 - e0, 1.0 - e1, from0[n].1, from1[n].1],
                uncertainty: (!sampler.exact()).then(|| vec![s0, s1, f64::NAN, f64::NAN]),
            }
        })
        .collect();
    let mut result = ScanResult::new(spec, &["aux_error_0", "aux_error_1", "data_fidelity_0", "data_fidelity_1"], rows);
    if let Some(last) = result.rows.iter().max_by(|a, b| a.value.total_cmp(&b.value)) {
        let v = last.values.clone();
        result.summary.insert("final_aux_error".into(), 0.5 * (v[0] + v[1]));
        result.summary.insert("final_data_error".into(), 1.0 - 0.5 * (v[2] + v[3]));
    }
    Ok(result)
}

/// Two ions in `|1⟩`, ion 0 rotated into the dressed basis and kept dressed,
/// probed by one Blackman pulse on the `|1⟩ → D` line whose area is π for
/// the selected dressed state. Records the D population of each ion.
pub fn run_dstate_spectrum(spec: &ScanSpec) -> Result<ScanResult> {
    expect(spec, Scenario::DstateSpectrum)?;
    let scheme = &spec.scheme;
    let o = &spec.options;
    let dressing = DressingParams::for_regime(Regime::HandsOff, o.dressing_rabi.unwrap_or(HANDS_OFF_DRESSING_RABI));
    let seq: CompositePulse = match &o.sequence {
        Some(s) => s.clone(),
        None => reference_sequence(Regime::HandsOff),
    };
    let dressing = DressingParams {
        detuning: seq.nominal_detuning_ratio * dressing.rabi,
        ..dressing
    };
    let branch = o.branch.unwrap_or(Branch::Minus);
    let tau = o.probe_duration.unwrap_or(SPECTRUM_PROBE_DURATION);
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument("probe duration must be positive".into()));
    }
    let program = MCMRProgram::hands_off(vec![Role::Auxiliary, Role::Data], 1);
    let t = &program.transitions;
    let probe_line = scheme.transition(&t.pump_target)?;
    let raman = scheme.transition(&t.raman)?;
    let basis = dressed_basis(&dressing)?;
    let psi = basis.state(branch);
    let (component, lower_energy) = if probe_line.lower == raman.upper {
        (psi.population(1).sqrt(), 0.0)
    } else if probe_line.lower == raman.lower {
        (psi.population(0).sqrt(), dressing.detuning)
    } else {
        return Err(Error::Compile("probe line does not start in the dressed qubit".into()));
    };
    let rabi = Pulse::rabi_for_angle(PI, tau, Shape::Blackman) / component;
    let predicted = (lower_energy - basis.shift(branch)) / (2.0 * PI * 1e3);

    let opts = sim_options(spec);
    let noise = &spec.noise;
    let one = level_state(scheme, &probe_line.lower)?;
    let start = register(scheme, vec![(Role::Auxiliary, one.clone()), (Role::Data, one)])?;
    let dress_in = Schedule::new(composite_items(&seq, &t.raman, &dressing, &[0], "dress")?);
    let dressed = simulate_schedule(&dress_in, &start, noise, &opts)?.register;
    let background = dressing_tones(&t.raman, &dressing, &[0]);
    let d_levels = scheme.d_levels();
    let sampler = sampler(spec);
    let values = &spec.sweep.values;
    let rows = par_rows(values.len(), |k| {
        let probe = Pulse::new(&t.pump_target, rabi, 2.0 * PI * 1e3 * values[k], 0.0, tau, Shape::Blackman, Target::Global);
        let s = Schedule::new(vec![ScheduleItem::coherent(vec![probe], "probe").with_background(&background)]);
        let out = simulate_schedule(&s, &dressed, noise, &opts)?.register;
        let pd = |i: usize| d_levels.iter().map(|&l| out.state(i).population(l)).sum::<f64>();
        let (a, sa) = sampler.observe(pd(0), k, 0);
        let (b, sb) = sampler.observe(pd(1), k, 1);
        Ok(ScanRow {
            value: values[k],
            values: vec![a, b],
            uncertainty: (!sampler.exact()).then(|| vec![sa, sb]),
        })
    })?;
    let mut result = ScanResult::new(spec, &["d_population_dressed", "d_population_bare"], rows);
    result.summary.insert("predicted_dressed_center_khz".into(), predicted);
    result.summary.insert("probe_duration_s".into(), tau);
    for (name, col) in [("dressed", "d_population_dressed"), ("bare", "d_population_bare")] {
        let y = result.column(col).expect("column");
        let (c, h) = parabolic_peak(values, &y)?;
        result.summary.insert(format!("{name}_center_khz"), c);
        result.summary.insert(format!("{name}_peak"), h);
    }
    Ok(result)
}
