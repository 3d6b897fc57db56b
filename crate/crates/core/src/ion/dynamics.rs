//! Propagation of one ion through a segment of constant or shaped drive,
//! with or without dissipation.

use super::{DriveFrame, LevelScheme, NoiseModel, Pulse, Shape};
use super::dissipators::{build_noise_dissipator, Dissipator};
use crate::error::{Error, Result};
use crate::quantum::operator::{eigh_unchecked, propagator_from_eigen};
use crate::quantum::{integrate_density, CMatrix, LindbladSystem, Operator, QuantumState, C64};

/// Piecewise-constant slices per shaped pulse.
pub const SHAPED_SLICES: usize = 128;
/// `(rate + ‖H‖)·dt` used for idle-window integration; tighter than the
/// integrator's stability bound so windows compose to 1e-8.
pub const IDLE_STEP_BOUND: f64 = 0.01;

/// A tone and the factor applied to its peak Rabi frequency on this ion.
#[derive(Clone, Debug)]
pub struct ScaledTone<'a> {
    pub pulse: &'a Pulse,
    pub scale: f64,
}

/// Everything needed to advance one ion over one time interval.
#[derive(Clone, Debug)]
pub struct Segment<'a> {
    pub tones: Vec<ScaledTone<'a>>,
    pub duration: f64,
    /// Static diagonal added to the drive frame, rad/s.
    pub extra_diagonal: Option<Vec<f64>>,
    pub dissipator: Dissipator,
}

impl<'a> Segment<'a> {
    pub fn idle(duration: f64) -> Self {
        Self {
            tones: Vec::new(),
            duration,
            extra_diagonal: None,
            dissipator: Vec::new(),
        }
    }
}

fn shaped(seg: &Segment) -> bool {
    seg.tones.iter().any(|t| t.pulse.shape != Shape::Rectangular)
}

fn slice_rabis(seg: &Segment, x: f64) -> Vec<f64> {
    seg.tones.iter().map(|t| t.pulse.rabi * t.scale * t.pulse.shape.envelope(x)).collect()
}

fn base_matrix(frame: &DriveFrame, seg: &Segment, rabis: &[f64]) -> CMatrix {
    let mut m = frame.matrix(rabis);
    if let Some(extra) = &seg.extra_diagonal {
        for (i, d) in extra.iter().enumerate() {
            m[(i, i)] += C64::new(*d, 0.0);
        }
    }
    m
}

/// Unitary of a dissipation-free segment.
pub fn segment_unitary(scheme: &LevelScheme, seg: &Segment) -> Result<Operator> {
    let pulses: Vec<&Pulse> = seg.tones.iter().map(|t| t.pulse).collect();
    let frame = DriveFrame::new(scheme, &pulses)?;
    let n = if shaped(seg) { SHAPED_SLICES } else { 1 };
    let dt = seg.duration / n as f64;
    let mut u = CMatrix::identity(scheme.dim(), scheme.dim());
    for k in 0..n {
        let h = base_matrix(&frame, seg, &slice_rabis(seg, (k as f64 + 0.5) / n as f64));
        let (vals, vecs) = eigh_unchecked(&h);
        u = propagator_from_eigen(&vals, &vecs, dt) * u;
    }
    Operator::new(u)
}

/// Advances `state` through `seg`.
///
/// Closed segments use exact slice propagators. Open segments with a constant
/// Hamiltonian integrate the full master equation with RK4; shaped open
/// segments use Strang splitting (half dissipator, exact unitary slice, half
/// dissipator) so that large off-resonant spectator terms do not force a
/// tiny integration step.
pub fn evolve_segment(scheme: &LevelScheme, state: &QuantumState, seg: &Segment) -> Result<QuantumState> {
    if state.dim() != scheme.dim() {
        return Err(Error::DimensionMismatch {
            expected: scheme.dim(),
            found: state.dim(),
        });
    }
    if !(seg.duration >= 0.0) || !seg.duration.is_finite() {
        return Err(Error::InvalidArgument(format!("segment duration must be non-negative, got {}", seg.duration)));
    }
    if seg.duration == 0.0 {
        return Ok(state.clone());
    }
    let active: Dissipator = seg.dissipator.iter().filter(|(_, r)| *r > 0.0).cloned().collect();
    if active.is_empty() {
        let u = segment_unitary(scheme, seg)?;
        return state.evolve(&u);
    }

    let pulses: Vec<&Pulse> = seg.tones.iter().map(|t| t.pulse).collect();
    let frame = DriveFrame::new(scheme, &pulses)?;
    let labels = state.labels().to_vec();
    let mut rho = state.density();

    if !shaped(seg) {
        let h = Operator::new(base_matrix(&frame, seg, &slice_rabis(seg, 0.5)))?;
        let sys = LindbladSystem::new(h, active)?;
        let dt_max = IDLE_STEP_BOUND / (sys.max_rate() + sys.hamiltonian().norm_inf());
        integrate_density(&mut rho, &sys, seg.duration, dt_max)?;
        return Ok(QuantumState::from_density_unchecked(rho, labels));
    }

    let max_rate: f64 = active.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    let n = SHAPED_SLICES.max((seg.duration * max_rate / IDLE_STEP_BOUND).ceil() as usize);
    let dt = seg.duration / n as f64;
    let diss = LindbladSystem::new(Operator::zeros(scheme.dim()), active)?;
    let half = 0.5 * dt;
    let dt_max = IDLE_STEP_BOUND / diss.max_rate();
    for k in 0..n {
        integrate_density(&mut rho, &diss, half, dt_max)?;
        let h = base_matrix(&frame, seg, &slice_rabis(seg, (k as f64 + 0.5) / n as f64));
        let (vals, vecs) = eigh_unchecked(&h);
        let u = propagator_from_eigen(&vals, &vecs, dt);
        rho = &u * rho * u.adjoint();
        integrate_density(&mut rho, &diss, half, dt_max)?;
    }
    Ok(QuantumState::from_density_unchecked(rho, labels))
}

/// Static D-level offset used for idle windows.
pub fn detuning_error_diagonal(scheme: &LevelScheme, noise: &NoiseModel) -> Option<Vec<f64>> {
    if noise.optical_detuning_error == 0.0 {
        return None;
    }
    let mut d = vec![0.0; scheme.dim()];
    for i in scheme.d_levels() {
        d[i] = noise.optical_detuning_error;
    }
    Some(d)
}

/// Free evolution under the noise model: S–D dephasing, D decay and any
/// static optical detuning error.
pub fn apply_noise_window(scheme: &LevelScheme, state: &QuantumState, noise: &NoiseModel, duration: f64) -> Result<QuantumState> {
    noise.validate()?;
    let seg = Segment {
        tones: Vec::new(),
        duration,
        extra_diagonal: detuning_error_diagonal(scheme, noise),
        dissipator: build_noise_dissipator(scheme, noise)?,
    };
    evolve_segment(scheme, state, &seg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ion::Target;
    use crate::quantum::{fidelity, CVector};
    use std::f64::consts::PI;

    #[test]
    fn blackman_pi_pulse_transfers() {
        let s = LevelScheme::yb171();
        let tau = 100e-6;
        let p = Pulse::new("opt_1_D", Pulse::rabi_for_angle(PI, tau, Shape::Blackman), 0.0, 0.0, tau, Shape::Blackman, Target::Global);
        let seg = Segment {
            tones: vec![ScaledTone { pulse: &p, scale: 1.0 }],
            ..Segment::idle(tau)
        };
        let out = evolve_segment(&s, &QuantumState::basis(s.dim(), s.index("1").unwrap()), &seg).unwrap();
        assert!(out.population(s.index("D").unwrap()) > 1.0 - 1e-9);
    }

    #[test]
    fn noisy_pulse_stays_close_to_closed() {
        let s = LevelScheme::yb171();
        let tau = 50e-6;
        let rabi = Pulse::rabi_for_angle(PI / 2.0, tau, Shape::Rectangular);
        let rect = Pulse::new("opt_0_D", rabi, 0.0, 0.0, tau, Shape::Rectangular, Target::Global);
        let noise = NoiseModel::default();
        let diss = build_noise_dissipator(&s, &noise).unwrap();
        let start = QuantumState::basis(s.dim(), 0);
        let full = evolve_segment(
            &s,
            &start,
            &Segment {
                tones: vec![ScaledTone { pulse: &rect, scale: 1.0 }],
                duration: tau,
                extra_diagonal: None,
                dissipator: diss.clone(),
            },
        )
        .unwrap();
        let closed = evolve_segment(
            &s,
            &start,
            &Segment {
                tones: vec![ScaledTone { pulse: &rect, scale: 1.0 }],
                ..Segment::idle(tau)
            },
        )
        .unwrap();
        let f = fidelity(&closed, &full).unwrap();
        assert!(f < 1.0 && f > 1.0 - 1e-2);
    }

    #[test]
    fn noise_window_coherence_and_lifetime() {
        let s = LevelScheme::yb171();
        let n = NoiseModel::default();
        let (i0, id) = (s.index("0").unwrap(), s.index("D").unwrap());
        let mut amps = CVector::zeros(s.dim());
        amps[i0] = C64::new(1.0, 0.0);
        amps[id] = C64::new(1.0, 0.0);
        let sup = QuantumState::pure_normalized(amps, None).unwrap();
        let out = apply_noise_window(&s, &sup, &n, 10e-3).unwrap();
        assert!((out.coherence(i0, id).norm() / 0.5 - (-1.0f64).exp()).abs() < 1e-6);

        let d = QuantumState::basis(s.dim(), id);
        let out = apply_noise_window(&s, &d, &n, 15e-3).unwrap();
        assert!((out.population(id) - (-1.0f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn zero_window_is_identity() {
        let s = LevelScheme::yb171();
        let st = QuantumState::basis(s.dim(), 1);
        assert_eq!(apply_noise_window(&s, &st, &NoiseModel::default(), 0.0).unwrap(), st);
    }
}
