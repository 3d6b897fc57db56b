use std::f64::consts::TAU;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::su2::{pulse_propagator, M2};
use crate::error::{Error, Result};
use crate::quantum::{CMatrix, Operator};

/// One rectangular Raman pulse in units of the nominal Rabi frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseParams {
    pub delta_over_omega: f64,
    pub tau_omega: f64,
    pub phi: f64,
}

/// Three-pulse basis rotation toward the dressed basis at
/// `δ/Ω = nominal_detuning_ratio`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositePulse {
    pub nominal_detuning_ratio: f64,
    pub pulses: Vec<PulseParams>,
}

pub const PULSE_COUNT: usize = 3;

impl CompositePulse {
    pub fn new(nominal_detuning_ratio: f64, pulses: [PulseParams; PULSE_COUNT]) -> Result<Self> {
        let s = Self {
            nominal_detuning_ratio,
            pulses: pulses.to_vec(),
        };
        s.validate()?;
        Ok(s)
    }

    /// Packs `[δ₁, τ₁Ω, φ₁, δ₂, …]`.
    pub fn from_flat(nominal_detuning_ratio: f64, x: &[f64]) -> Self {
        Self {
            nominal_detuning_ratio,
            pulses: x
                .chunks(3)
                .map(|c| PulseParams {
                    delta_over_omega: c[0],
                    tau_omega: c[1],
                    phi: c[2],
                })
                .collect(),
        }
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.pulses.iter().flat_map(|p| [p.delta_over_omega, p.tau_omega, p.phi]).collect()
    }

    /// Durations may be zero (degenerate sequences) but not negative.
    pub fn validate(&self) -> Result<()> {
        if self.pulses.len() != PULSE_COUNT {
            return Err(Error::InvalidArgument(format!(
                "a composite pulse has exactly {PULSE_COUNT} pulses, found {}",
                self.pulses.len()
            )));
        }
        if !self.nominal_detuning_ratio.is_finite() {
            return Err(Error::InvalidArgument("nominal_detuning_ratio must be finite".into()));
        }
        for (k, p) in self.pulses.iter().enumerate() {
            if !p.delta_over_omega.is_finite() || !p.tau_omega.is_finite() || !p.phi.is_finite() {
                return Err(Error::InvalidArgument(format!("pulse {k} has a non-finite parameter")));
            }
            if p.tau_omega < 0.0 {
                return Err(Error::InvalidArgument(format!("pulse {k} has negative duration {}", p.tau_omega)));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Total duration in units of `1/Ω`.
    pub fn total_tau_omega(&self) -> f64 {
        self.pulses.iter().map(|p| p.tau_omega).sum()
    }

    /// Sequence with every pulse's phase advanced by `offset`.
    pub fn with_phase_offset(&self, offset: f64) -> Self {
        let mut s = self.clone();
        for p in &mut s.pulses {
            p.phi = (p.phi + offset).rem_euclid(TAU);
        }
        s
    }
}

/// `U₃U₂U₁` at Rabi fraction `f` of nominal, in units where the nominal Rabi
/// frequency is 1. Detunings and durations stay at their nominal values.
pub fn sequence_su2(seq: &CompositePulse, fraction: f64) -> M2 {
    let mut u = M2::identity();
    for p in &seq.pulses {
        u = pulse_propagator(p.delta_over_omega, fraction, p.phi, p.tau_omega) * u;
    }
    u
}

fn to_operator(m: &M2) -> Operator {
    Operator::new(CMatrix::from_row_slice(2, 2, &[m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]])).expect("2x2")
}

/// Sequence unitary at Rabi frequency `rabi` when the table entries are
/// scaled by `nominal_rabi` (`δᵢ = (δ/Ω)ᵢ·Ω_nom`, `τᵢ = (τΩ)ᵢ/Ω_nom`).
pub fn sequence_unitary(seq: &CompositePulse, rabi: f64, nominal_rabi: f64) -> Result<Operator> {
    if !(rabi >= 0.0) || !(nominal_rabi > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "rabi must be non-negative and nominal_rabi positive (got {rabi}, {nominal_rabi})"
        )));
    }
    seq.validate()?;
    Ok(to_operator(&sequence_su2(seq, rabi / nominal_rabi)))
}

/// Reverses the order and maps `(δ, φ) → (−δ, φ + π)`, which negates each
/// pulse Hamiltonian, so the result is the exact inverse at every Rabi
/// frequency.
pub fn time_reversal(seq: &CompositePulse) -> Result<CompositePulse> {
    seq.validate()?;
    let reversed = CompositePulse {
        nominal_detuning_ratio: seq.nominal_detuning_ratio,
        pulses: seq
            .pulses
            .iter()
            .rev()
            .map(|p| PulseParams {
                delta_over_omega: -p.delta_over_omega,
                tau_omega: p.tau_omega,
                phi: (p.phi + std::f64::consts::PI).rem_euclid(TAU),
            })
            .collect(),
    };
    for f in [0.0, 0.5, 1.0] {
        let prod = sequence_su2(&reversed, f) * sequence_su2(seq, f);
        let dev = (prod - M2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > 1e-9 {
            return Err(Error::Compile(format!("time reversal is not an inverse at fraction {f} (deviation {dev:.2e})")));
        }
    }
    Ok(reversed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::C64;
    use std::f64::consts::PI;

    fn p(d: f64, t: f64, phi: f64) -> PulseParams {
        PulseParams {
            delta_over_omega: d,
            tau_omega: t,
            phi,
        }
    }

    #[test]
    fn zero_durations_are_identity() {
        let s = CompositePulse::new(0.5, [p(0.3, 0.0, 1.0), p(-1.0, 0.0, 2.0), p(0.0, 0.0, 0.0)]).unwrap();
        let u = sequence_unitary(&s, 1.0, 1.0).unwrap();
        assert!((u.matrix() - CMatrix::identity(2, 2)).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn single_pi_pulse_is_minus_i_sigma_x() {
        let s = CompositePulse::new(0.0, [p(0.0, PI, 0.0), p(0.0, 0.0, 0.0), p(0.0, 0.0, 0.0)]).unwrap();
        let u = sequence_unitary(&s, 2.0 * PI * 50e3, 2.0 * PI * 50e3).unwrap();
        assert!(u.matrix()[(0, 0)].norm() < 1e-12);
        assert!((u.matrix()[(0, 1)] - C64::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn wrong_pulse_count_rejected() {
        let s = CompositePulse {
            nominal_detuning_ratio: 0.5,
            pulses: vec![p(0.0, 1.0, 0.0)],
        };
        assert!(s.validate().is_err());
    }

    #[test]
    fn reversal_is_inverse_and_involution() {
        let s = CompositePulse::new(0.5, [p(0.86, 2.48, 5.9), p(-0.47, 5.03, 3.7), p(0.087, 4.48, 0.57)]).unwrap();
        let r = time_reversal(&s).unwrap();
        for f in [0.0, 0.3, 0.95, 1.0, 1.2] {
            let prod = sequence_su2(&r, f) * sequence_su2(&s, f);
            assert!((prod - M2::identity()).iter().all(|z| z.norm() < 1e-12));
        }
        let rr = time_reversal(&r).unwrap();
        let (a, b) = (sequence_su2(&rr, 0.9), sequence_su2(&s, 0.9));
        assert!((a - b).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn json_field_names() {
        let s = CompositePulse::new(0.1, [p(1.0, 2.0, 3.0), p(0.0, 1.0, 0.0), p(0.0, 1.0, 0.0)]).unwrap();
        let j = s.to_json().unwrap();
        for key in ["delta_over_omega", "tau_omega", "phi", "nominal_detuning_ratio"] {
            assert!(j.contains(key));
        }
        assert_eq!(CompositePulse::from_json(&j).unwrap(), s);
    }
}
