use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{LevelScheme, TransitionKind};
use crate::error::{Error, Result};

/// Mean of the Blackman window over one period.
pub const BLACKMAN_AREA: f64 = 0.42;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    #[default]
    Rectangular,
    Blackman,
}

impl Shape {
    /// Envelope at fractional time `x ∈ [0, 1]`, normalized to a peak of 1.
    pub fn envelope(self, x: f64) -> f64 {
        match self {
            Shape::Rectangular => 1.0,
            Shape::Blackman => 0.42 - 0.5 * (2.0 * PI * x).cos() + 0.08 * (4.0 * PI * x).cos(),
        }
    }

    /// Time-averaged envelope.
    pub fn area_factor(self) -> f64 {
        match self {
            Shape::Rectangular => 1.0,
            Shape::Blackman => BLACKMAN_AREA,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type", content = "ion")]
pub enum Target {
    Global,
    Individual(usize),
}

/// One coherent tone. Angular quantities are in rad/s; `rabi` is the peak
/// Rabi frequency of the envelope and `detuning` is laser minus transition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    #[serde(rename = "transition")]
    pub drive: String,
    pub rabi: f64,
    pub detuning: f64,
    pub phase: f64,
    pub duration: f64,
    #[serde(default)]
    pub shape: Shape,
    pub target: Target,
}

impl Pulse {
    pub fn new(drive: &str, rabi: f64, detuning: f64, phase: f64, duration: f64, shape: Shape, target: Target) -> Self {
        Self {
            drive: drive.into(),
            rabi,
            detuning,
            phase,
            duration,
            shape,
            target,
        }
    }

    /// Peak Rabi frequency giving rotation angle `theta` for this shape and duration.
    pub fn rabi_for_angle(theta: f64, duration: f64, shape: Shape) -> f64 {
        theta / (shape.area_factor() * duration)
    }

    /// Pulse area `∫Ω(t)dt`.
    pub fn area(&self) -> f64 {
        self.rabi * self.duration * self.shape.area_factor()
    }

    pub fn validate(&self, scheme: &LevelScheme) -> Result<()> {
        let t = scheme.transition(&self.drive)?;
        if !(self.rabi >= 0.0) || !self.rabi.is_finite() {
            return Err(Error::InvalidArgument(format!("rabi must be non-negative, got {}", self.rabi)));
        }
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(Error::InvalidArgument(format!("duration must be positive, got {}", self.duration)));
        }
        if !self.detuning.is_finite() || !self.phase.is_finite() {
            return Err(Error::InvalidArgument("detuning and phase must be finite".into()));
        }
        if matches!(self.target, Target::Individual(_)) && t.kind != TransitionKind::RamanQubit {
            return Err(Error::InvalidArgument(format!(
                "transition `{}` is driven by a global beam and cannot target one ion",
                self.drive
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blackman_midpoint_area_is_exact() {
        for n in [64usize, 100, 257] {
            let s: f64 = (0..n).map(|k| Shape::Blackman.envelope((k as f64 + 0.5) / n as f64)).sum::<f64>() / n as f64;
            assert!((s - BLACKMAN_AREA).abs() < 1e-14);
        }
    }

    #[test]
    fn individual_optical_pulse_rejected() {
        let s = LevelScheme::yb171();
        let p = Pulse::new("opt_0_D", 1.0, 0.0, 0.0, 1e-6, Shape::Blackman, Target::Individual(0));
        assert!(p.validate(&s).is_err());
        let p = Pulse::new("raman_01", 1.0, 0.0, 0.0, 1e-6, Shape::Rectangular, Target::Individual(0));
        assert!(p.validate(&s).is_ok());
    }

    #[test]
    fn zero_duration_rejected() {
        let s = LevelScheme::yb171();
        let p = Pulse::new("raman_01", 1.0, 0.0, 0.0, 0.0, Shape::Rectangular, Target::Global);
        assert!(p.validate(&s).is_err());
    }
}
