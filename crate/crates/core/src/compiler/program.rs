use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::composite::CompositePulse;
use crate::dressing::{Branch, DressingParams, Regime};
use crate::error::{Error, Result};
use crate::ion::Role;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Directive {
    MidCircuitMeasure,
    MidCircuitReset,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ShelvingQubitRotation,
    ShelvingDressing,
    HandsOff,
}

/// Transition ids used by the compiled sequences.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionMap {
    pub raman: String,
    /// Global shelving line from the clock state.
    pub shelve: String,
    /// Pumping lines for the reset target's manifold (`|1⟩`, `|2⟩`, `|3⟩`).
    pub pump_target: String,
    pub pump_minus: String,
    pub pump_plus: String,
}

impl Default for TransitionMap {
    fn default() -> Self {
        Self {
            raman: "raman_01".into(),
            shelve: "opt_0_D".into(),
            pump_target: "opt_1_D".into(),
            pump_minus: "opt_2_Dm1".into(),
            pump_plus: "opt_3_Dp1".into(),
        }
    }
}

/// Durations in seconds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    /// Blackman 435 nm π pulse (qubit-rotation shelving and echo).
    pub optical_pi: f64,
    /// Rectangular Raman π pulse.
    pub raman_pi: f64,
    pub detection: f64,
    /// Blackman 435 nm π pulse at bare resonance used with the aux dressed.
    pub dressed_optical_pi: f64,
    /// Blackman 435 nm pumping pulses of the hands-off reset.
    pub pump_pulse: f64,
    pub repump: f64,
}

impl Default for Timing {
    fn default() -> Self {
        Self {
            optical_pi: 20e-6,
            raman_pi: 6e-6,
            detection: 140e-6,
            dressed_optical_pi: 30e-6,
            pump_pulse: 80e-6,
            repump: 20e-6,
        }
    }
}

pub const SHELVING_DRESSING_RABI: f64 = 2.0 * PI * 500e3;
pub const HANDS_OFF_DRESSING_RABI: f64 = 2.0 * PI * 200e3;

const REFERENCE_SEQ1: &str = include_str!("../../data/sequence1.json");
const REFERENCE_SEQ2: &str = include_str!("../../data/sequence2.json");

/// Shipped reference sequence for a regime.
pub fn reference_sequence(regime: Regime) -> CompositePulse {
    let text = match regime {
        Regime::Shelving => REFERENCE_SEQ1,
        Regime::HandsOff => REFERENCE_SEQ2,
    };
    CompositePulse::from_json(text).expect("bundled sequence is valid")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MCMRProgram {
    pub directive: Directive,
    pub method: Method,
    pub roles: Vec<Role>,
    #[serde(default)]
    pub dressing: Option<DressingParams>,
    #[serde(default)]
    pub pump_cycles: usize,
    /// Global echo π pulse at the middle of the detection window.
    #[serde(default = "yes")]
    pub echo: bool,
    #[serde(default)]
    pub timing: Timing,
    #[serde(default)]
    pub transitions: TransitionMap,
    /// Dressed-basis rotation; defaults to the reference sequence for the regime.
    #[serde(default)]
    pub sequence: Option<CompositePulse>,
    /// Dressed state addressed by the reset's first pumping tone.
    #[serde(default)]
    pub branch: Branch,
}

fn yes() -> bool {
    true
}

impl MCMRProgram {
    pub fn shelving_qubit_rotation(roles: Vec<Role>) -> Self {
        Self {
            directive: Directive::MidCircuitMeasure,
            method: Method::ShelvingQubitRotation,
            roles,
            dressing: None,
            pump_cycles: 0,
            echo: true,
            timing: Timing::default(),
            transitions: TransitionMap::default(),
            sequence: None,
            branch: Branch::Plus,
        }
    }

    pub fn shelving_dressing(roles: Vec<Role>) -> Self {
        Self {
            method: Method::ShelvingDressing,
            dressing: Some(DressingParams::for_regime(Regime::Shelving, SHELVING_DRESSING_RABI)),
            ..Self::shelving_qubit_rotation(roles)
        }
    }

    pub fn hands_off(roles: Vec<Role>, pump_cycles: usize) -> Self {
        Self {
            directive: Directive::MidCircuitReset,
            method: Method::HandsOff,
            dressing: Some(DressingParams::for_regime(Regime::HandsOff, HANDS_OFF_DRESSING_RABI)),
            pump_cycles,
            ..Self::shelving_qubit_rotation(roles)
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn aux_ions(&self) -> Vec<usize> {
        (0..self.roles.len()).filter(|&i| self.roles[i] == Role::Auxiliary).collect()
    }

    pub fn data_ions(&self) -> Vec<usize> {
        (0..self.roles.len()).filter(|&i| self.roles[i] == Role::Data).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.aux_ions().is_empty() {
            return Err(Error::Compile("program needs at least one auxiliary ion".into()));
        }
        let t = &self.timing;
        for (name, v) in [
            ("optical_pi", t.optical_pi),
            ("raman_pi", t.raman_pi),
            ("detection", t.detection),
            ("dressed_optical_pi", t.dressed_optical_pi),
            ("pump_pulse", t.pump_pulse),
            ("repump", t.repump),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Compile(format!("timing.{name} must be positive, got {v}")));
            }
        }
        match self.method {
            Method::ShelvingDressing | Method::HandsOff => {
                let d = self.dressing.as_ref().ok_or_else(|| Error::Compile(format!("{:?} requires dressing parameters", self.method)))?;
                d.validate()?;
                if d.rabi <= 0.0 {
                    return Err(Error::Compile("dressing rabi must be positive".into()));
                }
                if self.method == Method::HandsOff && d.regime_hint != Regime::HandsOff {
                    return Err(Error::Compile("hands-off reset requires dressing in the hands_off regime".into()));
                }
            }
            Method::ShelvingQubitRotation => {}
        }
        if let Some(s) = &self.sequence {
            s.validate()?;
        }
        Ok(())
    }

    /// The dressed-basis rotation actually used.
    pub fn rotation_sequence(&self) -> Result<CompositePulse> {
        if let Some(s) = &self.sequence {
            return Ok(s.clone());
        }
        let regime = self
            .dressing
            .as_ref()
            .map(|d| d.regime_hint)
            .ok_or_else(|| Error::Compile("no dressing parameters".into()))?;
        Ok(reference_sequence(regime))
    }
}
