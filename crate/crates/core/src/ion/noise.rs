use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Error model. Times in seconds, probabilities dimensionless,
/// `optical_detuning_error` in rad/s, leak rate in 1/s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub t2_optical: f64,
    pub d_lifetime: f64,
    pub spam_dark_error: f64,
    pub spam_bright_error: f64,
    pub crosstalk_fraction: f64,
    pub detection_time: f64,
    /// Static offset of the D levels during idle and detection windows.
    #[serde(default)]
    pub optical_detuning_error: f64,
    /// Rate of leakage from S(F=1) into D(F=1) while the detection light is on.
    #[serde(default)]
    pub detection_leak_rate: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            t2_optical: 10e-3,
            d_lifetime: 15e-3,
            spam_dark_error: 0.002,
            spam_bright_error: 0.005,
            crosstalk_fraction: 0.01,
            detection_time: 140e-6,
            optical_detuning_error: 0.0,
            detection_leak_rate: 0.0,
        }
    }
}

impl NoiseModel {
    /// SPAM and timing only; no decoherence and no crosstalk.
    pub fn ideal() -> Self {
        Self {
            t2_optical: f64::INFINITY,
            d_lifetime: f64::INFINITY,
            crosstalk_fraction: 0.0,
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let n: Self = serde_json::from_str(text)?;
        n.validate()?;
        Ok(n)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("spam_dark_error", self.spam_dark_error), ("spam_bright_error", self.spam_bright_error)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        for (name, t) in [
            ("t2_optical", self.t2_optical),
            ("d_lifetime", self.d_lifetime),
            ("detection_time", self.detection_time),
        ] {
            if !(t > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {t}")));
            }
        }
        if !(self.crosstalk_fraction >= 0.0) || !self.crosstalk_fraction.is_finite() {
            return Err(Error::InvalidArgument("crosstalk_fraction must be non-negative".into()));
        }
        if !self.optical_detuning_error.is_finite() {
            return Err(Error::InvalidArgument("optical_detuning_error must be finite".into()));
        }
        if !(self.detection_leak_rate >= 0.0) || !self.detection_leak_rate.is_finite() {
            return Err(Error::InvalidArgument("detection_leak_rate must be non-negative".into()));
        }
        self.dephasing_rate()?;
        Ok(())
    }

    /// Decay rate of the D levels, 1/s.
    pub fn d_decay_rate(&self) -> f64 {
        1.0 / self.d_lifetime
    }

    /// Rate of the D-projector dephasing channel, 1/s.
    ///
    /// A projector channel at rate γ decays S–D coherence at γ/2 and D decay at
    /// rate Γ contributes Γ/2, so γ = 2/T₂ − Γ gives a total of 1/T₂.
    pub fn dephasing_rate(&self) -> Result<f64> {
        let gamma = 2.0 / self.t2_optical - self.d_decay_rate();
        if gamma < -1e-12 * self.d_decay_rate() {
            return Err(Error::InvalidArgument(format!(
                "t2_optical ({}) exceeds twice d_lifetime ({}): no non-negative dephasing rate reproduces it",
                self.t2_optical, self.d_lifetime
            )));
        }
        Ok(gamma.max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        NoiseModel::default().validate().unwrap();
        NoiseModel::ideal().validate().unwrap();
        assert_eq!(NoiseModel::ideal().dephasing_rate().unwrap(), 0.0);
    }

    #[test]
    fn rejects_t2_beyond_lifetime_limit() {
        let n = NoiseModel {
            t2_optical: 40e-3,
            ..NoiseModel::default()
        };
        assert!(n.validate().is_err());
    }

    #[test]
    fn rejects_bad_probability() {
        let n = NoiseModel {
            spam_dark_error: 1.5,
            ..NoiseModel::default()
        };
        assert!(n.validate().is_err());
    }
}
