use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::compiler::Method;
use crate::composite::CompositePulse;
use crate::dressing::Branch;
use crate::error::{Error, Result};
use crate::ion::{LevelScheme, NoiseModel};

pub const RESULT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    DstateSpectrum,
    MeasureFidelity,
    RamseyPhase,
    PumpConvergence,
    DressRotateError,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::DstateSpectrum,
        Scenario::MeasureFidelity,
        Scenario::RamseyPhase,
        Scenario::PumpConvergence,
        Scenario::DressRotateError,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::DstateSpectrum => "dstate_spectrum",
            Scenario::MeasureFidelity => "measure_fidelity",
            Scenario::RamseyPhase => "ramsey_phase",
            Scenario::PumpConvergence => "pump_convergence",
            Scenario::DressRotateError => "dress_rotate_error",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| Error::Parse(format!("unknown scenario `{name}`")))
    }

    /// Sweep parameter name and the unit written to the output.
    pub fn axis(self) -> (&'static str, &'static str) {
        match self {
            Scenario::DstateSpectrum => ("detuning", "kHz"),
            Scenario::MeasureFidelity => ("theta", "rad"),
            Scenario::RamseyPhase => ("phase", "rad"),
            Scenario::PumpConvergence => ("cycles", "count"),
            Scenario::DressRotateError => ("rabi_fraction", "fraction of nominal"),
        }
    }

    pub fn default_sweep(self) -> Vec<f64> {
        let tau = std::f64::consts::TAU;
        match self {
            Scenario::DstateSpectrum => (-40..=100).map(f64::from).collect(),
            Scenario::MeasureFidelity | Scenario::RamseyPhase => (0..=24).map(|k| tau * k as f64 / 24.0).collect(),
            Scenario::PumpConvergence => (0..=16).map(f64::from).collect(),
            Scenario::DressRotateError => (0..=1100).map(|k| k as f64 * 1e-3).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub parameter: String,
    pub values: Vec<f64>,
}

/// Scenario knobs. Unset fields take the scenario's defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioOptions {
    /// Disable decoherence (SPAM and crosstalk still apply).
    pub noiseless: bool,
    /// Dressed-basis rotation (dress_rotate_error, dstate_spectrum, pump_convergence).
    pub sequence: Option<CompositePulse>,
    /// Auxiliary starting level for the Ramsey scan.
    pub aux_level: Option<String>,
    /// Shelving variant for measurement scenarios.
    pub method: Option<Method>,
    pub echo: Option<bool>,
    /// Spectroscopy pulse length in seconds.
    pub probe_duration: Option<f64>,
    /// Dressing Rabi frequency in rad/s.
    pub dressing_rabi: Option<f64>,
    /// Dressed state probed in the spectrum.
    pub branch: Option<Branch>,
    /// Hands-off pulse timing overrides in seconds.
    pub pump_pulse: Option<f64>,
    pub repump: Option<f64>,
}

fn yb171() -> LevelScheme {
    LevelScheme::yb171()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub scenario: Scenario,
    pub sweep: Sweep,
    #[serde(default)]
    pub noise: NoiseModel,
    /// 0 reports exact probabilities.
    #[serde(default)]
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "yb171")]
    pub scheme: LevelScheme,
    #[serde(default)]
    pub options: ScenarioOptions,
}

impl ScanSpec {
    /// Spec with the scenario's default sweep and nominal noise.
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            sweep: Sweep {
                parameter: scenario.axis().0.into(),
                values: scenario.default_sweep(),
            },
            noise: NoiseModel::default(),
            shots: 0,
            seed: 0,
            scheme: LevelScheme::yb171(),
            options: ScenarioOptions::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweep.values.is_empty() {
            return Err(Error::InvalidArgument("sweep is empty".into()));
        }
        if self.sweep.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("sweep values must be finite".into()));
        }
        let expected = self.scenario.axis().0;
        if self.sweep.parameter != expected {
            return Err(Error::InvalidArgument(format!(
                "{} sweeps `{expected}`, not `{}`",
                self.scenario.name(),
                self.sweep.parameter
            )));
        }
        if self.scenario == Scenario::PumpConvergence && self.sweep.values.iter().any(|v| *v < 0.0 || v.fract() != 0.0) {
            return Err(Error::InvalidArgument("cycle counts must be non-negative integers".into()));
        }
        self.noise.validate()?;
        self.scheme.validate()?;
        if let Some(s) = &self.options.sequence {
            s.validate()?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("spec serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub value: f64,
    pub values: Vec<f64>,
    /// One-sigma binomial errors of sampled columns (NaN for exact ones).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uncertainty: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultMetadata {
    pub schema_version: u32,
    pub code_version: String,
    pub spec_hash: String,
    pub noise: NoiseModel,
    pub shots: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub scenario: Scenario,
    pub parameter: String,
    pub unit: String,
    pub columns: Vec<String>,
    pub rows: Vec<ScanRow>,
    /// Fitted and derived scalars.
    pub summary: BTreeMap<String, f64>,
    pub clamp_events: usize,
    pub metadata: ResultMetadata,
}

impl ScanResult {
    pub(crate) fn new(spec: &ScanSpec, columns: &[&str], rows: Vec<ScanRow>) -> Self {
        let (parameter, unit) = spec.scenario.axis();
        Self {
            scenario: spec.scenario,
            parameter: parameter.into(),
            unit: unit.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
            summary: BTreeMap::new(),
            clamp_events: 0,
            metadata: ResultMetadata {
                schema_version: RESULT_SCHEMA_VERSION,
                code_version: env!("CARGO_PKG_VERSION").into(),
                spec_hash: spec.hash(),
                noise: spec.noise.clone(),
                shots: spec.shots,
                seed: spec.seed,
            },
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r.values[k]).collect())
    }

    pub fn sweep_values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let sampled = self.rows.iter().any(|r| r.uncertainty.is_some());
        let mut header = vec![format!("{} [{}]", self.parameter, self.unit)];
        header.extend(self.columns.iter().cloned());
        if sampled {
            header.extend(self.columns.iter().map(|c| format!("{c}_sigma")));
        }
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.value.to_string()];
            rec.extend(r.values.iter().map(|v| v.to_string()));
            if sampled {
                match &r.uncertainty {
                    Some(u) => rec.extend(u.iter().map(|v| v.to_string())),
                    None => rec.extend(std::iter::repeat_n("NaN".to_string(), self.columns.len())),
                }
            }
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Writes `{scenario}-{label}.csv` and `.json` into `dir`.
    pub fn write(&self, dir: &Path, label: &str) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let stem = format!("{}-{label}", self.scenario.name());
        let csv_path = dir.join(format!("{stem}.csv"));
        let json_path = dir.join(format!("{stem}.json"));
        std::fs::write(&csv_path, self.to_csv()?)?;
        std::fs::write(&json_path, self.to_json()?)?;
        Ok((csv_path, json_path))
    }
}

/// Shot-noise model for probability observables. With zero shots values
/// pass through unchanged.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Sampler {
    pub shots: u64,
    pub seed: u64,
}

impl Sampler {
    pub fn exact(&self) -> bool {
        self.shots == 0
    }

    /// Sampled estimate and its standard error for probability `p`, drawn
    /// from a stream keyed by row and column.
    pub fn observe(&self, p: f64, row: usize, col: usize) -> (f64, f64) {
        let p = p.clamp(0.0, 1.0);
        if self.exact() {
            return (p, f64::NAN);
        }
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(((row as u64) << 16) | col as u64);
        let k = Binomial::new(self.shots, p).expect("valid binomial").sample(&mut rng);
        let est = k as f64 / self.shots as f64;
        (est, (est * (1.0 - est) / self.shots as f64).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_names_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(Scenario::parse(s.name()).unwrap(), s);
            let json = serde_json::to_string(&s).unwrap();
            assert_eq!(json, format!("\"{}\"", s.name()));
        }
    }

    #[test]
    fn empty_sweep_rejected() {
        let mut s = ScanSpec::new(Scenario::MeasureFidelity);
        s.sweep.values.clear();
        assert!(s.validate().is_err());
    }

    #[test]
    fn hash_depends_on_content() {
        let a = ScanSpec::new(Scenario::RamseyPhase);
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn sampler_reproducible() {
        let s = Sampler { shots: 100, seed: 3 };
        assert_eq!(s.observe(0.3, 2, 1), s.observe(0.3, 2, 1));
        let e = Sampler { shots: 0, seed: 3 };
        assert_eq!(e.observe(0.3, 0, 0).0, 0.3);
    }
}
