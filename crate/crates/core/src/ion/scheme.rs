use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Manifold {
    #[serde(rename = "S_ground")]
    SGround,
    #[serde(rename = "D_metastable")]
    DMetastable,
    #[serde(rename = "D_repump_sink")]
    DRepumpSink,
}

impl Manifold {
    pub fn is_d(self) -> bool {
        matches!(self, Manifold::DMetastable | Manifold::DRepumpSink)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionKind {
    RamanQubit,
    OpticalQuadrupole,
}

/// One level. Frequencies are plain Hz (no 2π); `energy_hz` is the
/// field-free offset within its electronic manifold and `zeeman_hz` the
/// linear Zeeman shift. Optical transition frequencies are therefore only
/// meaningful relative to each other.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub id: String,
    pub manifold: Manifold,
    #[serde(rename = "F")]
    pub f: u32,
    pub m_f: i32,
    pub energy_hz: f64,
    pub zeeman_hz: f64,
}

impl Level {
    pub fn frequency_hz(&self) -> f64 {
        self.energy_hz + self.zeeman_hz
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub id: String,
    pub lower: String,
    pub upper: String,
    pub kind: TransitionKind,
    pub allowed: bool,
    /// Relative coupling strength (multiplies the drive Rabi frequency).
    #[serde(default = "one")]
    pub strength: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepumpBranch {
    pub from: String,
    pub to: String,
    pub weight: f64,
}

/// 935 nm repump configuration. Rates are in 1/s.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepumpConfig {
    pub rate_per_s: f64,
    /// Explicit branching; `None` means uniform over `m' ∈ {m−1, m, m+1}` in S(F=1).
    #[serde(default)]
    pub branching: Option<Vec<RepumpBranch>>,
    /// Fixed-tone channel emptying the D(F=1) sink; 0 disables it.
    #[serde(default)]
    pub sink_rate_per_s: f64,
}

impl Default for RepumpConfig {
    fn default() -> Self {
        Self {
            rate_per_s: 2.0 * PI * 100e3,
            branching: None,
            sink_rate_per_s: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelScheme {
    pub levels: Vec<Level>,
    pub transitions: Vec<Transition>,
    #[serde(default)]
    pub repump: RepumpConfig,
    /// A tone drives every allowed transition of its kind within this distance (Hz).
    #[serde(default = "default_cutoff")]
    pub drive_cutoff_hz: f64,
}

fn default_cutoff() -> f64 {
    1e9
}

pub const HYPERFINE_S_HZ: f64 = 12.642_812_118e9;
pub const HYPERFINE_D_HZ: f64 = 0.86e9;
pub const ZEEMAN_S_HZ_PER_M: f64 = 2e6;
pub const ZEEMAN_D_HZ_PER_M: f64 = -3e6;

impl LevelScheme {
    /// The eight-level ¹⁷¹Yb⁺ scheme: S(F=0), S(F=1, m=0,±1), D₃/₂(F=2, m=0,±1)
    /// and an aggregate D₃/₂(F=1) sink. Adjacent Δm=0 optical transitions are
    /// split by 5 MHz.
    pub fn yb171() -> Self {
        let s = |id: &str, f, m: i32| Level {
            id: id.into(),
            manifold: Manifold::SGround,
            f,
            m_f: m,
            energy_hz: if f == 1 { HYPERFINE_S_HZ } else { 0.0 },
            zeeman_hz: if f == 1 { m as f64 * ZEEMAN_S_HZ_PER_M } else { 0.0 },
        };
        let d = |id: &str, m: i32| Level {
            id: id.into(),
            manifold: Manifold::DMetastable,
            f: 2,
            m_f: m,
            energy_hz: 0.0,
            zeeman_hz: m as f64 * ZEEMAN_D_HZ_PER_M,
        };
        let levels = vec![
            s("0", 0, 0),
            s("1", 1, 0),
            s("2", 1, -1),
            s("3", 1, 1),
            d("D", 0),
            d("D_m1", -1),
            d("D_p1", 1),
            Level {
                id: "D_F1".into(),
                manifold: Manifold::DRepumpSink,
                f: 1,
                m_f: 0,
                energy_hz: -HYPERFINE_D_HZ,
                zeeman_hz: 0.0,
            },
        ];
        let t = |id: &str, lower: &str, upper: &str, kind, allowed| Transition {
            id: id.into(),
            lower: lower.into(),
            upper: upper.into(),
            kind,
            allowed,
            strength: 1.0,
        };
        use TransitionKind::*;
        let transitions = vec![
            t("raman_01", "0", "1", RamanQubit, true),
            t("raman_02", "0", "2", RamanQubit, false),
            t("raman_03", "0", "3", RamanQubit, false),
            t("opt_0_D", "0", "D", OpticalQuadrupole, true),
            t("opt_1_D", "1", "D", OpticalQuadrupole, true),
            t("opt_2_Dm1", "2", "D_m1", OpticalQuadrupole, true),
            t("opt_3_Dp1", "3", "D_p1", OpticalQuadrupole, true),
            t("opt_2_D", "2", "D", OpticalQuadrupole, false),
            t("opt_3_D", "3", "D", OpticalQuadrupole, false),
            t("opt_1_Dm1", "1", "D_m1", OpticalQuadrupole, false),
            t("opt_1_Dp1", "1", "D_p1", OpticalQuadrupole, false),
        ];
        Self {
            levels,
            transitions,
            repump: RepumpConfig::default(),
            drive_cutoff_hz: default_cutoff(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scheme: Self = serde_json::from_str(text)?;
        scheme.validate()?;
        Ok(scheme)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() || self.levels.len() > 16 {
            return Err(Error::InvalidArgument(format!("scheme must have 1..=16 levels, has {}", self.levels.len())));
        }
        let mut seen = BTreeSet::new();
        for l in &self.levels {
            if !seen.insert(l.id.as_str()) {
                return Err(Error::InvalidArgument(format!("duplicate level id `{}`", l.id)));
            }
            if !l.energy_hz.is_finite() || !l.zeeman_hz.is_finite() {
                return Err(Error::InvalidArgument(format!("level `{}` has a non-finite frequency", l.id)));
            }
        }
        let mut tids = BTreeSet::new();
        for t in &self.transitions {
            if !tids.insert(t.id.as_str()) {
                return Err(Error::InvalidArgument(format!("duplicate transition id `{}`", t.id)));
            }
            let lo = self.index(&t.lower)?;
            let up = self.index(&t.upper)?;
            if lo == up {
                return Err(Error::InvalidArgument(format!("transition `{}` connects a level to itself", t.id)));
            }
            if !(t.strength >= 0.0) || !t.strength.is_finite() {
                return Err(Error::InvalidArgument(format!("transition `{}` has invalid strength", t.id)));
            }
        }
        if !(self.repump.rate_per_s >= 0.0) || !(self.repump.sink_rate_per_s >= 0.0) {
            return Err(Error::InvalidArgument("repump rates must be non-negative".into()));
        }
        if let Some(branches) = &self.repump.branching {
            for b in branches {
                self.index(&b.from)?;
                self.index(&b.to)?;
                if !(b.weight >= 0.0) || !b.weight.is_finite() {
                    return Err(Error::InvalidArgument(format!("repump weight {} is invalid", b.weight)));
                }
            }
        }
        if !(self.drive_cutoff_hz > 0.0) {
            return Err(Error::InvalidArgument("drive_cutoff_hz must be positive".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn labels(&self) -> Vec<String> {
        self.levels.iter().map(|l| l.id.clone()).collect()
    }

    pub fn index(&self, id: &str) -> Result<usize> {
        self.levels
            .iter()
            .position(|l| l.id == id)
            .ok_or_else(|| Error::UnknownLevel(id.to_string()))
    }

    pub fn level(&self, id: &str) -> Result<&Level> {
        Ok(&self.levels[self.index(id)?])
    }

    pub fn transition(&self, id: &str) -> Result<&Transition> {
        self.transitions
            .iter()
            .find(|t| t.id == id)
            .ok_or_else(|| Error::UnknownTransition(id.to_string()))
    }

    /// Transition frequency in Hz (upper minus lower).
    pub fn transition_frequency_hz(&self, t: &Transition) -> Result<f64> {
        Ok(self.level(&t.upper)?.frequency_hz() - self.level(&t.lower)?.frequency_hz())
    }

    /// Indices of the S(F=1) levels, which scatter detection light.
    pub fn bright_levels(&self) -> Vec<usize> {
        self.indices_where(|l| l.manifold == Manifold::SGround && l.f == 1)
    }

    pub fn d_levels(&self) -> Vec<usize> {
        self.indices_where(|l| l.manifold.is_d())
    }

    pub fn indices_where(&self, pred: impl Fn(&Level) -> bool) -> Vec<usize> {
        self.levels
            .iter()
            .enumerate()
            .filter(|(_, l)| pred(l))
            .map(|(i, _)| i)
            .collect()
    }
}
