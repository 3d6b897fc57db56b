use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ion::{LevelScheme, Pulse, Target};

pub const SCHEDULE_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemKind {
    /// Coherent drive; every tone lasts the whole item.
    Coherent,
    /// Free evolution under the noise model.
    Noise,
    /// Detection light on. The POVM is applied at the start when `record` is set.
    Detection,
    /// 935 nm repump on.
    Repump,
}

/// One timeline entry. Windows may carry background tones (e.g. a dressing
/// field that stays on while the repump runs).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleItem {
    pub kind: ItemKind,
    pub duration: f64,
    #[serde(default)]
    pub tones: Vec<Pulse>,
    pub purpose: String,
    #[serde(default)]
    pub record: bool,
}

impl ScheduleItem {
    pub fn coherent(tones: Vec<Pulse>, purpose: &str) -> Self {
        let duration = tones.first().map_or(0.0, |t| t.duration);
        Self {
            kind: ItemKind::Coherent,
            duration,
            tones,
            purpose: purpose.into(),
            record: false,
        }
    }

    pub fn window(kind: ItemKind, duration: f64, purpose: &str) -> Self {
        Self {
            kind,
            duration,
            tones: Vec::new(),
            purpose: purpose.into(),
            record: false,
        }
    }

    pub fn recorded(mut self) -> Self {
        self.record = true;
        self
    }

    /// Adds background tones, stretched to this item's duration.
    pub fn with_background(mut self, background: &[Pulse]) -> Self {
        for b in background {
            let mut t = b.clone();
            t.duration = self.duration;
            self.tones.push(t);
        }
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub items: Vec<ScheduleItem>,
}

fn schema_version() -> u32 {
    SCHEDULE_SCHEMA_VERSION
}

impl Schedule {
    pub fn new(items: Vec<ScheduleItem>) -> Self {
        Self {
            schema_version: SCHEDULE_SCHEMA_VERSION,
            items,
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn total_duration(&self) -> f64 {
        self.items.iter().map(|i| i.duration).sum()
    }

    /// Total duration of items with the given purpose.
    pub fn duration_of(&self, purpose: &str) -> f64 {
        self.items.iter().filter(|i| i.purpose == purpose).map(|i| i.duration).sum()
    }

    pub fn extend(&mut self, other: Schedule) {
        self.items.extend(other.items);
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        if s.schema_version != SCHEDULE_SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schedule schema version {}", s.schema_version)));
        }
        s.validate_structure()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Checks that do not need a level scheme.
    pub fn validate_structure(&self) -> Result<()> {
        for (k, item) in self.items.iter().enumerate() {
            if !(item.duration > 0.0) || !item.duration.is_finite() {
                return Err(Error::InvalidArgument(format!("item {k} has non-positive duration {}", item.duration)));
            }
            if item.kind == ItemKind::Coherent && item.tones.is_empty() {
                return Err(Error::InvalidArgument(format!("coherent item {k} has no tones")));
            }
            for t in &item.tones {
                if (t.duration - item.duration).abs() > 1e-12 * item.duration.max(1e-9) {
                    return Err(Error::InvalidArgument(format!(
                        "item {k}: tone on `{}` lasts {} but the item lasts {}",
                        t.drive, t.duration, item.duration
                    )));
                }
            }
        }
        Ok(())
    }

    /// Full validation against a scheme and register size.
    pub fn validate(&self, scheme: &LevelScheme, n_ions: usize) -> Result<()> {
        self.validate_structure()?;
        for (k, item) in self.items.iter().enumerate() {
            for t in &item.tones {
                t.validate(scheme)?;
                if let Target::Individual(i) = t.target {
                    if i >= n_ions {
                        return Err(Error::ScheduleMismatch(format!(
                            "item {k} targets ion {i} but the register has {n_ions} ions"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}
