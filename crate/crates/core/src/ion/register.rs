use serde::{Deserialize, Serialize};

use super::LevelScheme;
use crate::error::{Error, Result};
use crate::quantum::QuantumState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Data,
    Auxiliary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ion {
    pub role: Role,
    pub state: QuantumState,
}

/// Independent ions sharing one level scheme. No operation in scope
/// entangles ions, so the joint state is never formed.
#[derive(Clone, Debug, PartialEq)]
pub struct IonRegister {
    scheme: LevelScheme,
    ions: Vec<Ion>,
}

impl IonRegister {
    pub fn new(scheme: LevelScheme, ions: Vec<Ion>) -> Result<Self> {
        for ion in &ions {
            if ion.state.dim() != scheme.dim() {
                return Err(Error::DimensionMismatch {
                    expected: scheme.dim(),
                    found: ion.state.dim(),
                });
            }
        }
        Ok(Self { scheme, ions })
    }

    /// Every ion in the given level, with the given roles.
    pub fn uniform(scheme: LevelScheme, roles: &[Role], level: &str) -> Result<Self> {
        let idx = scheme.index(level)?;
        let labels = scheme.labels();
        let ions = roles
            .iter()
            .map(|&role| {
                Ok(Ion {
                    role,
                    state: QuantumState::basis(scheme.dim(), idx).with_relabel(labels.clone())?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(scheme, ions)
    }

    pub fn scheme(&self) -> &LevelScheme {
        &self.scheme
    }

    pub fn ions(&self) -> &[Ion] {
        &self.ions
    }

    pub fn len(&self) -> usize {
        self.ions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ions.is_empty()
    }

    pub fn state(&self, ion: usize) -> &QuantumState {
        &self.ions[ion].state
    }

    pub fn set_state(&mut self, ion: usize, state: QuantumState) -> Result<()> {
        if state.dim() != self.scheme.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.scheme.dim(),
                found: state.dim(),
            });
        }
        self.ions
            .get_mut(ion)
            .ok_or_else(|| Error::ScheduleMismatch(format!("no ion {ion}")))?
            .state = state;
        Ok(())
    }

    pub fn indices_with_role(&self, role: Role) -> Vec<usize> {
        (0..self.ions.len()).filter(|&i| self.ions[i].role == role).collect()
    }
}
