use super::{CMatrix, CVector, Operator, C64};
use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const POSITIVITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Pure(CVector),
    Mixed(CMatrix),
}

/// A pure state vector or a density matrix over an ion's level space.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    repr: Repr,
    labels: Vec<String>,
}

fn default_labels(dim: usize) -> Vec<String> {
    (0..dim).map(|i| i.to_string()).collect()
}

impl QuantumState {
    /// Pure state; the amplitudes must already be normalized.
    pub fn pure(amplitudes: CVector, labels: Option<Vec<String>>) -> Result<Self> {
        let norm = amplitudes.norm();
        if (norm * norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "pure state norm² is {}, expected 1",
                norm * norm
            )));
        }
        Self::with_labels(Repr::Pure(amplitudes), labels)
    }

    /// Pure state, normalizing the supplied amplitudes.
    pub fn pure_normalized(amplitudes: CVector, labels: Option<Vec<String>>) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite amplitude vector".into()));
        }
        Self::with_labels(Repr::Pure(amplitudes / C64::new(norm, 0.0)), labels)
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Self {
            repr: Repr::Pure(v),
            labels: default_labels(dim),
        }
    }

    /// Density matrix; validated for trace, Hermiticity and positivity.
    pub fn mixed(matrix: CMatrix, labels: Option<Vec<String>>) -> Result<Self> {
        let state = Self::with_labels(Repr::Mixed(matrix), labels)?;
        state.validate()?;
        Ok(state)
    }

    /// Density matrix produced by trusted numerical routines (no validation).
    pub(crate) fn from_density_unchecked(matrix: CMatrix, labels: Vec<String>) -> Self {
        Self {
            repr: Repr::Mixed(matrix),
            labels,
        }
    }

    fn with_labels(repr: Repr, labels: Option<Vec<String>>) -> Result<Self> {
        let dim = match &repr {
            Repr::Pure(v) => v.len(),
            Repr::Mixed(m) => {
                if m.nrows() != m.ncols() {
                    return Err(Error::DimensionMismatch {
                        expected: m.nrows(),
                        found: m.ncols(),
                    });
                }
                m.nrows()
            }
        };
        let labels = labels.unwrap_or_else(|| default_labels(dim));
        if labels.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: labels.len(),
            });
        }
        Ok(Self { repr, labels })
    }

    pub fn with_relabel(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Pure(v) => v.len(),
            Repr::Mixed(m) => m.nrows(),
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Repr::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&CVector> {
        match &self.repr {
            Repr::Pure(v) => Some(v),
            Repr::Mixed(_) => None,
        }
    }

    /// Density matrix of the state (computed for pure states).
    pub fn density(&self) -> CMatrix {
        match &self.repr {
            Repr::Pure(v) => v * v.adjoint(),
            Repr::Mixed(m) => m.clone(),
        }
    }

    pub fn density_ref(&self) -> Option<&CMatrix> {
        match &self.repr {
            Repr::Mixed(m) => Some(m),
            Repr::Pure(_) => None,
        }
    }

    pub fn into_density(self) -> CMatrix {
        match self.repr {
            Repr::Pure(v) => &v * v.adjoint(),
            Repr::Mixed(m) => m,
        }
    }

    /// Promotes to a density matrix representation.
    pub fn to_mixed(&self) -> Self {
        Self {
            repr: Repr::Mixed(self.density()),
            labels: self.labels.clone(),
        }
    }

    pub fn population(&self, index: usize) -> f64 {
        match &self.repr {
            Repr::Pure(v) => v[index].norm_sqr(),
            Repr::Mixed(m) => m[(index, index)].re,
        }
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.population(i)).collect()
    }

    /// `ρ_ij` (or `ψ_i ψ_j*` for pure states).
    pub fn coherence(&self, i: usize, j: usize) -> C64 {
        match &self.repr {
            Repr::Pure(v) => v[i] * v[j].conj(),
            Repr::Mixed(m) => m[(i, j)],
        }
    }

    pub fn trace(&self) -> f64 {
        match &self.repr {
            Repr::Pure(v) => v.norm_squared(),
            Repr::Mixed(m) => m.trace().re,
        }
    }

    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: op.dim(),
            });
        }
        Ok(match &self.repr {
            Repr::Pure(v) => (v.adjoint() * op.matrix() * v)[(0, 0)],
            Repr::Mixed(m) => (op.matrix() * m).trace(),
        })
    }

    /// Applies `U · state · U†`.
    pub fn evolve(&self, u: &Operator) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.dim(),
            });
        }
        let repr = match &self.repr {
            Repr::Pure(v) => Repr::Pure(u.matrix() * v),
            Repr::Mixed(m) => Repr::Mixed(u.matrix() * m * u.matrix().adjoint()),
        };
        Ok(Self {
            repr,
            labels: self.labels.clone(),
        })
    }

    /// Checks the representation invariants.
    pub fn validate(&self) -> Result<()> {
        match &self.repr {
            Repr::Pure(v) => {
                let n2 = v.norm_squared();
                if (n2 - 1.0).abs() > NORM_TOL {
                    return Err(Error::InvalidState(format!("norm² {n2} differs from 1")));
                }
            }
            Repr::Mixed(m) => {
                let tr = m.trace();
                if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
                    return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
                }
                let op = Operator::new(m.clone())?;
                let dev = op.hermitian_deviation();
                if dev > TRACE_TOL {
                    return Err(Error::InvalidState(format!(
                        "density matrix not Hermitian (deviation {dev:.3e})"
                    )));
                }
                let (vals, _) = super::operator::eigh_unchecked(m);
                let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
                if min < -POSITIVITY_TOL {
                    return Err(Error::InvalidState(format!(
                        "density matrix has negative eigenvalue {min:.3e}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Smallest eigenvalue of the density matrix (0 for pure states' null space).
    pub fn min_eigenvalue(&self) -> f64 {
        let (vals, _) = super::operator::eigh_unchecked(&self.density());
        vals.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}
