//! Near-resonant Raman dressing of the |0⟩–|1⟩ qubit.
//!
//! With `H = δ|0⟩⟨0| + (Ω/2)(|0⟩⟨1| + |1⟩⟨0|)` the eigenstates are
//! `|ψ±⟩ = (√(1±δ/Ω_g)|0⟩ ± √(1∓δ/Ω_g)|1⟩)/√2` with energies
//! `Δ± = (δ ± Ω_g)/2`, `Ω_g = √(Ω² + δ²)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{CMatrix, CVector, Operator, QuantumState, C64};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Small detuning (δ/Ω ≈ 0.1): nearly symmetric shifts.
    #[default]
    Shelving,
    /// Larger detuning (δ/Ω ≈ 0.5): strongly asymmetric shifts.
    HandsOff,
}

impl Regime {
    pub fn nominal_ratio(self) -> f64 {
        match self {
            Regime::Shelving => 0.1,
            Regime::HandsOff => 0.5,
        }
    }
}

/// Which dressed state a drive is tuned to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    #[default]
    Plus,
    Minus,
}

/// Rabi frequency and detuning in rad/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DressingParams {
    pub rabi: f64,
    pub detuning: f64,
    #[serde(default)]
    pub regime_hint: Regime,
}

impl DressingParams {
    pub fn new(rabi: f64, detuning: f64) -> Self {
        let regime_hint = if rabi > 0.0 && (detuning / rabi).abs() > 0.3 {
            Regime::HandsOff
        } else {
            Regime::Shelving
        };
        Self { rabi, detuning, regime_hint }
    }

    /// Parameters for a given regime's nominal `δ/Ω` at Rabi frequency `rabi`.
    pub fn for_regime(regime: Regime, rabi: f64) -> Self {
        Self {
            rabi,
            detuning: regime.nominal_ratio() * rabi,
            regime_hint: regime,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.rabi.is_finite() || !self.detuning.is_finite() || self.rabi < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "dressing rabi must be finite and non-negative (got {}, detuning {})",
                self.rabi, self.detuning
            )));
        }
        if self.rabi == 0.0 && self.detuning == 0.0 {
            return Err(Error::DegenerateDressing);
        }
        Ok(())
    }

    pub fn omega_g(&self) -> f64 {
        self.rabi.hypot(self.detuning)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DressedBasis {
    pub psi_plus: QuantumState,
    pub psi_minus: QuantumState,
    pub shift_plus: f64,
    pub shift_minus: f64,
    pub omega_g: f64,
}

impl DressedBasis {
    pub fn state(&self, branch: Branch) -> &QuantumState {
        match branch {
            Branch::Plus => &self.psi_plus,
            Branch::Minus => &self.psi_minus,
        }
    }

    pub fn shift(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Plus => self.shift_plus,
            Branch::Minus => self.shift_minus,
        }
    }
}

/// The two-level dressing Hamiltonian with the drive phase `phase`.
pub fn dressing_hamiltonian(rabi: f64, detuning: f64, phase: f64) -> Operator {
    let c = C64::from_polar(rabi / 2.0, -phase);
    Operator::new(CMatrix::from_row_slice(2, 2, &[C64::new(detuning, 0.0), c, c.conj(), C64::new(0.0, 0.0)])).expect("2x2")
}

fn coefficients(params: &DressingParams) -> (f64, f64, f64) {
    let og = params.omega_g();
    let r = (params.detuning / og).clamp(-1.0, 1.0);
    let a = ((1.0 + r) / 2.0).sqrt();
    let b = ((1.0 - r) / 2.0).sqrt();
    (a, b, og)
}

/// Dressed states and shifts. `ψ₊` always carries `Δ₊` and a non-negative
/// |0⟩ amplitude.
pub fn dressed_basis(params: &DressingParams) -> Result<DressedBasis> {
    params.validate()?;
    let (a, b, og) = coefficients(params);
    let plus = CVector::from_vec(vec![C64::new(a, 0.0), C64::new(b, 0.0)]);
    let minus = CVector::from_vec(vec![C64::new(b, 0.0), C64::new(-a, 0.0)]);
    let labels = Some(vec!["0".to_string(), "1".to_string()]);
    Ok(DressedBasis {
        psi_plus: QuantumState::pure_normalized(plus, labels.clone())?,
        psi_minus: QuantumState::pure_normalized(minus, labels)?,
        shift_plus: 0.5 * (params.detuning + og),
        shift_minus: 0.5 * (params.detuning - og),
        omega_g: og,
    })
}

/// `U = |ψ₊⟩⟨0| + |ψ₋⟩⟨1|`.
pub fn target_basis_rotation(params: &DressingParams) -> Result<Operator> {
    params.validate()?;
    let (a, b, _) = coefficients(params);
    Operator::new(CMatrix::from_row_slice(
        2,
        2,
        &[C64::new(a, 0.0), C64::new(b, 0.0), C64::new(b, 0.0), C64::new(-a, 0.0)],
    ))
}

/// Target for the dimensionless ratio `δ/Ω_nominal` at actual Rabi fraction `f`.
/// At `f = 0` this is the identity up to phase (decoupled limit).
pub fn target_for_fraction(detuning_ratio: f64, fraction: f64) -> Result<Operator> {
    target_basis_rotation(&DressingParams::new(fraction, detuning_ratio))
}

/// `(|Δ₊|, |Δ₋|)`. Larger `δ/Ω` buys asymmetry at the cost of a smaller `|Δ₋|`.
pub fn shift_asymmetry(params: &DressingParams) -> Result<(f64, f64)> {
    let b = dressed_basis(params)?;
    Ok((b.shift_plus.abs(), b.shift_minus.abs()))
}
