use nalgebra::Matrix2;

use super::operator::eigh_unchecked;
use super::{CMatrix, Operator, QuantumState, C64};
use crate::error::{Error, Result};

/// State fidelity.
///
/// `|⟨ψ|φ⟩|²` for two pure states, `⟨ψ|ρ|ψ⟩` for a pure/mixed pair and the
/// Uhlmann fidelity `(tr √(√ρ σ √ρ))²` for two density matrices.
pub fn fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let f = match (a.amplitudes(), b.amplitudes()) {
        (Some(x), Some(y)) => x.dotc(y).norm_sqr(),
        (Some(x), None) => (x.adjoint() * b.density() * x)[(0, 0)].re,
        (None, Some(y)) => (y.adjoint() * a.density() * y)[(0, 0)].re,
        (None, None) => {
            let sqrt_a = psd_sqrt(&a.density());
            let inner = &sqrt_a * b.density() * &sqrt_a;
            let (vals, _) = eigh_unchecked(&inner);
            let t: f64 = vals.iter().map(|v| v.max(0.0).sqrt()).sum();
            t * t
        }
    };
    Ok(f.clamp(0.0, 1.0))
}

fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (vals, vecs) = eigh_unchecked(m);
    let mut scaled = vecs.clone();
    for c in 0..vals.len() {
        let s = C64::new(vals[c].max(0.0).sqrt(), 0.0);
        for r in 0..vals.len() {
            scaled[(r, c)] *= s;
        }
    }
    scaled * vecs.adjoint()
}

fn as_su2_input(u: &Operator) -> Result<Matrix2<C64>> {
    if u.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: u.dim() });
    }
    u.ensure_unitary()?;
    let m = u.matrix();
    Ok(Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]))
}

/// Divides a 2×2 unitary by `√det` and fixes the sign so that `Re tr ≥ 0`.
pub fn su2_normalize(m: &Matrix2<C64>) -> Matrix2<C64> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let mut s = m / det.sqrt();
    if (s[(0, 0)] + s[(1, 1)]).re < 0.0 {
        s = -s;
    }
    s
}

/// Coefficients `(c0, cx, cy, cz)` of `U/√det = c0·I − i(cx X + cy Y + cz Z)`,
/// with the sign chosen so that `c0 ≥ 0`.
pub fn pauli_coefficients(u: &Operator) -> Result<[f64; 4]> {
    Ok(pauli_coefficients_su2(&as_su2_input(u)?))
}

pub(crate) fn pauli_coefficients_su2(m: &Matrix2<C64>) -> [f64; 4] {
    let s = su2_normalize(m);
    // tr(S·X) = s01 + s10, tr(S·Y) = i(s01 − s10), tr(S·Z) = s00 − s11
    let c0 = 0.5 * (s[(0, 0)] + s[(1, 1)]).re;
    let cx = -0.5 * (s[(0, 1)] + s[(1, 0)]).im;
    let cy = -0.5 * (C64::i() * (s[(0, 1)] - s[(1, 0)])).im;
    let cz = -0.5 * (s[(0, 0)] - s[(1, 1)]).im;
    [c0, cx, cy, cz]
}

/// Axis-angle vector `θ·n̂` of a 2×2 unitary, global phase removed, with
/// `u ∝ exp(−i θ n̂·σ / 2)` and `θ ∈ [0, π]`.
pub fn rotation_vector(u: &Operator) -> Result<[f64; 3]> {
    let [c0, cx, cy, cz] = pauli_coefficients(u)?;
    let s = (cx * cx + cy * cy + cz * cz).sqrt();
    if s == 0.0 {
        return Ok([0.0, 0.0, 0.0]);
    }
    let theta = 2.0 * s.atan2(c0);
    let mut axis = [cx / s, cy / s, cz / s];
    // at θ = π the sign of the axis is arbitrary; pick the first non-zero component positive
    if c0.abs() < 1e-15 {
        if let Some(first) = axis.iter().copied().find(|v| v.abs() > 1e-12) {
            if first < 0.0 {
                axis = axis.map(|v| -v);
            }
        }
    }
    Ok(axis.map(|v| v * theta))
}

/// `exp(−i (v·σ)/2)`, the inverse of [`rotation_vector`].
pub fn rotation_from_vector(v: [f64; 3]) -> Operator {
    let theta = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let n = if theta > 0.0 { v.map(|x| x / theta) } else { [0.0; 3] };
    let i = C64::i();
    let m00 = C64::new(c, 0.0) - i * s * n[2];
    let m11 = C64::new(c, 0.0) + i * s * n[2];
    let m01 = -i * s * C64::new(n[0], -n[1]);
    let m10 = -i * s * C64::new(n[0], n[1]);
    Operator::new(CMatrix::from_row_slice(2, 2, &[m00, m01, m10, m11])).expect("2x2")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::CVector;
    use std::f64::consts::PI;

    fn plus() -> QuantumState {
        QuantumState::pure_normalized(CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]), None).unwrap()
    }

    #[test]
    fn fidelity_basics() {
        let z = QuantumState::basis(2, 0);
        let o = QuantumState::basis(2, 1);
        assert!((fidelity(&z, &z).unwrap() - 1.0).abs() < 1e-15);
        assert!(fidelity(&z, &o).unwrap().abs() < 1e-15);
        assert!((fidelity(&z, &plus()).unwrap() - 0.5).abs() < 1e-15);
        assert!((fidelity(&z.to_mixed(), &plus().to_mixed()).unwrap() - 0.5).abs() < 1e-12);
        assert!((fidelity(&plus().to_mixed(), &plus().to_mixed()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uhlmann_for_diagonal_states() {
        // commuting states: F = (Σ √(p_i q_i))²
        let a = QuantumState::mixed(CMatrix::from_diagonal(&CVector::from_vec(vec![C64::new(0.3, 0.0), C64::new(0.7, 0.0)])), None).unwrap();
        let b = QuantumState::mixed(CMatrix::from_diagonal(&CVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.4, 0.0)])), None).unwrap();
        let expect = ((0.3f64 * 0.6).sqrt() + (0.7f64 * 0.4).sqrt()).powi(2);
        assert!((fidelity(&a, &b).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn rotation_vector_examples() {
        let id = Operator::identity(2);
        assert_eq!(rotation_vector(&id).unwrap(), [0.0, 0.0, 0.0]);

        let rx = rotation_from_vector([PI, 0.0, 0.0]);
        let v = rotation_vector(&rx).unwrap();
        assert!((v[0] - PI).abs() < 1e-12 && v[1].abs() < 1e-12 && v[2].abs() < 1e-12);

        // exp(-i (π/4) σz), built directly from its diagonal
        let rz = Operator::new(CMatrix::from_row_slice(
            2,
            2,
            &[C64::from_polar(1.0, -PI / 4.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::from_polar(1.0, PI / 4.0)],
        ))
        .unwrap();
        let v = rotation_vector(&rz).unwrap();
        assert!(v[0].abs() < 1e-12 && v[1].abs() < 1e-12 && (v[2] - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn global_phase_is_removed() {
        let u = rotation_from_vector([0.3, -0.2, 0.9]);
        let phased = u.scale(C64::from_polar(1.0, 2.1));
        let a = rotation_vector(&u).unwrap();
        let b = rotation_vector(&phased).unwrap();
        for k in 0..3 {
            assert!((a[k] - b[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn non_unitary_rejected() {
        let m = Operator::diagonal(&[1.0, 2.0]);
        assert!(matches!(rotation_vector(&m), Err(Error::NotUnitary { .. })));
    }
}
