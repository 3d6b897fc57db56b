use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{CMatrix, C64};
use crate::error::{Error, Result};

/// Relative tolerance used when checking Hermiticity of user-supplied generators.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Absolute tolerance on `U†U - I` for unitarity checks.
pub const UNITARY_TOL: f64 = 1e-10;

/// Dense square complex matrix acting on a small Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: CMatrix,
}

impl Operator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        Ok(Self { matrix })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
        }
    }

    /// Builds a Hermitian operator from its real diagonal.
    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(*v, 0.0);
        }
        Self { matrix: m }
    }

    /// `|i⟩⟨j|` on a `dim`-level space.
    pub fn outer(dim: usize, i: usize, j: usize) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        m[(i, j)] = C64::new(1.0, 0.0);
        Self { matrix: m }
    }

    /// Projector onto the span of the given basis indices.
    pub fn projector(dim: usize, indices: &[usize]) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        for &i in indices {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        Self { matrix: m }
    }

    pub fn from_rows(rows: &[&[C64]]) -> Result<Self> {
        let n = rows.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Ok(Self { matrix: m })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dagger(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            matrix: &self.matrix * s,
        }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Induced infinity norm (max absolute row sum); an upper bound on the spectral norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.matrix.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn unitary_deviation(&self) -> f64 {
        let n = self.dim();
        let prod = self.matrix.adjoint() * &self.matrix;
        (prod - CMatrix::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= HERMITIAN_TOL * self.max_abs().max(1.0)
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary_deviation() < UNITARY_TOL
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        if self.is_hermitian() {
            Ok(())
        } else {
            Err(Error::NotHermitian {
                deviation: self.hermitian_deviation(),
            })
        }
    }

    pub fn ensure_unitary(&self) -> Result<()> {
        let deviation = self.unitary_deviation();
        if deviation < UNITARY_TOL {
            Ok(())
        } else {
            Err(Error::NotUnitary { deviation })
        }
    }

    /// Eigen-decomposition of a Hermitian operator: ascending eigenvalues and the
    /// matching orthonormal eigenvectors as columns.
    pub fn eigh(&self) -> Result<(DVector<f64>, CMatrix)> {
        self.ensure_hermitian()?;
        Ok(eigh_unchecked(&self.matrix))
    }

    /// `exp(-i H t)` computed from the Hermitian eigen-decomposition of `self`.
    pub fn propagator(&self, t: f64) -> Result<Operator> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "propagation time must be finite and non-negative, got {t}"
            )));
        }
        let (values, vectors) = self.eigh()?;
        Ok(Operator {
            matrix: propagator_from_eigen(&values, &vectors, t),
        })
    }
}

pub(crate) fn eigh_unchecked(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    // symmetrize to remove rounding asymmetry before the solver sees it
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub(crate) fn propagator_from_eigen(values: &DVector<f64>, vectors: &CMatrix, t: f64) -> CMatrix {
    let n = values.len();
    let mut scaled = vectors.clone();
    for c in 0..n {
        let phase = C64::from_polar(1.0, -values[c] * t);
        for r in 0..n {
            scaled[(r, c)] *= phase;
        }
    }
    scaled * vectors.adjoint()
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator {
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}
