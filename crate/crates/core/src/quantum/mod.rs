//! Dense linear algebra and time evolution over small Hilbert spaces.

mod evolve;
pub(crate) mod metrics;
pub(crate) mod operator;
mod state;

pub use evolve::{propagate_lindblad, propagate_unitary, CollapseOp, LindbladSystem, LINDBLAD_STEP_BOUND, TRACE_DRIFT_LIMIT};
#[allow(unused_imports)]
pub(crate) use evolve::integrate_density;
pub use metrics::{fidelity, pauli_coefficients, rotation_from_vector, rotation_vector, su2_normalize};
pub use operator::{Operator, HERMITIAN_TOL, UNITARY_TOL};
pub use state::{QuantumState, NORM_TOL, POSITIVITY_TOL, TRACE_TOL};

pub type C64 = num_complex::Complex64;
pub type CMatrix = nalgebra::DMatrix<C64>;
pub type CVector = nalgebra::DVector<C64>;
