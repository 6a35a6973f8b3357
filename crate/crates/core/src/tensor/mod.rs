//! Dense complex linear algebra on four-party states `a ⊗ A ⊗ B ⊗ b`.

mod eigen;
mod matrix;
mod state;

pub use eigen::{eigh, eigvalsh, Eigh, HERMITIAN_TOL};
pub use matrix::{inner, kron, kron_vec, norm_sqr, ComplexMatrix, UNITARY_TOL};
pub use state::{DensityMatrix, Dims, PureState, Subsystems, NORM_TOL};

pub(crate) use eigen::jacobi;
pub(crate) use state::{apply_local, gaussian_vector};

use crate::error::Result;
use crate::gates::BipartiteGate;

/// `(I_a ⊗ U ⊗ I_b)|ψ⟩`.
pub fn apply_gate(state: &PureState, gate: &BipartiteGate) -> Result<PureState> {
    state.apply_gate(gate)
}

/// Reduced state on the kept parties.
pub fn partial_trace(state: &PureState, keep: Subsystems) -> Result<DensityMatrix> {
    state.partial_trace(keep)
}

/// Eigenvalues of a density matrix, descending.
pub fn hermitian_eigvals(rho: &DensityMatrix) -> Result<Vec<f64>> {
    rho.eigvals()
}
