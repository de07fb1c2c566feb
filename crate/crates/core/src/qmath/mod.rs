//! Dense complex linear algebra for 1–4 qubits.
//!
//! Everything here is small (at most 16×16) and immutable; all operations are
//! pure functions. Hermitian eigendecomposition is delegated to `nalgebra`.

pub(crate) mod linalg;
mod matrix;
mod state;

pub use linalg::{
    eigh, fidelity, hermitian_eigenvalues, matrix_sqrt_psd, EigenClip, Eigendecomposition,
};
pub use matrix::{tensor_all, tensor_product, ComplexMatrix};
pub use state::{partial_trace, DensityMatrix, QuantumState, StateVector};

pub use num_complex::Complex64;

/// Construction invariants (normalization, Hermiticity, unitarity).
pub const CONSTRUCTION_TOL: f64 = 1e-10;
/// Algebraic identities between independently computed quantities.
pub const IDENTITY_TOL: f64 = 1e-8;
/// Physicality clipping: eigenvalues below `-PHYSICAL_TOL` are genuinely negative.
pub const PHYSICAL_TOL: f64 = 1e-6;
/// Eigenvalues above this (negative) floor count as zero for PSD checks.
pub const PSD_FLOOR: f64 = -1e-8;

pub const MAX_QUBITS: usize = 4;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_vec(2, 2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[1.0, -1.0])
}

/// The spin-flip matrix `σ_y ⊗ σ_y`.
pub fn spin_flip() -> ComplexMatrix {
    tensor_product(&pauli_y(), &pauli_y())
}
