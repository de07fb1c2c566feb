//! Quantum nondemolition (QND) measurement of two-qubit complementarity.
//!
//! The crate simulates the state-preparation circuit and the two ancilla-based
//! QND circuits that read out visibility, predictability and concurrence of a
//! two-qubit state, and carries the analysis pipeline used to judge a device
//! running them: linear state tomography, post-selection on ancilla outcomes,
//! Uhlmann fidelity, RMS errors and noise fits.
//!
//! Module map:
//!
//! - [`qmath`]: dense complex linear algebra up to 16×16 (4 qubits).
//! - [`circuits`]: gates, pure and noisy execution, sampling, post-selection.
//! - [`experiments`]: the preparation and QND circuits, Bell coefficients,
//!   ancilla estimators and the conditional output states.
//! - [`observables`]: visibility, predictability and Wootters concurrence.
//! - [`tomography`]: 16-setting linear inversion and physical projection.
//! - [`analysis`]: RMS error, fits and the three-criteria summary.
//! - [`harness`]: sweep configuration, the full protocol and CSV/JSON output.
//!
//! Basis convention: qubit 0 (A) is the most significant bit of a basis index,
//! so `|i_A i_B i_C i_D⟩` has index `Σ_k i_k 2^(n-1-k)`.

pub mod analysis;
pub mod circuits;
mod error;
pub mod experiments;
pub mod harness;
pub mod observables;
pub mod qmath;
pub mod tomography;

pub use error::{Error, Result};
