//! The preparation circuit, the two QND circuits, their estimators, and the
//! theoretical post-measurement states.
//!
//! Wires: A = 0, B = 1 are the system; C = 2 (and D = 3) are ancillas that
//! start in `|0⟩`.

mod branches;
mod checks;
mod prep;
mod qnd;

pub use branches::{
    ancilla_outcomes, branches, conditional_target_state, output_target_mixture,
    symbolic_output_state, Branch, RELIABLE_BRANCH_PROBABILITY,
};
pub use checks::{
    angle_grid, visibility_identity_check, visibility_identity_check_on, visibility_unitary_closed_form,
    repeated_measurement, rotation_convention_defect, IdentityReport, RepeatedMeasurement,
};
pub use prep::{bell_coefficients, prep_circuit, BellCoefficients, BellState, PrepParams};
pub use qnd::{
    ancilla_bell_label, bell_readout_circuit, estimate_from_distribution, estimate_observable,
    full_circuit, measurement_circuit, qnd1_circuit, qnd2_circuit, qnd2_circuit_with,
    MeasurementSetting, SettingKind, QUBIT_A, QUBIT_B, QUBIT_C, QUBIT_D,
};
