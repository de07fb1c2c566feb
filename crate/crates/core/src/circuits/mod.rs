//! Gate-level circuits: construction, pure and noisy execution, sampling and
//! post-selection.

mod exec;
mod gate;
mod sampling;

pub use exec::{run_noisy, run_pure, NoiseModel};
pub use gate::{Circuit, Gate, GateKind, RotationConvention};
pub use sampling::{
    bitstrings, derive_seed, exact_probabilities, postselect, postselect_counts, sample_counts,
    OutcomeCounts, OutcomeDistribution, EMPTY_BRANCH_PROBABILITY,
};
