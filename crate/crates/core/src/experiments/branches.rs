use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use super::prep::{BellCoefficients, BellState};
use super::qnd::{MeasurementSetting, SettingKind};
use crate::circuits::{bitstrings, EMPTY_BRANCH_PROBABILITY};
use crate::error::{invalid, Error, Result};
use crate::qmath::{c, ComplexMatrix, DensityMatrix, StateVector};

/// Branches at or above this probability count as reliable for post-selection.
pub const RELIABLE_BRANCH_PROBABILITY: f64 = 0.25;

/// `|+⟩ = (|1⟩ + |0⟩)/√2`, `|−⟩ = (|1⟩ − |0⟩)/√2`.
fn plus_minus(sign: bool) -> [f64; 2] {
    let h = FRAC_1_SQRT_2;
    if sign {
        [h, h]
    } else {
        [-h, h]
    }
}

fn kron2(a: [f64; 2], b: [f64; 2]) -> [f64; 4] {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

fn combine(terms: &[(f64, BellState)]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (w, b) in terms {
        for (o, a) in out.iter_mut().zip(b.amplitudes()) {
            *o += w * a;
        }
    }
    out
}

/// Unnormalized system part of each ancilla branch, keyed by the decoded
/// ancilla outcome. The squared norm of each vector is the branch probability.
fn branch_vectors(s: &MeasurementSetting, k: &BellCoefficients) -> Vec<(String, [f64; 4])> {
    let (a, b, g, e) = (k.alpha, k.beta, k.gamma, k.eta);
    let h = FRAC_1_SQRT_2;
    let scaled = |w: f64, v: [f64; 4]| v.map(|x| w * x);
    let psi_branch = combine(&[(a, BellState::PsiMinus), (e, BellState::PhiPlus)]);
    let phi_branch = combine(&[(b, BellState::PsiPlus), (g, BellState::PhiMinus)]);
    match s.observable {
        SettingKind::VisibilityPair => vec![
            ("00".into(), scaled(h * (e - b), kron2(plus_minus(false), plus_minus(false)))),
            ("01".into(), scaled(h * (a + g), kron2(plus_minus(false), plus_minus(true)))),
            ("10".into(), scaled(h * (g - a), kron2(plus_minus(true), plus_minus(false)))),
            ("11".into(), scaled(h * (e + b), kron2(plus_minus(true), plus_minus(true)))),
        ],
        SettingKind::PredictabilityPair => vec![
            ("00".into(), [h * (e - g), 0.0, 0.0, 0.0]),
            ("01".into(), [0.0, h * (b - a), 0.0, 0.0]),
            ("10".into(), [0.0, 0.0, h * (a + b), 0.0]),
            ("11".into(), [0.0, 0.0, 0.0, h * (g + e)]),
        ],
        SettingKind::Concurrence2 => vec![
            ("00".into(), phi_branch),
            ("01".into(), psi_branch),
            ("10".into(), [0.0; 4]),
            ("11".into(), [0.0; 4]),
        ],
        SettingKind::Concurrence1 => vec![("0".into(), phi_branch), ("1".into(), psi_branch)],
    }
}

/// Normalized system state of one ancilla branch and its probability, built
/// from the Bell coefficients rather than by simulation.
pub fn conditional_target_state(
    s: &MeasurementSetting,
    k: &BellCoefficients,
    ancilla_outcome: &str,
) -> Result<(StateVector, f64)> {
    let (_, v) = branch_vectors(s, k)
        .into_iter()
        .find(|(o, _)| o == ancilla_outcome)
        .ok_or_else(|| invalid(format!("{ancilla_outcome:?} is not an outcome of {}", s.observable)))?;
    let probability: f64 = v.iter().map(|x| x * x).sum();
    if probability < EMPTY_BRANCH_PROBABILITY {
        return Err(Error::EmptyBranch {
            outcome: ancilla_outcome.to_string(),
            probability,
        });
    }
    let norm = probability.sqrt();
    Ok((StateVector::from_real(&v.map(|x| x / norm))?, probability))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub outcome: String,
    pub probability: f64,
    pub reliable: bool,
    /// Absent for empty branches.
    #[serde(skip)]
    pub target: Option<StateVector>,
}

/// Every ancilla outcome of `s` with its theoretical probability and target.
pub fn branches(s: &MeasurementSetting, k: &BellCoefficients) -> Vec<Branch> {
    branch_vectors(s, k)
        .into_iter()
        .map(|(outcome, v)| {
            let probability: f64 = v.iter().map(|x| x * x).sum();
            let target = conditional_target_state(s, k, &outcome).ok().map(|(t, _)| t);
            Branch {
                reliable: probability >= RELIABLE_BRANCH_PROBABILITY,
                outcome,
                probability,
                target,
            }
        })
        .collect()
}

/// Unconditional system state after the measurement: `Σ_b p_b |t_b⟩⟨t_b|`.
pub fn output_target_mixture(s: &MeasurementSetting, k: &BellCoefficients) -> DensityMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    for (_, v) in branch_vectors(s, k) {
        let amps: Vec<_> = v.iter().map(|&x| c(x, 0.0)).collect();
        m = &m + &ComplexMatrix::outer(&amps, &amps);
    }
    let trace = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / trace)).expect("mixture of pure branches is physical")
}

/// Full four-qubit state before the ancillas are read out, written from the
/// Bell coefficients. Concurrence ancillas sit in `|Ψ+⟩` / `|Φ+⟩`.
pub fn symbolic_output_state(s: &MeasurementSetting, k: &BellCoefficients) -> Result<StateVector> {
    let ancilla_ket = |outcome: &str| -> [f64; 4] {
        match s.observable {
            SettingKind::Concurrence2 => match outcome {
                "00" => BellState::PhiPlus.amplitudes(),
                "01" => BellState::PsiPlus.amplitudes(),
                "10" => BellState::PhiMinus.amplitudes(),
                _ => BellState::PsiMinus.amplitudes(),
            },
            _ => {
                let mut e = [0.0; 4];
                e[usize::from_str_radix(outcome, 2).unwrap_or(0)] = 1.0;
                e
            }
        }
    };
    if s.observable == SettingKind::Concurrence1 {
        return Err(invalid("no symbolic four-qubit state for the single-ancilla setting"));
    }
    let mut amps = vec![c(0.0, 0.0); 16];
    for (outcome, v) in branch_vectors(s, k) {
        let anc = ancilla_ket(&outcome);
        for (i, x) in v.iter().enumerate() {
            for (j, y) in anc.iter().enumerate() {
                amps[4 * i + j] += c(x * y, 0.0);
            }
        }
    }
    StateVector::new(amps)
}

/// All ancilla outcomes of a setting, in ascending order.
pub fn ancilla_outcomes(s: &MeasurementSetting) -> Vec<String> {
    bitstrings(s.ancillas().len())
}
