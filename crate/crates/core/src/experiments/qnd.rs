use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::prep::{prep_circuit, PrepParams};
use crate::circuits::{Circuit, Gate, OutcomeCounts, OutcomeDistribution, RotationConvention};
use crate::error::{invalid, Error, Result};
use crate::observables::{ObservableKind, ObservableValue};

/// Wire layout: system qubits A = 0, B = 1; ancillas C = 2, D = 3.
pub const QUBIT_A: usize = 0;
pub const QUBIT_B: usize = 1;
pub const QUBIT_C: usize = 2;
pub const QUBIT_D: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SettingKind {
    VisibilityPair,
    PredictabilityPair,
    /// Four-qubit circuit with a Bell-basis ancilla readout.
    Concurrence2,
    /// Three-qubit circuit with one ancilla.
    Concurrence1,
}

impl SettingKind {
    pub const ALL: [SettingKind; 4] = [
        SettingKind::VisibilityPair,
        SettingKind::PredictabilityPair,
        SettingKind::Concurrence2,
        SettingKind::Concurrence1,
    ];

    pub fn observables(&self) -> &'static [ObservableKind] {
        match self {
            SettingKind::VisibilityPair => &[ObservableKind::VisibilityA, ObservableKind::VisibilityB],
            SettingKind::PredictabilityPair => {
                &[ObservableKind::PredictabilityA, ObservableKind::PredictabilityB]
            }
            SettingKind::Concurrence1 | SettingKind::Concurrence2 => &[ObservableKind::Concurrence],
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SettingKind::VisibilityPair => "visibility",
            SettingKind::PredictabilityPair => "predictability",
            SettingKind::Concurrence2 => "concurrence2",
            SettingKind::Concurrence1 => "concurrence1",
        }
    }
}

impl fmt::Display for SettingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SettingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown measurement setting {s:?}")))
    }
}

/// Rotation vectors of the four-qubit circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetting {
    pub observable: SettingKind,
    pub theta1: [f64; 3],
    pub theta2: [f64; 3],
    pub theta3: [f64; 3],
}

impl MeasurementSetting {
    pub fn new(observable: SettingKind) -> Self {
        let zero = [0.0; 3];
        let (theta1, theta2, theta3) = match observable {
            SettingKind::VisibilityPair => ([0.0, FRAC_PI_2, 0.0], [0.0, -FRAC_PI_2, 0.0], zero),
            SettingKind::PredictabilityPair | SettingKind::Concurrence1 => (zero, zero, zero),
            SettingKind::Concurrence2 => {
                ([FRAC_PI_2, 0.0, 0.0], [-FRAC_PI_2, 0.0, 0.0], [0.0, FRAC_PI_2, 0.0])
            }
        };
        Self {
            observable,
            theta1,
            theta2,
            theta3,
        }
    }

    pub fn visibility() -> Self {
        Self::new(SettingKind::VisibilityPair)
    }

    pub fn predictability() -> Self {
        Self::new(SettingKind::PredictabilityPair)
    }

    pub fn concurrence2() -> Self {
        Self::new(SettingKind::Concurrence2)
    }

    pub fn concurrence1() -> Self {
        Self::new(SettingKind::Concurrence1)
    }

    pub fn num_qubits(&self) -> usize {
        match self.observable {
            SettingKind::Concurrence1 => 3,
            _ => 4,
        }
    }

    pub fn ancillas(&self) -> &'static [usize] {
        match self.observable {
            SettingKind::Concurrence1 => &[QUBIT_C],
            _ => &[QUBIT_C, QUBIT_D],
        }
    }
}

/// Single-ancilla concurrence circuit on wires A, B, C.
pub fn qnd1_circuit() -> Circuit {
    Circuit::new(
        3,
        "qnd1",
        vec![
            Gate::rx(QUBIT_A, FRAC_PI_2),
            Gate::rx(QUBIT_B, FRAC_PI_2),
            Gate::cnot(QUBIT_A, QUBIT_C),
            Gate::cnot(QUBIT_B, QUBIT_C),
            Gate::rx(QUBIT_A, -FRAC_PI_2),
            Gate::rx(QUBIT_B, -FRAC_PI_2),
        ],
    )
    .expect("static wiring")
}

/// Two-ancilla circuit with the half-angle rotation convention.
pub fn qnd2_circuit(s: &MeasurementSetting) -> Result<Circuit> {
    qnd2_circuit_with(s, RotationConvention::HalfAngle)
}

/// Two-ancilla circuit with an explicit rotation convention for `R_θ⃗`.
pub fn qnd2_circuit_with(s: &MeasurementSetting, convention: RotationConvention) -> Result<Circuit> {
    if s.observable == SettingKind::Concurrence1 {
        return Err(invalid("the single-ancilla setting has no two-ancilla circuit"));
    }
    let rot = |q, v| Gate::rot3d(q, v, convention);
    Circuit::new(
        4,
        format!("qnd2-{}", s.observable),
        vec![
            rot(QUBIT_A, s.theta1),
            rot(QUBIT_B, s.theta1),
            rot(QUBIT_C, s.theta3),
            Gate::cnot(QUBIT_C, QUBIT_D),
            Gate::cnot(QUBIT_A, QUBIT_C),
            Gate::cnot(QUBIT_B, QUBIT_D),
            rot(QUBIT_A, s.theta2),
            rot(QUBIT_B, s.theta2),
        ],
    )
}

/// Maps the ancilla Bell basis onto computational outcomes:
/// `00 ↔ Φ+`, `01 ↔ Ψ+`, `10 ↔ Φ−`, `11 ↔ Ψ−`.
pub fn bell_readout_circuit() -> Circuit {
    Circuit::new(4, "bell-readout", vec![Gate::cnot(QUBIT_C, QUBIT_D), Gate::h(QUBIT_C)])
        .expect("static wiring")
}

/// Bell label of a decoded two-ancilla outcome.
pub fn ancilla_bell_label(outcome: &str) -> Option<&'static str> {
    match outcome {
        "00" => Some("Phi+"),
        "01" => Some("Psi+"),
        "10" => Some("Phi-"),
        "11" => Some("Psi-"),
        _ => None,
    }
}

/// The QND circuit followed by whatever readout its estimator needs.
pub fn measurement_circuit(s: &MeasurementSetting) -> Result<Circuit> {
    match s.observable {
        SettingKind::Concurrence1 => Ok(qnd1_circuit()),
        SettingKind::Concurrence2 => qnd2_circuit(s)?.compose(&bell_readout_circuit()),
        _ => qnd2_circuit(s),
    }
}

/// Preparation of `|χ⟩` on A, B followed by [`measurement_circuit`].
pub fn full_circuit(p: &PrepParams, s: &MeasurementSetting) -> Result<Circuit> {
    let qnd = measurement_circuit(s)?;
    prep_circuit(p).widened(qnd.num_qubits())?.compose(&qnd)
}

fn abs_value(kind: ObservableKind, signed: f64) -> ObservableValue {
    ObservableValue {
        kind,
        value: signed.abs().min(1.0),
        signed_raw: Some(signed),
    }
}

/// Estimators from ancilla outcome probabilities.
pub fn estimate_from_distribution(
    s: &MeasurementSetting,
    d: &OutcomeDistribution,
) -> Result<Vec<ObservableValue>> {
    let want = s.ancillas().len();
    if d.num_measured_qubits() != want {
        return Err(invalid(format!(
            "{} setting needs {want} ancilla bits, got {}",
            s.observable,
            d.num_measured_qubits()
        )));
    }
    let p = |k: &str| d.get(k);
    let values = match s.observable {
        SettingKind::Concurrence1 => vec![abs_value(ObservableKind::Concurrence, p("1") - p("0"))],
        SettingKind::Concurrence2 => {
            // Ψ+ carries α² + η², Φ+ carries β² + γ²
            vec![abs_value(ObservableKind::Concurrence, p("01") - p("00"))]
        }
        SettingKind::VisibilityPair | SettingKind::PredictabilityPair => {
            let [ka, kb] = [s.observable.observables()[0], s.observable.observables()[1]];
            vec![
                abs_value(ka, p("00") + p("01") - p("10") - p("11")),
                abs_value(kb, p("00") + p("10") - p("01") - p("11")),
            ]
        }
    };
    Ok(values)
}

/// Estimators from sampled ancilla counts.
pub fn estimate_observable(s: &MeasurementSetting, counts: &OutcomeCounts) -> Result<Vec<ObservableValue>> {
    if counts.shots() == 0 {
        return Err(invalid("cannot estimate from zero shots"));
    }
    estimate_from_distribution(s, &counts.frequencies()?)
}
