use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::qmath::{c, pauli_x, pauli_y, pauli_z, ComplexMatrix};

/// How a rotation vector `θ⃗` maps to a unitary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RotationConvention {
    /// `exp(-i σ⃗·θ⃗ / 2)`, the usual gate convention.
    HalfAngle,
    /// `exp(-i σ⃗·θ⃗)`, no factor one half.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    /// `exp(-i t X / 2)`.
    RotX(f64),
    /// `exp(-i t Y / 2)`.
    RotY(f64),
    PauliX,
    Hadamard,
    Cnot,
    /// `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ R_y(t)`.
    ControlledRotY(f64),
    /// Rotation about a unit `axis` by `angle`; `θ⃗ = angle · axis`.
    Rot3D {
        axis: [f64; 3],
        angle: f64,
        convention: RotationConvention,
    },
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Cnot | GateKind::ControlledRotY(_) => 2,
            _ => 1,
        }
    }

    /// Unitary on the gate's own qubits; for two-qubit gates the control is
    /// the more significant index.
    pub fn matrix(&self) -> ComplexMatrix {
        match *self {
            GateKind::RotX(t) => axis_rotation([1.0, 0.0, 0.0], t / 2.0),
            GateKind::RotY(t) => ry(t),
            GateKind::PauliX => pauli_x(),
            GateKind::Hadamard => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                ComplexMatrix::from_real_rows(&[vec![h, h], vec![h, -h]]).unwrap()
            }
            GateKind::Cnot => ComplexMatrix::from_real_rows(&[
                vec![1.0, 0.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, 0.0],
                vec![0.0, 0.0, 0.0, 1.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ])
            .unwrap(),
            GateKind::ControlledRotY(t) => {
                let r = ry(t);
                let mut m = ComplexMatrix::identity(4);
                for i in 0..2 {
                    for j in 0..2 {
                        m[(2 + i, 2 + j)] = r[(i, j)];
                    }
                }
                m
            }
            GateKind::Rot3D {
                axis,
                angle,
                convention,
            } => {
                let half = match convention {
                    RotationConvention::HalfAngle => angle / 2.0,
                    RotationConvention::AsPrinted => angle,
                };
                axis_rotation(axis, half)
            }
        }
    }
}

fn ry(t: f64) -> ComplexMatrix {
    let (s, co) = (t / 2.0).sin_cos();
    ComplexMatrix::from_real_rows(&[vec![co, -s], vec![s, co]]).unwrap()
}

/// `exp(-i a n̂·σ⃗) = cos a · I - i sin a · n̂·σ⃗`.
fn axis_rotation(axis: [f64; 3], a: f64) -> ComplexMatrix {
    let (s, co) = a.sin_cos();
    let n_sigma = &(&pauli_x().scale_real(axis[0]) + &pauli_y().scale_real(axis[1]))
        + &pauli_z().scale_real(axis[2]);
    &ComplexMatrix::identity(2).scale_real(co) + &n_sigma.scale(c(0.0, -s))
}

/// A gate bound to qubit wires (control first for controlled gates).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
}

impl Gate {
    fn single(kind: GateKind, q: usize) -> Self {
        Self {
            kind,
            targets: vec![q],
        }
    }

    pub fn rx(q: usize, angle: f64) -> Self {
        Self::single(GateKind::RotX(angle), q)
    }

    pub fn ry(q: usize, angle: f64) -> Self {
        Self::single(GateKind::RotY(angle), q)
    }

    pub fn x(q: usize) -> Self {
        Self::single(GateKind::PauliX, q)
    }

    pub fn h(q: usize) -> Self {
        Self::single(GateKind::Hadamard, q)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self {
            kind: GateKind::Cnot,
            targets: vec![control, target],
        }
    }

    pub fn cry(control: usize, target: usize, angle: f64) -> Self {
        Self {
            kind: GateKind::ControlledRotY(angle),
            targets: vec![control, target],
        }
    }

    /// Rotation by the vector `theta` (radians); the zero vector is the identity.
    pub fn rot3d(q: usize, theta: [f64; 3], convention: RotationConvention) -> Self {
        let angle = theta.iter().map(|x| x * x).sum::<f64>().sqrt();
        let axis = if angle > 0.0 {
            theta.map(|x| x / angle)
        } else {
            [0.0, 0.0, 1.0]
        };
        Self::single(
            GateKind::Rot3D {
                axis,
                angle,
                convention,
            },
            q,
        )
    }

    pub fn matrix(&self) -> ComplexMatrix {
        self.kind.matrix()
    }

    pub fn arity(&self) -> usize {
        self.kind.arity()
    }
}

/// Ordered gate list on `num_qubits` wires.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    label: String,
}

impl Circuit {
    pub fn new(num_qubits: usize, label: impl Into<String>, gates: Vec<Gate>) -> Result<Self> {
        if num_qubits == 0 || num_qubits > crate::qmath::MAX_QUBITS {
            return Err(invalid(format!("unsupported circuit width {num_qubits}")));
        }
        let circuit = Self {
            num_qubits,
            gates: Vec::new(),
            label: label.into(),
        };
        circuit.then(gates)
    }

    /// Appends gates after validating wires.
    pub fn then(mut self, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        for gate in gates {
            if gate.targets.len() != gate.arity() {
                return Err(invalid(format!(
                    "{:?} needs {} wires, got {:?}",
                    gate.kind,
                    gate.arity(),
                    gate.targets
                )));
            }
            if let Some(&q) = gate.targets.iter().find(|&&q| q >= self.num_qubits) {
                return Err(invalid(format!(
                    "wire {q} out of range for a {}-qubit circuit",
                    self.num_qubits
                )));
            }
            if gate.arity() == 2 && gate.targets[0] == gate.targets[1] {
                return Err(invalid("control and target must differ"));
            }
            self.gates.push(gate);
        }
        Ok(self)
    }

    /// `self` followed by `other`; widths must agree.
    pub fn compose(&self, other: &Circuit) -> Result<Self> {
        if self.num_qubits != other.num_qubits {
            return Err(invalid("cannot compose circuits of different widths"));
        }
        let label = format!("{} ; {}", self.label, other.label);
        Self::new(self.num_qubits, label, self.gates.clone())?.then(other.gates.clone())
    }

    /// Same gates on a wider register; new wires are idle.
    pub fn widened(&self, num_qubits: usize) -> Result<Self> {
        if num_qubits < self.num_qubits {
            return Err(invalid("cannot narrow a circuit"));
        }
        Self::new(num_qubits, self.label.clone(), self.gates.clone())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Full `2^n × 2^n` unitary.
    pub fn unitary(&self) -> ComplexMatrix {
        let d = 1 << self.num_qubits;
        let mut u = ComplexMatrix::identity(d);
        for gate in &self.gates {
            let g = super::exec::embed(&gate.matrix(), &gate.targets, self.num_qubits);
            u = &g * &u;
        }
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn every_gate_kind_is_unitary() {
        let kinds = [
            GateKind::RotX(0.7),
            GateKind::RotY(-2.1),
            GateKind::PauliX,
            GateKind::Hadamard,
            GateKind::Cnot,
            GateKind::ControlledRotY(1.3),
            GateKind::Rot3D {
                axis: [0.6, 0.0, 0.8],
                angle: 0.9,
                convention: RotationConvention::HalfAngle,
            },
            GateKind::Rot3D {
                axis: [0.0, 1.0, 0.0],
                angle: PI / 2.0,
                convention: RotationConvention::AsPrinted,
            },
        ];
        for k in kinds {
            assert!(k.matrix().unitarity_defect() < 1e-12, "{k:?}");
        }
    }

    #[test]
    fn half_angle_rot3d_about_y_matches_ry() {
        let r = Gate::rot3d(0, [0.0, PI / 2.0, 0.0], RotationConvention::HalfAngle).matrix();
        assert!(r.approx_eq(&GateKind::RotY(PI / 2.0).matrix(), 1e-14));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let printed = ComplexMatrix::from_real_rows(&[vec![h, -h], vec![h, h]]).unwrap();
        assert!(r.approx_eq(&printed, 1e-14));
    }

    #[test]
    fn as_printed_rot3d_is_a_half_turn() {
        // exp(-i (π/2) σ_y) = -i σ_y
        let r = Gate::rot3d(0, [0.0, PI / 2.0, 0.0], RotationConvention::AsPrinted).matrix();
        assert!(r.approx_eq(&pauli_y().scale(c(0.0, -1.0)), 1e-14));
    }

    #[test]
    fn zero_rotation_is_identity() {
        let r = Gate::rot3d(0, [0.0; 3], RotationConvention::HalfAngle).matrix();
        assert!(r.approx_eq(&ComplexMatrix::identity(2), 0.0));
    }

    #[test]
    fn circuit_validates_wires() {
        assert!(Circuit::new(2, "bad", vec![Gate::x(2)]).is_err());
        assert!(Circuit::new(2, "bad", vec![Gate::cnot(1, 1)]).is_err());
        let bad_arity = Gate {
            kind: GateKind::Cnot,
            targets: vec![0],
        };
        assert!(Circuit::new(2, "bad", vec![bad_arity]).is_err());
        assert!(Circuit::new(5, "wide", vec![]).is_err());
    }
}
