use serde::{Deserialize, Serialize};

use super::gate::Circuit;
use crate::error::{invalid, Result};
use crate::qmath::{c, ComplexMatrix, DensityMatrix, QuantumState, StateVector};

/// Synthetic gate and readout noise. Depolarizing acts on each gate's own
/// support right after the gate; readout flips act on sampled bits only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseModel {
    pub depol_1q: f64,
    pub depol_2q: f64,
    pub readout_flip: f64,
    pub enabled: bool,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::noiseless()
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            depol_1q: 0.0,
            depol_2q: 0.0,
            readout_flip: 0.0,
            enabled: false,
        }
    }

    pub fn new(depol_1q: f64, depol_2q: f64, readout_flip: f64) -> Result<Self> {
        let model = Self {
            depol_1q,
            depol_2q,
            readout_flip,
            enabled: true,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("depol_1q", self.depol_1q),
            ("depol_2q", self.depol_2q),
            ("readout_flip", self.readout_flip),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(format!("{name} = {p} is not a probability")));
            }
        }
        Ok(())
    }

    /// Depolarizing strength for a gate of the given arity (zero when disabled).
    pub fn gate_error(&self, arity: usize) -> f64 {
        match (self.enabled, arity) {
            (false, _) => 0.0,
            (true, 1) => self.depol_1q,
            (true, _) => self.depol_2q,
        }
    }

    pub fn effective_readout_flip(&self) -> f64 {
        if self.enabled {
            self.readout_flip
        } else {
            0.0
        }
    }

    pub fn is_trivial(&self) -> bool {
        !self.enabled || (self.depol_1q == 0.0 && self.depol_2q == 0.0 && self.readout_flip == 0.0)
    }
}

/// Bit mask (in full-register index space) of qubit `q` on `n` wires.
#[inline]
pub(crate) fn bit(q: usize, n: usize) -> usize {
    1 << (n - 1 - q)
}

/// Lifts a gate matrix acting on `targets` (first target most significant)
/// to the full `n`-qubit register.
pub(crate) fn embed(u: &ComplexMatrix, targets: &[usize], n: usize) -> ComplexMatrix {
    let d = 1 << n;
    let masks: Vec<usize> = targets.iter().map(|&q| bit(q, n)).collect();
    let support: usize = masks.iter().sum();
    let local = |i: usize| {
        masks
            .iter()
            .fold(0, |acc, &m| (acc << 1) | usize::from(i & m != 0))
    };
    let mut out = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            if i & !support == j & !support {
                out[(i, j)] = u[(local(i), local(j))];
            }
        }
    }
    out
}

fn check_width(circuit: &Circuit, n: usize) -> Result<()> {
    if circuit.num_qubits() != n {
        return Err(invalid(format!(
            "{}-qubit circuit applied to a {n}-qubit state",
            circuit.num_qubits()
        )));
    }
    Ok(())
}

pub fn run_pure(circuit: &Circuit, initial: &StateVector) -> Result<StateVector> {
    let n = initial.num_qubits();
    check_width(circuit, n)?;
    let mut amps = initial.amplitudes().to_vec();
    for gate in circuit.gates() {
        amps = embed(&gate.matrix(), &gate.targets, n).mul_vec(&amps)?;
    }
    Ok(StateVector::from_raw(n, amps))
}

/// `ρ → (1-p) ρ + p (I/2^k on `support` ⊗ Tr_support ρ)`.
pub(crate) fn depolarize_support(rho: &ComplexMatrix, support: &[usize], n: usize, p: f64) -> ComplexMatrix {
    if p == 0.0 {
        return rho.clone();
    }
    let d = 1 << n;
    let mask: usize = support.iter().map(|&q| bit(q, n)).sum();
    let sub_states: Vec<usize> = (0..d).filter(|s| s & !mask == 0).collect();
    let weight = 1.0 / sub_states.len() as f64;
    let mut out = rho.scale_real(1.0 - p);
    for i in 0..d {
        for j in 0..d {
            if i & mask != j & mask {
                continue;
            }
            let (ib, jb) = (i & !mask, j & !mask);
            let reduced: num_complex::Complex64 =
                sub_states.iter().map(|&s| rho[(ib | s, jb | s)]).sum();
            out[(i, j)] += reduced * c(p * weight, 0.0);
        }
    }
    out
}

pub fn run_noisy(circuit: &Circuit, initial: &DensityMatrix, noise: &NoiseModel) -> Result<DensityMatrix> {
    noise.validate()?;
    let n = initial.num_qubits();
    check_width(circuit, n)?;
    let mut rho = initial.matrix().clone();
    for gate in circuit.gates() {
        let u = embed(&gate.matrix(), &gate.targets, n);
        rho = u.conjugate(&rho)?;
        rho = depolarize_support(&rho, &gate.targets, n, noise.gate_error(gate.arity()));
    }
    Ok(DensityMatrix::from_raw(n, rho.hermitian_part()))
}
