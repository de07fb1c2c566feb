use num_complex::Complex64;

use super::{
    hermitian_eigenvalues, tensor_product, ComplexMatrix, EigenClip, CONSTRUCTION_TOL, MAX_QUBITS,
    PSD_FLOOR,
};
use crate::error::{invalid, Result};

/// Anything the Born rule can be applied to.
pub trait QuantumState {
    fn num_qubits(&self) -> usize;

    /// Probability of each computational basis index.
    fn basis_probabilities(&self) -> Vec<f64>;
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if !len.is_power_of_two() || len < 2 {
        return Err(invalid(format!("dimension {len} is not 2^n with n ≥ 1")));
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(invalid(format!("{n} qubits exceeds the {MAX_QUBITS}-qubit limit")));
    }
    Ok(n)
}

/// Normalized pure state of 1–4 qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Requires `Σ|a_i|² = 1` within [`CONSTRUCTION_TOL`].
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_len(amplitudes.len())?;
        let norm2: f64 = amplitudes.iter().map(Complex64::norm_sqr).sum();
        if (norm2 - 1.0).abs() > CONSTRUCTION_TOL {
            return Err(invalid(format!("state norm² is {norm2}, expected 1")));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Rescales to unit norm; rejects the zero vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(invalid("cannot normalize the zero vector"));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Computational basis state `|index⟩` on `num_qubits` qubits.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS || index >= 1 << num_qubits {
            return Err(invalid(format!("no basis state {index} on {num_qubits} qubits")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes: amps,
        })
    }

    /// Basis state from a ket label such as `"0110"` (first character is qubit A).
    pub fn from_bits(bits: &str) -> Result<Self> {
        let index = parse_bits(bits)?;
        Self::basis(bits.len(), index)
    }

    pub(crate) fn from_raw(num_qubits: usize, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << num_qubits);
        Self {
            num_qubits,
            amplitudes,
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(invalid("inner product of states with different dimensions"));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `self ⊗ other`, `self` on the more significant qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.num_qubits + other.num_qubits;
        if n > MAX_QUBITS {
            return Err(invalid(format!("{n} qubits exceeds the {MAX_QUBITS}-qubit limit")));
        }
        let amps = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(Self::from_raw(n, amps))
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_raw(
            self.num_qubits,
            ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        )
    }
}

impl QuantumState for StateVector {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn basis_probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(Complex64::norm_sqr).collect()
    }
}

pub(crate) fn parse_bits(bits: &str) -> Result<usize> {
    if bits.is_empty() {
        return Err(invalid("empty bitstring"));
    }
    bits.chars().try_fold(0usize, |acc, ch| match ch {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(invalid(format!("bitstring {bits:?} contains {ch:?}"))),
    })
}

/// Hermitian, unit-trace, positive semidefinite operator on 1–4 qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity and trace within [`CONSTRUCTION_TOL`] and
    /// eigenvalues above [`PSD_FLOOR`].
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(invalid("density matrix must be square"));
        }
        let num_qubits = qubits_for_len(matrix.rows())?;
        let herm = matrix.hermiticity_defect();
        if herm > CONSTRUCTION_TOL {
            return Err(invalid(format!("not Hermitian (defect {herm:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > CONSTRUCTION_TOL || tr.im.abs() > CONSTRUCTION_TOL {
            return Err(invalid(format!("trace is {tr}, expected 1")));
        }
        let min = hermitian_eigenvalues(&matrix, EigenClip::None)?
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < PSD_FLOOR {
            return Err(invalid(format!("not positive semidefinite (eigenvalue {min:.3e})")));
        }
        Ok(Self { num_qubits, matrix })
    }

    pub(crate) fn from_raw(num_qubits: usize, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), 1 << num_qubits);
        Self { num_qubits, matrix }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(invalid(format!("unsupported qubit count {num_qubits}")));
        }
        let d = 1 << num_qubits;
        Ok(Self::from_raw(
            num_qubits,
            ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
        ))
    }

    /// `(1 - p) ρ + p · I/d`.
    pub fn depolarized(&self, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("mixing weight {p} outside [0, 1]")));
        }
        let mixed = Self::maximally_mixed(self.num_qubits)?;
        Ok(self.mix(&mixed, p))
    }

    /// Convex combination `(1 - w) self + w other`; dimensions must agree.
    pub(crate) fn mix(&self, other: &Self, w: f64) -> Self {
        let m = &self.matrix.scale_real(1.0 - w) + &other.matrix.scale_real(w);
        Self::from_raw(self.num_qubits, m)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation_pure(&self, psi: &StateVector) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(invalid("state and density matrix dimensions differ"));
        }
        let rho_psi = self.matrix.mul_vec(psi.amplitudes())?;
        Ok(psi
            .amplitudes()
            .iter()
            .zip(rho_psi)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .re)
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.num_qubits + other.num_qubits;
        if n > MAX_QUBITS {
            return Err(invalid(format!("{n} qubits exceeds the {MAX_QUBITS}-qubit limit")));
        }
        Ok(Self::from_raw(n, tensor_product(&self.matrix, &other.matrix)))
    }

    /// Reduced state on `keep`; see [`partial_trace`].
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        partial_trace(self, keep)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.matrix.approx_eq(&other.matrix, tol)
    }
}

impl QuantumState for DensityMatrix {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn basis_probabilities(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re.max(0.0)).collect()
    }
}

/// Traces out every qubit not listed in `keep`. The kept qubits retain their
/// relative order (ascending qubit index), whatever order `keep` lists them in.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.num_qubits;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.len() >= n || kept.iter().any(|&q| q >= n) {
        return Err(invalid(format!(
            "keep set {keep:?} must be a nonempty proper subset of {n} qubits"
        )));
    }
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
    let bit = |q: usize| 1usize << (n - 1 - q);
    let spread = |value: usize, qubits: &[usize]| -> usize {
        qubits
            .iter()
            .enumerate()
            .filter(|(k, _)| value >> (qubits.len() - 1 - k) & 1 == 1)
            .map(|(_, &q)| bit(q))
            .sum()
    };

    let dk = 1 << kept.len();
    let dt = 1 << traced.len();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for i in 0..dk {
        let ii = spread(i, &kept);
        for j in 0..dk {
            let jj = spread(j, &kept);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..dt {
                let tt = spread(t, &traced);
                acc += rho.matrix[(ii | tt, jj | tt)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(DensityMatrix::from_raw(kept.len(), out))
}
