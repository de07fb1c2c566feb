//! Two-qubit state tomography by linear inversion with a physical projection.
//!
//! Each of the 16 settings rotates qubit A and qubit B so that one of the
//! local states `H = |0⟩`, `V = |1⟩`, `D = (|0⟩+|1⟩)/√2`, `R = (|0⟩+i|1⟩)/√2`
//! lands on `|0⟩`, then measures both qubits in the computational basis. All
//! four outcomes of every setting enter a least-squares fit of the 16 Pauli
//! coefficients.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::circuits::{
    bitstrings, derive_seed, exact_probabilities, run_noisy, Circuit, Gate, NoiseModel, OutcomeCounts,
    OutcomeDistribution,
};
use crate::error::{invalid, Error, Result};
use crate::observables::{evaluate, ObservableKind, ObservableValue};
use crate::qmath::{
    eigh, pauli_x, pauli_y, pauli_z, tensor_product, ComplexMatrix, DensityMatrix, QuantumState,
};

const SYSTEM: [usize; 2] = [0, 1];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocalBasis {
    H,
    V,
    D,
    R,
}

impl LocalBasis {
    pub const ALL: [LocalBasis; 4] = [LocalBasis::H, LocalBasis::V, LocalBasis::D, LocalBasis::R];

    /// Gates taking this basis state to `|0⟩`.
    pub fn gates(&self, q: usize) -> Vec<Gate> {
        match self {
            LocalBasis::H => vec![],
            LocalBasis::V => vec![Gate::x(q)],
            LocalBasis::D => vec![Gate::ry(q, -FRAC_PI_2)],
            LocalBasis::R => vec![Gate::rx(q, FRAC_PI_2)],
        }
    }

    fn unitary(&self) -> ComplexMatrix {
        self.gates(0)
            .iter()
            .fold(ComplexMatrix::identity(2), |u, g| &g.matrix() * &u)
    }

    fn as_char(&self) -> char {
        match self {
            LocalBasis::H => 'H',
            LocalBasis::V => 'V',
            LocalBasis::D => 'D',
            LocalBasis::R => 'R',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographySetting {
    pub basis_a: LocalBasis,
    pub basis_b: LocalBasis,
    pub label: String,
}

impl TomographySetting {
    pub fn new(basis_a: LocalBasis, basis_b: LocalBasis) -> Self {
        Self {
            basis_a,
            basis_b,
            label: format!("{}{}", basis_a.as_char(), basis_b.as_char()),
        }
    }

    /// Pre-measurement rotation on wires A, B of an `n`-qubit register.
    pub fn pre_rotation(&self, n: usize) -> Result<Circuit> {
        let mut gates = self.basis_a.gates(SYSTEM[0]);
        gates.extend(self.basis_b.gates(SYSTEM[1]));
        Circuit::new(n, format!("tomo-{}", self.label), gates)
    }

    /// The 4×4 local unitary `U_A ⊗ U_B`.
    pub fn unitary(&self) -> ComplexMatrix {
        tensor_product(&self.basis_a.unitary(), &self.basis_b.unitary())
    }

    /// Measurement operators `U† |o⟩⟨o| U` for outcomes `00, 01, 10, 11`.
    pub fn projectors(&self) -> Vec<ComplexMatrix> {
        let u = self.unitary();
        (0..4)
            .map(|o| {
                let row: Vec<_> = (0..4).map(|j| u[(o, j)].conj()).collect();
                ComplexMatrix::outer(&row, &row)
            })
            .collect()
    }
}

/// The 4 × 4 grid of local bases.
pub fn tomography_settings() -> Vec<TomographySetting> {
    LocalBasis::ALL
        .iter()
        .flat_map(|&a| LocalBasis::ALL.iter().map(move |&b| TomographySetting::new(a, b)))
        .collect()
}

fn pauli_products() -> Vec<ComplexMatrix> {
    let singles = [ComplexMatrix::identity(2), pauli_x(), pauli_y(), pauli_z()];
    singles
        .iter()
        .flat_map(|a| singles.iter().map(move |b| tensor_product(a, b)))
        .collect()
}

/// Rows `¼ Tr(P_k M)` for every (setting, outcome) pair where `include` holds.
fn design_rows(
    settings: &[TomographySetting],
    include: impl Fn(usize, usize) -> bool,
) -> Vec<(usize, usize, Vec<f64>)> {
    let paulis = pauli_products();
    let mut rows = Vec::new();
    for (s, setting) in settings.iter().enumerate() {
        for (o, m) in setting.projectors().iter().enumerate() {
            if include(s, o) {
                let row = paulis.iter().map(|p| 0.25 * (p * m).trace().re).collect();
                rows.push((s, o, row));
            }
        }
    }
    rows
}

fn to_matrix(rows: &[(usize, usize, Vec<f64>)]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), 16, |i, j| rows[i].2[j])
}

const RANK_TOL: f64 = 1e-9;

/// Rank of the design matrix using all four outcomes per setting, or only the
/// `00` outcome when `first_outcome_only` is set.
pub fn design_rank(settings: &[TomographySetting], first_outcome_only: bool) -> usize {
    let rows = design_rows(settings, |_, o| !first_outcome_only || o == 0);
    if rows.is_empty() {
        return 0;
    }
    to_matrix(&rows).rank(RANK_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReconstructionMethod {
    Linear,
    LinearProjected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyEstimate {
    /// Hermitian, unit trace, possibly with negative eigenvalues.
    pub raw: ComplexMatrix,
    pub projected: DensityMatrix,
    pub method: ReconstructionMethod,
    pub min_eigenvalue: f64,
    pub settings_used: usize,
}

/// Measures wires A, B (then `extra`) after each setting's pre-rotation and
/// returns exact outcome probabilities. Pre-rotation gates see `noise`;
/// readout flips are folded into the probabilities.
pub fn collect_exact(
    rho: &DensityMatrix,
    extra: &[usize],
    settings: &[TomographySetting],
    noise: &NoiseModel,
) -> Result<Vec<OutcomeDistribution>> {
    let n = rho.num_qubits();
    let measured: Vec<usize> = SYSTEM.iter().chain(extra).copied().collect();
    settings
        .iter()
        .map(|s| {
            let rotated = run_noisy(&s.pre_rotation(n)?, rho, noise)?;
            exact_probabilities(&rotated, &measured)?.with_readout_flip(noise.effective_readout_flip())
        })
        .collect()
}

/// Sampled version of [`collect_exact`]; setting `i` uses seed
/// `derive_seed(seed, [i])`.
pub fn collect(
    rho: &DensityMatrix,
    extra: &[usize],
    settings: &[TomographySetting],
    shots: u64,
    seed: u64,
    noise: &NoiseModel,
) -> Result<Vec<OutcomeCounts>> {
    collect_exact(rho, extra, settings, noise)?
        .iter()
        .enumerate()
        .map(|(i, d)| d.sample(shots, derive_seed(seed, &[i as u64])))
        .collect()
}

/// Least-squares inversion of per-setting two-bit frequencies. Settings with
/// `None` are left out; the remaining design must still have full rank.
pub fn linear_reconstruct(
    settings: &[TomographySetting],
    data: &[Option<OutcomeDistribution>],
) -> Result<TomographyEstimate> {
    if data.len() != settings.len() {
        return Err(invalid(format!("{} data sets for {} settings", data.len(), settings.len())));
    }
    for d in data.iter().flatten() {
        if d.num_measured_qubits() != 2 {
            return Err(invalid("tomography data must be two-bit frequencies"));
        }
    }
    let rows = design_rows(settings, |s, _| data[s].is_some());
    if rows.is_empty() {
        return Err(invalid("no tomography data"));
    }
    let a = to_matrix(&rows);
    let keys = bitstrings(2);
    let b = DVector::from_iterator(
        rows.len(),
        rows.iter().map(|(s, o, _)| data[*s].as_ref().map_or(0.0, |d| d.get(&keys[*o]))),
    );
    let svd = a.svd(true, true);
    if svd.rank(RANK_TOL) < 16 {
        return Err(Error::Numerical("tomography design matrix is rank deficient".into()));
    }
    let x = svd
        .solve(&b, RANK_TOL)
        .map_err(|e| Error::Numerical(e.to_string()))?;

    let mut raw = ComplexMatrix::zeros(4, 4);
    for (xk, p) in x.iter().zip(pauli_products()) {
        raw = &raw + &p.scale_real(0.25 * xk);
    }
    let raw = raw.hermitian_part();
    let trace = raw.trace().re;
    if trace.abs() < 1e-12 {
        return Err(Error::Numerical("reconstructed trace vanishes".into()));
    }
    let raw = raw.scale_real(1.0 / trace);
    let eig = eigh(&raw)?;
    let min_eigenvalue = *eig.values.last().expect("4 eigenvalues");
    let projected = project_psd(&raw)?;
    Ok(TomographyEstimate {
        raw,
        projected,
        method: ReconstructionMethod::LinearProjected,
        min_eigenvalue,
        settings_used: data.iter().filter(|d| d.is_some()).count(),
    })
}

/// [`linear_reconstruct`] from counts; empty records are skipped.
pub fn linear_reconstruct_counts(
    settings: &[TomographySetting],
    counts: &[OutcomeCounts],
) -> Result<TomographyEstimate> {
    let data: Vec<Option<OutcomeDistribution>> = counts
        .iter()
        .map(|c| if c.shots() == 0 { Ok(None) } else { c.frequencies().map(Some) })
        .collect::<Result<_>>()?;
    linear_reconstruct(settings, &data)
}

/// Euclidean projection of `v` onto the probability simplex.
pub fn simplex_projection(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut tau = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|&x| (x - tau).max(0.0)).collect()
}

/// Closest physical state in eigenvalue space: keeps the eigenvectors and
/// projects the spectrum onto the simplex.
pub fn project_psd(raw: &ComplexMatrix) -> Result<DensityMatrix> {
    let mut eig = eigh(raw)?;
    eig.values = simplex_projection(&eig.values);
    let m = eig.reassemble(|l| l);
    let trace = m.trace().re;
    DensityMatrix::new(m.hermitian_part().scale_real(1.0 / trace))
}

/// All five observables on the projected estimate.
pub fn observables_from_estimate(est: &TomographyEstimate) -> Result<Vec<ObservableValue>> {
    ObservableKind::ALL.iter().map(|&k| evaluate(k, &est.projected)).collect()
}

/// Convenience used by tests and the harness: exact-mode reconstruction of a
/// two-qubit state.
pub fn reconstruct_exact(rho: &DensityMatrix) -> Result<TomographyEstimate> {
    if rho.num_qubits() != 2 {
        return Err(invalid("expected a two-qubit state"));
    }
    let settings = tomography_settings();
    let data = collect_exact(rho, &[], &settings, &NoiseModel::noiseless())?;
    linear_reconstruct(&settings, &data.into_iter().map(Some).collect::<Vec<_>>())
}
