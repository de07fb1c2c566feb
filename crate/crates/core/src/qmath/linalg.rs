use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{ComplexMatrix, DensityMatrix, IDENTITY_TOL, PHYSICAL_TOL};
use crate::error::{invalid, Error, Result};

/// Eigenvalues below `RANK_FLOOR · λ_max` are treated as exact zeros when
/// taking square roots (numerical rank cutoff).
const RANK_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenClip {
    None,
    /// Negative eigenvalues are replaced by zero.
    Psd,
}

/// Eigenvalues in descending order with matching eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigendecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigendecomposition {
    /// `Σ_k f(λ_k) |v_k⟩⟨v_k|`.
    pub fn reassemble(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.values.len();
        let mut out = ComplexMatrix::zeros(d, d);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..d {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..d {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Hermitian eigendecomposition. Rejects inputs whose Hermiticity defect
/// exceeds [`IDENTITY_TOL`]; the Hermitian part is what gets diagonalized.
pub fn eigh(m: &ComplexMatrix) -> Result<Eigendecomposition> {
    let defect = m.hermiticity_defect();
    if defect > IDENTITY_TOL {
        return Err(invalid(format!("matrix is not Hermitian (defect {defect:.3e})")));
    }
    let d = m.rows();
    let h = m.hermitian_part();
    let dm = DMatrix::<Complex64>::from_row_slice(d, d, h.as_slice());
    let eig = SymmetricEigen::try_new(dm, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix::zeros(d, d);
    for (col, &k) in order.iter().enumerate() {
        for i in 0..d {
            vectors[(i, col)] = eig.eigenvectors[(i, k)];
        }
    }
    Ok(Eigendecomposition { values, vectors })
}

/// Real eigenvalues of a Hermitian matrix, sorted descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix, clip: EigenClip) -> Result<Vec<f64>> {
    let mut values = eigh(m)?.values;
    if clip == EigenClip::Psd {
        for v in &mut values {
            *v = v.max(0.0);
        }
    }
    Ok(values)
}

fn rank_cutoff(values: &[f64]) -> f64 {
    RANK_FLOOR * values.first().copied().unwrap_or(0.0).max(0.0)
}

/// Square roots of a descending PSD spectrum with the numerical rank floor applied.
pub(crate) fn floored_sqrt(values: &[f64]) -> Vec<f64> {
    let cutoff = rank_cutoff(values);
    values
        .iter()
        .map(|&l| if l > cutoff { l.sqrt() } else { 0.0 })
        .collect()
}

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Negative tails down to `-PHYSICAL_TOL` are clipped to zero.
pub fn matrix_sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eigh(m)?;
    if let Some(&min) = eig.values.last() {
        if min < -PHYSICAL_TOL {
            return Err(invalid(format!(
                "matrix is not positive semidefinite (eigenvalue {min:.3e})"
            )));
        }
    }
    let cutoff = rank_cutoff(&eig.values);
    Ok(eig.reassemble(|l| if l > cutoff { l.sqrt() } else { 0.0 }))
}

/// Uhlmann fidelity `F = [Tr √(√ρ_th ρ_exp √ρ_th)]²`.
pub fn fidelity(rho_th: &DensityMatrix, rho_exp: &DensityMatrix) -> Result<f64> {
    if rho_th.dim() != rho_exp.dim() {
        return Err(invalid(format!(
            "fidelity of {}-dim and {}-dim states",
            rho_th.dim(),
            rho_exp.dim()
        )));
    }
    let s = matrix_sqrt_psd(rho_th.matrix())?;
    let inner = s.matmul(rho_exp.matrix())?.matmul(&s)?;
    let values = hermitian_eigenvalues(&inner, EigenClip::Psd)?;
    let root_trace: f64 = floored_sqrt(&values).iter().sum();
    Ok(root_trace * root_trace)
}
