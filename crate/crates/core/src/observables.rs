//! Visibility, predictability and concurrence computed directly from states.
//!
//! Index convention: the predictability is `|ρ_11 − ρ_00|` with 0-based
//! indices, i.e. the population difference between `|1⟩` and `|0⟩`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::qmath::linalg::floored_sqrt;
use crate::qmath::{
    hermitian_eigenvalues, matrix_sqrt_psd, spin_flip, DensityMatrix, EigenClip, QuantumState,
    StateVector, PHYSICAL_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ObservableKind {
    #[serde(rename = "V_A")]
    VisibilityA,
    #[serde(rename = "V_B")]
    VisibilityB,
    #[serde(rename = "P_A")]
    PredictabilityA,
    #[serde(rename = "P_B")]
    PredictabilityB,
    #[serde(rename = "C")]
    Concurrence,
}

impl ObservableKind {
    pub const ALL: [ObservableKind; 5] = [
        ObservableKind::VisibilityA,
        ObservableKind::VisibilityB,
        ObservableKind::PredictabilityA,
        ObservableKind::PredictabilityB,
        ObservableKind::Concurrence,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ObservableKind::VisibilityA => "V_A",
            ObservableKind::VisibilityB => "V_B",
            ObservableKind::PredictabilityA => "P_A",
            ObservableKind::PredictabilityB => "P_B",
            ObservableKind::Concurrence => "C",
        }
    }

    /// Subsystem index for single-qubit quantities.
    pub fn subsystem(&self) -> Option<usize> {
        match self {
            ObservableKind::VisibilityA | ObservableKind::PredictabilityA => Some(0),
            ObservableKind::VisibilityB | ObservableKind::PredictabilityB => Some(1),
            ObservableKind::Concurrence => None,
        }
    }
}

impl fmt::Display for ObservableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ObservableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown observable {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableValue {
    pub kind: ObservableKind,
    pub value: f64,
    /// Value before the absolute value / clipping, when one exists.
    pub signed_raw: Option<f64>,
}

fn check_single(rho: &DensityMatrix) -> Result<()> {
    if rho.num_qubits() != 1 {
        return Err(invalid(format!("expected a 1-qubit state, got {} qubits", rho.num_qubits())));
    }
    Ok(())
}

fn check_pair(n: usize) -> Result<()> {
    if n != 2 {
        return Err(invalid(format!("expected a 2-qubit state, got {n} qubits")));
    }
    Ok(())
}

/// `Σ_{i≠j} |ρ_ij| = 2|ρ_01|`.
pub fn visibility(rho: &DensityMatrix) -> Result<f64> {
    check_single(rho)?;
    Ok((2.0 * rho.entry(0, 1).norm()).min(1.0))
}

/// `|ρ_11 − ρ_00|`.
pub fn predictability(rho: &DensityMatrix) -> Result<f64> {
    check_single(rho)?;
    Ok(signed_predictability(rho).abs().min(1.0))
}

fn signed_predictability(rho: &DensityMatrix) -> f64 {
    rho.entry(0, 0).re - rho.entry(1, 1).re
}

/// Eigenvalues `r_i` (descending) of `R(ρ) = ρ Σ ρ* Σ`, computed from the
/// Hermitian similar form `√ρ Σ ρ* Σ √ρ`.
pub fn wootters_spectrum(rho: &DensityMatrix) -> Result<Vec<f64>> {
    check_pair(rho.num_qubits())?;
    let trace = rho.matrix().trace();
    if (trace.re - 1.0).abs() > PHYSICAL_TOL || trace.im.abs() > PHYSICAL_TOL {
        return Err(invalid(format!("trace {trace} is not 1")));
    }
    let root = matrix_sqrt_psd(rho.matrix())?;
    let sigma = spin_flip();
    let flipped = &(&sigma * &rho.matrix().conj()) * &sigma;
    let form = &(&root * &flipped) * &root;
    hermitian_eigenvalues(&form.hermitian_part(), EigenClip::Psd)
}

/// `max(0, √r₁ − √r₂ − √r₃ − √r₄)`, clipped to `[0, 1]`.
pub fn concurrence_wootters(rho: &DensityMatrix) -> Result<f64> {
    Ok(signed_concurrence(rho)?.clamp(0.0, 1.0))
}

fn signed_concurrence(rho: &DensityMatrix) -> Result<f64> {
    let roots = floored_sqrt(&wootters_spectrum(rho)?);
    Ok(roots[0] - roots[1..].iter().sum::<f64>())
}

/// `2|ad − bc|` for amplitudes `(a, b, c, d)`.
pub fn concurrence_pure(psi: &StateVector) -> Result<f64> {
    check_pair(psi.num_qubits())?;
    let a = psi.amplitudes();
    Ok((2.0 * (a[0] * a[3] - a[1] * a[2]).norm()).min(1.0))
}

/// `C² + V_k² + P_k² − 1` for subsystem `k` (0 = A, 1 = B).
pub fn triality_defect(psi: &StateVector, k: usize) -> Result<f64> {
    check_pair(psi.num_qubits())?;
    if k > 1 {
        return Err(invalid(format!("subsystem {k} out of range")));
    }
    let marginal = psi.to_density().partial_trace(&[k])?;
    let c = concurrence_pure(psi)?;
    let v = visibility(&marginal)?;
    let p = predictability(&marginal)?;
    Ok(c * c + v * v + p * p - 1.0)
}

/// Evaluates `kind` on a 2-qubit state.
pub fn evaluate(kind: ObservableKind, rho: &DensityMatrix) -> Result<ObservableValue> {
    check_pair(rho.num_qubits())?;
    let (value, signed_raw) = match kind.subsystem() {
        Some(k) => {
            let marginal = rho.partial_trace(&[k])?;
            match kind {
                ObservableKind::VisibilityA | ObservableKind::VisibilityB => {
                    (visibility(&marginal)?, Some(2.0 * marginal.entry(0, 1).re))
                }
                _ => (predictability(&marginal)?, Some(signed_predictability(&marginal))),
            }
        }
        None => {
            let raw = signed_concurrence(rho)?;
            (raw.clamp(0.0, 1.0), Some(raw))
        }
    };
    Ok(ObservableValue {
        kind,
        value,
        signed_raw,
    })
}

/// Evaluates `kind` on a pure 2-qubit state using the closed forms.
pub fn evaluate_pure(kind: ObservableKind, psi: &StateVector) -> Result<f64> {
    match kind {
        ObservableKind::Concurrence => concurrence_pure(psi),
        _ => Ok(evaluate(kind, &psi.to_density())?.value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{c, tensor_product, ComplexMatrix};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn phi_plus() -> StateVector {
        StateVector::from_real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]).unwrap()
    }

    fn werner(p: f64) -> DensityMatrix {
        phi_plus().to_density().depolarized(1.0 - p).unwrap()
    }

    /// Brute-force spectrum of the non-Hermitian `R = ρ Σ ρ* Σ`. For Werner
    /// states `R` is diagonal in the Bell basis, so `⟨b|R|b⟩` are its eigenvalues.
    fn werner_r_spectrum(p: f64) -> Vec<f64> {
        let rho = werner(p);
        let s = spin_flip();
        let r = &(&(rho.matrix() * &s) * &rho.matrix().conj()) * &s;
        let h = FRAC_1_SQRT_2;
        let bell = [
            [h, 0.0, 0.0, h],
            [h, 0.0, 0.0, -h],
            [0.0, h, h, 0.0],
            [0.0, h, -h, 0.0],
        ];
        let mut out: Vec<f64> = bell
            .iter()
            .map(|b| {
                let v: Vec<_> = b.iter().map(|&x| c(x, 0.0)).collect();
                let rv = r.mul_vec(&v).unwrap();
                // b is an eigenvector, so ⟨b|R|b⟩ is the eigenvalue
                v.iter().zip(&rv).map(|(x, y)| x.conj() * y).sum::<num_complex::Complex64>().re
            })
            .collect();
        out.sort_by(|a, b| b.total_cmp(a));
        out
    }

    #[test]
    fn single_qubit_values() {
        let plus = StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap().to_density();
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        let zero = StateVector::from_bits("0").unwrap().to_density();
        assert!((visibility(&plus).unwrap() - 1.0).abs() < 1e-15);
        assert!(visibility(&mixed).unwrap().abs() < 1e-15);
        assert!((predictability(&zero).unwrap() - 1.0).abs() < 1e-15);
        assert!(predictability(&plus).unwrap().abs() < 1e-15);
        assert!(visibility(&phi_plus().to_density()).is_err());
    }

    #[test]
    fn product_marginal_visibility_is_sin_phi() {
        for phi in [0.3, 1.2, 2.5, 4.0] {
            let (s, co) = (phi / 2.0f64).sin_cos();
            let psi = StateVector::from_real(&[co, 0.0, s, 0.0]).unwrap();
            let rho_a = psi.to_density().partial_trace(&[0]).unwrap();
            // explicit 2x2 entries: ρ_01 = cos(φ/2) sin(φ/2)
            assert!((visibility(&rho_a).unwrap() - 2.0 * (co * s).abs()).abs() < 1e-12);
            assert!((visibility(&rho_a).unwrap() - f64::sin(phi).abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn entangled_marginal_predictability_is_cos_phi() {
        for phi in [0.3, 1.2, 2.5, 4.0] {
            let (s, co) = (phi / 2.0f64).sin_cos();
            let psi = StateVector::from_real(&[co, 0.0, 0.0, s]).unwrap();
            let rho_b = psi.to_density().partial_trace(&[1]).unwrap();
            assert!((predictability(&rho_b).unwrap() - (co * co - s * s).abs()).abs() < 1e-12);
            assert!((predictability(&rho_b).unwrap() - f64::cos(phi).abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn concurrence_of_bell_and_product() {
        assert!((concurrence_wootters(&phi_plus().to_density()).unwrap() - 1.0).abs() < 1e-10);
        let prod = StateVector::from_real(&[0.6, 0.8])
            .unwrap()
            .tensor(&StateVector::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]).unwrap())
            .unwrap();
        assert!(concurrence_wootters(&prod.to_density()).unwrap() < 1e-10);
        assert!(concurrence_pure(&StateVector::from_bits("10").unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn werner_concurrence_against_closed_form() {
        for p in [0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
            let brute = werner_r_spectrum(p);
            let roots: Vec<f64> = brute.iter().map(|r| r.max(0.0).sqrt()).collect();
            let brute_c = (roots[0] - roots[1] - roots[2] - roots[3]).max(0.0);
            let closed = ((3.0 * p - 1.0) / 2.0).max(0.0);
            let got = concurrence_wootters(&werner(p)).unwrap();
            assert!((brute_c - closed).abs() < 1e-10, "p={p}");
            assert!((got - closed).abs() < 1e-8, "p={p}: {got} vs {closed}");
        }
        assert!((concurrence_wootters(&werner(0.8)).unwrap() - 0.7).abs() < 1e-8);
    }

    #[test]
    fn pure_closed_form_matches_wootters_on_entangled_family() {
        for phi in [0.0, 0.4, PI / 2.0, 2.0, PI, 5.5] {
            let (s, co) = (phi / 2.0f64).sin_cos();
            let psi = StateVector::from_real(&[co, 0.0, 0.0, s]).unwrap();
            let pure = concurrence_pure(&psi).unwrap();
            assert!((pure - f64::sin(phi).abs()).abs() < 1e-12);
            assert!((concurrence_wootters(&psi.to_density()).unwrap() - pure).abs() < 1e-8);
        }
    }

    #[test]
    fn triality_squared_form_holds_linear_form_does_not() {
        assert!(triality_defect(&phi_plus(), 0).unwrap().abs() < 1e-12);
        assert!(triality_defect(&StateVector::from_bits("00").unwrap(), 1).unwrap().abs() < 1e-12);
        let (s, co) = (PI / 8.0).sin_cos();
        let psi = StateVector::from_real(&[co, 0.0, 0.0, s]).unwrap();
        let marginal = psi.to_density().partial_trace(&[0]).unwrap();
        let linear = concurrence_pure(&psi).unwrap()
            + visibility(&marginal).unwrap()
            + predictability(&marginal).unwrap();
        assert!((linear - 1.0).abs() > 0.1);
        assert!(triality_defect(&psi, 0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn evaluate_reports_signed_values() {
        let psi = StateVector::from_bits("11").unwrap();
        let v = evaluate(ObservableKind::PredictabilityA, &psi.to_density()).unwrap();
        assert_eq!(v.value, 1.0);
        assert_eq!(v.signed_raw, Some(-1.0));
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let cv = evaluate(ObservableKind::Concurrence, &mixed).unwrap();
        assert_eq!(cv.value, 0.0);
        // four equal roots of 1/4
        assert!((cv.signed_raw.unwrap() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn local_unitary_leaves_concurrence() {
        let rho = werner(0.7);
        let ua = ComplexMatrix::from_rows(&[
            vec![c(0.6, 0.0), c(0.0, 0.8)],
            vec![c(0.0, 0.8), c(0.6, 0.0)],
        ])
        .unwrap();
        let ub = crate::circuits::GateKind::RotY(1.1).matrix();
        let u = tensor_product(&ua, &ub);
        let rotated = DensityMatrix::new(u.conjugate(rho.matrix()).unwrap()).unwrap();
        let a = concurrence_wootters(&rho).unwrap();
        let b = concurrence_wootters(&rotated).unwrap();
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ObservableKind::ALL {
            assert_eq!(k.as_str().parse::<ObservableKind>().unwrap(), k);
        }
        assert!("Q".parse::<ObservableKind>().is_err());
    }
}
