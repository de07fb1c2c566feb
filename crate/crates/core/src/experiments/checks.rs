use std::f64::consts::{FRAC_PI_4, TAU};

use serde::{Deserialize, Serialize};

use super::branches::{branches, symbolic_output_state};
use super::prep::{bell_coefficients, PrepParams};
use super::qnd::{
    estimate_from_distribution, full_circuit, measurement_circuit, qnd2_circuit_with,
    MeasurementSetting, SettingKind,
};
use crate::circuits::{exact_probabilities, postselect, run_noisy, run_pure, NoiseModel, RotationConvention};
use crate::error::Result;
use crate::qmath::{tensor_all, ComplexMatrix, DensityMatrix, StateVector, IDENTITY_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub points: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl IdentityReport {
    fn from_deviations(devs: impl IntoIterator<Item = f64>, tolerance: f64) -> Self {
        let (points, max_deviation) = devs
            .into_iter()
            .fold((0, 0.0f64), |(n, m), d| (n + 1, m.max(d)));
        Self {
            points,
            max_deviation,
            tolerance,
            passed: max_deviation <= tolerance,
        }
    }
}

/// `n × n` uniform grid of `(φ, θ)` in `[0, 2π)` with `λ = 0`.
pub fn angle_grid(n: usize) -> Vec<PrepParams> {
    let step = TAU / n as f64;
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| PrepParams {
            phi: i as f64 * step,
            theta: j as f64 * step,
            lambda: 0.0,
        })
        .collect()
}

fn closed_form_rotation() -> ComplexMatrix {
    let (s, c) = FRAC_PI_4.sin_cos();
    ComplexMatrix::from_real_rows(&[vec![c, -s], vec![s, c]]).expect("static")
}

/// The 8×8 CNOT with control on the first and target on the last of three qubits.
fn cnot_first_to_third() -> ComplexMatrix {
    let mut rows = vec![vec![0.0; 8]; 8];
    for (i, row) in rows.iter_mut().enumerate() {
        let j = if i >= 4 { i ^ 1 } else { i };
        row[j] = 1.0;
    }
    ComplexMatrix::from_real_rows(&rows).expect("static")
}

/// `U_V = (R⁻¹⊗R⁻¹⊗1⊗1)(1⊗CNOT₁→₃)(CNOT₁→₃⊗1)(R⊗R⊗1⊗1)` from explicit matrices.
pub fn visibility_unitary_closed_form() -> ComplexMatrix {
    let r = closed_form_rotation();
    let r_inv = r.adjoint();
    let i2 = ComplexMatrix::identity(2);
    let cnot = cnot_first_to_third();
    let pre = tensor_all(&[r.clone(), r, i2.clone(), i2.clone()]);
    let first = tensor_all(&[cnot.clone(), i2.clone()]);
    let second = tensor_all(&[i2.clone(), cnot]);
    let post = tensor_all(&[r_inv.clone(), r_inv, i2.clone(), i2]);
    &(&(&post * &second) * &first) * &pre
}

/// Checks `U_V ρ_i U_V† = |ψ⟩⟨ψ|` with `ψ` the symbolic visibility output state,
/// for each point in `grid`.
pub fn visibility_identity_check_on(grid: &[PrepParams]) -> Result<IdentityReport> {
    let u = visibility_unitary_closed_form();
    let ancillas = StateVector::from_bits("00")?.to_density();
    let setting = MeasurementSetting::visibility();
    let mut devs = Vec::with_capacity(grid.len());
    for p in grid {
        let k = bell_coefficients(p);
        let rho_i = k.state().to_density().tensor(&ancillas)?;
        let evolved = u.conjugate(rho_i.matrix())?;
        let expected = symbolic_output_state(&setting, &k)?.to_density();
        devs.push(evolved.max_abs_diff(expected.matrix()));
    }
    Ok(IdentityReport::from_deviations(devs, IDENTITY_TOL))
}

/// The operator identity on a 25-point grid plus fixed off-grid points.
pub fn visibility_identity_check() -> Result<IdentityReport> {
    let mut grid = angle_grid(5);
    grid.extend([
        PrepParams { phi: 0.37, theta: 5.11, lambda: 1.9 },
        PrepParams { phi: 4.2, theta: 0.8, lambda: 3.3 },
    ]);
    visibility_identity_check_on(&grid)
}

/// Largest `1 − |⟨simulated|symbolic⟩|²` of the two-ancilla circuits under
/// `convention`, over the grid and all three two-ancilla settings.
pub fn rotation_convention_defect(convention: RotationConvention, grid: &[PrepParams]) -> Result<f64> {
    let mut worst = 0.0f64;
    for kind in [SettingKind::VisibilityPair, SettingKind::PredictabilityPair, SettingKind::Concurrence2] {
        let s = MeasurementSetting::new(kind);
        let circuit = qnd2_circuit_with(&s, convention)?;
        for p in grid {
            let k = bell_coefficients(p);
            let input = k.state().tensor(&StateVector::from_bits("00")?)?;
            let sim = run_pure(&circuit, &input)?;
            let sym = symbolic_output_state(&s, &k)?;
            worst = worst.max(1.0 - sim.overlap(&sym)?);
        }
    }
    Ok(worst)
}

fn fresh_ancillas(s: &MeasurementSetting) -> Result<DensityMatrix> {
    Ok(StateVector::basis(s.num_qubits() - 2, 0)?.to_density())
}

fn estimate_on(s: &MeasurementSetting, system: &DensityMatrix) -> Result<Vec<f64>> {
    let input = system.tensor(&fresh_ancillas(s)?)?;
    let out = run_noisy(&measurement_circuit(s)?, &input, &NoiseModel::noiseless())?;
    let d = exact_probabilities(&out, s.ancillas())?;
    Ok(estimate_from_distribution(s, &d)?.iter().map(|v| v.value).collect())
}

/// Estimates from two back-to-back noiseless measurements of the same system
/// qubits, the second with fresh ancillas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatedMeasurement {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    /// `(outcome, first-pass value on the branch target, repeat on that branch)`.
    pub per_branch: Vec<(String, Vec<f64>, Vec<f64>)>,
}

impl RepeatedMeasurement {
    pub fn max_deviation(&self) -> f64 {
        let pairs = self
            .first
            .iter()
            .zip(&self.second)
            .chain(self.per_branch.iter().flat_map(|(_, a, b)| a.iter().zip(b)));
        pairs.map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

pub fn repeated_measurement(p: &PrepParams, s: &MeasurementSetting) -> Result<RepeatedMeasurement> {
    let n = s.num_qubits();
    let out = run_pure(&full_circuit(p, s)?, &StateVector::basis(n, 0)?)?;
    let first_d = exact_probabilities(&out, s.ancillas())?;
    let first: Vec<f64> = estimate_from_distribution(s, &first_d)?.iter().map(|v| v.value).collect();
    let system = out.to_density().partial_trace(&[0, 1])?;
    let second = estimate_on(s, &system)?;

    let k = bell_coefficients(p);
    let mut per_branch = Vec::new();
    for b in branches(s, &k).into_iter().filter(|b| b.target.is_some()) {
        let (cond, _) = postselect(&out, s.ancillas(), &b.outcome)?;
        let once = estimate_on(s, &cond.to_density())?;
        let cond_after = {
            let input = cond.tensor(&StateVector::basis(n - 2, 0)?)?;
            run_pure(&measurement_circuit(s)?, &input)?.to_density().partial_trace(&[0, 1])?
        };
        let twice = estimate_on(s, &cond_after)?;
        per_branch.push((b.outcome, once, twice));
    }
    Ok(RepeatedMeasurement {
        first,
        second,
        per_branch,
    })
}
