use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use crate::circuits::{Circuit, Gate};
use crate::error::{invalid, Result};
use crate::qmath::StateVector;

/// Input-state angles `(φ, θ, λ)`, each in `[0, 2π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrepParams {
    pub phi: f64,
    pub theta: f64,
    pub lambda: f64,
}

impl PrepParams {
    pub fn new(phi: f64, theta: f64, lambda: f64) -> Result<Self> {
        let slack = 1e-12;
        for (name, x) in [("phi", phi), ("theta", theta), ("lambda", lambda)] {
            if !(-slack..=TAU + slack).contains(&x) {
                return Err(invalid(format!("{name} = {x} outside [0, 2π]")));
            }
        }
        Ok(Self { phi, theta, lambda })
    }
}

/// Real amplitudes of `|χ⟩ = α|Ψ−⟩ + β|Ψ+⟩ + γ|Φ−⟩ + η|Φ+⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub eta: f64,
}

impl BellCoefficients {
    pub fn norm_sqr(&self) -> f64 {
        self.alpha.powi(2) + self.beta.powi(2) + self.gamma.powi(2) + self.eta.powi(2)
    }

    /// Computational-basis amplitudes `(a00, a01, a10, a11)`.
    pub fn amplitudes(&self) -> [f64; 4] {
        let h = FRAC_1_SQRT_2;
        [
            h * (self.eta - self.gamma),
            h * (self.beta - self.alpha),
            h * (self.beta + self.alpha),
            h * (self.eta + self.gamma),
        ]
    }

    pub fn state(&self) -> StateVector {
        StateVector::from_real(&self.amplitudes()).expect("unit norm by construction")
    }

    /// Pure-state concurrence `|α² − β² − γ² + η²|`.
    pub fn concurrence(&self) -> f64 {
        (self.alpha.powi(2) - self.beta.powi(2) - self.gamma.powi(2) + self.eta.powi(2)).abs()
    }
}

pub fn bell_coefficients(p: &PrepParams) -> BellCoefficients {
    let (sp, cp) = (p.phi / 2.0).sin_cos();
    let (st, ct) = (p.theta / 2.0).sin_cos();
    let (sl, cl) = (p.lambda / 2.0).sin_cos();
    let s_tl = (p.theta / 2.0 + p.lambda / 2.0).sin();
    let h = FRAC_1_SQRT_2;
    BellCoefficients {
        alpha: h * (cl * ct * sp - sl * (cp + sp * st)),
        beta: h * (cl * ct * sp + sl * (cp - sp * st)),
        gamma: h * (-cp * cl + sp * s_tl),
        eta: h * (cp * cl + sp * s_tl),
    }
}

/// The four Bell states as computational amplitudes, in the convention
/// `Ψ± = (|10⟩ ± |01⟩)/√2`, `Φ± = (|11⟩ ± |00⟩)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BellState {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellState {
    pub fn amplitudes(&self) -> [f64; 4] {
        let h = FRAC_1_SQRT_2;
        match self {
            BellState::PsiPlus => [0.0, h, h, 0.0],
            BellState::PsiMinus => [0.0, -h, h, 0.0],
            BellState::PhiPlus => [h, 0.0, 0.0, h],
            BellState::PhiMinus => [-h, 0.0, 0.0, h],
        }
    }

    pub fn state(&self) -> StateVector {
        StateVector::from_real(&self.amplitudes()).expect("unit norm by construction")
    }

    pub fn label(&self) -> &'static str {
        match self {
            BellState::PsiPlus => "Psi+",
            BellState::PsiMinus => "Psi-",
            BellState::PhiPlus => "Phi+",
            BellState::PhiMinus => "Phi-",
        }
    }
}

/// `R_y(φ)` on A, `R_y(λ)` on B, then controlled-`R_y(θ)` from A to B.
pub fn prep_circuit(p: &PrepParams) -> Circuit {
    Circuit::new(
        2,
        "prep",
        vec![Gate::ry(0, p.phi), Gate::ry(1, p.lambda), Gate::cry(0, 1, p.theta)],
    )
    .expect("prep circuit wiring is static")
}
