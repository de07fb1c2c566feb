//! Browser bindings: exact curves, branch probabilities and sampled noisy
//! sweeps, each returned as a JSON string.

use qnd_core::harness::{
    branch_probability_curves, noise_from_rates, run_sweep, sweep_fits, SweepConfig, SweepObservable,
};
use serde::Serialize;
use std::f64::consts::TAU;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct CurvePoint {
    phi: f64,
    theory: f64,
    qnd: f64,
    tomo_in: f64,
    tomo_out: f64,
}

fn config(observable: &str, theta: Option<f64>, lambda: f64, steps: usize) -> Result<SweepConfig, String> {
    let obs: SweepObservable = observable.parse().map_err(|e| format!("{e}"))?;
    if steps == 0 {
        return Err("steps must be at least 1".into());
    }
    Ok(SweepConfig {
        theta,
        lambda,
        phi_count: steps,
        phi_step: TAU / steps as f64,
        ..SweepConfig::new(obs)
    })
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// NaN `theta` selects the observable's default.
fn opt_theta(theta: f64) -> Option<f64> {
    (!theta.is_nan()).then_some(theta)
}

pub fn exact_curve_json(observable: &str, theta: f64, lambda: f64, steps: usize) -> Result<String, String> {
    let cfg = SweepConfig {
        exact_mode: true,
        ..config(observable, opt_theta(theta), lambda, steps)?
    };
    let rows = run_sweep(&cfg).map_err(|e| e.to_string())?;
    let points: Vec<CurvePoint> = rows
        .iter()
        .map(|r| CurvePoint {
            phi: r.phi,
            theory: r.theory,
            qnd: r.qnd_estimate,
            tomo_in: r.tomo_in,
            tomo_out: r.tomo_out,
        })
        .collect();
    to_json(&points)
}

pub fn branch_curves_json(observable: &str, theta: f64, lambda: f64, steps: usize) -> Result<String, String> {
    let cfg = config(observable, opt_theta(theta), lambda, steps)?;
    to_json(&branch_probability_curves(&cfg).map_err(|e| e.to_string())?)
}

#[derive(Serialize)]
struct NoisySweep {
    records: Vec<qnd_core::analysis::SweepRecord>,
    fits: Vec<qnd_core::analysis::FitResult>,
}

#[allow(clippy::too_many_arguments)]
pub fn noisy_sweep_json(
    observable: &str,
    theta: f64,
    steps: usize,
    shots: u32,
    depol_1q: f64,
    depol_2q: f64,
    readout_flip: f64,
    seed: u32,
) -> Result<String, String> {
    let cfg = SweepConfig {
        shots: shots as u64,
        master_seed: seed as u64,
        noise: noise_from_rates(depol_1q, depol_2q, readout_flip).map_err(|e| e.to_string())?,
        ..config(observable, opt_theta(theta), 0.0, steps)?
    };
    let records = run_sweep(&cfg).map_err(|e| e.to_string())?;
    let fits = sweep_fits(&cfg, &records).map_err(|e| e.to_string())?;
    to_json(&NoisySweep { records, fits })
}

#[wasm_bindgen(js_name = exactCurve)]
pub fn exact_curve(observable: &str, theta: f64, lambda: f64, steps: usize) -> Result<String, JsError> {
    exact_curve_json(observable, theta, lambda, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = branchCurves)]
pub fn branch_curves(observable: &str, theta: f64, lambda: f64, steps: usize) -> Result<String, JsError> {
    branch_curves_json(observable, theta, lambda, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = noisySweep)]
#[allow(clippy::too_many_arguments)]
pub fn noisy_sweep(
    observable: &str,
    theta: f64,
    steps: usize,
    shots: u32,
    depol_1q: f64,
    depol_2q: f64,
    readout_flip: f64,
    seed: u32,
) -> Result<String, JsError> {
    noisy_sweep_json(observable, theta, steps, shots, depol_1q, depol_2q, readout_flip, seed)
        .map_err(|e| JsError::new(&e))
}
