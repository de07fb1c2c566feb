use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::config::{SweepConfig, SweepObservable};
use crate::analysis::{criteria_summary, fit_mixed_fraction, fit_scale, CriteriaReport, FitResult, SweepRecord};
use crate::circuits::{
    derive_seed, exact_probabilities, run_noisy, NoiseModel, OutcomeCounts, OutcomeDistribution,
};
use crate::error::{Error, Result};
use crate::experiments::{
    bell_coefficients, branches, estimate_from_distribution, estimate_observable, full_circuit,
    output_target_mixture, prep_circuit, MeasurementSetting, PrepParams,
};
use crate::observables::{evaluate, evaluate_pure, ObservableKind};
use crate::qmath::{fidelity, DensityMatrix, StateVector};
use crate::tomography::{collect, collect_exact, linear_reconstruct, tomography_settings, TomographyEstimate};

const STAGE_INPUT: u64 = 0;
const STAGE_QND: u64 = 1;
const STAGE_OUTPUT: u64 = 2;

#[cfg(feature = "parallel")]
fn map_points<T: Send>(n: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_points<T: Send>(n: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..n).map(f).collect()
}

/// Per-setting tomography data on wires A, B followed by any ancillas.
enum TomoData {
    Exact(Vec<OutcomeDistribution>),
    Sampled(Vec<OutcomeCounts>),
}

impl TomoData {
    fn acquire(rho: &DensityMatrix, extra: &[usize], cfg: &SweepConfig, seed: u64) -> Result<Self> {
        let settings = tomography_settings();
        Ok(if cfg.exact_mode {
            TomoData::Exact(collect_exact(rho, extra, &settings, &cfg.noise)?)
        } else {
            TomoData::Sampled(collect(rho, extra, &settings, cfg.shots, seed, &cfg.noise)?)
        })
    }

    fn system_marginal(&self) -> Result<Vec<Option<OutcomeDistribution>>> {
        match self {
            TomoData::Exact(d) => d.iter().map(|x| marginal_ab(x).map(Some)).collect(),
            TomoData::Sampled(c) => c.iter().map(|x| x.marginal(&[0, 1])?.frequencies().map(Some)).collect(),
        }
    }

    /// Conditional system data for one ancilla outcome; settings where the
    /// branch is empty are dropped.
    fn postselected(&self, positions: &[usize], outcome: &str) -> Result<Vec<Option<OutcomeDistribution>>> {
        let keep_nonempty = |r: Result<OutcomeDistribution>| match r {
            Ok(d) => Ok(Some(d)),
            Err(Error::EmptyBranch { .. }) => Ok(None),
            Err(e) => Err(e),
        };
        match self {
            TomoData::Exact(d) => d
                .iter()
                .map(|x| keep_nonempty(x.postselect(positions, outcome).map(|(c, _)| c)))
                .collect(),
            TomoData::Sampled(c) => c
                .iter()
                .map(|x| {
                    keep_nonempty(
                        crate::circuits::postselect_counts(x, positions, outcome).and_then(|s| s.frequencies()),
                    )
                })
                .collect(),
        }
    }
}

fn marginal_ab(d: &OutcomeDistribution) -> Result<OutcomeDistribution> {
    if d.num_measured_qubits() == 2 {
        Ok(d.clone())
    } else {
        d.marginal(&[0, 1])
    }
}

fn reconstruct(data: Vec<Option<OutcomeDistribution>>) -> Result<TomographyEstimate> {
    linear_reconstruct(&tomography_settings(), &data)
}

fn observable_on(kind: ObservableKind, est: &TomographyEstimate) -> Result<f64> {
    Ok(evaluate(kind, &est.projected)?.value)
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Runs the three-stage protocol at one point: input tomography, QND
/// estimate, output tomography with post-selection on each ancilla branch.
/// Returns the summary row followed by branch rows when `cfg.branches` is set.
pub fn run_point(cfg: &SweepConfig, index: u64, params: PrepParams) -> Result<Vec<SweepRecord>> {
    let obs = cfg.observable;
    let setting = obs.setting();
    let kind = obs.kind();
    let k = bell_coefficients(&params);
    let chi = k.state();
    let seed = derive_seed(cfg.master_seed, &[index]);
    let theory = evaluate_pure(kind, &chi)?;

    // input state
    let rho_chi = run_noisy(&prep_circuit(&params), &StateVector::from_bits("00")?.to_density(), &cfg.noise)?;
    let tomo_in_est = reconstruct(TomoData::acquire(&rho_chi, &[], cfg, derive_seed(seed, &[STAGE_INPUT]))?.system_marginal()?)?;
    let tomo_in = observable_on(kind, &tomo_in_est)?;
    let fidelity_in = fidelity(&chi.to_density(), &tomo_in_est.projected)?;

    // QND readout
    let n = setting.num_qubits();
    let rho_full = run_noisy(&full_circuit(&params, &setting)?, &StateVector::basis(n, 0)?.to_density(), &cfg.noise)?;
    let ancilla_probs = exact_probabilities(&rho_full, setting.ancillas())?
        .with_readout_flip(cfg.noise.effective_readout_flip())?;
    let estimates = if cfg.exact_mode {
        estimate_from_distribution(&setting, &ancilla_probs)?
    } else {
        let counts = ancilla_probs.sample(cfg.shots, derive_seed(seed, &[STAGE_QND]))?;
        estimate_observable(&setting, &counts)?
    };
    let qnd_estimate = estimates
        .iter()
        .find(|v| v.kind == kind)
        .map(|v| v.value)
        .expect("setting reports its own observables");

    // output state, unconditional and post-selected
    let out_data = TomoData::acquire(&rho_full, setting.ancillas(), cfg, derive_seed(seed, &[STAGE_OUTPUT]))?;
    let tomo_out_est = reconstruct(out_data.system_marginal()?)?;
    let tomo_out = observable_on(kind, &tomo_out_est)?;
    let fidelity_out = fidelity(&output_target_mixture(&setting, &k), &tomo_out_est.projected)?;

    let positions: Vec<usize> = (2..2 + setting.ancillas().len()).collect();
    let mut branch_rows = Vec::new();
    for b in branches(&setting, &k) {
        let Some(target) = b.target else { continue };
        let post = match reconstruct(out_data.postselected(&positions, &b.outcome)?) {
            Ok(est) => Some((observable_on(kind, &est)?, fidelity(&target.to_density(), &est.projected)?)),
            Err(Error::InvalidArgument(_) | Error::Numerical(_)) => None,
            Err(e) => return Err(e),
        };
        branch_rows.push((b.outcome, b.reliable, post));
    }
    let reliable_post: Vec<(f64, f64)> = branch_rows
        .iter()
        .filter(|(_, reliable, _)| *reliable)
        .filter_map(|(_, _, p)| *p)
        .collect();

    let summary = SweepRecord {
        phi: params.phi,
        theta: params.theta,
        lambda: params.lambda,
        observable: obs.as_str().to_string(),
        theory,
        qnd_estimate,
        tomo_in,
        tomo_out,
        tomo_post: mean(&reliable_post.iter().map(|p| p.0).collect::<Vec<_>>()),
        fidelity_in,
        fidelity_out,
        fidelity_post: mean(&reliable_post.iter().map(|p| p.1).collect::<Vec<_>>()),
        branch: None,
        branch_reliable: None,
        shots: cfg.recorded_shots(),
        seed,
    };
    let mut rows = Vec::with_capacity(1 + branch_rows.len());
    if cfg.branches {
        for (outcome, reliable, post) in branch_rows {
            rows.push(SweepRecord {
                tomo_post: post.map(|p| p.0),
                fidelity_post: post.map(|p| p.1),
                branch: Some(outcome),
                branch_reliable: Some(reliable),
                ..summary.clone()
            });
        }
    }
    rows.insert(0, summary);
    Ok(rows)
}

/// Runs every φ point of `cfg`. Row order is by φ, summary row first.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let phis = cfg.phis();
    let theta = cfg.theta();
    let rows = map_points(phis.len(), |i| {
        let params = PrepParams::new(phis[i], theta, cfg.lambda)?;
        run_point(cfg, i as u64, params)
    })?;
    Ok(rows.concat())
}

/// Repeats the protocol `repetitions` times on the Bell input `φ = π/2, θ = π`
/// with one derived seed stream per repetition.
pub fn repeat_fixed_state(cfg: &SweepConfig, repetitions: usize) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    if repetitions == 0 {
        return Err(crate::error::invalid("repetitions must be at least 1"));
    }
    let params = PrepParams::new(FRAC_PI_2, PI, 0.0)?;
    let rows = map_points(repetitions, |r| run_point(cfg, r as u64, params))?;
    Ok(rows.concat())
}

/// Summary rows only.
pub fn summaries(records: &[SweepRecord]) -> Vec<&SweepRecord> {
    records.iter().filter(|r| r.is_summary()).collect()
}

/// Scale fit of the QND estimates, plus the mixed-fraction fit for concurrence.
pub fn sweep_fits(cfg: &SweepConfig, records: &[SweepRecord]) -> Result<Vec<FitResult>> {
    let rows = summaries(records);
    let measured: Vec<f64> = rows.iter().map(|r| r.qnd_estimate).collect();
    let theory: Vec<f64> = rows.iter().map(|r| r.theory).collect();
    let mut fits = Vec::new();
    if theory.iter().any(|t| *t != 0.0) {
        fits.push(fit_scale(&measured, &theory)?);
    }
    if matches!(cfg.observable, SweepObservable::C1 | SweepObservable::C2) {
        let coeffs: Vec<_> = rows
            .iter()
            .map(|r| PrepParams::new(r.phi, r.theta, r.lambda).map(|p| bell_coefficients(&p)))
            .collect::<Result<_>>()?;
        fits.push(fit_mixed_fraction(&measured, &coeffs)?);
    }
    Ok(fits)
}

/// Sweeps every observable at its default θ and tabulates the criteria.
/// Observable `i` uses master seed `derive_seed(base.master_seed, [1000 + i])`.
pub fn run_full_protocol(base: &SweepConfig) -> Result<(Vec<SweepRecord>, CriteriaReport)> {
    let mut records = Vec::new();
    for (i, obs) in SweepObservable::ALL.into_iter().enumerate() {
        let cfg = SweepConfig {
            observable: obs,
            theta: None,
            master_seed: derive_seed(base.master_seed, &[1000 + i as u64]),
            ..base.clone()
        };
        records.extend(run_sweep(&cfg)?);
    }
    let report = criteria_summary(&records)?;
    Ok((records, report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchCurvePoint {
    pub phi: f64,
    /// `(outcome, probability, reliable)` for every ancilla outcome.
    pub branches: Vec<(String, f64, bool)>,
}

/// Theoretical branch probabilities along the φ grid of `cfg`.
pub fn branch_probability_curves(cfg: &SweepConfig) -> Result<Vec<BranchCurvePoint>> {
    cfg.validate()?;
    let setting: MeasurementSetting = cfg.observable.setting();
    cfg.phis()
        .into_iter()
        .map(|phi| {
            let k = bell_coefficients(&PrepParams::new(phi, cfg.theta(), cfg.lambda)?);
            Ok(BranchCurvePoint {
                phi,
                branches: branches(&setting, &k)
                    .into_iter()
                    .map(|b| (b.outcome, b.probability, b.reliable))
                    .collect(),
            })
        })
        .collect()
}

/// Noise model with every channel set, enabled iff any is nonzero.
pub fn noise_from_rates(depol_1q: f64, depol_2q: f64, readout_flip: f64) -> Result<NoiseModel> {
    let mut noise = NoiseModel::new(depol_1q, depol_2q, readout_flip)?;
    noise.enabled = depol_1q > 0.0 || depol_2q > 0.0 || readout_flip > 0.0;
    Ok(noise)
}
