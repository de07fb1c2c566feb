//! Error metrics, theory-curve fits and the per-observable criteria table.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::experiments::BellCoefficients;
use crate::observables::concurrence_wootters;

/// One emitted row. Summary rows have no branch; per-branch rows carry the
/// ancilla outcome and only the post-selected columns differ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub phi: f64,
    pub theta: f64,
    pub lambda: f64,
    pub observable: String,
    pub theory: f64,
    pub qnd_estimate: f64,
    pub tomo_in: f64,
    pub tomo_out: f64,
    pub tomo_post: Option<f64>,
    pub fidelity_in: f64,
    pub fidelity_out: f64,
    pub fidelity_post: Option<f64>,
    pub branch: Option<String>,
    pub branch_reliable: Option<bool>,
    pub shots: u64,
    pub seed: u64,
}

impl SweepRecord {
    pub fn is_summary(&self) -> bool {
        self.branch.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    Scale,
    MixedFraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub kind: FitKind,
    pub parameter: f64,
    pub residual_rms: f64,
}

fn check_lengths(a: &[f64], b: &[f64]) -> Result<()> {
    if a.is_empty() || a.len() != b.len() {
        return Err(invalid(format!("need equal nonempty lengths, got {} and {}", a.len(), b.len())));
    }
    Ok(())
}

/// `√((1/N) Σ (theory_i − measured_i)²)`.
pub fn rms_error(measured: &[f64], theory: &[f64]) -> Result<f64> {
    check_lengths(measured, theory)?;
    let sum: f64 = measured.iter().zip(theory).map(|(m, t)| (t - m).powi(2)).sum();
    Ok((sum / measured.len() as f64).sqrt())
}

/// Least-squares `s` in `measured ≈ s · theory`.
pub fn fit_scale(measured: &[f64], theory: &[f64]) -> Result<FitResult> {
    check_lengths(measured, theory)?;
    let tt: f64 = theory.iter().map(|t| t * t).sum();
    if tt == 0.0 {
        return Err(invalid("theory curve is identically zero"));
    }
    let s = measured.iter().zip(theory).map(|(m, t)| m * t).sum::<f64>() / tt;
    let scaled: Vec<f64> = theory.iter().map(|t| s * t).collect();
    Ok(FitResult {
        kind: FitKind::Scale,
        parameter: s,
        residual_rms: rms_error(measured, &scaled)?,
    })
}

/// Concurrence of `(1 − p)|χ⟩⟨χ| + p I/4`.
pub fn mixed_concurrence(k: &BellCoefficients, p: f64) -> Result<f64> {
    concurrence_wootters(&k.state().to_density().depolarized(p)?)
}

/// Fits the fully mixed fraction `p ∈ [0, 1]` that best explains measured
/// concurrences. Coarse grid scan, then golden-section refinement to 1e-4.
pub fn fit_mixed_fraction(measured: &[f64], coeffs: &[BellCoefficients]) -> Result<FitResult> {
    if measured.is_empty() || measured.len() != coeffs.len() {
        return Err(invalid("need one coefficient set per measured point"));
    }
    let loss = |p: f64| -> Result<f64> {
        let mut sum = 0.0;
        for (m, k) in measured.iter().zip(coeffs) {
            sum += (mixed_concurrence(k, p)? - m).powi(2);
        }
        Ok(sum)
    };

    let steps = 100;
    let mut best = (0.0, f64::INFINITY);
    for i in 0..=steps {
        let p = i as f64 / steps as f64;
        let l = loss(p)?;
        if l < best.1 {
            best = (p, l);
        }
    }
    let h = 1.0 / steps as f64;
    let (mut a, mut b) = ((best.0 - h).max(0.0), (best.0 + h).min(1.0));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (loss(x1)?, loss(x2)?);
    while b - a > 1e-5 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = loss(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = loss(x2)?;
        }
    }
    let mut p = (a + b) / 2.0;
    let mut lp = loss(p)?;
    // a flat loss (all points clipped to zero) keeps the grid optimum
    if best.1 < lp {
        p = best.0;
        lp = best.1;
    }
    Ok(FitResult {
        kind: FitKind::MixedFraction,
        parameter: p,
        residual_rms: (lp / measured.len() as f64).sqrt(),
    })
}

fn mean(v: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (n, s) = v.into_iter().fold((0usize, 0.0), |(n, s), x| (n + 1, s + x));
    (n > 0).then(|| s / n as f64)
}

/// Per-observable row of the criteria table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableCriteria {
    pub observable: String,
    pub points: usize,
    /// RMS error of the input-state tomography.
    pub e_input: f64,
    /// RMS error of the QND estimate.
    pub e_qnd: f64,
    /// RMS error of the output-state tomography.
    pub e_output: f64,
    pub e_output_minus_qnd: f64,
    /// Mean observable of reliable post-selected branches.
    pub mean_post_observable: Option<f64>,
    pub mean_fidelity_in: f64,
    pub mean_fidelity_out: f64,
    pub mean_fidelity_post: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaReport {
    pub per_observable: Vec<ObservableCriteria>,
    pub average_e_input: f64,
    pub average_e_qnd: f64,
    pub average_e_output: f64,
    /// How per-observable errors are combined into the averages.
    pub weighting: String,
}

/// Builds the criteria table from sweep records (summary and branch rows).
/// Observables appear in sorted order; averages weight each observable equally.
pub fn criteria_summary(records: &[SweepRecord]) -> Result<CriteriaReport> {
    let mut groups: BTreeMap<&str, Vec<&SweepRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.observable.as_str()).or_default().push(r);
    }
    if groups.is_empty() {
        return Err(invalid("no records"));
    }
    let mut per_observable = Vec::new();
    for (name, rows) in groups {
        let summary: Vec<&SweepRecord> = rows.iter().copied().filter(|r| r.is_summary()).collect();
        if summary.is_empty() {
            return Err(invalid(format!("observable {name} has no summary rows")));
        }
        let column = |f: fn(&SweepRecord) -> f64| -> Result<Vec<f64>> {
            let v: Vec<f64> = summary.iter().map(|r| f(r)).collect();
            if v.iter().any(|x| !x.is_finite()) {
                return Err(invalid(format!("observable {name} has missing values")));
            }
            Ok(v)
        };
        let theory = column(|r| r.theory)?;
        let e_input = rms_error(&column(|r| r.tomo_in)?, &theory)?;
        let e_qnd = rms_error(&column(|r| r.qnd_estimate)?, &theory)?;
        let e_output = rms_error(&column(|r| r.tomo_out)?, &theory)?;
        // Without branch rows the summary rows already hold the reliable-branch mean.
        let has_branches = rows.iter().any(|r| !r.is_summary());
        let reliable = || {
            rows.iter().filter(move |r| {
                if has_branches {
                    r.branch_reliable == Some(true)
                } else {
                    r.is_summary()
                }
            })
        };
        per_observable.push(ObservableCriteria {
            observable: name.to_string(),
            points: summary.len(),
            e_input,
            e_qnd,
            e_output,
            e_output_minus_qnd: e_output - e_qnd,
            mean_post_observable: mean(reliable().filter_map(|r| r.tomo_post)),
            mean_fidelity_in: mean(summary.iter().map(|r| r.fidelity_in)).unwrap_or(f64::NAN),
            mean_fidelity_out: mean(summary.iter().map(|r| r.fidelity_out)).unwrap_or(f64::NAN),
            mean_fidelity_post: mean(reliable().filter_map(|r| r.fidelity_post)),
        });
    }
    let avg = |f: fn(&ObservableCriteria) -> f64| mean(per_observable.iter().map(f)).unwrap_or(f64::NAN);
    Ok(CriteriaReport {
        average_e_input: avg(|c| c.e_input),
        average_e_qnd: avg(|c| c.e_qnd),
        average_e_output: avg(|c| c.e_output),
        weighting: "equal weight per observable".into(),
        per_observable,
    })
}
