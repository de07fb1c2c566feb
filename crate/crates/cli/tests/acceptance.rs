//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use qnd_core::analysis::{fit_mixed_fraction, CriteriaReport};
use qnd_core::circuits::{exact_probabilities, postselect, run_noisy, run_pure, NoiseModel, RotationConvention};
use qnd_core::experiments::{
    angle_grid, visibility_identity_check_on, bell_coefficients, branches, estimate_from_distribution, full_circuit,
    measurement_circuit, rotation_convention_defect, BellState, MeasurementSetting, PrepParams, SettingKind,
};
use qnd_core::harness::{noise_from_rates, run_full_protocol, run_sweep, SweepConfig, SweepObservable};
use qnd_core::observables::{concurrence_wootters, evaluate, triality_defect};
use qnd_core::qmath::{c, fidelity, DensityMatrix, StateVector};
use qnd_core::tomography::{collect, linear_reconstruct_counts, reconstruct_exact, tomography_settings};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXACT_CURVE_TOL: f64 = 1e-9;
const ESTIMATOR_TOL: f64 = 1e-8;
const NONDEMOLITION_TOL: f64 = 1e-8;
const BRANCH_TOL: f64 = 1e-10;
const IDENTITY_TOL: f64 = 1e-8;
const TRIALITY_TOL: f64 = 1e-8;
const ROUND_TRIP_TOL: f64 = 1e-8;
const SHOT_FIDELITY: f64 = 0.98;
const SHOT_FIDELITY_QUANTILE: f64 = 0.95;
const SHOT_RMS: f64 = 0.03;
const WERNER_FIT_TOL: f64 = 1e-2;
const WERNER_TOL: f64 = 1e-8;
const SHOTS: u64 = 5000;
const SEEDS: u64 = 20;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn settings() -> [MeasurementSetting; 4] {
    [
        MeasurementSetting::new(SettingKind::VisibilityPair),
        MeasurementSetting::new(SettingKind::PredictabilityPair),
        MeasurementSetting::new(SettingKind::Concurrence1),
        MeasurementSetting::new(SettingKind::Concurrence2),
    ]
}

fn grid16() -> Vec<PrepParams> {
    let step = 2.0 * PI / 16.0;
    (0..16)
        .flat_map(|i| (0..16).map(move |j| PrepParams::new(i as f64 * step, j as f64 * step, 0.0).unwrap()))
        .collect()
}

fn estimates(p: &PrepParams, s: &MeasurementSetting) -> Vec<f64> {
    let out = run_pure(&full_circuit(p, s).unwrap(), &StateVector::basis(s.num_qubits(), 0).unwrap()).unwrap();
    let dist = exact_probabilities(&out, s.ancillas()).unwrap();
    estimate_from_distribution(s, &dist).unwrap().iter().map(|v| v.value).collect()
}

fn exact_theory_curves() -> Outcome {
    let start = Instant::now();
    let closed_form = |obs: SweepObservable, phi: f64| match obs {
        SweepObservable::C1 | SweepObservable::C2 | SweepObservable::VA => phi.sin().abs(),
        SweepObservable::VB => (phi / 2.0).sin().powi(2),
        SweepObservable::PA | SweepObservable::PB => phi.cos().abs(),
    };
    let mut worst: f64 = 0.0;
    for obs in SweepObservable::ALL {
        let rows = run_sweep(&SweepConfig {
            exact_mode: true,
            ..SweepConfig::new(obs)
        })
        .map_err(|e| e.to_string())?;
        if rows.len() != 64 {
            return Err(format!("{obs}: {} rows", rows.len()));
        }
        for r in rows {
            worst = worst.max((r.qnd_estimate - closed_form(obs, r.phi)).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= EXACT_CURVE_TOL && secs < 60.0,
        format!("max deviation {worst:.2e} (tol {EXACT_CURVE_TOL:.0e}), {secs:.1} s"),
    )
}

fn estimator_equivalence() -> Outcome {
    let (c1, c2) = (MeasurementSetting::new(SettingKind::Concurrence1), MeasurementSetting::new(SettingKind::Concurrence2));
    let mut worst: f64 = 0.0;
    for p in grid16() {
        let wootters = concurrence_wootters(&bell_coefficients(&p).state().to_density()).unwrap();
        let e1 = estimates(&p, &c1)[0];
        let e2 = estimates(&p, &c2)[0];
        worst = worst.max((e1 - wootters).abs()).max((e2 - wootters).abs()).max((e1 - e2).abs());
    }
    check(worst <= ESTIMATOR_TOL, format!("256 grid points, max disagreement {worst:.2e}"))
}

fn nondemolition() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in grid16() {
        for s in settings() {
            let n = s.num_qubits();
            let first = estimates(&p, &s);
            let out = run_pure(&full_circuit(&p, &s).unwrap(), &StateVector::basis(n, 0).unwrap()).unwrap();
            // second measurement: same system qubits, fresh ancillas
            let system = out.to_density().partial_trace(&[0, 1]).unwrap();
            let fresh = StateVector::basis(n - 2, 0).unwrap().to_density();
            let rho = run_noisy(
                &measurement_circuit(&s).unwrap(),
                &system.tensor(&fresh).unwrap(),
                &NoiseModel::noiseless(),
            )
            .unwrap();
            let dist = exact_probabilities(&rho, s.ancillas()).unwrap();
            let second = estimate_from_distribution(&s, &dist).unwrap();
            for (a, b) in first.iter().zip(&second) {
                worst = worst.max((a - b.value).abs());
            }
        }
    }
    check(worst <= NONDEMOLITION_TOL, format!("4 settings x 256 points, max change {worst:.2e}"))
}

fn state_preparation() -> Outcome {
    let (mut worst_obs, mut worst_fid, mut count): (f64, f64, usize) = (0.0, 0.0, 0);
    for p in grid16() {
        let k = bell_coefficients(&p);
        for s in settings() {
            let out = run_pure(&full_circuit(&p, &s).unwrap(), &StateVector::basis(s.num_qubits(), 0).unwrap()).unwrap();
            for b in branches(&s, &k).into_iter().filter(|b| b.reliable) {
                let target = b.target.as_ref().ok_or("reliable branch without target")?;
                let (cond, _) = postselect(&out, s.ancillas(), &b.outcome).unwrap();
                let rho = cond.to_density();
                for &kind in s.observable.observables() {
                    worst_obs = worst_obs.max((evaluate(kind, &rho).unwrap().value - 1.0).abs());
                }
                worst_fid = worst_fid.max((fidelity(&target.to_density(), &rho).unwrap() - 1.0).abs());
                count += 1;
            }
        }
    }
    check(
        worst_obs <= BRANCH_TOL && worst_fid <= BRANCH_TOL && count > 0,
        format!("{count} reliable branches, |O-1| <= {worst_obs:.2e}, |F-1| <= {worst_fid:.2e}"),
    )
}

fn operator_identity() -> Outcome {
    let grid = angle_grid(5);
    let report = visibility_identity_check_on(&grid).map_err(|e| e.to_string())?;
    let half = rotation_convention_defect(RotationConvention::HalfAngle, &grid).unwrap();
    let printed = rotation_convention_defect(RotationConvention::AsPrinted, &grid).unwrap();
    check(
        report.points == 25 && report.max_deviation <= IDENTITY_TOL && half <= IDENTITY_TOL,
        format!(
            "25 points, max deviation {:.2e}; passing convention HalfAngle exp(-i sigma.theta/2) (defect {half:.1e}), AsPrinted defect {printed:.2}",
            report.max_deviation
        ),
    )
}

fn triality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let v: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let psi = StateVector::from_real(&v.iter().map(|x| x / n).collect::<Vec<_>>()).unwrap();
        worst = worst.max(triality_defect(&psi, 0).unwrap()).max(triality_defect(&psi, 1).unwrap());
    }
    check(worst <= TRIALITY_TOL, format!("1000 states, both subsystems, max defect {worst:.2e}"))
}

fn random_mixed_state(rng: &mut ChaCha8Rng) -> DensityMatrix {
    // reduced state of a random 4-qubit pure state has full rank generically
    let amps = (0..16).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    StateVector::normalized(amps).unwrap().to_density().partial_trace(&[0, 1]).unwrap()
}

fn tomography_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let rho = random_mixed_state(&mut rng);
        let est = reconstruct_exact(&rho).map_err(|e| e.to_string())?;
        worst = worst.max(est.projected.matrix().max_abs_diff(rho.matrix()));
    }
    let bell = BellState::PhiPlus.state().to_density();
    let settings = tomography_settings();
    let good = (0..100u64)
        .filter(|&seed| {
            let counts = collect(&bell, &[], &settings, SHOTS, seed, &NoiseModel::noiseless()).unwrap();
            let est = linear_reconstruct_counts(&settings, &counts).unwrap();
            fidelity(&bell, &est.projected).unwrap() >= SHOT_FIDELITY
        })
        .count();
    check(
        worst <= ROUND_TRIP_TOL && good as f64 >= SHOT_FIDELITY_QUANTILE * 100.0,
        format!("exact max error {worst:.2e}; {good}/100 seeds with fidelity >= {SHOT_FIDELITY}"),
    )
}

fn shot_noise_accuracy() -> Outcome {
    let base = SweepConfig {
        shots: SHOTS,
        master_seed: 1,
        ..SweepConfig::default()
    };
    let (_, report) = run_full_protocol(&base).map_err(|e| e.to_string())?;
    let worst = report
        .per_observable
        .iter()
        .flat_map(|c| [c.e_input, c.e_qnd, c.e_output])
        .fold(0.0, f64::max);
    check(
        report.per_observable.len() == 6 && worst <= SHOT_RMS,
        format!("6 observables x 64 points, max RMS error {worst:.4} (bound {SHOT_RMS})"),
    )
}

fn noisy_reports(depol_2q: f64) -> Vec<(CriteriaReport, f64, f64)> {
    (0..SEEDS)
        .map(|seed| {
            let base = SweepConfig {
                shots: SHOTS,
                master_seed: seed,
                phi_count: 16,
                phi_step: PI / 8.0,
                noise: noise_from_rates(depol_2q / 10.0, depol_2q, 0.0).unwrap(),
                ..SweepConfig::default()
            };
            let (rows, report) = run_full_protocol(&base).unwrap();
            let c2: Vec<_> = rows.iter().filter(|r| r.observable == "C2" && r.is_summary()).collect();
            let out = c2.iter().map(|r| r.fidelity_out).sum::<f64>() / c2.len() as f64;
            let post = c2.iter().filter_map(|r| r.fidelity_post).sum::<f64>() / c2.len() as f64;
            (report, out, post)
        })
        .collect()
}

fn werner_fit(p: f64) -> f64 {
    let settings = tomography_settings();
    let coeffs: Vec<_> = (0..16)
        .map(|i| bell_coefficients(&PrepParams::new(i as f64 * PI / 8.0, PI, 0.0).unwrap()))
        .collect();
    let fits: Vec<f64> = (0..SEEDS)
        .map(|seed| {
            let measured: Vec<f64> = coeffs
                .iter()
                .enumerate()
                .map(|(i, k)| {
                    let rho = k.state().to_density().depolarized(p).unwrap();
                    let counts = collect(&rho, &[], &settings, SHOTS, seed * 100 + i as u64, &NoiseModel::noiseless()).unwrap();
                    let est = linear_reconstruct_counts(&settings, &counts).unwrap();
                    concurrence_wootters(&est.projected).unwrap()
                })
                .collect();
            fit_mixed_fraction(&measured, &coeffs).unwrap().parameter
        })
        .collect();
    fits.iter().sum::<f64>() / fits.len() as f64
}

fn hardware_phenomenology() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for d2 in [0.02, 0.05, 0.1] {
        let reports = noisy_reports(d2);
        let n = reports.len() as f64;
        let e_in = reports.iter().map(|r| r.0.average_e_input).sum::<f64>() / n;
        let e_qnd = reports.iter().map(|r| r.0.average_e_qnd).sum::<f64>() / n;
        let e_out = reports.iter().map(|r| r.0.average_e_output).sum::<f64>() / n;
        let f_out = reports.iter().map(|r| r.1).sum::<f64>() / n;
        let f_post = reports.iter().map(|r| r.2).sum::<f64>() / n;
        let a = e_in <= e_qnd && e_qnd <= e_out;
        let b = f_post >= f_out;
        ok &= a && b;
        lines.push(format!(
            "d2={d2}: (a) E {e_in:.4}<={e_qnd:.4}<={e_out:.4} {}; (b) F_post {f_post:.4}>=F_out {f_out:.4} {}",
            if a { "ok" } else { "FAIL" },
            if b { "ok" } else { "FAIL" }
        ));
    }
    for p in [0.1, 0.3, 0.5] {
        let fitted = werner_fit(p);
        let c = (fitted - p).abs() <= WERNER_FIT_TOL;
        ok &= c;
        lines.push(format!("(c) Werner p={p}: mean fit {fitted:.4} {}", if c { "ok" } else { "FAIL" }));
    }
    check(ok, format!("{SEEDS} seeds; {}", lines.join("; ")))
}

fn werner_concurrence() -> Outcome {
    let bell = BellState::PhiPlus.state().to_density();
    let mut worst: f64 = 0.0;
    for p in [0.0, 0.25, 1.0 / 3.0, 0.5, 0.8, 1.0] {
        // (1-p) I/4 + p |Φ+⟩⟨Φ+| is the Bell state depolarized with weight 1-p
        let rho = bell.depolarized(1.0 - p).unwrap();
        let closed = ((3.0 * p - 1.0) / 2.0).max(0.0);
        worst = worst.max((concurrence_wootters(&rho).unwrap() - closed).abs());
    }
    check(worst <= WERNER_TOL, format!("6 mixing weights, max deviation {worst:.2e}"))
}

fn run_cli(dir: &Path, name: &str, threads: usize) -> Result<Vec<u8>, String> {
    let out = dir.join(name);
    let status = Command::new(env!("CARGO_BIN_EXE_qnd"))
        .args(["sweep", "--observable", "C2", "--shots", "1000", "--phi-steps", "16", "--branches"])
        .args(["--noise-1q", "0.005", "--noise-2q", "0.05", "--readout-flip", "0.01", "--seed", "42"])
        .args(["--threads", &threads.to_string(), "--out"])
        .arg(&out)
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("qnd exited with {status}"));
    }
    std::fs::read(&out).map_err(|e| e.to_string())
}

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = run_cli(dir.path(), "a.csv", 1)?;
    let second = run_cli(dir.path(), "b.csv", 1)?;
    let wide = run_cli(dir.path(), "c.csv", 4)?;
    let wider = run_cli(dir.path(), "d.csv", 8)?;
    check(
        !first.is_empty() && first == second && first == wide && first == wider,
        format!("{} bytes, identical across repeats and 1/4/8 threads", first.len()),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("exact-mode theory curves", exact_theory_curves),
        ("estimator equivalence", estimator_equivalence),
        ("nondemolition at zero noise", nondemolition),
        ("state preparation on reliable branches", state_preparation),
        ("visibility-circuit operator identity", operator_identity),
        ("triality", triality),
        ("tomography round trip", tomography_round_trip),
        ("shot-noise accuracy", shot_noise_accuracy),
        ("hardware phenomenology under synthetic noise", hardware_phenomenology),
        ("Werner concurrence", werner_concurrence),
        ("CLI reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
