use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use qnd_core::analysis::{fit_scale, rms_error};
use qnd_core::circuits::{run_noisy, run_pure, Circuit, Gate, NoiseModel};
use qnd_core::observables::{concurrence_pure, concurrence_wootters, evaluate, triality_defect, ObservableKind};
use qnd_core::qmath::{DensityMatrix, StateVector};
use qnd_core::tomography::{project_psd, simplex_projection};

fn gate_on(n: usize) -> impl Strategy<Value = Gate> {
    (0..6usize, 0..n, 1..n, -PI..PI).prop_map(move |(kind, q, shift, angle)| {
        let other = (q + shift) % n;
        match kind {
            0 => Gate::rx(q, angle),
            1 => Gate::ry(q, angle),
            2 => Gate::x(q),
            3 => Gate::h(q),
            4 => Gate::cnot(q, other),
            _ => Gate::cry(q, other, angle),
        }
    })
}

fn circuit(n: usize) -> impl Strategy<Value = Circuit> {
    prop::collection::vec(gate_on(n), 0..12).prop_map(move |g| Circuit::new(n, "random", g).unwrap())
}

fn two_qubit_state() -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 4)
        .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| StateVector::normalized(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
}

fn real_state() -> impl Strategy<Value = StateVector> {
    prop::collection::vec(-1.0..1.0f64, 4)
        .prop_filter("nonzero", |v| v.iter().map(|a| a * a).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            StateVector::from_real(&v.iter().map(|a| a / n).collect::<Vec<_>>()).unwrap()
        })
}

fn trace_re(rho: &DensityMatrix) -> f64 {
    (0..rho.dim()).map(|i| rho.entry(i, i).re).sum()
}

proptest! {
    #[test]
    fn pure_execution_keeps_norm(c in circuit(3)) {
        let psi = run_pure(&c, &StateVector::basis(3, 0).unwrap()).unwrap();
        let norm: f64 = psi.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noiseless_density_matches_state_vector(c in circuit(3)) {
        let init = StateVector::basis(3, 5).unwrap();
        let psi = run_pure(&c, &init).unwrap();
        let rho = run_noisy(&c, &init.to_density(), &NoiseModel::noiseless()).unwrap();
        prop_assert!(rho.approx_eq(&psi.to_density(), 1e-10));
    }

    #[test]
    fn noisy_execution_stays_physical(c in circuit(3), p1 in 0.0..0.2f64, p2 in 0.0..0.2f64) {
        let noise = NoiseModel::new(p1, p2, 0.0).unwrap();
        let rho = run_noisy(&c, &StateVector::basis(3, 0).unwrap().to_density(), &noise).unwrap();
        prop_assert!((trace_re(&rho) - 1.0).abs() < 1e-10);
        prop_assert!(rho.matrix().is_hermitian(1e-12));
        prop_assert!(rho.purity() <= 1.0 + 1e-10);
    }

    #[test]
    fn pure_concurrence_equals_wootters(psi in two_qubit_state()) {
        let direct = concurrence_pure(&psi).unwrap();
        let wootters = concurrence_wootters(&psi.to_density()).unwrap();
        prop_assert!((direct - wootters).abs() < 1e-7, "{direct} vs {wootters}");
    }

    #[test]
    fn concurrence_invariant_under_local_unitaries(
        psi in two_qubit_state(),
        a in -PI..PI, b in -PI..PI, c in -PI..PI, d in -PI..PI,
    ) {
        let local = Circuit::new(2, "local", vec![Gate::rx(0, a), Gate::ry(0, b), Gate::ry(1, c), Gate::rx(1, d)]).unwrap();
        let rotated = run_pure(&local, &psi).unwrap();
        let before = concurrence_wootters(&psi.to_density()).unwrap();
        let after = concurrence_wootters(&rotated.to_density()).unwrap();
        prop_assert!((before - after).abs() < 1e-7);
    }

    #[test]
    fn triality_on_real_states(psi in real_state()) {
        prop_assert!(triality_defect(&psi, 0).unwrap() < 1e-8);
        prop_assert!(triality_defect(&psi, 1).unwrap() < 1e-8);
    }

    #[test]
    fn observables_bounded_on_mixtures(psi in two_qubit_state(), p in 0.0..1.0f64) {
        let rho = psi.to_density().depolarized(p).unwrap();
        for kind in ObservableKind::ALL {
            let v = evaluate(kind, &rho).unwrap().value;
            prop_assert!((-1e-12..=1.0 + 1e-8).contains(&v), "{kind}: {v}");
        }
    }

    #[test]
    fn rms_properties(pairs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..40), rot in 0usize..40) {
        let (m, t): (Vec<f64>, Vec<f64>) = pairs.iter().cloned().unzip();
        let e = rms_error(&m, &t).unwrap();
        prop_assert!(e >= 0.0);
        prop_assert!(rms_error(&m, &m).unwrap() == 0.0);
        let k = rot % m.len();
        let (mut m2, mut t2) = (m.clone(), t.clone());
        m2.rotate_left(k);
        t2.rotate_left(k);
        prop_assert!((rms_error(&m2, &t2).unwrap() - e).abs() < 1e-12);
        if t.iter().any(|x| x.abs() > 1e-3) {
            prop_assert!(fit_scale(&m, &t).unwrap().residual_rms <= e + 1e-12);
        }
    }

    #[test]
    fn simplex_projection_lands_on_simplex(v in prop::collection::vec(-2.0..2.0f64, 1..8)) {
        let p = simplex_projection(&v);
        prop_assert!(p.iter().all(|x| *x >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let again = simplex_projection(&p);
        prop_assert!(p.iter().zip(&again).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn psd_projection_is_idempotent(psi in two_qubit_state(), p in 0.0..1.0f64) {
        let rho = psi.to_density().depolarized(p).unwrap();
        let once = project_psd(rho.matrix()).unwrap();
        prop_assert!(once.approx_eq(&rho, 1e-9));
        let twice = project_psd(once.matrix()).unwrap();
        prop_assert!(twice.approx_eq(&once, 1e-12));
    }
}
