mod common;

use common::*;
use gme_core::criteria::{eval_q0, eval_qm, CriterionId};
use gme_core::haar::{LocalUnitary, SingleQubitUnitary};
use gme_core::oracle::{oracle_q0, oracle_qm};
use gme_core::states::{make_dicke, make_ghz, make_w, realize, DensityMatrix, NoiseFamily};
use gme_core::C64;
use proptest::prelude::*;

fn all_values(rho: &DensityMatrix) -> Vec<f64> {
    let n = rho.qubits();
    CriterionId::all_for(n)
        .into_iter()
        .map(|id| match id {
            CriterionId::Q0 => eval_q0(rho).value,
            CriterionId::Qm(m) => eval_qm(rho, m).unwrap().value,
        })
        .collect()
}

#[test]
fn fast_criteria_match_the_two_copy_oracle() {
    let mut r = rng(20);
    for n in 2..=4 {
        for _ in 0..100 {
            let rho = random_mixed(n, &mut r);
            assert!((eval_q0(&rho).value - oracle_q0(&rho).unwrap()).abs() <= 1e-9);
            for m in 1..=n / 2 {
                let fast = eval_qm(&rho, m).unwrap().value;
                assert!((fast - oracle_qm(&rho, m).unwrap()).abs() <= 1e-9, "n={n} m={m}");
            }
        }
    }
}

#[test]
fn oracle_agrees_on_structured_states() {
    let mut r = rng(21);
    let states = [make_ghz(3), make_w(3), make_w(4), make_dicke(4, 2), make_ghz(4)];
    for psi in states {
        let psi = psi.unwrap();
        let n = psi.qubits().get();
        for q in [0.0, 0.3] {
            let rho = realize(&NoiseFamily::new(psi.clone(), q).unwrap())
                .apply_local_unitary(&random_local_unitary(n, &mut r))
                .unwrap();
            assert!((eval_q0(&rho).value - oracle_q0(&rho).unwrap()).abs() <= 1e-9);
            for m in 1..=n / 2 {
                assert!((eval_qm(&rho, m).unwrap().value - oracle_qm(&rho, m).unwrap()).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn biseparable_states_are_never_detected() {
    let mut r = rng(22);
    for n in [3, 4, 5] {
        for _ in 0..500 {
            let rho = random_biseparable(n, &mut r);
            for v in all_values(&rho) {
                assert!(v <= 1e-10, "biseparable state gave {v} (n = {n})");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn realize_is_affine_in_q(seed in any::<u64>(), n in 2usize..=4, lambda in 0.0f64..=1.0) {
        let psi = random_pure(n, &mut rng(seed));
        let at = |q: f64| realize(&NoiseFamily::new(psi.clone(), q).unwrap());
        let (mid, zero, one) = (at(lambda), at(0.0), at(1.0));
        for ((m, z), o) in mid.entries().iter().zip(zero.entries()).zip(one.entries()) {
            prop_assert!((m - (o * lambda + z * (1.0 - lambda))).norm() <= 1e-12);
        }
        prop_assert!(DensityMatrix::new(mid.qubits(), mid.entries().to_vec()).is_ok());
    }

    #[test]
    fn local_unitaries_compose(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let rho = random_mixed(n, &mut r);
        let u = random_local_unitary(n, &mut r);
        let v = random_local_unitary(n, &mut r);
        let stepwise = rho.apply_local_unitary(&u).unwrap().apply_local_unitary(&v).unwrap();
        let combined = rho.apply_local_unitary(&u.then(&v).unwrap()).unwrap();
        for (a, b) in stepwise.entries().iter().zip(combined.entries()) {
            prop_assert!((a - b).norm() <= 1e-10);
        }
        let ev0 = rho.eigenvalues();
        let ev1 = stepwise.eigenvalues();
        for (a, b) in ev0.iter().zip(&ev1) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
        prop_assert!((stepwise.trace().re - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn criteria_are_qubit_permutation_invariant(seed in any::<u64>(), n in 2usize..=5) {
        let mut r = rng(seed);
        // noisy rotated W/GHZ states keep the values away from trivial zeros
        let psi = if seed % 2 == 0 { make_w(n).unwrap() } else { make_ghz(n).unwrap() };
        let rho = realize(&NoiseFamily::new(psi, 0.1).unwrap())
            .apply_local_unitary(&random_local_unitary(n, &mut r))
            .unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.rotate_left((seed % n as u64) as usize);
        perm.swap(0, n - 1);
        let permuted = permute_qubits(&rho, &perm);
        for (a, b) in all_values(&rho).iter().zip(all_values(&permuted)) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn criteria_ignore_local_phases(seed in any::<u64>(), n in 2usize..=5, phases in prop::collection::vec(0.0f64..6.3, 10)) {
        let mut r = rng(seed);
        let rho = random_mixed(n.min(4), &mut r);
        let n = rho.qubits().get();
        let blocks = (0..n)
            .map(|k| {
                let (a, b) = (phases[2 * k], phases[2 * k + 1]);
                SingleQubitUnitary::new([
                    [C64::from_polar(1.0, a), C64::new(0.0, 0.0)],
                    [C64::new(0.0, 0.0), C64::from_polar(1.0, b)],
                ])
                .unwrap()
            })
            .collect();
        let rotated = rho.apply_local_unitary(&LocalUnitary::new(blocks)).unwrap();
        for (a, b) in all_values(&rho).iter().zip(all_values(&rotated)) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn pure_states_stay_pure(seed in any::<u64>(), n in 2usize..=5) {
        let mut r = rng(seed);
        let rho = random_pure(n, &mut r).projector();
        let out = rho.apply_local_unitary(&random_local_unitary(n, &mut r)).unwrap();
        prop_assert!((out.purity() - 1.0).abs() <= 1e-10);
    }
}
