//! Randomised invariants across modules.

use negstates::metrics::{chsh_smax, concurrence, fidelity, teleportation_fidelity};
use negstates::noise::{evolve_two_qubit, kraus_ad, kraus_depolarizing, kraus_rtn, AdParams, RtnParams};
use negstates::protocols::{protected_evolution, WmQmrParams};
use negstates::qmath::{haar_state, haar_unitary, herm_eig, CMat, Rng};
use negstates::sim::{shor_run, DensityMat, Pauli, ShorErrors};
use negstates::synth::{circuit_unitary, kak_decompose, loss_delta};
use negstates::tomo::{exact_frequencies, mle_reconstruct, TomoDesign};
use proptest::prelude::*;

fn mixed(seed: u64, purity_bias: i32) -> DensityMat {
    let mut rng = Rng::new(seed);
    let u = haar_unitary(4, &mut rng);
    let w: Vec<f64> = (0..4).map(|_| rng.uniform().powi(purity_bias)).collect();
    let s: f64 = w.iter().sum();
    let d = CMat::real_diag(&w.iter().map(|x| x / s).collect::<Vec<_>>());
    DensityMat::from_matrix(u.matmul(&d).matmul(&u.adjoint()).hermitian_part()).unwrap()
}

fn min_eig(m: &CMat) -> f64 {
    herm_eig(&m.hermitian_part()).unwrap().values[0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn channels_preserve_density(seed in any::<u64>(), t in 0.0f64..300.0, b in 1e-3f64..1.0, g in 1e-3f64..2.0, gamma in 1e-4f64..10.0) {
        let rho = mixed(seed, 2);
        for k in [kraus_rtn(t, &RtnParams::new(b, gamma).unwrap()).unwrap(), kraus_ad(t, &AdParams::new(g, gamma).unwrap()).unwrap()] {
            prop_assert!(k.completeness_deviation() < 1e-10);
            let out = evolve_two_qubit(&rho, &k).unwrap();
            prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-10);
            prop_assert!(min_eig(out.matrix()) > -1e-10);
        }
    }

    #[test]
    fn metric_ranges(seed in any::<u64>(), bias in 1i32..6) {
        let rho = mixed(seed, bias);
        let c = concurrence(&rho).unwrap();
        let s = chsh_smax(&rho).unwrap();
        let f = teleportation_fidelity(&rho).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&c));
        prop_assert!((0.0..=2.0 * 2f64.sqrt() + 1e-9).contains(&s));
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
        prop_assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn depolarizing_never_increases_concurrence(seed in any::<u64>(), p in 0.0f64..1.0) {
        let rho = mixed(seed, 4);
        let out = evolve_two_qubit(&rho, &kraus_depolarizing(p).unwrap()).unwrap();
        prop_assert!(concurrence(&out).unwrap() <= concurrence(&rho).unwrap() + 1e-9);
    }

    #[test]
    fn local_unitaries_leave_invariants(seed in any::<u64>()) {
        let mut rng = Rng::new(seed ^ 0xABCD);
        let rho = mixed(seed, 3);
        let local = haar_unitary(2, &mut rng).kron(&haar_unitary(2, &mut rng));
        let moved = DensityMat::from_matrix(local.sandwich(rho.matrix()).hermitian_part()).unwrap();
        prop_assert!((concurrence(&rho).unwrap() - concurrence(&moved).unwrap()).abs() < 1e-8);
        prop_assert!((chsh_smax(&rho).unwrap() - chsh_smax(&moved).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn kak_reproduces_random_unitaries(seed in any::<u64>()) {
        let u = haar_unitary(4, &mut Rng::new(seed));
        let rep = kak_decompose(&u).unwrap();
        prop_assert!(rep.cz_count <= 3);
        prop_assert!(loss_delta(&circuit_unitary(&rep.circuit).unwrap(), &u).unwrap() <= 1e-6);
    }

    #[test]
    fn protected_state_is_density(seed in any::<u64>(), p in 0.0f64..0.9, q in 0.0f64..0.9, t in 0.0f64..100.0) {
        let rho = mixed(seed, 2);
        let k = kraus_ad(t, &AdParams::new(0.01, 5.0).unwrap()).unwrap();
        let out = protected_evolution(&rho, &k, &WmQmrParams::from_pq(p, q).unwrap()).unwrap();
        prop_assert!(out.p_succ > 0.0 && out.p_succ <= 1.0 + 1e-12);
        prop_assert!((out.rho_f.matrix().trace().re - 1.0).abs() < 1e-10);
        prop_assert!(min_eig(out.rho_f.matrix()) > -1e-10);
    }

    #[test]
    fn mle_of_exact_data_recovers_state(seed in any::<u64>()) {
        let rho = mixed(seed, 2);
        let data = exact_frequencies(rho.matrix(), &TomoDesign::pauli(1000));
        let est = mle_reconstruct(&data, false).unwrap();
        prop_assert!(est.is_psd());
        prop_assert!(est.rho_hat.max_abs_diff(rho.matrix()) < 1e-4);
    }

    #[test]
    fn shor_corrects_one_error_per_block(seed in any::<u64>(), q0 in 0usize..9, q1 in 9usize..18, p0 in 0usize..3, p1 in 0usize..3) {
        let v = haar_state(2, &mut Rng::new(seed));
        let e = ShorErrors { after_encoding: vec![(q0, Pauli::ALL[p0]), (q1, Pauli::ALL[p1])], during_correction: None };
        prop_assert!((shor_run(&v, &e).unwrap().fidelity - 1.0).abs() < 1e-9);
    }
}
