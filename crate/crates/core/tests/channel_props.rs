mod common;

use common::{random_ensemble, random_hermitian, random_state, random_unitary, random_weights, rng};
use proptest::prelude::*;
use rndunit::analysis::purity;
use rndunit::channel::{apply_kraus, embed, evolve_average, evolve_embedded, kraus_at, KrausChannel};
use rndunit::linops::{kron, partial_trace_env, propagator, trace_distance, ComplexMatrix, DensityMatrix};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn three_formulations_agree(seed in any::<u64>(), dim in 1usize..4, n in 1usize..7, t in 0.0f64..10.0) {
        let mut r = rng(seed);
        let hs = random_hermitian(&mut r, dim, 1.0);
        let e = random_ensemble(&mut r, dim, n, 0.5);
        let rho0 = random_state(&mut r, dim);
        let average = evolve_average(&hs, &e, &rho0, t).unwrap();
        let embedded = evolve_embedded(&embed(&hs, &e).unwrap(), &rho0, t).unwrap();
        let kraus = apply_kraus(&kraus_at(&hs, &e, t).unwrap(), &rho0).unwrap();
        prop_assert!(trace_distance(&average, &embedded) <= 1e-10);
        prop_assert!(trace_distance(&average, &kraus) <= 1e-12);
    }

    #[test]
    fn exact_channel_is_cptp_and_unital(seed in any::<u64>(), dim in 2usize..5, n in 1usize..9) {
        let mut r = rng(seed);
        let hs = random_hermitian(&mut r, dim, 1.0);
        let e = random_ensemble(&mut r, dim, n, 0.7);
        let rho0 = random_state(&mut r, dim);
        let mixed = DensityMatrix::maximally_mixed(dim);
        for k in 0..=20 {
            let t = 0.5 * k as f64;
            let rho = evolve_average(&hs, &e, &rho0, t).unwrap();
            prop_assert!((rho.trace() - 1.0).abs() <= 1e-12);
            prop_assert!(rho.min_eigenvalue() >= -1e-10);
            prop_assert!(purity(&rho) <= purity(&rho0) + 1e-12);
            let image = evolve_average(&hs, &e, &mixed, t).unwrap();
            prop_assert!(image.as_matrix().max_abs_diff(mixed.as_matrix()) <= 1e-12);
        }
    }
}

#[test]
fn block_sum_reduces_to_weighted_average() {
    let mut r = rng(3);
    let (ds, n) = (2, 3);
    let hs = random_hermitian(&mut r, ds, 1.0);
    let e = random_ensemble(&mut r, ds, n, 0.5);
    let rho0 = random_state(&mut r, ds);
    let t = 1.7;
    let mut total = ComplexMatrix::zeros(ds * n, ds * n);
    let mut oracle = ComplexMatrix::zeros(ds, ds);
    for (k, real) in e.iter().enumerate() {
        let u = propagator(&hs.plus(&real.hamiltonian), t).unwrap();
        let evolved = u.conjugate(rho0.as_matrix()).scale_real(real.weight);
        total += &kron(&evolved, DensityMatrix::basis_state(n, k).as_matrix());
        oracle += &evolved;
    }
    let reduced = partial_trace_env(&DensityMatrix::new(total).unwrap(), ds, n).unwrap();
    assert!(reduced.as_matrix().max_abs_diff(&oracle) < 1e-14);
    let average = evolve_average(&hs, &e, &rho0, t).unwrap();
    assert!(average.as_matrix().max_abs_diff(&oracle) < 1e-13);
}

#[test]
fn random_three_term_channel_contracts_purity() {
    let mut r = rng(5);
    for _ in 0..10 {
        let dim = 3;
        let weights = random_weights(&mut r, 3);
        let channel = KrausChannel::from_unitaries(weights.into_iter().map(|w| (random_unitary(&mut r, dim), w)).collect()).unwrap();
        let rho = random_state(&mut r, dim);
        let out = apply_kraus(&channel, &rho).unwrap();
        assert!((out.trace() - 1.0).abs() < 1e-12);
        assert!(out.as_matrix().hermiticity_residual() < 1e-14);
        assert!(purity(&out) <= purity(&rho) + 1e-12);
    }
}
