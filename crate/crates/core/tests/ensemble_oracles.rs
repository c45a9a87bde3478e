mod common;

use common::{random_ensemble, random_hermitian, rng};
use proptest::prelude::*;
use rndunit::channel::{embed, evolve_average};
use rndunit::ensemble::{c2, center, gauss_hermite_ensemble, gauss_hermite_rule, mean_hamiltonian, DisorderEnsemble};
use rndunit::linops::{herm_eig, pauli, HermitianOperator};

/// Moments of N(0, σ²): σ^k (k − 1)!! for even k, zero otherwise.
fn gaussian_moment(sigma: f64, k: u32) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let double_factorial: f64 = (1..k).step_by(2).map(f64::from).product();
    sigma.powi(k as i32) * double_factorial
}

#[test]
fn three_node_rule_reproduces_moments_up_to_five() {
    let sigma = 0.7;
    let e = gauss_hermite_ensemble(&pauli::z(), sigma, 3).unwrap();
    let nodes: Vec<(f64, f64)> = e.iter().map(|r| (r.hamiltonian.as_matrix()[(0, 0)].re, r.weight)).collect();
    assert!(nodes.iter().all(|&(_, w)| w > 0.0));
    for k in 0..=5 {
        let quad: f64 = nodes.iter().map(|&(x, w)| w * x.powi(k as i32)).sum();
        assert!((quad - gaussian_moment(sigma, k)).abs() < 1e-14, "moment {k}: {quad}");
    }
}

#[test]
fn two_node_rule_rescales_hermite_points() {
    // Standard rule: x = ±1/√2 with weights √π/2; λ = σ√2·x.
    let sigma = 1.3;
    let e = gauss_hermite_ensemble(&pauli::z(), sigma, 2).unwrap();
    let mut lambdas: Vec<f64> = e.iter().map(|r| r.hamiltonian.as_matrix()[(0, 0)].re).collect();
    lambdas.sort_by(f64::total_cmp);
    assert!((lambdas[0] + sigma).abs() < 1e-15 && (lambdas[1] - sigma).abs() < 1e-15);
    assert!(e.weights().iter().all(|w| (w - 0.5).abs() < 1e-15));
}

#[test]
fn rule_weights_integrate_the_weight_function() {
    let sqrt_pi = std::f64::consts::PI.sqrt();
    for n in [1, 2, 5, 16, 32, 64] {
        let rule = gauss_hermite_rule(n).unwrap();
        let sum: f64 = rule.iter().map(|r| r.1).sum();
        assert!((sum - sqrt_pi).abs() < 1e-13, "n = {n}: {sum}");
    }
}

#[test]
fn c2_two_point_brute_force() {
    let g = 0.35;
    let e = DisorderEnsemble::two_point(&pauli::z(), g).unwrap();
    let eig = herm_eig(&pauli::z().scaled(0.5));
    // Each realization splits the levels by 2λ; both have λ² = g².
    let brute = 0.5 * (2.0 * g).powi(2) + 0.5 * (-2.0 * g).powi(2);
    assert!((c2(&e, &eig, 0, 1).unwrap() - brute).abs() < 1e-15);
}

#[test]
fn c2_gaussian_matches_second_moment() {
    let sigma = 0.2;
    let e = gauss_hermite_ensemble(&pauli::z(), sigma, 8).unwrap();
    let eig = herm_eig(&pauli::z().scaled(0.5));
    assert!((c2(&e, &eig, 0, 1).unwrap() - 4.0 * sigma * sigma).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn centering_is_idempotent(seed in any::<u64>(), dim in 1usize..4, n in 1usize..6) {
        let e = random_ensemble(&mut rng(seed), dim, n, 1.0);
        let once = center(&e);
        let twice = center(&once.ensemble);
        prop_assert!(mean_hamiltonian(&once.ensemble).max_abs() <= 1e-12 * e.max_abs().max(1.0));
        prop_assert!(twice.mean.max_abs() <= 1e-12 * e.max_abs().max(1.0));
        for (a, b) in once.ensemble.iter().zip(twice.ensemble.iter()) {
            prop_assert!(a.hamiltonian.as_matrix().max_abs_diff(b.hamiltonian.as_matrix()) <= 1e-12);
            prop_assert_eq!(a.weight, b.weight);
        }
    }

    #[test]
    fn folding_the_mean_leaves_dynamics_unchanged(seed in any::<u64>(), dim in 1usize..4, n in 1usize..6, t in 0.0f64..5.0) {
        let mut r = rng(seed);
        let hs = random_hermitian(&mut r, dim, 1.0);
        let e = random_ensemble(&mut r, dim, n, 1.0);
        let rho0 = common::random_state(&mut r, dim);
        let c = center(&e);
        let shifted = c.fold_into(&hs);
        let original = evolve_average(&hs, &e, &rho0, t).unwrap();
        let folded = evolve_average(&shifted, &c.ensemble, &rho0, t).unwrap();
        prop_assert!(rndunit::linops::trace_distance(&original, &folded) <= 1e-12);

        let blocks = embed(&hs, &e).unwrap();
        let centered_blocks = embed(&shifted, &c.ensemble).unwrap();
        for k in 0..n {
            prop_assert!(blocks.block(k).max_abs_diff(&centered_blocks.block(k)) <= 1e-12);
        }
    }
}

#[test]
fn zero_mean_check_scales_with_ensemble() {
    let big = DisorderEnsemble::two_point(&pauli::x(), 1e6).unwrap();
    assert!(big.require_zero_mean().is_ok());
    let e = DisorderEnsemble::new(vec![(HermitianOperator::from_real_diagonal(&[1e-3, 0.0]), 1.0)]).unwrap();
    assert!(e.require_zero_mean().is_err());
}
