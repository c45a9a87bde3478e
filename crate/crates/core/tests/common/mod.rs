#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rndunit::ensemble::DisorderEnsemble;
use rndunit::linops::{propagator, ComplexMatrix, DensityMatrix, HermitianOperator, UnitaryOperator, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
    })
}

pub fn random_hermitian(rng: &mut impl Rng, dim: usize, scale: f64) -> HermitianOperator {
    let a = random_matrix(rng, dim, dim, scale);
    HermitianOperator::new((&a + &a.dagger()).scale_real(0.5)).unwrap()
}

pub fn random_state(rng: &mut impl Rng, dim: usize) -> DensityMatrix {
    let a = random_matrix(rng, dim, dim, 1.0);
    let m = a.matmul(&a.dagger());
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_real(1.0 / tr)).unwrap()
}

pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> UnitaryOperator {
    propagator(&random_hermitian(rng, dim, 1.0), 1.0).unwrap()
}

pub fn random_weights(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|w| w / sum).collect()
}

pub fn random_ensemble(rng: &mut impl Rng, dim: usize, n: usize, scale: f64) -> DisorderEnsemble {
    let weights = random_weights(rng, n);
    let realizations = weights
        .into_iter()
        .map(|w| (random_hermitian(rng, dim, scale), w))
        .collect();
    DisorderEnsemble::new(realizations).unwrap()
}
