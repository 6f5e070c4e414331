//! Deterministic inputs shared by the benchmarks.

use curkit::DenseMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Uniform entries in `[-1, 1)`.
pub fn uniform(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// Rank-`k` product plus a small uniform perturbation.
pub fn low_rank(rows: usize, cols: usize, k: usize, noise: f64, seed: u64) -> DenseMatrix {
    let a = uniform(rows, k, seed);
    let b = uniform(k, cols, seed.wrapping_add(1));
    let e = uniform(rows, cols, seed.wrapping_add(2));
    let p = a.matmul(&b);
    DenseMatrix::from_fn(rows, cols, |i, j| p[(i, j)] + noise * e[(i, j)])
}

pub fn vector(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}
