#![allow(dead_code)]

pub mod checks;
pub mod oracle;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use probedim::numkern::Matrix;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha20Rng, n: usize, m: usize) -> Matrix<f64> {
    Matrix::from_fn(n, m, |_, _| rng.sample(StandardNormal))
}

/// Model-shaped matrix: a strong rank-2 signal plus unit noise; `m` even.
pub fn rank2_plus_noise(rng: &mut ChaCha20Rng, n: usize, m: usize) -> Matrix<f64> {
    assert!(m.is_multiple_of(2));
    let t1: Vec<f64> = (0..n).map(|_| 50.0 + 5.0 * rng.sample::<f64, _>(StandardNormal)).collect();
    let t2: Vec<f64> = (0..n).map(|_| 10.0 * rng.sample::<f64, _>(StandardNormal)).collect();
    let c = 1.0 / (m as f64).sqrt();
    Matrix::from_fn(n, m, |i, j| {
        let s = if j % 2 == 0 { c } else { -c };
        t1[i] * c + t2[i] * s + rng.sample::<f64, _>(StandardNormal)
    })
}
