#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Whether `hits` successes in `n` trials are within `k` standard errors of `p`.
pub fn within_sigmas(hits: usize, n: usize, p: f64, k: f64) -> bool {
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    (hits as f64 / n as f64 - p).abs() <= k * sigma
}

/// `Σ_k exp(−π(k−c)²/s²)` over integers by direct summation.
pub fn rho_integers(s: f64, c: f64) -> f64 {
    (-400..=400).map(|k| (-std::f64::consts::PI * (k as f64 - c).powi(2) / (s * s)).exp()).sum()
}

pub fn frequencies(items: &[usize], n: usize) -> Vec<u64> {
    let mut c = vec![0u64; n];
    for &i in items {
        c[i] += 1;
    }
    c
}
