use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::{ElementStream, ResampleFailure};

/// Exact Poisson draw; `lambda = 0` gives 0.
pub fn sample_poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    assert!(lambda >= 0.0 && lambda.is_finite(), "Poisson mean must be finite and nonnegative");
    if lambda == 0.0 {
        return 0;
    }
    Poisson::new(lambda).expect("valid mean").sample(rng) as u64
}

/// Reads a window of `Pois(lambda)` elements and returns per-element counts.
pub fn poisson_thin<R: Rng + ?Sized>(
    stream: &mut ElementStream<'_>,
    lambda: f64,
    rng: &mut R,
) -> Result<Vec<u64>, ResampleFailure> {
    let r = sample_poisson(lambda, rng) as usize;
    let w = stream.take(r).ok_or(ResampleFailure::Exhausted)?;
    let mut counts = vec![0u64; stream.alphabet()];
    for &i in w {
        counts[i] += 1;
    }
    Ok(counts)
}

/// 1 with probability `min(1, r/kappa)`.
pub fn bernoulli_from_poisson<R: Rng + ?Sized>(r: u64, kappa: f64, rng: &mut R) -> bool {
    if r == 0 {
        return false;
    }
    let p = r as f64 / kappa;
    p >= 1.0 || rng.random::<f64>() < p
}

/// Halving search for the largest element probability: returns the first
/// `p ∈ {1, 1/2, 1/4, …}` for which some element appears at least `kappa/3`
/// times in a window of `Pois(kappa/p)` elements.
pub fn estimate_pmax<R: Rng + ?Sized>(
    kappa: f64,
    stream: &mut ElementStream<'_>,
    rng: &mut R,
) -> Result<f64, ResampleFailure> {
    assert!(kappa >= 1.0, "kappa must be at least 1");
    let mut p = 1.0f64;
    loop {
        let counts = poisson_thin(stream, kappa / p, rng)?;
        if counts.iter().any(|&c| c as f64 >= kappa / 3.0) {
            return Ok(p);
        }
        if stream.remaining() == 0 {
            return Err(ResampleFailure::Exhausted);
        }
        p /= 2.0;
    }
}
