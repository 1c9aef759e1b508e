//! Finite probability vectors.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ProbVector {
    pub probs: Vec<f64>,
    pub p_max: f64,
    /// Smallest positive entry.
    pub p_min: f64,
    /// Collision mass `Σ p_i²`.
    pub p_col: f64,
    /// `Σ √p_i`.
    pub p_sqrt: f64,
}

impl ProbVector {
    /// Normalizes nonnegative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidArgument("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidArgument("weights sum to zero".into()));
        }
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        Ok(Self::from_normalized(probs))
    }

    fn from_normalized(probs: Vec<f64>) -> Self {
        let p_max = probs.iter().cloned().fold(0.0, f64::max);
        let p_min = probs.iter().cloned().filter(|p| *p > 0.0).fold(f64::INFINITY, f64::min);
        let p_col = probs.iter().map(|p| p * p).sum();
        let p_sqrt = probs.iter().map(|p| p.sqrt()).sum();
        Self { probs, p_max, p_min, p_col, p_sqrt }
    }

    pub fn uniform(n: usize) -> Self {
        Self::from_normalized(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `(p_i² / p_col)_i`.
    pub fn squared(&self) -> Self {
        Self::from_normalized(self.probs.iter().map(|p| p * p / self.p_col).collect())
    }

    /// `(√p_i / p_sqrt)_i`.
    pub fn sqrt(&self) -> Self {
        Self::from_normalized(self.probs.iter().map(|p| p.sqrt() / self.p_sqrt).collect())
    }

    /// Ratio of the largest to the smallest positive entry.
    pub fn max_ratio(&self) -> f64 {
        self.p_max / self.p_min
    }

    pub fn sampler(&self) -> Categorical {
        Categorical { dist: WeightedIndex::new(&self.probs).expect("valid probability vector") }
    }
}

/// Draws indices according to a [`ProbVector`].
#[derive(Clone, Debug)]
pub struct Categorical {
    dist: WeightedIndex<f64>,
}

impl Categorical {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.dist.sample(rng)
    }

    pub fn stream<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Vec<usize> {
        (0..len).map(|_| self.dist.sample(rng)).collect()
    }
}
