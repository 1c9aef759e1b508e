//! Resamplers over finite alphabets: the Poisson toolkit, the square sampler,
//! the square-root coin and sampler, and the ratio check.

mod poisson;
mod sqrt;
mod square;

pub use poisson::{bernoulli_from_poisson, estimate_pmax, poisson_thin, sample_poisson};
pub use sqrt::{ratio_check, sqrt_coin, sqrt_sample, SqrtQuota};
pub use square::square_sample;

use thiserror::Error;

/// Why a resampler produced nothing. Failures never come with partial output.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum ResampleFailure {
    #[error("input stream exhausted")]
    Exhausted,
    #[error("estimated maximum probability {p_tilde} exceeds {bound}")]
    PmaxTooLarge { p_tilde: f64, bound: f64 },
    #[error("ran out of coins for an element")]
    CoinsExhausted,
    #[error("produced {got} of the required {want} outputs")]
    QuotaUnmet { got: usize, want: usize },
}

/// Successful resampler output.
#[derive(Clone, Debug, PartialEq)]
pub struct Resampled {
    pub items: Vec<usize>,
    /// The estimate of the largest input probability that was used.
    pub p_tilde: f64,
}

/// Sequential reader over elements of `{0, …, N−1}`.
#[derive(Clone, Debug)]
pub struct ElementStream<'a> {
    items: &'a [usize],
    n: usize,
    cursor: usize,
}

impl<'a> ElementStream<'a> {
    pub fn new(items: &'a [usize], n: usize) -> Self {
        debug_assert!(items.iter().all(|&i| i < n));
        Self { items, n, cursor: 0 }
    }

    pub fn alphabet(&self) -> usize {
        self.n
    }

    pub fn remaining(&self) -> usize {
        self.items.len() - self.cursor
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    /// The next `r` elements, or `None` (consuming nothing) if fewer remain.
    pub fn take(&mut self, r: usize) -> Option<&'a [usize]> {
        if r > self.remaining() {
            return None;
        }
        let out = &self.items[self.cursor..self.cursor + r];
        self.cursor += r;
        Some(out)
    }
}

/// Per-window coin bookkeeping shared by the square and square-root samplers:
/// for each element, the sorted window indices whose coin came up 1.
pub(crate) fn window_coins<R: rand::Rng + ?Sized>(
    stream: &mut ElementStream<'_>,
    windows: usize,
    mean: f64,
    kappa: f64,
    rng: &mut R,
) -> Result<Vec<Vec<u32>>, ResampleFailure> {
    let n = stream.alphabet();
    let mut ones: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut counts = vec![0u64; n];
    let mut touched: Vec<usize> = Vec::new();
    for j in 0..windows {
        let r = sample_poisson(mean, rng) as usize;
        let w = stream.take(r).ok_or(ResampleFailure::Exhausted)?;
        for &i in w {
            if counts[i] == 0 {
                touched.push(i);
            }
            counts[i] += 1;
        }
        for &i in &touched {
            if bernoulli_from_poisson(counts[i], kappa, rng) {
                ones[i].push(j as u32);
            }
            counts[i] = 0;
        }
        touched.clear();
    }
    Ok(ones)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_take_is_all_or_nothing() {
        let items = [0, 1, 1, 0];
        let mut s = ElementStream::new(&items, 2);
        assert_eq!(s.take(3), Some(&items[..3]));
        assert_eq!(s.take(2), None);
        assert_eq!(s.remaining(), 1);
        assert_eq!(s.take(1), Some(&items[3..]));
    }
}
