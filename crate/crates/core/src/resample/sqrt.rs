use rand::Rng;

use super::{estimate_pmax, window_coins, ElementStream, ResampleFailure, Resampled};

/// `true` iff `2k` fair coins show exactly `k` heads.
fn balanced_coins<R: Rng + ?Sized>(k: u64, rng: &mut R) -> bool {
    let mut left = 2 * k;
    let mut heads = 0u64;
    while left > 0 {
        let take = left.min(64);
        let word: u64 = rng.random();
        let mask = if take == 64 { u64::MAX } else { (1u64 << take) - 1 };
        heads += (word & mask).count_ones() as u64;
        left -= take;
    }
    heads == k
}

/// A `√p`-coin from at most `tau` flips of a `p`-coin: with `k` zeros before the
/// first one, output whether `2k` fair coins split evenly; 0 if no one appears.
pub fn sqrt_coin<I, R>(coins: I, tau: usize, rng: &mut R) -> bool
where
    I: IntoIterator<Item = bool>,
    R: Rng + ?Sized,
{
    match coins.into_iter().take(tau).position(|b| b) {
        Some(k) => balanced_coins(k as u64, rng),
        None => false,
    }
}

/// How many outputs the square-root sampler must deliver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SqrtQuota {
    /// Stop after exactly this many outputs; fail if the loop ends short.
    Exact(usize),
    /// Run every step of the acceptance loop and emit every acceptance.
    All,
}

/// Turns i.i.d. draws from `p` (with `max p_i/p_j ≤ t`) into i.i.d. draws from
/// `√p/Σ√p`.
///
/// The first half of the input estimates `p_max`; the sampler refuses when the
/// estimate exceeds `4t/N`. Windows of `Pois(1/p̃)` elements set per-element
/// coins, grouped in blocks of `τ = ⌈κ²t⌉` into square-root coins. The final
/// loop of `⌊M/(5τ)⌋` steps picks a uniform element and emits it when its next
/// square-root coin is 1.
pub fn sqrt_sample<R: Rng + ?Sized>(
    kappa: f64,
    t: f64,
    items: &[usize],
    n: usize,
    quota: SqrtQuota,
    rng: &mut R,
) -> Result<Resampled, ResampleFailure> {
    assert!(kappa >= 2.0, "kappa must be at least 2");
    assert!(t >= 1.0, "t must be at least 1");
    let m = items.len();
    let half = m / 2;
    let p_tilde = estimate_pmax(kappa, &mut ElementStream::new(&items[..half], n), rng)?;
    let bound = 4.0 * t / n as f64;
    if p_tilde > bound {
        return Err(ResampleFailure::PmaxTooLarge { p_tilde, bound });
    }
    if quota == SqrtQuota::Exact(0) {
        return Ok(Resampled { items: Vec::new(), p_tilde });
    }
    let mut stream = ElementStream::new(&items[half..], n);
    let windows = (m as f64 * p_tilde / 3.0).floor() as usize;
    let ones = window_coins(&mut stream, windows, 1.0 / p_tilde, kappa, rng)?;
    let tau = (kappa * kappa * t).ceil() as usize;
    let blocks = windows / tau;
    let steps = m / (5 * tau);
    let mut next = vec![0usize; n];
    let mut ptr = vec![0usize; n];
    let mut out = Vec::new();
    for _ in 0..steps {
        let i = rng.random_range(0..n);
        let k = next[i];
        if k >= blocks {
            return Err(ResampleFailure::CoinsExhausted);
        }
        next[i] += 1;
        let (start, end) = (k * tau, (k + 1) * tau);
        let list = &ones[i];
        while ptr[i] < list.len() && (list[ptr[i]] as usize) < start {
            ptr[i] += 1;
        }
        let hit = ptr[i] < list.len() && (list[ptr[i]] as usize) < end;
        if hit && balanced_coins((list[ptr[i]] as usize - start) as u64, rng) {
            out.push(i);
            if quota == SqrtQuota::Exact(out.len()) {
                return Ok(Resampled { items: out, p_tilde });
            }
        }
    }
    match quota {
        SqrtQuota::Exact(want) => Err(ResampleFailure::QuotaUnmet { got: out.len(), want }),
        SqrtQuota::All => Ok(Resampled { items: out, p_tilde }),
    }
}

/// `true` ("yes") iff `t·T_min ≥ 2·T_max`, where `T` counts each of the `n`
/// elements in `items`; an absent element has count 0.
pub fn ratio_check(t: f64, items: &[usize], n: usize) -> bool {
    let mut counts = vec![0u64; n];
    for &i in items {
        counts[i] += 1;
    }
    let t_min = counts.iter().copied().min().unwrap_or(0) as f64;
    let t_max = counts.iter().copied().max().unwrap_or(0) as f64;
    t * t_min >= 2.0 * t_max
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn degenerate_coins() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        assert!((0..100).all(|_| sqrt_coin(std::iter::repeat(true), 10, &mut rng)));
        assert!((0..100).all(|_| !sqrt_coin(std::iter::repeat(false), 10, &mut rng)));
    }

    #[test]
    fn ratio_check_examples() {
        assert!(!ratio_check(4.0, &[0, 0, 0], 2));
        assert!(ratio_check(4.0, &[0, 1, 0, 1], 2));
        assert!(!ratio_check(4.0, &[0, 0, 0, 0, 0, 1], 2));
    }

    #[test]
    fn refuses_when_one_element_dominates() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let items = vec![0usize; 100_000];
        let r = sqrt_sample(20.0, 1.0, &items, 16, SqrtQuota::All, &mut rng);
        assert!(matches!(r, Err(ResampleFailure::PmaxTooLarge { .. })));
    }
}
