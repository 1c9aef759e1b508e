use rand::Rng;

use super::{estimate_pmax, window_coins, ElementStream, ResampleFailure, Resampled};

/// Turns i.i.d. draws from `p` into i.i.d. draws from `p²/Σp²`.
///
/// The first half of the input estimates `p_max`; then `⌊M·p̃/4⌋` windows of
/// `Pois(1/p̃)` elements set one coin per element and window; a final pass over
/// `M/6` further elements emits an element whenever its next unused coin is 1.
/// Every emitted element uses up two input occurrences.
pub fn square_sample<R: Rng + ?Sized>(
    kappa: f64,
    items: &[usize],
    n: usize,
    rng: &mut R,
) -> Result<Resampled, ResampleFailure> {
    assert!(kappa >= 2.0, "kappa must be at least 2");
    let m = items.len();
    let half = m / 2;
    let p_tilde = estimate_pmax(kappa, &mut ElementStream::new(&items[..half], n), rng)?;
    let mut stream = ElementStream::new(&items[half..], n);
    let windows = (m as f64 * p_tilde / 4.0).floor() as usize;
    let ones = window_coins(&mut stream, windows, 1.0 / p_tilde, kappa, rng)?;
    let last = stream.take(m / 6).ok_or(ResampleFailure::Exhausted)?;
    let mut next = vec![0usize; n];
    let mut ptr = vec![0usize; n];
    let mut out = Vec::new();
    for &i in last {
        let j = next[i];
        if j >= windows {
            return Err(ResampleFailure::CoinsExhausted);
        }
        next[i] += 1;
        let list = &ones[i];
        while ptr[i] < list.len() && (list[ptr[i]] as usize) < j {
            ptr[i] += 1;
        }
        if ptr[i] < list.len() && list[ptr[i]] as usize == j {
            out.push(i);
        }
    }
    Ok(Resampled { items: out, p_tilde })
}
