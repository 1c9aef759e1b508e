//! Base samplers: the integer sampler, the randomized nearest-plane sampler and
//! the start-up sampler on a short-prefix sublattice.

use std::f64::consts::PI;

use rand::Rng;

use crate::batch::{LatticePoint, SampleBatch, Source};
use crate::error::{Error, Result};
use crate::lattice::gso::{gram_schmidt, GsoF64};
use crate::lattice::linalg;
use crate::lattice::reduce::{reduce_basis, ReductionProfile};
use crate::lattice::Basis;
use crate::oracle::rho::check_param;
use crate::profile::Constants;

/// Half-width of the integer sampler's support window, in units of `s`.
pub const WINDOW: f64 = 12.0;
/// Windows wider than this use uniform proposals with rejection.
const INVERSION_MAX: i64 = 512;

/// Per-draw mass omitted by the window cut, bounded by `2^{−180}`.
pub const WINDOW_TV: f64 = 6.5e-55;

fn rho1(x: f64, s: f64) -> f64 {
    (-PI * x * x / (s * s)).exp()
}

/// Terms beyond this many multiples of `s` carry total mass below `1e−58`.
const REACH: f64 = 6.5;

/// Draws `k ∈ Z` with probability proportional to `exp(−π(k − center)²/s²)`.
pub fn sample_z<R: Rng + ?Sized>(center: f64, s: f64, rng: &mut R) -> i64 {
    let lo = (center - WINDOW * s).ceil() as i64;
    let hi = (center + WINDOW * s).floor() as i64;
    if lo >= hi {
        return center.round() as i64;
    }
    if hi - lo < INVERSION_MAX {
        let lo = lo.max((center - REACH * s).floor() as i64);
        let hi = hi.min((center + REACH * s).ceil() as i64);
        let mut w = [0.0f64; INVERSION_MAX as usize];
        let mut total = 0.0;
        for (slot, k) in w.iter_mut().zip(lo..=hi) {
            *slot = rho1(k as f64 - center, s);
            total += *slot;
        }
        let mut u = rng.random::<f64>() * total;
        for (x, k) in w.iter().zip(lo..=hi) {
            u -= x;
            if u < 0.0 {
                return k;
            }
        }
        return hi;
    }
    loop {
        let k = rng.random_range(lo..=hi);
        if rng.random::<f64>() < rho1(k as f64 - center, s) {
            return k;
        }
    }
}

/// `ρ_s(Z − center)`.
pub fn rho_z(center: f64, s: f64) -> f64 {
    if s >= 1.0 {
        // Poisson summation; further terms are below e^{−49π}.
        let mut acc = 1.0;
        for j in 1..=6 {
            let j = j as f64;
            acc += 2.0 * (-PI * s * s * j * j).exp() * (2.0 * PI * j * center).cos();
        }
        return s * acc;
    }
    let lo = (center - REACH * s).floor() as i64;
    let hi = (center + REACH * s).ceil() as i64;
    (lo..=hi).map(|k| rho1(k as f64 - center, s)).sum()
}

/// Randomized nearest-plane sampler with an acceptance step that makes the
/// output distribution exactly `D_{L,s}` up to the window cut.
#[derive(Clone, Debug)]
pub struct KleinSampler {
    basis: Basis,
    s: f64,
    mu: Vec<Vec<f64>>,
    widths: Vec<f64>,
    norms: Vec<f64>,
}

impl KleinSampler {
    /// Refuses when `s < ‖B̃‖·√(c_gpv·ln n)`.
    pub fn new(b: &Basis, s: f64, consts: &Constants) -> Result<Self> {
        check_param(s)?;
        let g = gram_schmidt(b);
        let need = g.max_gs_norm * (consts.c_gpv * Constants::log_n(b.rank())).sqrt();
        if s < need {
            return Err(Error::Precondition(format!(
                "s = {s} is below ‖B̃‖·√(C·ln n) = {need} required by the nearest-plane sampler"
            )));
        }
        let gf = GsoF64::from_exact(&g);
        let widths: Vec<f64> = g.gs_norms.iter().map(|n| s / n).collect();
        let norms = widths.iter().map(|&w| rho_z(0.0, w)).collect();
        Ok(Self { basis: b.clone(), s, mu: gf.mu, widths, norms })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LatticePoint {
        let d = self.widths.len();
        let mut z = vec![0i64; d];
        loop {
            let mut accept = 1.0;
            for i in (0..d).rev() {
                let mut c = 0.0;
                for j in i + 1..d {
                    c -= self.mu[j][i] * z[j] as f64;
                }
                let w = self.widths[i];
                z[i] = sample_z(c, w, rng);
                if w <= 4.0 {
                    accept *= rho_z(c, w) / self.norms[i];
                }
            }
            if accept >= 1.0 || rng.random::<f64>() < accept {
                return LatticePoint::new(z);
            }
        }
    }

    pub fn sample_batch<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> SampleBatch {
        let points = (0..count).map(|_| self.sample(rng)).collect();
        let tv = count as f64 * self.widths.len() as f64 * WINDOW_TV;
        SampleBatch::new(self.basis.clone(), self.s, Source::Gpv, points, tv)
    }
}

pub fn klein_gpv_sample<R: Rng + ?Sized>(b: &Basis, s: f64, consts: &Constants, rng: &mut R) -> Result<LatticePoint> {
    Ok(KleinSampler::new(b, s, consts)?.sample(rng))
}

/// Output of [`start_gauss`].
#[derive(Clone, Debug)]
pub struct StartGauss {
    /// Basis of the sublattice spanned by the short Gram–Schmidt prefix.
    pub sublattice: Basis,
    /// Row `i` holds the input-basis coefficients of sublattice basis vector `i`.
    pub to_input: Vec<Vec<i64>>,
    /// Samples from `D_{Lsub,s}` in sublattice coefficients.
    pub batch: SampleBatch,
    /// No prefix qualified; the batch holds copies of the zero vector.
    pub degenerate: bool,
}

impl StartGauss {
    pub fn is_full_rank(&self, input_rank: usize) -> bool {
        self.sublattice.rank() == input_rank
    }

    /// Coefficients over the input basis of a point given over the sublattice basis.
    pub fn to_input_coeffs(&self, z: &[i64]) -> Vec<i64> {
        let d = self.to_input.first().map_or(0, |r| r.len());
        let mut out = vec![0i64; d];
        for (zi, row) in z.iter().zip(&self.to_input) {
            for (o, x) in out.iter_mut().zip(row) {
                *o += zi * x;
            }
        }
        out
    }
}

/// LLL-reduces `b`, keeps the longest prefix whose Gram–Schmidt lengths are at
/// most `s/√(c_start·ln n)`, and samples `m` points from the discrete Gaussian
/// on the prefix lattice. `r` is the block parameter of the reduction, accepted
/// for interface compatibility; the LLL stand-in does not use it.
pub fn start_gauss<R: Rng + ?Sized>(
    b: &Basis,
    r: usize,
    m: usize,
    s: f64,
    consts: &Constants,
    rng: &mut R,
) -> Result<StartGauss> {
    check_param(s)?;
    if b.rank() == 0 {
        return Err(Error::Precondition("start_gauss needs a lattice of rank at least 1".into()));
    }
    if r < 2 {
        return Err(Error::Precondition(format!("reduction parameter r = {r} must be at least 2")));
    }
    if m == 0 {
        return Err(Error::Precondition("start_gauss needs M ≥ 1".into()));
    }
    let n = b.rank();
    let red = reduce_basis(b, ReductionProfile::Lll);
    let g = gram_schmidt(&red.basis);
    let cap = s / (consts.c_start * Constants::log_n(n)).sqrt();
    let k = g.gs_norms.iter().take_while(|&&x| x <= cap).count();
    let u = linalg::to_i64_matrix(&red.transform).expect("LLL transform fits in 64 bits");
    if k == 0 {
        let zero = Basis::zero(b.ambient_dim());
        let points = vec![LatticePoint::zero(0); m];
        return Ok(StartGauss {
            batch: SampleBatch::new(zero.clone(), s, Source::Gpv, points, 0.0),
            sublattice: zero,
            to_input: Vec::new(),
            degenerate: true,
        });
    }
    let sub = Basis::new(red.basis.rows()[..k].to_vec(), b.ambient_dim())?;
    let to_input = u[..k].to_vec();
    let klein = KleinSampler::new(&sub, s, consts)?;
    let batch = klein.sample_batch(m, rng);
    Ok(StartGauss { sublattice: sub, to_input, batch, degenerate: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::linalg::rat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn narrow_integer_gaussian_is_a_point_mass() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        assert!((0..1000).all(|_| sample_z(0.0, 0.01, &mut rng) == 0));
    }

    #[test]
    fn poisson_summation_matches_direct_sum() {
        for &(c, s) in &[(0.0f64, 4.5f64), (0.3, 5.0), (0.77, 9.0), (0.25, 1.0), (0.4, 1.7), (0.1, 0.6)] {
            let lo = (c - 12.0 * s).ceil() as i64;
            let hi = (c + 12.0 * s).floor() as i64;
            let direct: f64 = (lo..=hi).map(|k| rho1(k as f64 - c, s)).sum();
            assert!((rho_z(c, s) - direct).abs() < 1e-12 * direct);
        }
    }

    #[test]
    fn wide_windows_use_rejection_and_stay_centered() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let n = 20_000;
        let mean: f64 = (0..n).map(|_| sample_z(3.5, 100.0, &mut rng) as f64).sum::<f64>() / n as f64;
        // σ = s/√(2π) ≈ 39.9; standard error ≈ 0.28.
        assert!((mean - 3.5).abs() < 1.5);
    }

    #[test]
    fn klein_refuses_narrow_widths() {
        let b = Basis::identity(2);
        assert!(KleinSampler::new(&b, 0.5, &Constants::desk()).is_err());
        assert!(KleinSampler::new(&b, 2.0, &Constants::paper()).is_ok());
    }

    #[test]
    fn start_gauss_prefix_examples() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let consts = Constants::paper();
        let z4 = Basis::identity(4);
        let out = start_gauss(&z4, 2, 10, 100.0, &consts, &mut rng).unwrap();
        assert!(out.is_full_rank(4));
        let diag = Basis::new(
            (0..4).map(|i| (0..4).map(|j| if i != j { rat(0) } else if i == 3 { rat(1_000_000) } else { rat(1) }).collect()).collect(),
            4,
        )
        .unwrap();
        let out = start_gauss(&diag, 2, 10, 10.0, &consts, &mut rng).unwrap();
        assert_eq!(out.sublattice.rank(), 3);
        let out = start_gauss(&z4, 2, 5, 0.1, &consts, &mut rng).unwrap();
        assert!(out.degenerate);
        assert_eq!(out.batch.len(), 5);
        assert!(out.batch.points.iter().all(|p| p.is_zero()));
    }
}
