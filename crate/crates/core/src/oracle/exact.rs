//! Exact shortest and closest vectors, and exact discrete Gaussian sampling.

use std::f64::consts::PI;

use num::Zero;
use rand::Rng;

use super::enumerate::{Enumerator, MAX_ENUM_RANK};
use super::rho::{check_param, rho, truncation_radius, KahanSum};
use crate::batch::{LatticePoint, SampleBatch, Source};
use crate::error::{Error, Result};
use crate::lattice::gso::gram_schmidt;
use crate::lattice::linalg::{self, rat_to_f64, Rational};
use crate::lattice::Basis;

/// A shortest nonzero vector with its exact squared length.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortestVector {
    pub norm: f64,
    pub norm_sq: Rational,
    pub point: LatticePoint,
}

/// `λ₁(L)` with a witness. Among shortest vectors the witness is the
/// lexicographically greatest coefficient vector, so `Z^n` gives `e_1`.
pub fn lambda1(b: &Basis) -> Result<ShortestVector> {
    if b.rank() == 0 {
        return Err(Error::InvalidArgument("the zero lattice has no nonzero vector".into()));
    }
    let e = Enumerator::new(b, MAX_ENUM_RANK, "lambda1")?;
    let r2 = linalg::norm_sq(&e.reduced().rows()[0]);
    let origin = vec![Rational::zero(); b.ambient_dim()];
    let (coeffs, norm_sq) = e
        .ball_exact(&origin, &r2)
        .into_iter()
        .filter(|(c, _)| c.iter().any(|&x| x != 0))
        .min_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)))
        .expect("the reduced first vector lies in the ball");
    Ok(ShortestVector { norm: rat_to_f64(&norm_sq).sqrt(), norm_sq, point: LatticePoint::new(coeffs) })
}

pub const CVP_MAX_RANK: usize = 10;

/// Babai's nearest-plane coefficients of `target`, in exact arithmetic.
pub fn nearest_plane(b: &Basis, target: &[Rational]) -> Vec<i64> {
    let g = gram_schmidt(b);
    let d = b.rank();
    let mut v = target.to_vec();
    let mut out = vec![0i64; d];
    for i in (0..d).rev() {
        let c = linalg::round_half_up(&(linalg::dot(&v, &g.gs_vectors[i]) / &g.gs_sq_norms[i]));
        let cr = Rational::from_integer(c.clone());
        for (x, y) in v.iter_mut().zip(&b.rows()[i]) {
            *x -= &cr * y;
        }
        out[i] = i64::try_from(c).expect("nearest-plane coefficient fits in 64 bits");
    }
    out
}

/// Closest lattice point to `target`; ties go to the lexicographically smallest
/// coefficient vector.
pub fn cvp_exact(b: &Basis, target: &[Rational]) -> Result<LatticePoint> {
    if target.len() != b.ambient_dim() {
        return Err(Error::Dimension(format!("target has {} coordinates, expected {}", target.len(), b.ambient_dim())));
    }
    let e = Enumerator::new(b, CVP_MAX_RANK, "cvp_exact")?;
    let babai = nearest_plane(e.reduced(), target);
    let p = e.reduced().ambient(&babai);
    let r2: Rational = p.iter().zip(target).map(|(a, t)| (a - t) * (a - t)).sum();
    let (coeffs, _) = e
        .ball_exact(target, &r2)
        .into_iter()
        .min_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)))
        .expect("the nearest-plane point lies in the ball");
    Ok(LatticePoint::new(coeffs))
}

/// Inverse-CDF sampler over the truncated support of `D_{L,s}`.
#[derive(Clone, Debug)]
pub struct ExactSampler {
    basis: Basis,
    s: f64,
    d: usize,
    /// Support coefficients, flattened, in lexicographic order.
    coeffs: Vec<i64>,
    masses: Vec<f64>,
    cdf: Vec<f64>,
    total: f64,
    tail_bound: f64,
}

pub const EXACT_TAIL: f64 = 1e-10;
pub const MAX_SUPPORT: usize = 4_000_000;

impl ExactSampler {
    pub fn new(b: &Basis, s: f64) -> Result<Self> {
        check_param(s)?;
        let e = Enumerator::new(b, MAX_ENUM_RANK, "exact_dgs_sample")?;
        let d = b.rank();
        let (r, tail) = truncation_radius(&e, s, EXACT_TAIL);
        // Volume heuristic: refuse before allocating a huge support.
        let unit_ball = PI.powf(d as f64 / 2.0) / gamma_fn(d as f64 / 2.0 + 1.0);
        let covol = rat_to_f64(&b.det_sq()).sqrt();
        let approx = unit_ball * r.powi(d as i32) / covol.max(f64::MIN_POSITIVE);
        if approx > 2.0 * MAX_SUPPORT as f64 {
            return Err(Error::SupportTooLarge(MAX_SUPPORT));
        }
        let mut pts: Vec<(Vec<i64>, f64)> = Vec::new();
        let mut too_many = false;
        e.visit(&e.origin(), r * r, &mut |x, dsq| {
            if pts.len() >= MAX_SUPPORT {
                too_many = true;
                return;
            }
            pts.push((e.to_basis_coeffs(x), rho(dsq, s)));
        });
        if too_many {
            return Err(Error::SupportTooLarge(MAX_SUPPORT));
        }
        pts.sort_by(|a, b| a.0.cmp(&b.0));
        let mut coeffs = Vec::with_capacity(pts.len() * d);
        let mut masses = Vec::with_capacity(pts.len());
        let mut cdf = Vec::with_capacity(pts.len());
        let mut acc = KahanSum::default();
        for (c, m) in pts {
            coeffs.extend(c);
            acc.add(m);
            masses.push(m);
            cdf.push(acc.value());
        }
        let total = acc.value();
        Ok(Self { basis: b.clone(), s, d, coeffs, masses, cdf, total, tail_bound: tail })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn param(&self) -> f64 {
        self.s
    }

    pub fn support_len(&self) -> usize {
        self.masses.len()
    }

    /// Truncated `ρ_s(L)`.
    pub fn total_mass(&self) -> f64 {
        self.total
    }

    /// Bound on the statistical distance between one draw and `D_{L,s}`.
    pub fn tv_error(&self) -> f64 {
        self.tail_bound / self.total
    }

    /// Support points with their probabilities, in lexicographic order.
    pub fn support(&self) -> impl Iterator<Item = (&[i64], f64)> + '_ {
        let d = self.d.max(1);
        let chunks: Box<dyn Iterator<Item = &[i64]>> =
            if self.d == 0 { Box::new(std::iter::once(&[][..])) } else { Box::new(self.coeffs.chunks(d)) };
        chunks.zip(self.masses.iter().map(move |m| m / self.total))
    }

    pub fn sample_coeffs<R: Rng + ?Sized>(&self, rng: &mut R) -> &[i64] {
        let u = rng.random::<f64>() * self.total;
        let i = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        &self.coeffs[i * self.d..(i + 1) * self.d]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LatticePoint {
        LatticePoint::new(self.sample_coeffs(rng).to_vec())
    }

    pub fn sample_batch<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> SampleBatch {
        let points = (0..count).map(|_| self.sample(rng)).collect();
        let tv = (count as f64 * self.tv_error()).min(1.0);
        SampleBatch::new(self.basis.clone(), self.s, Source::Exact, points, tv)
    }
}

pub fn exact_dgs_sample<R: Rng + ?Sized>(b: &Basis, s: f64, count: usize, rng: &mut R) -> Result<SampleBatch> {
    Ok(ExactSampler::new(b, s)?.sample_batch(count, rng))
}

/// Gamma function for the ball-volume estimate (half-integer arguments only).
fn gamma_fn(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::linalg::rat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p.into(), d.into())
    }

    #[test]
    fn lambda1_examples() {
        let z4 = lambda1(&Basis::identity(4)).unwrap();
        assert_eq!(z4.norm_sq, rat(1));
        assert_eq!(z4.point.coeffs, vec![1, 0, 0, 0]);
        let b = Basis::from_integer_rows(&[vec![2, 0], vec![1, 2]]).unwrap();
        let l = lambda1(&b).unwrap();
        assert_eq!(l.norm_sq, rat(4));
        assert_eq!(b.ambient(&l.point.coeffs), vec![rat(2), rat(0)]);
        let b = Basis::from_integer_rows(&[vec![1, 0], vec![10, 1]]).unwrap();
        assert_eq!(lambda1(&b).unwrap().norm_sq, rat(1));
    }

    #[test]
    fn cvp_examples() {
        let z2 = Basis::identity(2);
        assert_eq!(cvp_exact(&z2, &[q(2, 5), q(2, 5)]).unwrap().coeffs, vec![0, 0]);
        assert_eq!(cvp_exact(&z2, &[q(1, 2), rat(0)]).unwrap().coeffs, vec![0, 0]);
        let b = Basis::from_integer_rows(&[vec![2, 0], vec![1, 2]]).unwrap();
        let p = cvp_exact(&b, &[q(19, 10), q(1, 10)]).unwrap();
        assert_eq!(b.ambient(&p.coeffs), vec![rat(2), rat(0)]);
    }

    #[test]
    fn tiny_width_is_a_point_mass() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let batch = exact_dgs_sample(&Basis::identity(1), 0.01, 1000, &mut rng).unwrap();
        assert!(batch.points.iter().all(|p| p.coeffs == vec![0]));
    }

    #[test]
    fn probability_of_zero_on_integers() {
        let s = ExactSampler::new(&Basis::identity(1), 1.0).unwrap();
        let p0 = s.support().find(|(c, _)| c == &[0]).unwrap().1;
        assert!((p0 - 1.0 / 1.086_434_811_213_308).abs() < 1e-10);
        assert!(s.tv_error() < 1e-9);
    }

    #[test]
    fn support_is_sorted() {
        let s = ExactSampler::new(&Basis::identity(2), 1.5).unwrap();
        let pts: Vec<Vec<i64>> = s.support().map(|(c, _)| c.to_vec()).collect();
        let mut sorted = pts.clone();
        sorted.sort();
        assert_eq!(pts, sorted);
    }
}
