//! Gaussian masses of lattices and cosets with certified truncation.

use std::f64::consts::{E, PI};

use serde::Serialize;

use super::enumerate::{Enumerator, MAX_ENUM_RANK};
use super::exact::lambda1;
use crate::error::{Error, Result};
use crate::lattice::gso::dual_basis;
use crate::lattice::{Basis, Quotient};
use crate::prob::ProbVector;

/// Truncated value of `Σ_{y∈L} ρ_s(y + shift)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RhoSum {
    pub value: f64,
    pub truncation_radius: f64,
    /// Upper bound on the omitted mass.
    pub tail_bound: f64,
}

/// Compensated (Neumaier) summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn rho(dist_sq: f64, s: f64) -> f64 {
    (-PI * dist_sq / (s * s)).exp()
}

/// Upper bound on `ρ_s(L)` from the Gram–Schmidt lengths.
fn mass_scale(e: &Enumerator, s: f64) -> f64 {
    e.gs_sq_norms().iter().map(|sq| 1.0 + s / sq.sqrt()).product()
}

/// Smallest `t ≥ 1/√(2π)` (to bisection accuracy) with `scale·f(t)^d < eps`,
/// where `f(t) = √(2πe)·t·e^{−πt²}` bounds the mass outside radius `t·s·√d`.
fn tail_factor(d: usize, scale: f64, eps: f64) -> (f64, f64) {
    let f = |t: f64| (2.0 * PI * E).sqrt() * t * (-PI * t * t).exp();
    let bound = |t: f64| scale * f(t).powi(d as i32);
    let t0 = 1.0 / (2.0 * PI).sqrt();
    if bound(t0) < eps {
        return (t0, bound(t0));
    }
    let mut hi = 1.0;
    while bound(hi) >= eps {
        hi *= 2.0;
    }
    let mut lo = t0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if bound(mid) < eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (hi, bound(hi))
}

/// The radius around the center that leaves less than `tail_eps` of mass outside.
pub fn truncation_radius(e: &Enumerator, s: f64, tail_eps: f64) -> (f64, f64) {
    let d = e.rank();
    let (t, tail) = tail_factor(d, mass_scale(e, s), tail_eps);
    (t * s * (d as f64).sqrt(), tail)
}

impl Enumerator {
    /// `Σ_{y∈L} ρ_s(y + shift)` for an ambient shift given in floating point.
    pub fn rho_sum(&self, shift: &[f64], s: f64, tail_eps: f64) -> RhoSum {
        let d = self.rank();
        let neg: Vec<f64> = shift.iter().map(|x| -x).collect();
        let c = self.center(&neg);
        let perp = rho(c.perp_sq, s);
        if d == 0 {
            return RhoSum { value: perp, truncation_radius: 0.0, tail_bound: 0.0 };
        }
        let (r, tail) = truncation_radius(self, s, tail_eps);
        let mut acc = KahanSum::default();
        self.visit(&c, r * r, &mut |_, dsq| acc.add(rho(dsq, s)));
        RhoSum { value: perp * acc.value(), truncation_radius: r, tail_bound: perp * tail }
    }
}

pub fn rho_sum(b: &Basis, shift: &[f64], s: f64, tail_eps: f64) -> Result<RhoSum> {
    check_param(s)?;
    if !(tail_eps > 0.0) {
        return Err(Error::InvalidArgument("tail_eps must be positive".into()));
    }
    if shift.len() != b.ambient_dim() {
        return Err(Error::Dimension(format!("shift has {} coordinates, expected {}", shift.len(), b.ambient_dim())));
    }
    Ok(Enumerator::new(b, MAX_ENUM_RANK, "rho_sum")?.rho_sum(shift, s, tail_eps))
}

pub(crate) fn check_param(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("Gaussian parameter {s} must be positive and finite")))
    }
}

/// Bracketed smoothing parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SmoothingEstimate {
    pub eta: f64,
    pub eps: f64,
    pub bracket: (f64, f64),
}

pub const SMOOTHING_MAX_RANK: usize = 10;

/// `η_ε(L)`: the `s` with `ρ_{1/s}(L* ∖ {0}) = ε`, by bisection to relative width 1e-9.
pub fn smoothing_param(b: &Basis, eps: f64) -> Result<SmoothingEstimate> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("eps = {eps} must lie in (0, 1)")));
    }
    if b.rank() > SMOOTHING_MAX_RANK {
        return Err(Error::RankTooHigh { op: "smoothing_param", rank: b.rank(), limit: SMOOTHING_MAX_RANK });
    }
    if b.rank() == 0 {
        return Ok(SmoothingEstimate { eta: 0.0, eps, bracket: (0.0, 0.0) });
    }
    let dual = dual_basis(b);
    let e = Enumerator::new(&dual, SMOOTHING_MAX_RANK, "smoothing_param")?;
    let zero = vec![0.0; b.ambient_dim()];
    let tail_eps = eps * 1e-12;
    // Lower and upper estimates of the dual mass without the origin at parameter 1/s.
    let mass = |s: f64| {
        let r = e.rho_sum(&zero, 1.0 / s, tail_eps);
        (r.value - 1.0, r.value - 1.0 + r.tail_bound)
    };
    let lam = lambda1(&dual)?.norm;
    // The two shortest dual vectors alone carry mass 2ε at this point.
    let mut lo = ((1.0 / eps).ln() / PI).sqrt() / lam;
    let mut hi = 2.0 * lo;
    while mass(hi).1 > eps {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo) > 1e-9 * hi {
        let mid = 0.5 * (lo + hi);
        if mass(mid).0 > eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(SmoothingEstimate { eta: 0.5 * (lo + hi), eps, bracket: (lo, hi) })
}

/// Gaussian mass of every coset of `Lsub` in `L`.
#[derive(Clone, Debug)]
pub struct CosetWeights {
    pub quotient: Quotient,
    /// `ρ_s(c)` per coset, indexed by [`Quotient::label_index`].
    pub masses: Vec<f64>,
    /// `ρ_s(L)`.
    pub total: f64,
    pub weights: ProbVector,
}

pub const MAX_COSET_INDEX: u64 = 4096;
pub const COSET_MAX_RANK: usize = 10;

pub fn coset_weights(l: &Basis, lsub: &Basis, s: f64) -> Result<CosetWeights> {
    check_param(s)?;
    if l.rank() > COSET_MAX_RANK {
        return Err(Error::RankTooHigh { op: "coset_weights", rank: l.rank(), limit: COSET_MAX_RANK });
    }
    let q = Quotient::new(l, lsub)?;
    if q.index() > MAX_COSET_INDEX {
        return Err(Error::IndexTooLarge { index: q.index() as u128, limit: MAX_COSET_INDEX as u128 });
    }
    let e = Enumerator::new(l, COSET_MAX_RANK, "coset_weights")?;
    let (r, _) = truncation_radius(&e, s, 1e-15);
    let mut acc = vec![KahanSum::default(); q.index() as usize];
    e.visit(&e.origin(), r * r, &mut |x, dsq| {
        let c = e.to_basis_coeffs(x);
        acc[q.label_index(&c)].add(rho(dsq, s));
    });
    let masses: Vec<f64> = acc.iter().map(KahanSum::value).collect();
    let mut total_acc = KahanSum::default();
    masses.iter().for_each(|m| total_acc.add(*m));
    let total = total_acc.value();
    let weights = ProbVector::from_weights(&masses)?;
    let zero = q.label_index(&vec![0; l.rank()]);
    assert!(
        weights.probs[zero] >= weights.p_max * (1.0 - 1e-9),
        "the zero coset must carry the largest mass"
    );
    Ok(CosetWeights { quotient: q, masses, total, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::linalg::rat;

    const RHO_Z_1: f64 = 1.086_434_811_213_308;

    fn direct_z(s: f64, parity: Option<i64>) -> f64 {
        let mut acc = KahanSum::default();
        for k in (-400i64..=400).rev() {
            if parity.is_none_or(|p| k.rem_euclid(2) == p) {
                acc.add(rho((k * k) as f64, s));
            }
        }
        acc.value()
    }

    #[test]
    fn integers_at_unit_width() {
        let r = rho_sum(&Basis::identity(1), &[0.0], 1.0, 1e-15).unwrap();
        assert!((r.value - RHO_Z_1).abs() < 1e-12);
        assert!((r.value - direct_z(1.0, None)).abs() < 1e-14);
        assert!(r.tail_bound < 1e-15);
    }

    #[test]
    fn zero_lattice_is_a_single_point() {
        let r = rho_sum(&Basis::zero(2), &[0.0, 0.0], 1.0, 1e-15).unwrap();
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn product_structure_in_two_dimensions() {
        let r = rho_sum(&Basis::identity(2), &[0.0, 0.0], 1.0, 1e-15).unwrap();
        assert!((r.value - RHO_Z_1 * RHO_Z_1).abs() < 1e-12);
    }

    #[test]
    fn shifted_sum_matches_direct_summation() {
        let r = rho_sum(&Basis::identity(1), &[0.3], 1.7, 1e-15).unwrap();
        let mut acc = KahanSum::default();
        for k in -200i64..=200 {
            acc.add(rho((k as f64 + 0.3).powi(2), 1.7));
        }
        assert!((r.value - acc.value()).abs() < 1e-13);
    }

    #[test]
    fn even_odd_weights_at_root_two() {
        let two_z = Basis::from_integer_rows(&[vec![2]]).unwrap();
        let w = coset_weights(&Basis::identity(1), &two_z, 2f64.sqrt()).unwrap();
        let even = direct_z(2f64.sqrt(), Some(0));
        let odd = direct_z(2f64.sqrt(), Some(1));
        assert!((w.weights.probs[0] - even / (even + odd)).abs() < 1e-12);
        // Poisson summation gives ρ_s(2Z)/ρ_s(Z) = 1/√2 at s = √2.
        assert!((w.weights.probs[0] - 0.707_106_781_186_547_6).abs() < 1e-12);
        assert!((w.weights.probs[1] - 0.292_893_218_813_452_5).abs() < 1e-12);
    }

    #[test]
    fn coset_weights_flatten_at_large_width() {
        let two_z = Basis::from_integer_rows(&[vec![2]]).unwrap();
        let w = coset_weights(&Basis::identity(1), &two_z, 100.0).unwrap();
        assert!((w.weights.probs[0] - 0.5).abs() < 1e-3);
        let same = coset_weights(&Basis::identity(2), &Basis::identity(2), 1.0).unwrap();
        assert_eq!(same.weights.probs, vec![1.0]);
    }

    #[test]
    fn smoothing_scales_with_the_lattice() {
        let z2 = Basis::identity(2);
        let a = smoothing_param(&z2, 0.5).unwrap();
        let b = smoothing_param(&z2.scaled(&rat(3)), 0.5).unwrap();
        assert!((b.eta - 3.0 * a.eta).abs() < 1e-8 * b.eta);
        assert!(a.bracket.0 <= a.eta && a.eta <= a.bracket.1);
    }

    #[test]
    fn smoothing_of_integers_near_one() {
        // ρ_{1}(Z ∖ {0}) computed directly.
        let eps = direct_z(1.0, None) - 1.0;
        let est = smoothing_param(&Basis::identity(1), eps).unwrap();
        assert!((est.eta - 1.0).abs() < 1e-8);
    }
}
