use std::collections::BTreeSet;

use rand::RngCore;

use super::{offer, Best, DgsProvider, ReductionConstants};
use crate::batch::LatticePoint;
use crate::error::{Error, Result};
use crate::lattice::reduce::{first_vector_norm, reduce_basis, ReductionProfile};
use crate::lattice::{Basis, Rational};

/// Result of [`solve_svp`]; `point` is `None` when no batch held a nonzero vector.
#[derive(Clone, Debug)]
pub struct SvpOutcome {
    pub point: Option<LatticePoint>,
    pub norm: f64,
    pub norm_sq: Option<Rational>,
    /// Grid index of the first batch with a nonzero vector.
    pub first_hit: Option<usize>,
    pub params_tried: usize,
}

/// `√(2πe/(β²n))·λ₁`.
pub fn optimal_svp_param(lambda1_value: f64, n: usize) -> Result<f64> {
    if !(lambda1_value > 0.0 && lambda1_value.is_finite()) || n == 0 {
        return Err(Error::InvalidArgument("need λ₁ > 0 and n ≥ 1".into()));
    }
    Ok(ReductionConstants::default().svp_s_factor * lambda1_value / (n as f64).sqrt())
}

/// Widths `1.01^{−i}·d` for `i = −k, …, 100n`, where `k` is the least
/// nonnegative integer with `1.01^k ≥ √(2πe/(β²n))`, so the top of the grid
/// reaches the optimal width whenever `d ≥ λ₁`. For `n ≥ 10`, `k = 0`.
pub fn svp_grid(d: f64, n: usize) -> Vec<f64> {
    let up = grid_lift(ReductionConstants::default().svp_s_factor / (n as f64).sqrt(), 1.01);
    (-up..=100 * n as i32).map(|i| d * 1.01f64.powi(-i)).collect()
}

/// Least `k ≥ 0` with `ratio^k ≥ factor`.
pub(crate) fn grid_lift(factor: f64, ratio: f64) -> i32 {
    if factor <= 1.0 {
        0
    } else {
        (factor.ln() / ratio.ln()).ceil() as i32
    }
}

/// Whether some grid width lies within a factor 1.01 of `target`.
pub fn grid_covers(d: f64, n: usize, target: f64) -> bool {
    svp_grid(d, n).iter().any(|&s| s <= target * 1.01 && s >= target / 1.01)
}

/// Requests `trials_per_param` samples at every grid width starting from the
/// reduced basis's first-vector length, and returns the shortest nonzero
/// vector seen. Ties go to the lexicographically greatest coefficient vector.
pub fn solve_svp(
    l: &Basis,
    oracle: &mut dyn DgsProvider,
    trials_per_param: usize,
    rng: &mut dyn RngCore,
) -> Result<SvpOutcome> {
    let n = l.rank();
    if n == 0 {
        return Err(Error::InvalidArgument("the zero lattice has no nonzero vector".into()));
    }
    let d = first_vector_norm(&reduce_basis(l, ReductionProfile::Lll));
    let grid = svp_grid(d, n);
    let mut best: Option<Best<Rational>> = None;
    let mut first_hit = None;
    for (i, &s) in grid.iter().enumerate() {
        let batch = oracle.request(l, s, trials_per_param, rng)?;
        if batch.basis_id() != l.id() {
            return Err(Error::InvalidArgument("provider answered over a different basis".into()));
        }
        let distinct: BTreeSet<&Vec<i64>> = batch.points.iter().map(|p| &p.coeffs).filter(|c| c.iter().any(|&x| x != 0)).collect();
        if !distinct.is_empty() && first_hit.is_none() {
            first_hit = Some(i);
        }
        for c in distinct {
            let approx: f64 = l.ambient_f64(c).iter().map(|x| x * x).sum();
            offer(&mut best, c, approx, |c| l.norm_sq(c), |a, b| a > b);
        }
    }
    Ok(match best {
        Some(b) => SvpOutcome {
            norm: crate::lattice::linalg::rat_to_f64(&b.exact).sqrt(),
            norm_sq: Some(b.exact),
            point: Some(LatticePoint::new(b.coeffs)),
            first_hit,
            params_tried: grid.len(),
        },
        None => SvpOutcome { point: None, norm: f64::NAN, norm_sq: None, first_hit, params_tried: grid.len() },
    })
}
