use std::collections::BTreeSet;

use num::{ToPrimitive, Zero};
use rand::RngCore;

use super::svp::grid_lift;
use super::{offer, Best, DgsProvider, ReductionConstants};
use crate::batch::LatticePoint;
use crate::error::{Error, Result};
use crate::lattice::gso::gram_schmidt;
use crate::lattice::reduce::{reduce_basis, ReductionProfile};
use crate::lattice::sublattice::apply_transform;
use crate::lattice::{linalg, Basis, Rational};
use crate::oracle::nearest_plane;

/// Result of [`approx_cvp`]; `point` is `None` when no batch held a usable candidate.
#[derive(Clone, Debug)]
pub struct CvpOutcome {
    pub point: Option<LatticePoint>,
    pub distance: f64,
    /// Distance of the nearest-plane estimate.
    pub estimate: f64,
    pub params_tried: usize,
}

/// Rows `(b_i, 0)` followed by `(−t, s)`.
pub fn embedding_basis(l: &Basis, target: &[Rational], s: &Rational) -> Result<Basis> {
    let n = l.ambient_dim();
    let mut rows: Vec<Vec<Rational>> = l
        .rows()
        .iter()
        .map(|r| r.iter().cloned().chain(std::iter::once(Rational::zero())).collect())
        .collect();
    rows.push(target.iter().map(|x| -x).chain(std::iter::once(s.clone())).collect());
    Basis::new(rows, n + 1)
}

fn dist_sq(l: &Basis, coeffs: &[i64], target: &[Rational]) -> Rational {
    l.ambient(coeffs).iter().zip(target).map(|(a, t)| (a - t) * (a - t)).sum()
}

fn in_span(l: &Basis, target: &[Rational]) -> bool {
    if l.rank() == l.ambient_dim() {
        return true;
    }
    let g = gram_schmidt(l);
    let mut v = target.to_vec();
    for (bt, n2) in g.gs_vectors.iter().zip(&g.gs_sq_norms) {
        let c = linalg::dot(&v, bt) / n2;
        for (x, y) in v.iter_mut().zip(bt) {
            *x -= &c * y;
        }
    }
    v.iter().all(|x| x.is_zero())
}

/// Approximate closest vector through the embedding lattice: for widths
/// `s_j = d̃/(1+1/n)^j`, `j = 1, …, 10n²`, samples the lattice spanned by `L × {0}`
/// and `(−t, s_j)`, turns each sample with last coefficient `±1` into the lattice
/// point `±Σ c_i b_i`, and returns the candidate closest to `t`. `d̃` is the
/// nearest-plane distance on the reduced basis; if it is 0 that point is returned.
/// When `α/√n > 1` the grid starts at `j = −k` instead, with `k` the least
/// integer such that `(1+1/n)^k ≥ α/√n`.
pub fn approx_cvp(
    l: &Basis,
    target: &[Rational],
    oracle: &mut dyn DgsProvider,
    per_param: usize,
    rng: &mut dyn RngCore,
) -> Result<CvpOutcome> {
    let n = l.rank();
    if target.len() != l.ambient_dim() {
        return Err(Error::Dimension(format!("target has {} coordinates, expected {}", target.len(), l.ambient_dim())));
    }
    if n == 0 || !in_span(l, target) {
        return Err(Error::Precondition("target is not in the span of the lattice".into()));
    }
    let red = reduce_basis(l, ReductionProfile::Lll);
    let babai = apply_transform(&nearest_plane(&red.basis, target), &red.transform);
    let estimate_sq = dist_sq(l, &babai, target);
    let estimate = linalg::rat_to_f64(&estimate_sq).sqrt();
    if estimate_sq.is_zero() {
        return Ok(CvpOutcome { point: Some(LatticePoint::new(babai)), distance: 0.0, estimate, params_tried: 0 });
    }
    let delta = ReductionConstants::cvp_delta(n);
    let up = grid_lift(ReductionConstants::default().cvp_alpha / (n as f64).sqrt(), 1.0 + delta);
    let first = if up > 0 { -up } else { 1 };
    let last = 10 * (n * n) as i32;
    let steps = (last - first + 1) as usize;
    let tf: Vec<f64> = target.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    let mut best: Option<Best<Rational>> = None;
    for j in first..=last {
        let s = estimate / (1.0 + delta).powi(j);
        let s_rat = Rational::from_float(s).ok_or_else(|| Error::InvalidArgument("width is not finite".into()))?;
        let emb = embedding_basis(l, target, &s_rat)?;
        let batch = oracle.request(&emb, s, per_param, rng)?;
        let candidates: BTreeSet<Vec<i64>> = batch
            .points
            .iter()
            .filter(|p| p.coeffs[n].abs() == 1)
            .map(|p| p.coeffs[..n].iter().map(|c| c * p.coeffs[n]).collect())
            .collect();
        for c in &candidates {
            let approx: f64 = l.ambient_f64(c).iter().zip(&tf).map(|(a, t)| (a - t) * (a - t)).sum();
            offer(&mut best, c, approx, |c| dist_sq(l, c, target), |a, b| a < b);
        }
    }
    Ok(match best {
        Some(b) => CvpOutcome {
            distance: linalg::rat_to_f64(&b.exact).sqrt(),
            point: Some(LatticePoint::new(b.coeffs)),
            estimate,
            params_tried: steps,
        },
        None => CvpOutcome { point: None, distance: f64::NAN, estimate, params_tried: steps },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::linalg::rat;
    use crate::reductions::ExactProvider;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn target_in_the_lattice_is_returned() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let z2 = Basis::identity(2);
        let out = approx_cvp(&z2, &[rat(2), rat(3)], &mut ExactProvider::new(), 100, &mut rng).unwrap();
        assert_eq!(out.point.unwrap().coeffs, vec![2, 3]);
        assert_eq!(out.distance, 0.0);
    }

    #[test]
    fn embedding_rows() {
        let z1 = Basis::identity(1);
        let e = embedding_basis(&z1, &[Rational::new(1.into(), 2.into())], &rat(3)).unwrap();
        assert_eq!(e.ambient_dim(), 2);
        assert_eq!(e.rows()[1], vec![Rational::new((-1).into(), 2.into()), rat(3)]);
    }

    #[test]
    fn target_outside_the_span_is_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let b = Basis::from_integer_rows(&[vec![1, 0]]).unwrap();
        assert!(approx_cvp(&b, &[rat(0), rat(1)], &mut ExactProvider::new(), 10, &mut rng).is_err());
    }
}
