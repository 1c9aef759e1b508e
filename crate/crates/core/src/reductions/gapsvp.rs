use std::f64::consts::PI;

use rand::RngCore;

use super::{DgsProvider, ReductionConstants};
use crate::batch::SampleBatch;
use crate::error::{Error, Result};
use crate::lattice::{dual_basis, Basis};

/// Largest dimension handled by the eigenvalue routine.
pub const MAX_COVARIANCE_DIM: usize = 16;

/// The second-moment test statistic `‖I/(2π) − Σ/s²‖₂` of a batch.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceStat {
    pub sigma_hat: Vec<Vec<f64>>,
    pub statistic: f64,
    pub m: usize,
    pub s: f64,
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(mut a: Vec<Vec<f64>>, tol: f64) -> Vec<f64> {
    let n = a.len();
    let frob: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= tol * frob || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Sample second moment of the batch's ambient vectors and the spectral norm
/// of `I/(2π) − Σ/s²`.
pub fn covariance_statistic(batch: &SampleBatch) -> Result<CovarianceStat> {
    if batch.is_empty() {
        return Err(Error::InvalidArgument("covariance of an empty batch".into()));
    }
    let n = batch.basis.ambient_dim();
    if n > MAX_COVARIANCE_DIM {
        return Err(Error::RankTooHigh { op: "covariance_statistic", rank: n, limit: MAX_COVARIANCE_DIM });
    }
    let m = batch.len();
    let mut sigma = vec![vec![0.0; n]; n];
    for x in batch.ambient_f64() {
        for i in 0..n {
            for j in 0..=i {
                sigma[i][j] += x[i] * x[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..=i {
            sigma[i][j] /= m as f64;
            sigma[j][i] = sigma[i][j];
        }
    }
    let s2 = batch.param * batch.param;
    let diff: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 / (2.0 * PI) } else { 0.0 } - sigma[i][j] / s2).collect())
        .collect();
    let statistic = symmetric_eigenvalues(diff, 1e-14).iter().fold(0.0f64, |acc, e| acc.max(e.abs()));
    Ok(CovarianceStat { sigma_hat: sigma, statistic, m, s: batch.param })
}

/// Outcome of [`decide_gapsvp`].
#[derive(Clone, Debug, PartialEq)]
pub struct GapSvpDecision {
    /// `true` means "λ₁ < d" (yes), `false` means "λ₁ ≥ γd" (no).
    pub yes: bool,
    /// `None` when the oracle under-delivered.
    pub statistic: Option<f64>,
    pub threshold: f64,
    pub s: f64,
}

/// Samples the dual lattice at `s = √(ln(1/ε)/π)/d` and answers yes on
/// under-delivery or when the covariance statistic reaches `ε·ln(1/ε)/(10n)`.
pub fn decide_gapsvp(
    l: &Basis,
    d: f64,
    eps: f64,
    oracle: &mut dyn DgsProvider,
    m: usize,
    rng: &mut dyn RngCore,
) -> Result<GapSvpDecision> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidArgument(format!("distance d = {d} must be positive")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("eps = {eps} must lie in (0, 1)")));
    }
    let n = l.rank();
    let s = ((1.0 / eps).ln() / PI).sqrt() / d;
    let threshold = ReductionConstants::gapsvp_threshold(eps, n);
    let dual = dual_basis(l);
    let batch = oracle.request(&dual, s, m, rng)?;
    if batch.len() < m || batch.is_empty() {
        return Ok(GapSvpDecision { yes: true, statistic: None, threshold, s });
    }
    let stat = covariance_statistic(&batch)?.statistic;
    Ok(GapSvpDecision { yes: stat >= threshold, statistic: Some(stat), threshold, s })
}
