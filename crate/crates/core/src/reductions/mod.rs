//! Problem-level reductions to discrete Gaussian sampling: shortest vectors,
//! the decisional gap problem, and approximate closest vectors.

mod cvp;
mod gapsvp;
mod provider;
mod svp;

pub use cvp::{approx_cvp, embedding_basis, CvpOutcome};
pub use gapsvp::{covariance_statistic, decide_gapsvp, symmetric_eigenvalues, CovarianceStat, GapSvpDecision};
pub use provider::{DgsProvider, ExactProvider, GeneralProvider, SmoothProvider};
pub use svp::{grid_covers, optimal_svp_param, solve_svp, svp_grid, SvpOutcome};

use serde::{Deserialize, Serialize};

/// Constants of the reductions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionConstants {
    pub beta: f64,
    /// `√(2πe/β²)`, the multiplier of `λ₁/√n` in the optimal SVP width.
    pub svp_s_factor: f64,
    pub cvp_alpha: f64,
    pub cvp_t: f64,
    pub cvp_gamma: f64,
    pub gapsvp_eps: f64,
}

impl ReductionConstants {
    pub fn new(gapsvp_eps: f64) -> Self {
        let beta = 2f64.powf(0.401);
        Self {
            beta,
            svp_s_factor: (2.0 * std::f64::consts::PI * std::f64::consts::E / (beta * beta)).sqrt(),
            cvp_alpha: (2.0 * std::f64::consts::PI / std::f64::consts::LN_2).sqrt(),
            cvp_t: 0.654,
            cvp_gamma: 1.97,
            gapsvp_eps,
        }
    }

    pub fn cvp_delta(n: usize) -> f64 {
        1.0 / n.max(1) as f64
    }

    /// `ε·ln(1/ε)/(10n)`.
    pub fn gapsvp_threshold(eps: f64, n: usize) -> f64 {
        eps * (1.0 / eps).ln() / (10.0 * n as f64)
    }
}

impl Default for ReductionConstants {
    fn default() -> Self {
        Self::new(0.05)
    }
}

/// Tracks the best coefficient vector under a floating-point key, settling
/// near-ties with an exact key and then a preference order.
pub(crate) struct Best<K: Ord> {
    pub coeffs: Vec<i64>,
    pub approx: f64,
    pub exact: K,
}

pub(crate) fn offer<K: Ord>(
    best: &mut Option<Best<K>>,
    coeffs: &[i64],
    approx: f64,
    exact: impl Fn(&[i64]) -> K,
    prefer: impl Fn(&[i64], &[i64]) -> bool,
) {
    const REL: f64 = 1e-9;
    let replace = match best {
        None => true,
        Some(b) if b.coeffs == coeffs => false,
        Some(b) if approx < b.approx * (1.0 - REL) - f64::MIN_POSITIVE => true,
        Some(b) if approx > b.approx * (1.0 + REL) + f64::MIN_POSITIVE => false,
        Some(b) => {
            let k = exact(coeffs);
            k < b.exact || (k == b.exact && prefer(coeffs, &b.coeffs))
        }
    };
    if replace {
        *best = Some(Best { coeffs: coeffs.to_vec(), approx, exact: exact(coeffs) });
    }
}
