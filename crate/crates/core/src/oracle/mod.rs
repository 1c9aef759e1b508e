//! Brute-force ground truth at desk scale.

pub mod enumerate;
pub mod exact;
pub mod rho;

pub use enumerate::{enumerate_ball, Enumerator};
pub use exact::{cvp_exact, exact_dgs_sample, lambda1, nearest_plane, ExactSampler, ShortestVector};
pub use rho::{coset_weights, rho_sum, smoothing_param, CosetWeights, RhoSum, SmoothingEstimate};
