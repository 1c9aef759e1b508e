//! Gaussian combiners and the end-to-end samplers built on them.

mod halve;
mod smooth;
mod sqrt;

pub use halve::{combine_halve, general_dgs, general_pipeline, parity_label, Combined, GeneralOutput};
pub use smooth::{smooth_dgs, SmoothConfig};
pub use sqrt::{sqrt_combine, tower_pipeline, SqrtCombined, SqrtFailure};

use serde::{Deserialize, Serialize};

use crate::batch::SampleBatch;
use crate::error::{Error, Result};
use crate::profile::Constants;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombinerConfig {
    pub kappa: f64,
    pub ell: usize,
    pub r: usize,
    pub a: usize,
    pub consts: Constants,
}

impl CombinerConfig {
    pub fn new(kappa: f64, ell: usize, consts: Constants) -> Result<Self> {
        check_kappa(kappa)?;
        Ok(Self { kappa, ell, r: 2, a: 0, consts })
    }
}

pub(crate) fn check_kappa(kappa: f64) -> Result<()> {
    if kappa >= 2.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("kappa = {kappa} must be at least 2")))
    }
}

/// Output of an honest sampler: either the full quota or nothing.
#[derive(Clone, Debug)]
pub struct HonestBatch {
    pub batch: SampleBatch,
    pub requested_m: usize,
    pub produced_m: usize,
    /// Set when the sampler refused; advisory only.
    pub below_smoothing_flag: bool,
}

impl HonestBatch {
    pub fn full(batch: SampleBatch, requested_m: usize) -> Self {
        debug_assert_eq!(batch.len(), requested_m);
        Self { produced_m: batch.len(), batch, requested_m, below_smoothing_flag: false }
    }

    pub fn refused(mut batch: SampleBatch, requested_m: usize) -> Self {
        batch.points.clear();
        Self { batch, requested_m, produced_m: 0, below_smoothing_flag: true }
    }

    pub fn is_empty(&self) -> bool {
        self.produced_m == 0
    }
}

/// Statistical-distance allowance attached to resampled batches: the
/// unquantified `M·exp(−Ω(κ))` terms, with both constants set to 1.
pub(crate) fn resample_tv(input_tv: f64, m: usize, kappa: f64) -> f64 {
    (input_tv + m as f64 * (-kappa).exp()).min(1.0)
}
