use rand::RngCore;

use crate::batch::SampleBatch;
use crate::combine::{general_dgs, smooth_dgs, SmoothConfig};
use crate::error::Result;
use crate::lattice::{Basis, BasisId};
use crate::oracle::ExactSampler;
use crate::profile::Constants;

/// A source of discrete Gaussian batches. A batch shorter than requested is an
/// under-delivery.
pub trait DgsProvider {
    fn name(&self) -> &'static str;
    fn request(&mut self, basis: &Basis, s: f64, m: usize, rng: &mut dyn RngCore) -> Result<SampleBatch>;
}

/// Draws from the brute-force oracle, reusing the last sampler when basis and
/// width repeat.
#[derive(Default)]
pub struct ExactProvider {
    cache: Option<(BasisId, u64, ExactSampler)>,
}

impl ExactProvider {
    pub fn new() -> Self {
        Self::default()
    }
}

impl DgsProvider for ExactProvider {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn request(&mut self, basis: &Basis, s: f64, m: usize, rng: &mut dyn RngCore) -> Result<SampleBatch> {
        let key = (basis.id(), s.to_bits());
        let hit = matches!(&self.cache, Some((id, bits, _)) if (*id, *bits) == key);
        if !hit {
            self.cache = Some((key.0, key.1, ExactSampler::new(basis, s)?));
        }
        let sampler = &self.cache.as_ref().expect("filled above").2;
        Ok(sampler.sample_batch(m, rng))
    }
}

/// Runs the any-width sampler and keeps at most `m` outputs.
pub struct GeneralProvider {
    pub kappa: f64,
    pub input_size: usize,
    pub consts: Constants,
}

impl DgsProvider for GeneralProvider {
    fn name(&self) -> &'static str {
        "general"
    }

    fn request(&mut self, basis: &Basis, s: f64, m: usize, rng: &mut dyn RngCore) -> Result<SampleBatch> {
        let mut out = general_dgs(basis, s, self.kappa, self.input_size, &self.consts, rng)?.batch;
        out.points.truncate(m);
        Ok(out)
    }
}

/// The honest sampler: exactly `m` outputs or none.
pub struct SmoothProvider {
    pub cfg: SmoothConfig,
    pub consts: Constants,
}

impl DgsProvider for SmoothProvider {
    fn name(&self) -> &'static str {
        "smooth"
    }

    fn request(&mut self, basis: &Basis, s: f64, m: usize, rng: &mut dyn RngCore) -> Result<SampleBatch> {
        Ok(smooth_dgs(basis, s, m, &self.cfg, &self.consts, rng)?.batch)
    }
}
