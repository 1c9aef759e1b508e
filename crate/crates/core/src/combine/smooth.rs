use rand::Rng;

use super::{check_kappa, tower_pipeline, HonestBatch};
use crate::batch::{LatticePoint, SampleBatch, Source};
use crate::error::{Error, Result};
use crate::lattice::sublattice::apply_transform;
use crate::lattice::{make_tower, random_superlattice, sublattice_transform, Basis};
use crate::profile::Constants;
use crate::sampling::start_gauss;

/// Start-up samples drawn per requested output under the desk profile.
pub const DESK_INPUT_PER_OUTPUT: usize = 16_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothConfig {
    pub kappa: f64,
    /// Start-up batch size; `None` picks the profile default.
    pub input_size: Option<usize>,
}

impl SmoothConfig {
    pub fn new(kappa: f64) -> Self {
        Self { kappa, input_size: None }
    }

    fn input_size(&self, m: usize, n: usize, consts: &Constants) -> Result<usize> {
        if let Some(sz) = self.input_size {
            return Ok(sz);
        }
        if consts.is_paper() {
            let ell = consts.tower_ell(n) as i32;
            let a = consts.tower_a(n) as i32;
            let need = (consts.c_sqrt() * self.kappa.powi(4)).powi(ell + 1) * 2f64.powi(a);
            if need > consts.max_input {
                return Err(Error::Precondition(format!("paper-profile input size {need:.3e} exceeds the cap")));
            }
            Ok(need as usize)
        } else {
            Ok(DESK_INPUT_PER_OUTPUT * m.max(1))
        }
    }
}

/// Honest sampler above the smoothing parameter: either `m` samples of
/// `D_{L,s}` or none.
///
/// Each of up to `⌈κ⌉` attempts draws a random superlattice `L'` of index
/// `2^a`, builds a tower from `L'` down to `L`, draws start-up samples on the
/// bottom level at `2^{−ℓ/2}·s`, and runs the tower pipeline. An attempt is
/// abandoned when the start-up sublattice is proper or the pipeline refuses.
pub fn smooth_dgs<R: Rng + ?Sized>(
    l: &Basis,
    s: f64,
    m: usize,
    cfg: &SmoothConfig,
    consts: &Constants,
    rng: &mut R,
) -> Result<HonestBatch> {
    check_kappa(cfg.kappa)?;
    crate::oracle::rho::check_param(s)?;
    let n = l.rank();
    if n < 2 {
        return Err(Error::Precondition("smooth_dgs needs rank at least 2".into()));
    }
    let refused = |m| HonestBatch::refused(SampleBatch::empty(l.clone(), s, Source::Smooth), m);
    if m == 0 {
        return Ok(HonestBatch::full(SampleBatch::empty(l.clone(), s, Source::Smooth), 0));
    }
    let a = consts.tower_a(n);
    let ell = consts.tower_ell(n);
    let size = cfg.input_size(m, n, consts)?;
    let s_start = s * 2f64.powf(-(ell as f64) / 2.0);
    for _ in 0..cfg.kappa.ceil() as usize {
        let lprev = random_superlattice(l, a, rng)?;
        let tower = make_tower(l, &lprev, a, ell)?;
        let bottom = tower.bottom();
        let start = start_gauss(bottom, 2, size, s_start, consts, rng)?;
        if !start.is_full_rank(n) {
            continue;
        }
        let points = start.batch.points.iter().map(|p| LatticePoint::new(start.to_input_coeffs(&p.coeffs))).collect();
        let input = SampleBatch::new(bottom.clone(), s_start, Source::Gpv, points, start.batch.claimed_tv_error);
        let out = tower_pipeline(&tower, cfg.kappa, &input, consts, rng)?;
        if out.produced_m < m {
            continue;
        }
        let t = sublattice_transform(l, tower.top())?;
        let points = out.batch.points[..m]
            .iter()
            .map(|p| LatticePoint::new(apply_transform(&p.coeffs, &t)))
            .collect();
        let batch = SampleBatch::new(l.clone(), s, Source::Smooth, points, out.batch.claimed_tv_error);
        return Ok(HonestBatch::full(batch, m));
    }
    Ok(refused(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn all_or_nothing() {
        let mut rng = ChaCha20Rng::seed_from_u64(21);
        let z2 = Basis::identity(2);
        let cfg = SmoothConfig { kappa: 2.0, input_size: Some(400_000) };
        for &s in &[0.3, 3.0] {
            let out = smooth_dgs(&z2, s, 16, &cfg, &Constants::desk(), &mut rng).unwrap();
            assert!(out.produced_m == 0 || out.produced_m == 16);
            assert_eq!(out.batch.len(), out.produced_m);
            assert_eq!(out.batch.basis_id(), z2.id());
        }
    }

    #[test]
    fn narrow_width_is_refused() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let z2 = Basis::identity(2);
        let cfg = SmoothConfig { kappa: 2.0, input_size: Some(10_000) };
        let out = smooth_dgs(&z2, 0.3, 8, &cfg, &Constants::desk(), &mut rng).unwrap();
        assert!(out.is_empty());
        assert!(out.below_smoothing_flag);
    }
}
