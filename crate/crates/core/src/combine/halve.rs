use rand::Rng;

use super::{check_kappa, resample_tv, CombinerConfig};
use crate::batch::{LatticePoint, SampleBatch, Source};
use crate::error::{Error, Result};
use crate::lattice::gso::gram_schmidt;
use crate::lattice::reduce::{reduce_basis, ReductionProfile};
use crate::lattice::Basis;
use crate::profile::Constants;
use crate::resample::{square_sample, ResampleFailure};
use crate::sampling::start_gauss;

/// Largest rank for which cosets of `2L` are enumerated as labels.
const MAX_PARITY_RANK: usize = 20;

/// Index of the coset of `2L` containing the point: the parity bits of its coefficients.
pub fn parity_label(coeffs: &[i64]) -> usize {
    coeffs.iter().enumerate().fold(0, |acc, (i, c)| acc | (((c & 1) as usize) << i))
}

/// A combiner's output with its pairing audit trail.
#[derive(Clone, Debug)]
pub struct Combined {
    pub batch: SampleBatch,
    /// Input indices combined into each output point, in output order.
    pub pairs: Vec<(usize, usize)>,
    pub failure: Option<ResampleFailure>,
}

impl Combined {
    fn failed(basis: Basis, param: f64, f: ResampleFailure) -> Self {
        Self { batch: SampleBatch::empty(basis, param, Source::Combiner), pairs: Vec::new(), failure: Some(f) }
    }
}

/// Pairs points of the same coset of `2L` chosen by the square sampler and
/// outputs their averages, turning `D_{L,s}` samples into `D_{L,s/√2}` samples.
pub fn combine_halve<R: Rng + ?Sized>(l: &Basis, kappa: f64, input: &SampleBatch, rng: &mut R) -> Result<Combined> {
    check_kappa(kappa)?;
    if input.basis_id() != l.id() {
        return Err(Error::InvalidArgument("input batch is not expressed in the given basis".into()));
    }
    let d = l.rank();
    if d > MAX_PARITY_RANK {
        return Err(Error::RankTooHigh { op: "combine_halve", rank: d, limit: MAX_PARITY_RANK });
    }
    let n_labels = 1usize << d;
    let param = input.param / std::f64::consts::SQRT_2;
    let labels: Vec<usize> = input.points.iter().map(|p| parity_label(&p.coeffs)).collect();
    let chosen = match square_sample(kappa, &labels, n_labels, rng) {
        Ok(r) => r.items,
        Err(f) => return Ok(Combined::failed(l.clone(), param, f)),
    };
    let pairs = pair_by_label(&labels, n_labels, &chosen);
    let points = pairs
        .iter()
        .map(|&(j, k)| {
            let (x, y) = (&input.points[j].coeffs, &input.points[k].coeffs);
            LatticePoint::new(x.iter().zip(y).map(|(a, b)| (a + b) / 2).collect())
        })
        .collect();
    let tv = resample_tv(input.claimed_tv_error, input.len(), kappa);
    Ok(Combined { batch: SampleBatch::new(l.clone(), param, Source::Combiner, points, tv), pairs, failure: None })
}

/// For each chosen label, the first two not-yet-used inputs carrying it.
pub(crate) fn pair_by_label(labels: &[usize], n_labels: usize, chosen: &[usize]) -> Vec<(usize, usize)> {
    let mut queues: Vec<Vec<usize>> = vec![Vec::new(); n_labels];
    for (i, &c) in labels.iter().enumerate() {
        queues[c].push(i);
    }
    let mut heads = vec![0usize; n_labels];
    chosen
        .iter()
        .map(|&c| {
            let h = heads[c];
            heads[c] += 2;
            (queues[c][h], queues[c][h + 1])
        })
        .collect()
}

/// `ell` halving steps. The paper profile checks the input size and keeps the
/// first `2^{n/2}` outputs.
pub fn general_pipeline<R: Rng + ?Sized>(
    l: &Basis,
    cfg: &CombinerConfig,
    input: &SampleBatch,
    rng: &mut R,
) -> Result<Combined> {
    check_kappa(cfg.kappa)?;
    let n = l.rank();
    if cfg.consts.is_paper() {
        let need = (32.0 * cfg.kappa).powi(cfg.ell as i32 + 1) * 2f64.powi(n as i32);
        if (input.len() as f64) < need {
            return Err(Error::Precondition(format!("pipeline input has {} points, needs {need}", input.len())));
        }
    }
    let mut cur = Combined { batch: input.clone(), pairs: Vec::new(), failure: None };
    for _ in 0..cfg.ell {
        cur = combine_halve(l, cfg.kappa, &cur.batch, rng)?;
        if cur.failure.is_some() {
            return Ok(cur);
        }
    }
    if cfg.consts.is_paper() && cfg.ell > 0 {
        let keep = 2f64.powf(n as f64 / 2.0).floor() as usize;
        cur.batch.points.truncate(keep);
        cur.pairs.truncate(keep);
    }
    Ok(cur)
}

/// Output of [`general_dgs`].
#[derive(Clone, Debug)]
pub struct GeneralOutput {
    /// Samples in coefficients of the input basis.
    pub batch: SampleBatch,
    pub ell: usize,
    /// Rank of the lattice the start-up samples came from.
    pub sublattice_rank: usize,
    pub failure: Option<ResampleFailure>,
}

/// Rank of the start-up sublattice at width `s` without sampling.
fn prefix_rank(l: &Basis, s: f64, consts: &Constants) -> usize {
    let red = reduce_basis(l, ReductionProfile::Lll);
    let cap = s / (consts.c_start * Constants::log_n(l.rank())).sqrt();
    gram_schmidt(&red.basis).gs_norms.iter().take_while(|&&x| x <= cap).count()
}

/// Discrete Gaussian sampling at any width: start-up samples at `2^{ℓ/2}·s`,
/// then `ℓ` halving steps.
///
/// Under the desk profile `ℓ` is the smallest of 1 and 2 for which the start-up
/// sublattice is all of `L` (2 if neither is), `input_size` start-up samples
/// are drawn, and every output is returned. The paper profile derives `ℓ` and
/// the input size from `κ` and refuses sizes above its cap.
pub fn general_dgs<R: Rng + ?Sized>(
    l: &Basis,
    s: f64,
    kappa: f64,
    input_size: usize,
    consts: &Constants,
    rng: &mut R,
) -> Result<GeneralOutput> {
    check_kappa(kappa)?;
    crate::oracle::rho::check_param(s)?;
    let n = l.rank();
    let (ell, m_in, r) = if consts.is_paper() {
        let ell = consts.general_ell(kappa, n);
        let m = (32.0 * kappa).powi(ell as i32 + 2) * 2f64.powi(n as i32);
        if m > consts.max_input {
            return Err(Error::Precondition(format!("paper-profile input size {m:.3e} exceeds the cap")));
        }
        let r = ((n as f64) / Constants::log_n(n)).floor().max(2.0) as usize;
        (ell, m as usize, r)
    } else {
        let ell = (1..=2).find(|&e| prefix_rank(l, 2f64.powf(e as f64 / 2.0) * s, consts) == n).unwrap_or(2);
        (ell, input_size, 2)
    };
    let s_hat = 2f64.powf(ell as f64 / 2.0) * s;
    let start = start_gauss(l, r, m_in, s_hat, consts, rng)?;
    let cfg = CombinerConfig { kappa, ell, r, a: 0, consts: *consts };
    let out = general_pipeline(&start.sublattice, &cfg, &start.batch, rng)?;
    let points = out.batch.points.iter().map(|p| LatticePoint::new(start.to_input_coeffs(&p.coeffs))).collect();
    let points = if start.degenerate { out.batch.points.iter().map(|_| LatticePoint::zero(n)).collect() } else { points };
    Ok(GeneralOutput {
        batch: SampleBatch::new(l.clone(), s, Source::Combiner, points, out.batch.claimed_tv_error),
        ell,
        sublattice_rank: start.sublattice.rank(),
        failure: out.failure,
    })
}
