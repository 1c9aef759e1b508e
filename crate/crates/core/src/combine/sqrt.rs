use rand::Rng;

use super::halve::pair_by_label;
use super::{check_kappa, resample_tv, HonestBatch};
use crate::batch::{LatticePoint, SampleBatch, Source};
use crate::error::{Error, Result};
use crate::lattice::linalg::rat;
use crate::lattice::{sublattice_transform, Basis, Quotient, Tower};
use crate::profile::Constants;
use crate::resample::{ratio_check, sqrt_sample, square_sample, ResampleFailure, SqrtQuota};

/// The stage at which [`sqrt_combine`] refused.
#[derive(Clone, Debug, PartialEq)]
pub enum SqrtFailure {
    Square(ResampleFailure),
    SizeTest { pairs: usize, needed: f64 },
    RatioCheck,
    Sqrt(ResampleFailure),
}

/// Output of [`sqrt_combine`] with its audit trail.
#[derive(Clone, Debug)]
pub struct SqrtCombined {
    pub honest: HonestBatch,
    /// Input index pairs summed in the first stage.
    pub pairs: Vec<(usize, usize)>,
    /// Indices into `pairs` of the sums that were output, in output order.
    pub chosen: Vec<usize>,
    pub failure: Option<SqrtFailure>,
}

/// Paper-profile output quota `⌊M/(C·κ⁴)⌋`.
fn paper_quota(m: usize, kappa: f64, consts: &Constants) -> usize {
    (m as f64 / (consts.c_sqrt() * kappa.powi(4))).floor() as usize
}

/// Turns samples of `D_{L,s}` into samples of `D_{Lsub,√2·s}`, where
/// `2L ⊆ Lsub ⊆ L` has index `2^a` with `2a ≥ n`.
///
/// Stage one square-samples cosets of `Lsub` and sums pairs from the chosen
/// cosets. Stage two labels the sums by cosets of `2L` in `Lsub`, checks the
/// spread of the first half of the labels, square-root samples the second half
/// and outputs, for each sampled label, the next unused sum carrying it.
/// Any failed test yields an empty batch. Under the desk profile every
/// square-root acceptance is kept and `requested_m` is the realized count.
pub fn sqrt_combine<R: Rng + ?Sized>(
    l: &Basis,
    lsub: &Basis,
    kappa: f64,
    input: &SampleBatch,
    consts: &Constants,
    rng: &mut R,
) -> Result<SqrtCombined> {
    check_kappa(kappa)?;
    if input.basis_id() != l.id() {
        return Err(Error::InvalidArgument("input batch is not expressed in the given basis".into()));
    }
    let n = l.rank();
    let q1 = Quotient::new(l, lsub)?;
    let idx = q1.index();
    if !idx.is_power_of_two() || 2 * (idx.trailing_zeros() as usize) < n {
        return Err(Error::Precondition(format!("sublattice index {idx} is not 2^a with 2a ≥ n")));
    }
    sublattice_transform(lsub, &l.scaled(&rat(2)))
        .map_err(|e| Error::Precondition(format!("2L is not contained in the sublattice: {e}")))?;
    let q2 = Quotient::new(lsub, &l.scaled(&rat(2)))?;

    let m = input.len();
    let out_param = input.param * std::f64::consts::SQRT_2;
    let quota = if consts.is_paper() { Some(paper_quota(m, kappa, consts)) } else { None };
    let refuse = |pairs: Vec<(usize, usize)>, f: SqrtFailure| SqrtCombined {
        honest: HonestBatch::refused(SampleBatch::empty(lsub.clone(), out_param, Source::Combiner), quota.unwrap_or(0)),
        pairs,
        chosen: Vec::new(),
        failure: Some(f),
    };

    let labels1: Vec<usize> = input.points.iter().map(|p| q1.label_index(&p.coeffs)).collect();
    let chosen1 = match square_sample(kappa, &labels1, idx as usize, rng) {
        Ok(r) => r.items,
        Err(f) => return Ok(refuse(Vec::new(), SqrtFailure::Square(f))),
    };
    let pairs = pair_by_label(&labels1, idx as usize, &chosen1);
    let sums: Vec<Vec<i64>> = pairs
        .iter()
        .map(|&(j, k)| {
            let y: Vec<i64> = input.points[j].coeffs.iter().zip(&input.points[k].coeffs).map(|(a, b)| a + b).collect();
            q1.to_sub_coords(&y).expect("sum of two points of one coset lies in the sublattice")
        })
        .collect();

    let q = sums.len();
    let needed = m as f64 / (32.0 * kappa * consts.sqrt_t);
    if (q as f64) < needed {
        return Ok(refuse(pairs, SqrtFailure::SizeTest { pairs: q, needed }));
    }
    let n2 = q2.index() as usize;
    let labels2: Vec<usize> = sums.iter().map(|y| q2.label_index(y)).collect();
    let half = q / 2;
    if !ratio_check(consts.sqrt_t_prime, &labels2[..half], n2) {
        return Ok(refuse(pairs, SqrtFailure::RatioCheck));
    }
    let sq = match quota {
        Some(want) => SqrtQuota::Exact(want),
        None => SqrtQuota::All,
    };
    let picked = match sqrt_sample(kappa, consts.sqrt_t_prime, &labels2[half..], n2, sq, rng) {
        Ok(r) => r.items,
        Err(f) => return Ok(refuse(pairs, SqrtFailure::Sqrt(f))),
    };

    let mut queues: Vec<Vec<usize>> = vec![Vec::new(); n2];
    for (i, &c) in labels2.iter().enumerate().skip(half) {
        queues[c].push(i);
    }
    let mut heads = vec![0usize; n2];
    let mut chosen = Vec::with_capacity(picked.len());
    for &c in &picked {
        // Each accepted label consumed at least one occurrence of it in the stream.
        let j = queues[c][heads[c]];
        heads[c] += 1;
        chosen.push(j);
    }
    let points = chosen.iter().map(|&j| LatticePoint::new(sums[j].clone())).collect();
    let tv = resample_tv(input.claimed_tv_error, m, kappa);
    let batch = SampleBatch::new(lsub.clone(), out_param, Source::Combiner, points, tv);
    let requested = quota.unwrap_or(batch.len());
    Ok(SqrtCombined { honest: HonestBatch::full(batch, requested), pairs, chosen, failure: None })
}

/// Runs [`sqrt_combine`] up the tower, from samples over the bottom level to
/// samples over the top level at `2^{ℓ/2}` times the width.
pub fn tower_pipeline<R: Rng + ?Sized>(
    tower: &Tower,
    kappa: f64,
    input: &SampleBatch,
    consts: &Constants,
    rng: &mut R,
) -> Result<HonestBatch> {
    let mut cur = input.clone();
    let mut last = None;
    for i in 1..=tower.ell {
        let step = sqrt_combine(&tower.levels[i - 1], &tower.levels[i], kappa, &cur, consts, rng)?;
        if step.failure.is_some() || step.honest.is_empty() {
            let param = input.param * 2f64.powf(tower.ell as f64 / 2.0);
            let empty = SampleBatch::empty(tower.top().clone(), param, Source::Combiner);
            return Ok(HonestBatch::refused(empty, step.honest.requested_m));
        }
        cur = step.honest.batch.clone();
        last = Some(step.honest);
    }
    Ok(last.unwrap_or_else(|| HonestBatch::full(input.clone(), input.len())))
}
