use num::{BigInt, One};
use rand::Rng;
use rand_chacha::ChaCha20Rng;

use super::{ranks, Outcome};
use crate::batch::LatticePoint;
use crate::harness::{random_integer_basis, RunConfig, Status};
use crate::lattice::linalg::{self, Rational};
use crate::lattice::Basis;
use crate::oracle::{cvp_exact, lambda1, smoothing_param, ExactSampler};
use crate::reductions::{
    approx_cvp, covariance_statistic, embedding_basis, grid_covers, optimal_svp_param, solve_svp, ExactProvider,
    ReductionConstants,
};

pub const SVP_SAMPLES_PER_PARAM: usize = 1000;
pub const CVP_SAMPLES_PER_PARAM: usize = 30_000;

pub fn svp_correctness(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let mut good = 0;
    for _ in 0..cfg.trials {
        let b = random_integer_basis(4, 9, rng);
        let want = lambda1(&b).expect("rank 4").norm_sq;
        let out = solve_svp(&b, &mut ExactProvider::new(), SVP_SAMPLES_PER_PARAM, rng).expect("valid basis");
        if out.norm_sq == Some(want) {
            good += 1;
        }
    }
    Outcome::rate(good, cfg.trials, 0.99, "rank-4 bases where the returned norm equals λ₁")
}

pub fn covariance_separation(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let n = 4;
    let eps = ReductionConstants::default().gapsvp_eps;
    let z4 = Basis::identity(n);
    let eta = smoothing_param(&z4, eps).expect("rank 4").eta;
    let threshold = ReductionConstants::gapsvp_threshold(eps, n);
    let m = 10_000;
    let wide = ExactSampler::new(&z4, 3.0 * eta).expect("rank 4");
    let narrow = ExactSampler::new(&z4, 0.3 * eta).expect("rank 4");
    let (mut below, mut above) = (0, 0);
    for _ in 0..cfg.trials {
        if covariance_statistic(&wide.sample_batch(m, rng)).expect("nonempty").statistic < threshold {
            below += 1;
        }
        if covariance_statistic(&narrow.sample_batch(m, rng)).expect("nonempty").statistic >= threshold {
            above += 1;
        }
    }
    let rate = below.min(above) as f64 / cfg.trials as f64;
    Outcome {
        status: if rate >= 0.95 { Status::Pass } else { Status::Fail },
        measured: rate,
        threshold: 0.95,
        detail: format!("Z⁴, m = {m}: below threshold at 3η in {below}, above at 0.3η in {above} of {} runs", cfg.trials),
    }
}

/// Target `Σ u_i b_i` with each `u_i` a multiple of 1/1000 in `[0, 1)`.
fn box_target(b: &Basis, rng: &mut ChaCha20Rng) -> Vec<Rational> {
    let u: Vec<Rational> = (0..b.rank()).map(|_| Rational::new(rng.random_range(0..1000).into(), 1000.into())).collect();
    linalg::vec_mat(&u, b.rows(), b.ambient_dim())
}

fn distance(b: &Basis, p: &LatticePoint, t: &[Rational]) -> f64 {
    b.ambient_f64(&p.coeffs).iter().zip(t).map(|(x, y)| (x - linalg::rat_to_f64(y)).powi(2)).sum::<f64>().sqrt()
}

pub fn cvp_bound(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let gamma = ReductionConstants::default().cvp_gamma;
    let (mut failed, mut over) = (0, 0);
    for _ in 0..cfg.trials {
        let b = random_integer_basis(3, 9, rng);
        let t = box_target(&b, rng);
        let best = distance(&b, &cvp_exact(&b, &t).expect("rank 3"), &t);
        let out = approx_cvp(&b, &t, &mut ExactProvider::new(), CVP_SAMPLES_PER_PARAM, rng).expect("target in span");
        match out.point {
            None => failed += 1,
            Some(_) if out.distance > gamma * best + 1e-9 => over += 1,
            Some(_) => {}
        }
    }
    let rate = failed as f64 / cfg.trials as f64;
    let status = if over == 0 && rate <= 0.05 { Status::Pass } else { Status::Fail };
    Outcome {
        status,
        measured: over as f64,
        threshold: 0.0,
        detail: format!("{over} outputs beyond {gamma}·dist, {failed} of {} runs without output", cfg.trials),
    }
}

pub fn embedding_sanity(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let dims = ranks(cfg, 1, 4);
    let mut bad = 0;
    for k in 0..cfg.trials {
        let b = random_integer_basis(dims[k % dims.len()], 5, rng);
        let t = box_target(&b, rng);
        let s = Rational::new(rng.random_range(1..50).into(), 10.into());
        let e = embedding_basis(&b, &t, &s).expect("independent rows");
        for _ in 0..20 {
            let c: Vec<i64> = (0..b.rank()).map(|_| rng.random_range(-5..=5)).collect();
            let mut v: Vec<Rational> = b.ambient(&c).iter().zip(&t).map(|(x, y)| x - y).collect();
            v.push(s.clone());
            let mut want: Vec<BigInt> = c.iter().map(|&x| x.into()).collect();
            want.push(BigInt::one());
            if e.coords_of(&v) != Some(want) {
                bad += 1;
            }
        }
    }
    Outcome::count(bad, 0, "embedding points with last coordinate s not matching L − t")
}

pub fn grid_coverage(cfg: &RunConfig, _rng: &mut ChaCha20Rng) -> Outcome {
    let mut missed = 0;
    let mut checked = 0;
    let mut first_miss = None;
    for n in ranks(cfg, 1, 12) {
        let target = optimal_svp_param(1.0, n).expect("positive");
        let top = 2f64.powf(n as f64 / 2.0);
        for i in 0..=1000 {
            let d = top.powf(i as f64 / 1000.0);
            checked += 1;
            if !grid_covers(d, n, target) {
                missed += 1;
                first_miss.get_or_insert((n, d));
            }
        }
    }
    let detail = match first_miss {
        Some((n, d)) => format!("{missed} of {checked} (n, d) pairs uncovered; first n = {n}, d = {d:.4}·λ₁"),
        None => format!("all {checked} (n, d) pairs with λ₁ ≤ d ≤ 2^(n/2)·λ₁ covered"),
    };
    Outcome::count(missed, 0, detail)
}
