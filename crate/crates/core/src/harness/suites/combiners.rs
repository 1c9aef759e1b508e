use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::Outcome;
use crate::combine::{general_dgs, smooth_dgs, HonestBatch, SmoothConfig};
use crate::harness::stats::{chi_squared_independence, gof_shells, DEFAULT_MIN_EXPECTED};
use crate::harness::{random_integer_basis, RunConfig, Status};
use crate::lattice::Basis;
use crate::oracle::ExactSampler;
use crate::prob::ProbVector;
use crate::resample::{sqrt_sample, SqrtQuota};

const HONEST_M: usize = 64;

pub fn rotation_identity(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let z = Basis::identity(1);
    let exact = ExactSampler::new(&z, 3.0).expect("rank 1");
    let clip = |x: i64| (x.clamp(-3, 3) + 3) as usize;
    let mut table = vec![vec![0u64; 7]; 7];
    let mut pairs = 0;
    while pairs < 20_000 {
        let x = exact.sample_coeffs(rng)[0];
        let y = exact.sample_coeffs(rng)[0];
        if (x - y) % 2 != 0 {
            continue;
        }
        table[clip((x + y) / 2)][clip((x - y) / 2)] += 1;
        pairs += 1;
    }
    let r = chi_squared_independence(&table, DEFAULT_MIN_EXPECTED);
    Outcome::p_value(r.p_value, cfg.alpha, "independence of the half-sum and half-difference of equal-parity pairs on Z")
}

/// Law of `(x+y)/2` for independent `x, y` from `exact` conditioned on equal parity.
fn conditional_half_sum(exact: &ExactSampler) -> Vec<(i64, f64)> {
    let support: Vec<(i64, f64)> = exact.support().map(|(c, p)| (c[0], p)).collect();
    let lo = support.iter().map(|x| x.0).min().unwrap_or(0);
    let hi = support.iter().map(|x| x.0).max().unwrap_or(0);
    let mut mass = vec![0.0; (hi - lo + 1) as usize];
    for &(x, px) in &support {
        for &(y, py) in &support {
            if (x - y) % 2 == 0 {
                mass[((x + y) / 2 - lo) as usize] += px * py;
            }
        }
    }
    let total: f64 = mass.iter().sum();
    mass.iter().enumerate().map(|(i, m)| (lo + i as i64, m / total)).collect()
}

pub fn exact_conditional_law(cfg: &RunConfig, _rng: &mut ChaCha20Rng) -> Outcome {
    let z = Basis::identity(1);
    let mut worst = 0.0f64;
    for s in [2f64.sqrt(), 1.0, 3.0] {
        let law = conditional_half_sum(&ExactSampler::new(&z, s).expect("rank 1"));
        let target = ExactSampler::new(&z, s / 2f64.sqrt()).expect("rank 1");
        let want = |u: i64| target.support().find(|(c, _)| c[0] == u).map_or(0.0, |x| x.1);
        for &(u, p) in &law {
            worst = worst.max((p - want(u)).abs());
        }
    }
    Outcome {
        status: if worst <= cfg.identity_tol { Status::Pass } else { Status::Fail },
        measured: worst,
        threshold: cfg.identity_tol,
        detail: "largest pointwise gap between the conditional half-sum law and the narrower Gaussian".into(),
    }
}

fn honest_shape_ok(h: &HonestBatch) -> bool {
    (h.produced_m == 0 || h.produced_m == h.requested_m) && h.batch.len() == h.produced_m
}

pub fn honesty(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let z2 = Basis::identity(2);
    let widths = [0.3, 0.8, 3.0];
    let runs = cfg.trials * widths.len();
    let cut = cfg.alpha / runs as f64;
    let (mut bad_shape, mut bad_law, mut full) = (0, 0, 0);
    for &s in widths.iter().cycle().take(runs) {
        let h = smooth_dgs(&z2, s, HONEST_M, &SmoothConfig::new(2.0), &cfg.consts, rng).expect("valid arguments");
        if !honest_shape_ok(&h) {
            bad_shape += 1;
            continue;
        }
        if h.produced_m > 0 {
            full += 1;
            let exact = ExactSampler::new(&z2, s).expect("rank 2");
            if !gof_shells(&h.batch.points, &exact, DEFAULT_MIN_EXPECTED).p_value.is_none_or(|p| p > cut) {
                bad_law += 1;
            }
        }
    }
    Outcome::count(
        bad_shape + bad_law,
        0,
        format!("{runs} runs: {bad_shape} partial batches, {bad_law} of {full} full batches rejected at p ≤ {cut:.1e}"),
    )
}

pub fn determinism(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let z2 = Basis::identity(2);
    let mut bad = 0;
    for _ in 0..cfg.trials.min(3) {
        let seed: u64 = rng.random();
        let g = || {
            let mut r = ChaCha20Rng::seed_from_u64(seed);
            general_dgs(&z2, 0.8, 30.0, 20_000, &cfg.consts, &mut r).expect("valid arguments").batch
        };
        let h = || {
            let mut r = ChaCha20Rng::seed_from_u64(seed);
            smooth_dgs(&z2, 3.0, 4, &SmoothConfig::new(2.0), &cfg.consts, &mut r).expect("valid arguments").batch
        };
        let (g1, g2) = (g(), g());
        let (h1, h2) = (h(), h());
        if g1.points != g2.points || g1.param.to_bits() != g2.param.to_bits() {
            bad += 1;
        }
        if h1.points != h2.points || h1.param.to_bits() != h2.param.to_bits() {
            bad += 1;
        }
    }
    Outcome::count(bad, 0, "repeated seeded runs with differing output")
}

pub fn all_or_quota(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let mut bad = 0;
    for _ in 0..cfg.trials {
        let b = random_integer_basis(2, 3, rng);
        let s = rng.random_range(0.3..4.0);
        let m = rng.random_range(1..=8);
        let h = smooth_dgs(&b, s, m, &SmoothConfig::new(2.0), &cfg.consts, rng).expect("valid arguments");
        if !honest_shape_ok(&h) || h.requested_m != m {
            bad += 1;
        }
        let n = rng.random_range(2..=8);
        let items = ProbVector::uniform(n).sampler().stream(rng.random_range(2_000..20_000), rng);
        let q = rng.random_range(1..=200);
        if let Ok(out) = sqrt_sample(2.0, 2.0, &items, n, SqrtQuota::Exact(q), rng) {
            if out.items.len() != q {
                bad += 1;
            }
        }
    }
    Outcome::count(bad, 0, "outputs that were neither the full quota nor empty")
}
