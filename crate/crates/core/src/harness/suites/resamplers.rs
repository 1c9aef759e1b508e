use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::Outcome;
use crate::harness::RunConfig;
use crate::prob::ProbVector;
use crate::resample::{sqrt_coin, sqrt_sample, square_sample, ResampleFailure, SqrtQuota};

fn random_probs(n: usize, rng: &mut ChaCha20Rng) -> ProbVector {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    ProbVector::from_weights(&w).expect("positive weights")
}

fn counts(items: &[usize], n: usize) -> Vec<u64> {
    let mut c = vec![0u64; n];
    for &i in items {
        c[i] += 1;
    }
    c
}

pub fn square_sqrt_inversion(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let mut worst = 0.0f64;
    for _ in 0..10 * cfg.trials {
        let p = random_probs(rng.random_range(1..=16), rng);
        for q in [p.squared().sqrt(), p.sqrt().squared()] {
            let d = q.probs.iter().zip(&p.probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst = worst.max(d);
        }
    }
    let tol = 1e-12;
    Outcome {
        status: if worst <= tol { crate::harness::Status::Pass } else { crate::harness::Status::Fail },
        measured: worst,
        threshold: tol,
        detail: "largest entrywise error of sqrt∘squared and squared∘sqrt".into(),
    }
}

pub fn square_output_size(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let p = ProbVector::from_weights(&[2.0, 1.0]).expect("valid");
    let (kappa, m) = (30.0, 100_000);
    let bound = m as f64 * p.p_col / (32.0 * kappa * p.p_max);
    let sampler = p.sampler();
    let mut short = 0;
    let mut smallest = f64::INFINITY;
    for _ in 0..cfg.trials {
        let items = sampler.stream(m, rng);
        if let Ok(out) = square_sample(kappa, &items, 2, rng) {
            let got = out.items.len() as f64;
            smallest = smallest.min(got);
            if got < bound {
                short += 1;
            }
        }
    }
    let mut o = Outcome::count(short, 0, format!("runs below M·p_col/(32κ·p_max) = {bound:.2}; smallest output {smallest}"));
    o.threshold = bound;
    o
}

pub fn sqrt_coin_unlimited(_cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let trials = 100_000;
    let mut worst = 0.0f64;
    for p in [0.1f64, 0.5, 0.9] {
        let target = p.sqrt();
        let mut flips = ChaCha20Rng::seed_from_u64(rng.random());
        let hits = (0..trials)
            .filter(|_| {
                let coins = std::iter::repeat_with(|| flips.random_bool(p));
                sqrt_coin(coins, usize::MAX, rng)
            })
            .count();
        let sigma = (target * (1.0 - target) / trials as f64).sqrt();
        worst = worst.max((hits as f64 / trials as f64 - target).abs() / sigma);
    }
    Outcome {
        status: if worst <= 3.0 { crate::harness::Status::Pass } else { crate::harness::Status::Fail },
        measured: worst,
        threshold: 3.0,
        detail: "largest deviation from √p in standard errors".into(),
    }
}

pub fn conservation(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let mut bad = 0;
    let mut runs = 0;
    for _ in 0..cfg.trials {
        let n = rng.random_range(2..=8);
        let p = random_probs(n, rng);
        let items = p.sampler().stream(20_000, rng);
        let inp = counts(&items, n);
        if let Ok(out) = square_sample(20.0, &items, n, rng) {
            runs += 1;
            let c = counts(&out.items, n);
            bad += c.iter().zip(&inp).filter(|(o, i)| 2 * **o > **i).count();
        }
        let t = p.max_ratio().max(1.0);
        if let Ok(out) = sqrt_sample(2.0, t, &items, n, SqrtQuota::All, rng) {
            runs += 1;
            let c = counts(&out.items, n);
            bad += c.iter().zip(&inp).filter(|(o, i)| **o > **i).count();
        }
    }
    Outcome::count(bad, 0, format!("elements emitted beyond their input accounting over {runs} runs"))
}

pub fn structured_failures(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let mut bad = 0;
    for _ in 0..cfg.trials {
        // Too short to estimate the maximum probability.
        if square_sample(30.0, &[0, 1, 0], 2, rng) != Err(ResampleFailure::Exhausted) {
            bad += 1;
        }
        // A point mass on a large alphabet exceeds the spread bound.
        if !matches!(sqrt_sample(2.0, 1.0, &vec![0; 4000], 16, SqrtQuota::All, rng), Err(ResampleFailure::PmaxTooLarge { .. })) {
            bad += 1;
        }
        let items = ProbVector::uniform(4).sampler().stream(2000, rng);
        match sqrt_sample(2.0, 2.0, &items, 4, SqrtQuota::Exact(1_000_000), rng) {
            Err(_) => {}
            Ok(_) => bad += 1,
        }
    }
    Outcome::count(bad, 0, "failure paths that did not report the expected structured failure")
}
