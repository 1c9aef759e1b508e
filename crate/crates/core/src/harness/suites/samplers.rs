use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use super::{ranks, Outcome};
use crate::harness::stats::{chi_squared_two_sample, gof_points, ks_two_sample, DEFAULT_MIN_EXPECTED};
use crate::harness::{random_integer_basis, random_unimodular, RunConfig, Status};
use crate::lattice::gso::gram_schmidt;
use crate::lattice::linalg::{self, Rational};
use crate::lattice::sublattice::apply_transform;
use crate::lattice::Basis;
use crate::oracle::{enumerate_ball, ExactSampler};
use crate::profile::Constants;
use crate::sampling::{start_gauss, KleinSampler};

const DRAWS: usize = 100_000;

/// Width comfortably above the nearest-plane precondition for `b`.
fn klein_width(b: &Basis, consts: &Constants) -> f64 {
    let g = gram_schmidt(b);
    1.25 * g.max_gs_norm * (consts.c_gpv * Constants::log_n(b.rank())).sqrt()
}

fn half_integer_basis(n: usize, rng: &mut ChaCha20Rng) -> Basis {
    random_integer_basis(n, 3, rng).scaled(&Rational::new(1.into(), 2.into()))
}

pub fn exactness_at_base(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let dims = ranks(cfg, 1, 3);
    let cut = cfg.alpha / (2 * cfg.trials) as f64;
    let mut worst = 1.0f64;
    let mut failed = 0;
    for t in 0..cfg.trials {
        let b = crate::lattice::reduce_basis(&half_integer_basis(dims[t % dims.len()], rng), crate::lattice::ReductionProfile::Lll).basis;
        let s = klein_width(&b, &cfg.consts);
        let klein = KleinSampler::new(&b, s, &cfg.consts).expect("width above precondition");
        let exact = ExactSampler::new(&b, s).expect("small support");
        let kb = klein.sample_batch(DRAWS, rng);
        let eb = exact.sample_batch(DRAWS, rng);
        let norms = |pts: &[crate::batch::LatticePoint]| pts.iter().map(|p| p.norm(&b)).collect::<Vec<f64>>();
        let ks = ks_two_sample(&norms(&kb.points), &norms(&eb.points)).p_value;
        let chi = gof_points(&kb.points, &exact, DEFAULT_MIN_EXPECTED).p_value.unwrap_or(1.0);
        let p = ks.min(chi);
        worst = worst.min(p);
        if p <= cut {
            failed += 1;
        }
    }
    Outcome {
        status: if failed == 0 { Status::Pass } else { Status::Fail },
        measured: worst,
        threshold: cut,
        detail: format!("smallest p over KS on norms and chi-squared on support, {DRAWS} draws each"),
    }
}

pub fn basis_independence(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let dims = ranks(cfg, 1, 3);
    let cut = cfg.alpha / cfg.trials as f64;
    let mut worst = 1.0f64;
    let mut failed = 0;
    for t in 0..cfg.trials {
        let n = dims[t % dims.len()];
        let b = half_integer_basis(n, rng);
        let u = random_unimodular(n, 4, rng);
        let rows: Vec<Vec<Rational>> = u
            .iter()
            .map(|r| linalg::vec_mat(&r.iter().map(|&x| linalg::rat(x)).collect::<Vec<_>>(), b.rows(), b.ambient_dim()))
            .collect();
        let b2 = Basis::new(rows, b.ambient_dim()).expect("unimodular image");
        let s = klein_width(&b, &cfg.consts).max(klein_width(&b2, &cfg.consts));
        let k1 = KleinSampler::new(&b, s, &cfg.consts).expect("width above precondition");
        let k2 = KleinSampler::new(&b2, s, &cfg.consts).expect("width above precondition");
        let u_big: linalg::IntMatrix = u.iter().map(|r| r.iter().map(|&x| x.into()).collect()).collect();
        let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut a = Vec::new();
        let mut c = Vec::new();
        for _ in 0..DRAWS / 2 {
            let x = k1.sample(rng).coeffs;
            let y = apply_transform(&k2.sample(rng).coeffs, &u_big);
            for (v, first) in [(x, true), (y, false)] {
                let len = index.len();
                let k = *index.entry(v).or_insert(len);
                if k == a.len() {
                    a.push(0u64);
                    c.push(0u64);
                }
                if first {
                    a[k] += 1;
                } else {
                    c[k] += 1;
                }
            }
        }
        let p = chi_squared_two_sample(&a, &c, DEFAULT_MIN_EXPECTED).p_value.unwrap_or(1.0);
        worst = worst.min(p);
        if p <= cut {
            failed += 1;
        }
    }
    Outcome {
        status: if failed == 0 { Status::Pass } else { Status::Fail },
        measured: worst,
        threshold: cut,
        detail: "smallest two-sample p between a basis and a unimodular image".into(),
    }
}

pub fn start_gauss_short_vectors(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let n = 4;
    let r = 2usize;
    let mut bad = 0;
    for _ in 0..5 * cfg.trials {
        let b = random_integer_basis(n, 9, rng);
        let s = rng.random_range(2.0..40.0);
        let sg = start_gauss(&b, r, 1, s, &cfg.consts, rng).expect("valid arguments");
        let radius = s * (r as f64).powf(-(n as f64) / r as f64);
        let zero = vec![Rational::from_integer(0.into()); n];
        for p in enumerate_ball(&b, &zero, radius).expect("rank 4") {
            if p.is_zero() {
                continue;
            }
            let inside = !sg.degenerate && sg.sublattice.coords_of(&p.ambient(&b)).is_some();
            if !inside {
                bad += 1;
            }
        }
    }
    Outcome::count(bad, 0, "short lattice vectors outside the start-up sublattice")
}
