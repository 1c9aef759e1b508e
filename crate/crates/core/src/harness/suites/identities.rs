use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use num::{BigInt, One, Signed, ToPrimitive};
use rand::Rng;
use rand_chacha::ChaCha20Rng;

use super::{ranks, Outcome};
use crate::harness::stats::{chi_squared_counts, DEFAULT_MIN_EXPECTED};
use crate::harness::{random_integer_basis, RunConfig, Status};
use crate::lattice::linalg::{self, rat, Rational};
use crate::lattice::{dual_basis, make_tower, random_superlattice, reduce_basis, Basis, Quotient, ReductionProfile};
use crate::oracle::{exact_dgs_sample, lambda1, rho_sum, smoothing_param};
use crate::reductions::ReductionConstants;

const RHO_TAIL: f64 = 1e-15;

/// Integer basis with entries in `[−bound, bound]`, divided by `den`.
fn dense_basis(n: usize, bound: i64, den: i64, rng: &mut ChaCha20Rng) -> Basis {
    random_integer_basis(n, bound, rng).scaled(&Rational::new(BigInt::one(), BigInt::from(den)))
}

fn rho(b: &Basis, s: f64) -> f64 {
    rho_sum(b, &vec![0.0; b.ambient_dim()], s, RHO_TAIL).expect("rank within limits").value
}

pub fn unimodularity(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let dims = ranks(cfg, 1, 6);
    let mut bad = 0;
    for t in 0..cfg.trials {
        let b = random_integer_basis(dims[t % dims.len()], 9, rng);
        for profile in [ReductionProfile::Lll, ReductionProfile::Exact] {
            let r = reduce_basis(&b, profile);
            let det = linalg::int_det(&r.transform);
            let back = linalg::mat_mul(&linalg::to_rat_matrix(&r.transform), b.rows(), b.ambient_dim());
            if det.abs() != BigInt::one() || back != r.basis.rows() || !r.basis.same_lattice(&b) {
                bad += 1;
            }
        }
    }
    Outcome::count(bad, 0, "reductions whose transform is not unimodular or changes the lattice")
}

pub fn duality_involution(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let dims = ranks(cfg, 1, 6);
    let mut bad = 0;
    for t in 0..cfg.trials {
        let b = dense_basis(dims[t % dims.len()], 9, rng.random_range(1..=5), rng);
        if !dual_basis(&dual_basis(&b)).same_lattice(&b) {
            bad += 1;
        }
    }
    Outcome::count(bad, 0, "bases whose double dual differs")
}

pub fn coset_partition(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let dims = ranks(cfg, 1, 4);
    let mut bad = 0;
    for t in 0..cfg.trials {
        let n = dims[t % dims.len()];
        let l = random_integer_basis(n, 5, rng);
        let (tm, det) = loop {
            let tm: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(-3..=3)).collect()).collect();
            let big: Vec<Vec<BigInt>> = tm.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            let d = linalg::int_det(&big).abs();
            if d > BigInt::from(0) && d <= BigInt::from(64) {
                break (tm, d.to_u64().expect("small"));
            }
        };
        let rows: Vec<Vec<Rational>> = tm
            .iter()
            .map(|r| linalg::vec_mat(&r.iter().map(|&x| rat(x)).collect::<Vec<_>>(), l.rows(), n))
            .collect();
        let sub = Basis::new(rows, n).expect("nonsingular transform");
        let q = Quotient::new(&l, &sub).expect("sublattice");
        let res = q.residues();
        if res.len() as u64 != det || res.iter().enumerate().any(|(i, r)| q.label_index(r) != i) {
            bad += 1;
            continue;
        }
        for _ in 0..50 {
            let x: Vec<i64> = (0..n).map(|_| rng.random_range(-6..=6)).collect();
            let y: Vec<i64> = if rng.random_bool(0.5) {
                let z: Vec<i64> = (0..n).map(|_| rng.random_range(-2..=2)).collect();
                x.iter().zip(q.from_sub_coords(&z)).map(|(a, b)| a + b).collect()
            } else {
                (0..n).map(|_| rng.random_range(-6..=6)).collect()
            };
            let diff: Vec<i64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            if (q.label(&x) == q.label(&y)) != q.to_sub_coords(&diff).is_some() {
                bad += 1;
            }
        }
    }
    Outcome::count(bad, 0, "label/membership disagreements and residue-count mismatches")
}

pub fn tower_invariants(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let dims = ranks(cfg, 2, 5);
    let mut bad = 0;
    for t in 0..cfg.trials {
        let n = dims[t % dims.len()];
        let l = random_integer_basis(n, 5, rng);
        let a = rng.random_range(n.div_ceil(2)..n);
        let ell = rng.random_range(1..=3);
        let ok = random_superlattice(&l, a, rng).and_then(|lp| {
            let tw = make_tower(&l, &lp, a, ell)?;
            tw.check()?;
            Ok(tw.levels[ell].same_lattice(&l) && tw.levels[ell - 1].same_lattice(&lp))
        });
        if !matches!(ok, Ok(true)) {
            bad += 1;
        }
    }
    Outcome::count(bad, 0, "towers failing containment, index or halving checks")
}

pub fn superlattice_equidistribution(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let z2 = Basis::identity(2);
    let mut counts: BTreeMap<(BigInt, linalg::IntMatrix), u64> = BTreeMap::new();
    for _ in 0..3000 {
        let lp = random_superlattice(&z2, 1, rng).expect("valid index");
        *counts.entry(lp.hermite_form()).or_insert(0) += 1;
    }
    if counts.len() != 3 {
        return Outcome::count(counts.len(), 3, "distinct index-2 superlattices of Z² seen (expected 3)");
    }
    let obs: Vec<u64> = counts.values().copied().collect();
    let r = chi_squared_counts(&obs, &[1.0; 3], DEFAULT_MIN_EXPECTED);
    Outcome::p_value(r.p_value, cfg.alpha, format!("3000 draws, counts {obs:?}"))
}

pub fn square_identity(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let dims = ranks(cfg, 1, 3);
    let mut worst = 0.0f64;
    for t in 0..cfg.trials {
        let l = dense_basis(dims[t % dims.len()], 3, 2, rng);
        for s in [0.7, 1.0, 2f64.sqrt(), 3.0] {
            let cw = crate::oracle::coset_weights(&l, &l.scaled(&rat(2)), s).expect("small index");
            let lhs: f64 = cw.masses.iter().map(|m| m * m).sum();
            let r = rho(&l, s / 2f64.sqrt());
            worst = worst.max((lhs - r * r).abs() / (r * r));
        }
    }
    let status = if worst <= cfg.identity_tol { Status::Pass } else { Status::Fail };
    Outcome { status, measured: worst, threshold: cfg.identity_tol, detail: "largest relative error".into() }
}

pub fn banaszczyk_growth(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let dims = ranks(cfg, 1, 3);
    let mut bad = 0;
    for t in 0..cfg.trials {
        let n = dims[t % dims.len()];
        let l = dense_basis(n, 3, 2, rng);
        let base = rho(&l, 1.0);
        for s in [1.5, 2.0, 4.0] {
            if rho(&l, s) > s.powi(n as i32) * base * (1.0 + 1e-12) {
                bad += 1;
            }
        }
    }
    Outcome::count(bad, 0, "violations of ρ_s(L) ≤ sⁿ·ρ(L)")
}

pub fn tail_bound(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let dims = ranks(cfg, 1, 3);
    let draws = 10_000;
    let mut bad = 0;
    for tr in 0..cfg.trials {
        let n = dims[tr % dims.len()];
        let l = dense_basis(n, 3, 2, rng);
        let s = rng.random_range(1.0..3.0);
        let batch = exact_dgs_sample(&l, s, draws, rng).expect("small support");
        let norms: Vec<f64> = batch.points.iter().map(|p| p.norm(&l)).collect();
        for t in [1.0f64, 2.0] {
            let bound = ((2.0 * PI * E * t * t).sqrt() * (-PI * t * t).exp()).powi(n as i32);
            let r = t * s * (n as f64).sqrt();
            let freq = norms.iter().filter(|&&x| x > r).count() as f64 / draws as f64;
            let sigma = (bound * (1.0 - bound).max(0.0) / draws as f64).sqrt();
            if freq > bound + 3.0 * sigma {
                bad += 1;
            }
        }
    }
    Outcome::count(bad, 0, "tail frequencies above the bound by more than 3σ")
}

pub fn smoothing_ratio(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let dims = ranks(cfg, 1, 3);
    let eps = 0.1;
    let floor = (1.0 - eps) / (1.0 + eps);
    let mut worst = f64::INFINITY;
    for t in 0..cfg.trials {
        let n = dims[t % dims.len()];
        let l = dense_basis(n, 3, 2, rng);
        let s = smoothing_param(&l, eps).expect("rank within limits").bracket.1;
        let base = rho(&l, s);
        for _ in 0..100 {
            let c: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let shift = l.rows_f64().iter().zip(&c).fold(vec![0.0; n], |mut acc, (row, ci)| {
                for (a, x) in acc.iter_mut().zip(row) {
                    *a += ci * x;
                }
                acc
            });
            let v = rho_sum(&l, &shift, s, RHO_TAIL).expect("rank within limits").value;
            worst = worst.min(v / base);
        }
    }
    let status = if worst >= floor * (1.0 - 1e-9) { Status::Pass } else { Status::Fail };
    Outcome { status, measured: worst, threshold: floor, detail: "smallest ρ_s(L+t)/ρ_s(L) at s = η_0.1".into() }
}

pub fn double_smoothing(cfg: &RunConfig, _rng: &mut ChaCha20Rng) -> Outcome {
    let z2 = Basis::identity(2);
    let eps = 0.5;
    let k = 2.0;
    let lhs = k * smoothing_param(&z2, eps).expect("rank 2").eta;
    let rhs = smoothing_param(&z2, eps.powf(k * k)).expect("rank 2").eta;
    let _ = cfg;
    Outcome {
        status: if lhs > rhs { Status::Pass } else { Status::Fail },
        measured: lhs,
        threshold: rhs,
        detail: "2·η_0.5(Z²) against η_0.0625(Z²)".into(),
    }
}

pub fn lambda_eta_duality(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let dims = ranks(cfg, 1, 4);
    let beta = ReductionConstants::default().beta;
    let (mut lower_bad, mut upper_small, mut upper_big) = (0, 0, 0);
    for t in 0..cfg.trials {
        let n = dims[t % dims.len()];
        let l = dense_basis(n, 3, 2, rng);
        let l1 = lambda1(&l).expect("rank within limits").norm;
        let dual = dual_basis(&l);
        for eps in [0.3f64, 0.05] {
            let x = l1 * smoothing_param(&dual, eps).expect("rank within limits").eta;
            let nf = n as f64;
            let lower = ((1.0 / eps).ln() / PI).sqrt();
            let upper = if eps > (E / (beta * beta)).powf(-nf / 2.0) {
                (beta * beta * nf / (2.0 * PI * E)).sqrt() * eps.powf(-1.0 / nf)
            } else {
                (((1.0 / eps).ln() + nf * beta.ln()) / PI).sqrt()
            };
            if x <= lower {
                lower_bad += 1;
            }
            if x >= 1.1 * upper {
                if n < 4 {
                    upper_small += 1;
                } else {
                    upper_big += 1;
                }
            }
        }
    }
    let status = if lower_bad + upper_big > 0 {
        Status::Fail
    } else if upper_small > 0 {
        Status::Flag
    } else {
        Status::Pass
    };
    Outcome {
        status,
        measured: (lower_bad + upper_big + upper_small) as f64,
        threshold: 0.0,
        detail: format!("lower violations {lower_bad}, upper violations rank<4 {upper_small}, rank≥4 {upper_big}"),
    }
}

pub fn brute_force_lambda1(cfg: &RunConfig, rng: &mut ChaCha20Rng) -> Outcome {
    let mut bad = 0;
    for _ in 0..cfg.trials {
        let b = random_integer_basis(4, 9, rng);
        let red = reduce_basis(&b, ReductionProfile::Lll).basis;
        let rows: Vec<Vec<i128>> =
            red.rows().iter().map(|r| r.iter().map(|x| x.to_integer().to_i128().expect("integer basis")).collect()).collect();
        let mut best = i128::MAX;
        let mut c = [-6i128; 4];
        loop {
            if c.iter().any(|&x| x != 0) {
                let v: Vec<i128> = (0..4).map(|j| (0..4).map(|i| c[i] * rows[i][j]).sum()).collect();
                best = best.min(v.iter().map(|x| x * x).sum());
            }
            let mut i = 0;
            while i < 4 && c[i] == 6 {
                c[i] = -6;
                i += 1;
            }
            if i == 4 {
                break;
            }
            c[i] += 1;
        }
        let exact = lambda1(&b).expect("rank 4").norm_sq;
        if exact != rat(best as i64) {
            bad += 1;
        }
    }
    Outcome::count(bad, 0, "bases where enumeration and the [−6,6]⁴ box disagree")
}
