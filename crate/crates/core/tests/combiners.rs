mod common;

use common::{rng, within_sigmas};
use lattice_dgs::combine::{
    combine_halve, general_dgs, general_pipeline, parity_label, smooth_dgs, sqrt_combine, tower_pipeline,
    CombinerConfig, SmoothConfig,
};
use lattice_dgs::harness::stats::{chi_squared_counts, chi_squared_two_sample, gof_points, gof_shells};
use lattice_dgs::lattice::{make_tower, Basis, Quotient, Rational};
use lattice_dgs::oracle::{coset_weights, ExactSampler};
use lattice_dgs::profile::Constants;
use lattice_dgs::sampling::start_gauss;
use lattice_dgs::SampleBatch;

fn two() -> Rational {
    Rational::from_integer(2.into())
}

fn checkerboard() -> Basis {
    Basis::from_integer_rows(&[vec![1, 1], vec![1, -1]]).unwrap()
}

#[test]
fn halving_on_integers() {
    let z = Basis::identity(1);
    let mut r = rng(41);
    let input = ExactSampler::new(&z, 2f64.sqrt()).unwrap().sample_batch(100_000, &mut r);
    let out = combine_halve(&z, 30.0, &input, &mut r).unwrap();
    assert!(out.failure.is_none());
    let target = ExactSampler::new(&z, 1.0).unwrap();
    let res = gof_points(&out.batch.points, &target, 5.0);
    assert!(res.passes(0.01), "{res:?}");
    let zeros = out.batch.points.iter().filter(|p| p.coeffs[0] == 0).count();
    assert!(within_sigmas(zeros, out.batch.len(), 0.920_441_787_835_590_8, 3.0), "{zeros}/{}", out.batch.len());
    for (p, &(j, k)) in out.batch.points.iter().zip(&out.pairs) {
        let (a, b) = (&input.points[j].coeffs, &input.points[k].coeffs);
        assert_eq!(parity_label(a), parity_label(b));
        assert_eq!(p.coeffs[0] * 2, a[0] + b[0]);
    }
}

#[test]
fn pipeline_without_steps_is_identity() {
    let z = Basis::identity(1);
    let mut r = rng(42);
    let input = ExactSampler::new(&z, 2.0).unwrap().sample_batch(1000, &mut r);
    let cfg = CombinerConfig::new(30.0, 0, Constants::desk()).unwrap();
    let out = general_pipeline(&z, &cfg, &input, &mut r).unwrap();
    assert_eq!(out.batch.points, input.points);
}

#[test]
fn two_halvings_on_integers() {
    let z = Basis::identity(1);
    let mut r = rng(43);
    let input = ExactSampler::new(&z, 2.0).unwrap().sample_batch(400_000, &mut r);
    let cfg = CombinerConfig::new(30.0, 2, Constants::desk()).unwrap();
    let out = general_pipeline(&z, &cfg, &input, &mut r).unwrap();
    assert!(out.failure.is_none());
    assert!((out.batch.param - 1.0).abs() < 1e-12);
    let res = gof_points(&out.batch.points, &ExactSampler::new(&z, 1.0).unwrap(), 5.0);
    assert!(res.passes(0.01), "{} outputs: {res:?}", out.batch.len());
}

#[test]
fn two_halvings_with_small_confidence() {
    let z = Basis::identity(1);
    let mut r = rng(143);
    let input = ExactSampler::new(&z, 2.0).unwrap().sample_batch(400_000, &mut r);
    let cfg = CombinerConfig::new(2.0, 2, Constants::desk()).unwrap();
    let out = general_pipeline(&z, &cfg, &input, &mut r).unwrap();
    assert!(out.failure.is_none());
    assert!(out.batch.len() >= 200, "{}", out.batch.len());
    let res = gof_points(&out.batch.points, &ExactSampler::new(&z, 1.0).unwrap(), 5.0);
    assert!(res.passes(0.01), "{res:?}");
}

#[test]
fn one_step_pipeline_is_one_halving() {
    let z = Basis::identity(1);
    let input = ExactSampler::new(&z, 2.0).unwrap().sample_batch(50_000, &mut rng(44));
    let cfg = CombinerConfig::new(30.0, 1, Constants::desk()).unwrap();
    let a = general_pipeline(&z, &cfg, &input, &mut rng(45)).unwrap();
    let b = combine_halve(&z, 30.0, &input, &mut rng(45)).unwrap();
    assert_eq!(a.batch.points, b.batch.points);
    assert_eq!(a.pairs, b.pairs);
}

#[test]
fn general_sampler_below_smoothing() {
    let z2 = Basis::identity(2);
    let out = general_dgs(&z2, 0.8, 30.0, 200_000, &Constants::desk(), &mut rng(46)).unwrap();
    assert!(out.failure.is_none());
    let res = gof_points(&out.batch.points, &ExactSampler::new(&z2, 0.8).unwrap(), 5.0);
    assert!(res.passes(0.01), "{res:?}");
}

#[test]
fn general_sampler_on_integers() {
    let z = Basis::identity(1);
    let out = general_dgs(&z, 1.0, 30.0, 200_000, &Constants::desk(), &mut rng(47)).unwrap();
    let res = gof_shells(&out.batch.points, &ExactSampler::new(&z, 1.0).unwrap(), 5.0);
    assert!(res.passes(0.01), "{res:?}");
}

/// Coordinate histogram on 20 bins of width `s/4` clipped at ±10 bins.
fn binned(points: &[Vec<i64>], s: f64) -> Vec<u64> {
    let mut c = vec![0u64; 40];
    for p in points {
        for &x in p {
            let b = ((x as f64 / (s / 4.0)).floor() as i64).clamp(-20, 19) + 20;
            c[b as usize] += 1;
        }
    }
    c
}

#[test]
fn very_wide_general_sampler_matches_start_up_samples() {
    let z2 = Basis::identity(2);
    let s = 1e6;
    let consts = Constants::desk();
    let out = general_dgs(&z2, s, 30.0, 100_000, &consts, &mut rng(48)).unwrap();
    let start = start_gauss(&z2, 2, out.batch.len(), s, &consts, &mut rng(49)).unwrap();
    let a: Vec<Vec<i64>> = out.batch.points.iter().map(|p| p.coeffs.clone()).collect();
    let b: Vec<Vec<i64>> = start.batch.points.iter().map(|p| start.to_input_coeffs(&p.coeffs)).collect();
    let res = chi_squared_two_sample(&binned(&a, s), &binned(&b, s), 5.0);
    assert!(res.passes(0.01), "{res:?}");
}

#[test]
fn checkerboard_sum_combiner() {
    checkerboard_case(20.0, 50);
}

#[test]
fn checkerboard_sum_combiner_with_small_confidence() {
    checkerboard_case(2.0, 150);
}

fn checkerboard_case(kappa: f64, seed: u64) {
    let l = Basis::identity(2);
    let sub = checkerboard();
    let s = 3.0;
    let consts = Constants::desk();
    let mut r = rng(seed);
    let input = ExactSampler::new(&l, s).unwrap().sample_batch(1_000_000, &mut r);
    let out = sqrt_combine(&l, &sub, kappa, &input, &consts, &mut r).unwrap();
    assert!(out.failure.is_none(), "{:?}", out.failure);
    assert!(out.honest.produced_m > 0, "{} pairs summed, none accepted", out.pairs.len());
    let target = ExactSampler::new(&sub, s * 2f64.sqrt()).unwrap();
    let res = gof_shells(&out.honest.batch.points, &target, 5.0);
    assert!(res.p_value.is_none_or(|p| p > 0.01), "{res:?}");

    let q1 = Quotient::new(&l, &sub).unwrap();
    let q2 = Quotient::new(&sub, &l.scaled(&two())).unwrap();
    let mut labels = vec![0u64; q2.index() as usize];
    for &(j, k) in &out.pairs {
        let (a, b) = (&input.points[j].coeffs, &input.points[k].coeffs);
        assert_eq!(q1.label_index(a), q1.label_index(b));
        let y: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        labels[q2.label_index(&q1.to_sub_coords(&y).unwrap())] += 1;
    }
    for (p, &j) in out.honest.batch.points.iter().zip(&out.chosen) {
        let (a, b) = out.pairs[j];
        let y: Vec<i64> = input.points[a].coeffs.iter().zip(&input.points[b].coeffs).map(|(x, y)| x + y).collect();
        assert_eq!(q1.from_sub_coords(&p.coeffs), y);
    }
    let w = coset_weights(&sub, &l.scaled(&two()), s * 2f64.sqrt()).unwrap();
    let sq: Vec<f64> = w.masses.iter().map(|m| m * m).collect();
    let total: f64 = sq.iter().sum();
    let n = out.pairs.len() as f64;
    let expected: Vec<f64> = sq.iter().map(|x| x / total * n).collect();
    let res = chi_squared_counts(&labels, &expected, 5.0);
    assert!(res.passes(0.01), "{res:?} {labels:?} {expected:?}");
}

fn half_first_axis() -> Basis {
    "2 2\n1/2 0\n0 1\n".parse().unwrap()
}

fn z2_tower() -> lattice_dgs::lattice::Tower {
    make_tower(&Basis::identity(2), &half_first_axis(), 1, 2).unwrap()
}

fn exact_input(b: &Basis, s: f64, m: usize, seed: u64) -> SampleBatch {
    ExactSampler::new(b, s).unwrap().sample_batch(m, &mut rng(seed))
}

#[test]
fn one_level_tower_is_one_sum_combiner() {
    let t = make_tower(&Basis::identity(2), &half_first_axis(), 1, 1).unwrap();
    let consts = Constants::desk();
    let input = exact_input(t.bottom(), 2.0, 200_000, 51);
    let a = tower_pipeline(&t, 2.0, &input, &consts, &mut rng(52)).unwrap();
    let b = sqrt_combine(&t.levels[0], &t.levels[1], 2.0, &input, &consts, &mut rng(52)).unwrap();
    assert_eq!(a.batch.points, b.honest.batch.points);
    assert_eq!(a.produced_m, b.honest.produced_m);
}

#[test]
fn two_level_tower_on_z2() {
    let t = z2_tower();
    t.check().unwrap();
    let consts = Constants::desk();
    let s = 1.5;
    let input = exact_input(t.bottom(), s, 1_000_000, 53);
    let out = tower_pipeline(&t, 2.0, &input, &consts, &mut rng(54)).unwrap();
    assert!(out.produced_m > 0, "tower refused");
    assert!((out.batch.param - 2.0 * s).abs() < 1e-12);
    let res = gof_shells(&out.batch.points, &ExactSampler::new(t.top(), 2.0 * s).unwrap(), 5.0);
    assert!(res.passes(0.01), "{res:?}");
}

#[test]
fn tower_refuses_far_below_smoothing() {
    let t = z2_tower();
    let consts = Constants::desk();
    let empty = (0..100)
        .filter(|&seed| {
            let input = exact_input(t.bottom(), 0.05, 20_000, 100 + seed);
            tower_pipeline(&t, 2.0, &input, &consts, &mut rng(seed)).unwrap().produced_m == 0
        })
        .count();
    assert!(empty >= 95, "{empty}");
}

#[test]
fn smooth_sampler_above_smoothing() {
    let z2 = Basis::identity(2);
    let exact = ExactSampler::new(&z2, 3.0).unwrap();
    let cfg = SmoothConfig::new(2.0);
    let mut full = 0;
    let mut pooled = Vec::new();
    for seed in 0..100 {
        let h = smooth_dgs(&z2, 3.0, 8, &cfg, &Constants::desk(), &mut rng(200 + seed)).unwrap();
        assert!(h.produced_m == 0 || h.produced_m == 8);
        if h.produced_m == 8 {
            full += 1;
            pooled.extend(h.batch.points);
        }
    }
    assert!(full >= 95, "{full}");
    let res = gof_shells(&pooled, &exact, 5.0);
    assert!(res.passes(0.01), "{res:?}");
}

#[test]
fn smooth_sampler_stays_honest_below_smoothing() {
    let z2 = Basis::identity(2);
    let exact = ExactSampler::new(&z2, 0.3).unwrap();
    let cfg = SmoothConfig::new(2.0);
    let mut refused = 0;
    for seed in 0..40 {
        let h = smooth_dgs(&z2, 0.3, 8, &cfg, &Constants::desk(), &mut rng(400 + seed)).unwrap();
        match h.produced_m {
            0 => refused += 1,
            8 => {
                let res = gof_shells(&h.batch.points, &exact, 5.0);
                assert!(res.p_value.is_none_or(|p| p > 0.01 / 40.0), "{res:?}");
            }
            m => panic!("partial batch of {m}"),
        }
    }
    assert!(refused >= 36, "{refused}");
}

#[test]
fn empty_request_is_trivially_met() {
    let z2 = Basis::identity(2);
    let h = smooth_dgs(&z2, 3.0, 0, &SmoothConfig::new(2.0), &Constants::desk(), &mut rng(60)).unwrap();
    assert_eq!(h.produced_m, 0);
    assert_eq!(h.requested_m, 0);
    assert!(h.batch.is_empty());
}
