mod common;

use std::f64::consts::PI;

use common::rng;
use lattice_dgs::batch::{LatticePoint, Source};
use lattice_dgs::lattice::basis::parse_decimal;
use lattice_dgs::lattice::{Basis, Rational};
use lattice_dgs::oracle::{cvp_exact, lambda1, ExactSampler};
use lattice_dgs::reductions::{
    approx_cvp, covariance_statistic, decide_gapsvp, optimal_svp_param, solve_svp, DgsProvider, ExactProvider,
};
use lattice_dgs::{Result, SampleBatch};
use rand::RngCore;

fn int(x: i64) -> Rational {
    Rational::from_integer(x.into())
}

fn target(xs: &[&str]) -> Vec<Rational> {
    xs.iter().map(|x| parse_decimal(x).unwrap()).collect()
}

#[test]
fn shortest_vector_of_z4() {
    let out = solve_svp(&Basis::identity(4), &mut ExactProvider::new(), 1000, &mut rng(61)).unwrap();
    assert_eq!(out.norm_sq, Some(int(1)));
    assert_eq!(out.norm, 1.0);
}

#[test]
fn shortest_vector_of_a_skewed_basis() {
    let b = Basis::from_integer_rows(&[vec![1, 0], vec![10, 1]]).unwrap();
    let out = solve_svp(&b, &mut ExactProvider::new(), 1000, &mut rng(62)).unwrap();
    assert_eq!(out.norm_sq, Some(int(1)));
    // Four unit vectors tie; the greatest coefficient vector is (10, −1).
    let p = out.point.unwrap();
    assert_eq!(p.coeffs, lambda1(&b).unwrap().point.coeffs);
    assert_eq!(p.coeffs, vec![10, -1]);
}

#[test]
fn shortest_vector_of_a_scaled_line() {
    let b = Basis::from_integer_rows(&[vec![7]]).unwrap();
    let out = solve_svp(&b, &mut ExactProvider::new(), 1000, &mut rng(63)).unwrap();
    assert_eq!(out.norm_sq, Some(int(49)));
    assert_eq!(out.point.unwrap().coeffs[0].abs(), 1);
    assert_eq!(out.first_hit, Some(0));
}

#[test]
fn shortest_shell_mass_at_the_optimal_width() {
    let s = optimal_svp_param(1.0, 4).unwrap();
    assert!((s - 1.564_927_243_664_495_4).abs() < 1e-9);
    let exact = ExactSampler::new(&Basis::identity(4), s).unwrap();
    let shell: f64 = exact.support().filter(|(c, _)| c.iter().map(|x| x * x).sum::<i64>() == 1).map(|x| x.1).sum();
    assert!((shell - 0.368_480_6).abs() < 1e-6, "{shell}");
    assert!(shell >= 1.38f64.powi(-4));
}

#[test]
fn covariance_of_point_masses() {
    let z = Basis::identity(3);
    let zeros = SampleBatch::new(z, 2.0, Source::Exact, vec![LatticePoint::zero(3); 5], 0.0);
    assert_eq!(covariance_statistic(&zeros).unwrap().statistic, 1.0 / (2.0 * PI));
    let z2 = Basis::identity(2);
    let one = SampleBatch::new(z2, 4.0, Source::Exact, vec![LatticePoint::new(vec![4, 0])], 0.0);
    assert!((covariance_statistic(&one).unwrap().statistic - (1.0 - 1.0 / (2.0 * PI))).abs() < 1e-12);
}

#[test]
fn covariance_far_above_smoothing() {
    let z2 = Basis::identity(2);
    let exact = ExactSampler::new(&z2, 10.0).unwrap();
    // Exact second moment along one axis, over s², equals 1/(2π).
    let m: f64 = exact.support().map(|(c, p)| p * (c[0] * c[0]) as f64).sum::<f64>() / 100.0;
    assert!((m - 1.0 / (2.0 * PI)).abs() < 1e-12);
    let batch = exact.sample_batch(100_000, &mut rng(64));
    assert!(covariance_statistic(&batch).unwrap().statistic < 0.01);
}

fn gapsvp_rate(d: f64, want_yes: bool, m: usize, runs: u64) -> usize {
    let z4 = Basis::identity(4);
    let mut oracle = ExactProvider::new();
    (0..runs)
        .filter(|&seed| decide_gapsvp(&z4, d, 0.05, &mut oracle, m, &mut rng(500 + seed)).unwrap().yes == want_yes)
        .count()
}

#[test]
fn gapsvp_yes_side_on_z4() {
    let hits = gapsvp_rate(2.0, true, 10_000, 100);
    assert!(hits >= 95, "{hits}");
}

#[test]
fn gapsvp_no_side_on_z4() {
    let hits = gapsvp_rate(0.2, false, 10_000, 100);
    assert!(hits >= 95, "{hits} of 100 answered no");
}

#[test]
fn gapsvp_no_side_with_n5_over_eps2_samples() {
    // n⁵/ε² for n = 4, ε = 0.05.
    let hits = gapsvp_rate(0.2, false, 409_600, 20);
    assert!(hits >= 19, "{hits} of 20 answered no");
}

struct Stingy;

impl DgsProvider for Stingy {
    fn name(&self) -> &'static str {
        "stingy"
    }

    fn request(&mut self, basis: &Basis, s: f64, _m: usize, _rng: &mut dyn RngCore) -> Result<SampleBatch> {
        Ok(SampleBatch::empty(basis.clone(), s, Source::Exact))
    }
}

#[test]
fn under_delivery_means_yes() {
    let d = decide_gapsvp(&Basis::identity(4), 0.2, 0.05, &mut Stingy, 100, &mut rng(65)).unwrap();
    assert!(d.yes);
    assert_eq!(d.statistic, None);
}

#[test]
fn closest_vector_of_a_lattice_point() {
    let out = approx_cvp(&Basis::identity(2), &target(&["2", "3"]), &mut ExactProvider::new(), 1000, &mut rng(66))
        .unwrap();
    assert_eq!(out.point.unwrap().coeffs, vec![2, 3]);
    assert_eq!(out.distance, 0.0);
}

#[test]
fn closest_vector_near_the_origin() {
    let z2 = Basis::identity(2);
    let t = target(&["0.4", "0.1"]);
    assert_eq!(cvp_exact(&z2, &t).unwrap().coeffs, vec![0, 0]);
    let bound = 1.97 * 0.17f64.sqrt() + 1e-12;
    let mut exact_hits = 0;
    for seed in 0..50 {
        let out = approx_cvp(&z2, &t, &mut ExactProvider::new(), 1000, &mut rng(700 + seed)).unwrap();
        let p = out.point.expect("candidate");
        assert!(out.distance <= bound, "{}", out.distance);
        if p.coeffs == vec![0, 0] {
            exact_hits += 1;
        }
    }
    assert!(exact_hits >= 45, "{exact_hits}");
}

#[test]
fn closest_vector_at_a_midpoint() {
    let z = Basis::identity(1);
    for seed in 0..10 {
        let out = approx_cvp(&z, &target(&["0.5"]), &mut ExactProvider::new(), 1000, &mut rng(800 + seed)).unwrap();
        let c = out.point.unwrap().coeffs[0];
        assert!(c == 0 || c == 1, "{c}");
        assert!((out.distance - 0.5).abs() < 1e-12);
    }
}
